#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hcs/eigenbasis.hpp"
#include "hcs/geometry.hpp"

namespace hcs {

/// Real Dirichlet datum g, evaluated on (or near) the boundary.
class BoundaryDatum {
public:
    using Fn = std::function<double(const Point&)>;

    BoundaryDatum(Fn fn, std::string description);

    static BoundaryDatum constant(double c);
    /// g(x) = x_axis / b_axis.
    static BoundaryDatum linear(const Domain& domain, int axis);
    /// 1D datum with g(0) = left and g(b) = right, extended linearly.
    static BoundaryDatum endpoints(const Domain& interval, double left, double right);
    /// g(x) = sum over m in {0..modes-1}^d of c_m prod_i cos(m_i pi x_i / b_i), with c_m uniform in
    /// [-1, 1] drawn from a 64-bit Mersenne twister seeded with `seed`.
    static BoundaryDatum random_fourier(const Domain& domain, std::uint64_t seed, int modes);
    /// Tabulated samples, evaluated at the nearest sample point.
    static BoundaryDatum table(std::vector<Point> points, std::vector<double> values);

    double operator()(const Point& x) const { return fn_(x); }
    const std::string& description() const { return description_; }

    BoundaryDatum scaled(double c) const;
    /// alpha * g1 + beta * g2.
    static BoundaryDatum combine(double alpha, const BoundaryDatum& g1, double beta, const BoundaryDatum& g2);

private:
    Fn fn_;
    std::string description_;
};

/// (g, psi_l) in L2(boundary) for every pair of the spectrum, by trapezoid quadrature over the
/// faces of `grid` (a two-point sum in 1D).
std::vector<double> boundary_pairings(const BoundaryDatum& g, const Spectrum& spectrum, const CoefficientField& coeffs,
                                      const Grid& grid);

/// Boundary inner product of nodal samples taken at grid.boundary() entries.
double boundary_inner(const Grid& grid, const std::vector<double>& a, const std::vector<double>& b);
std::vector<double> boundary_samples(const BoundaryDatum& g, const Grid& grid);

}  // namespace hcs
