#pragma once

#include <Eigen/Core>
#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "hcs/boundary.hpp"
#include "hcs/discrete_operator.hpp"
#include "hcs/eigenbasis.hpp"
#include "hcs/geometry.hpp"

namespace hcs {

/// Nodal samples of u (order 0) or of its m-th frequency derivative, with the nodal gradient.
template <class Scalar>
struct Field {
    std::complex<double> omega{0.0, 0.0};
    int order = 0;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values;
    std::vector<std::array<Scalar, 3>> gradient;
    /// Max-norm residual of the discrete equation on interior rows.
    double residual = 0.0;

    std::vector<double> gradient_norms() const {
        std::vector<double> n(gradient.size());
        for (std::size_t i = 0; i < gradient.size(); ++i) n[i] = magnitude(gradient[i]);
        return n;
    }
};

using SolutionField = Field<double>;
using ComplexField = Field<std::complex<double>>;

struct SolverOptions {
    /// Frequencies with |omega - lambda_l| < band * max(1, lambda_l) are rejected.
    double resonance_band = 1e-6;
    /// Solve on the grid and on its refinement and combine (4 u_{h/2} - u_h) / 3 at the grid nodes.
    bool richardson = false;
};

/// Direct finite-difference solver for -div(a grad u) - omega q u = 0, u = g on the boundary.
///
/// `sigma` lists the eigenvalues used for the resonance guard; pass the spectrum matching the
/// discretization (or the exact one when it is known).
class HelmholtzSolver {
public:
    HelmholtzSolver(Grid grid, CoefficientField coeffs, std::vector<double> sigma, SolverOptions options = {});

    const Grid& grid() const { return coarse_.grid; }
    const CoefficientField& coeffs() const { return coeffs_; }
    const std::vector<double>& sigma() const { return sigma_; }
    const SolverOptions& options() const { return options_; }

    /// Throws ResonanceError when omega is inside the exclusion band of some eigenvalue.
    void check_resonance(std::complex<double> omega) const;
    double distance_to_spectrum(std::complex<double> omega) const;

    SolutionField solve(double omega, const BoundaryDatum& g) const;
    /// u and its omega-derivatives of order 1..m, all from one factorization.
    std::vector<SolutionField> solve_ladder(double omega, const BoundaryDatum& g, int m) const;
    ComplexField solve_complex(std::complex<double> omega, const BoundaryDatum& g) const;

    /// m-th omega-derivative from an order-0 field on this solver's grid, by the recursion
    /// (A - omega Q) w_k = k Q w_{k-1}, w_k = 0 on the boundary.
    SolutionField omega_derivative(const SolutionField& base, int m) const;

private:
    struct Level {
        Grid grid;
        DiscreteOperator op;
    };

    template <class Scalar>
    std::vector<Field<Scalar>> ladder_on(const Level& level, std::complex<double> omega, const BoundaryDatum& g,
                                         int m) const;
    template <class Scalar>
    std::vector<Field<Scalar>> ladder(std::complex<double> omega, const BoundaryDatum& g, int m) const;

    CoefficientField coeffs_;
    std::vector<double> sigma_;
    SolverOptions options_;
    Level coarse_;
    std::optional<Level> fine_;
};

/// Exact solution of -u'' - omega u = 0 on (0,b) with u(0) = left, u(b) = right.
class ClosedForm1D {
public:
    ClosedForm1D(const Domain& interval, double left, double right, double omega);

    double omega() const { return omega_; }
    double value(double x) const;
    double derivative(double x) const;
    SolutionField sample(const Grid& grid) const;

private:
    enum class Branch { Oscillatory, Linear, Hyperbolic };
    Branch branch_ = Branch::Linear;
    double omega_ = 0.0;
    double k_ = 0.0;
    double a_ = 0.0;  // coefficient of cos / cosh / 1
    double b_ = 0.0;  // coefficient of sin / sinh / x
};

ClosedForm1D solve_closed_form_1d(const Domain& interval, double left, double right, double omega);

struct ModalCoefficients {
    double omega = 0.0;
    std::vector<double> pairing;      ///< (g, psi_l)
    std::vector<double> coefficient;  ///< (u, phi_l)_q = -(g, psi_l) / (lambda_l - omega)
};

ModalCoefficients spectral_coefficients(const std::vector<double>& pairing, const Spectrum& spectrum, double omega,
                                        double resonance_band = 1e-6);

struct SpectralSolution {
    SolutionField field;
    std::vector<double> corrections;  ///< (u, phi_l)_q - (v, phi_l)_q
    double tail_estimate = 0.0;
    bool tail_warning = false;
};

/// u = v + sum_l [(u, phi_l)_q - (v, phi_l)_q] phi_l with the lift v (trace g, typically the
/// a-harmonic discrete solve at omega = 0) sampled on `lift`'s grid.
SpectralSolution solve_spectral(const Spectrum& spectrum, const std::vector<double>& pairing, double omega,
                                const Grid& grid, const SolutionField& lift, const CoefficientField& coeffs,
                                double tail_tolerance = 1e-3);

/// (a, b)_q over the grid with the given nodal quadrature.
double q_inner(const Grid& grid, const CoefficientField& coeffs, const Eigen::VectorXd& a, const Eigen::VectorXd& b,
               QuadratureRule rule = QuadratureRule::Simpson);

/// zeta_x(omega) = grad u_omega(x) . conj(grad u_conj(omega)(x)) at grid node `node`.
std::complex<double> zeta(const HelmholtzSolver& solver, const BoundaryDatum& g, std::size_t node,
                          std::complex<double> omega);
std::complex<double> zeta(const HelmholtzSolver& solver, const BoundaryDatum& g, const Point& x,
                          std::complex<double> omega);

}  // namespace hcs
