#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hcs/boundary.hpp"
#include "hcs/eigenbasis.hpp"
#include "hcs/geometry.hpp"
#include "hcs/helmholtz.hpp"

namespace hcs {

/// Empirical power law observed ~ C * predicted^exponent over l in [l_min, l_max].
struct FitResult {
    double exponent = 0.0;
    double low = 0.0;   ///< smallest observed/predicted ratio
    double high = 0.0;  ///< largest observed/predicted ratio
    double residual = 0.0;  ///< RMS residual of the log fit
    std::size_t l_min = 0;
    std::size_t l_max = 0;
    double raw_slope = 0.0;  ///< plain least-squares log-log slope
    bool pass = false;
};

/// Weyl growth of the spectrum. `exponent` is s of the two-term model
/// log lambda_l = s log l + c + k l^(-1/d) fitted over l >= 10; low/high are the extremes of
/// lambda_l / l^(2/d). Passes when |s - 2/d| <= 0.05. Needs L >= 50.
FitResult weyl_fit(const Spectrum& spectrum, int dim);

/// Ratios |(g, psi_l)| / lambda_l. `high` is the largest ratio (the empirical C), `exponent` the
/// log-log slope of the ratio against lambda over nonzero pairings with l >= l_min. Passes when
/// every ratio is finite and the slope is not positive.
FitResult coefficient_bound_check(const std::vector<double>& pairing, const Spectrum& spectrum,
                                  std::size_t l_min = 10);

/// Fits ||phi_l||_inf + ||grad phi_l||_inf ~ c lambda_l^P on the grid nodes (l >= l_min);
/// `exponent` is P and low/high bracket c.
FitResult c1_growth_fit(const Spectrum& spectrum, const Grid& grid, std::size_t l_min = 10);

struct ResolventCheck {
    int order = 0;
    std::size_t l = 0;  ///< 1-based
    double lhs = 0.0;   ///< (d^m u / d omega^m, phi_l)_q
    double rhs = 0.0;   ///< -m! (g, psi_l) / (lambda_l - omega)^(m+1)
    double pairing = 0.0;
    /// |lhs - rhs| / |rhs|, or |lhs - rhs| when g is not in O_l.
    double residual = 0.0;
};

/// Both sides of the resolvent identity for orders 0..m and modes 1..l_max, using the solver's
/// omega-derivative ladder and the spectrum's eigenfunctions sampled on the solver grid.
std::vector<ResolventCheck> resolvent_identity_check(const HelmholtzSolver& solver, const BoundaryDatum& g,
                                                     const Spectrum& spectrum, double omega, int m,
                                                     std::size_t l_max);

double max_residual(const std::vector<ResolventCheck>& checks);

/// max over nodes of |d u / d omega - (u(omega + h) - u(omega - h)) / (2h)|. Throws ResonanceError when
/// h >= dist(omega, spectrum).
double holomorphy_deviation(const HelmholtzSolver& solver, const BoundaryDatum& g, double omega, double h);

/// |zeta(omega) - mean of zeta over n points of the circle |z - omega| = radius| / |zeta(omega)|.
double zeta_mean_value_residual(const HelmholtzSolver& solver, const BoundaryDatum& g, std::size_t node,
                                double omega, double radius, int n = 64);

struct SandwichCheck {
    std::vector<double> ratios;  ///< lambda_l / mu_l
    double low = 0.0;
    double high = 0.0;
    double bound = 0.0;  ///< Lambda
    bool pass = false;
};

/// lambda_l / mu_l in [Lambda^-2, Lambda^2] for the first min(sizes) pairs.
SandwichCheck sandwich_check(const Spectrum& variable, const Spectrum& laplacian, double lambda_bound);

struct SeriesTailCheck {
    int order = 0;
    int minimal_order = 0;  ///< smallest m with m > P + d/2
    double tail_half = 0.0; ///< C1-weighted coefficient sum over L/2 < l <= L
    double tail_full = 0.0; ///< same over L < l <= 2L
    bool pass = false;
};

/// Cauchy test for the Fourier series of the m-th omega-derivative: needs 2L pairs in the spectrum.
SeriesTailCheck series_tail_check(const Spectrum& spectrum, const std::vector<double>& pairing, const Grid& grid,
                                  double omega, int m, double growth_exponent);

}  // namespace hcs
