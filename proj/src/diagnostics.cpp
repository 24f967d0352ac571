#include "hcs/diagnostics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hcs/error.hpp"

namespace hcs {

namespace {

struct LineFit {
    double slope = 0.0;
    double residual = 0.0;
};

// Least squares y ~ X beta; returns beta and the RMS residual.
Eigen::VectorXd least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double& rms) {
    const Eigen::VectorXd beta = x.colPivHouseholderQr().solve(y);
    rms = std::sqrt((x * beta - y).squaredNorm() / static_cast<double>(y.size()));
    return beta;
}

LineFit line_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    LineFit out;
    if (xs.size() < 2) return out;
    Eigen::MatrixXd x(xs.size(), 2);
    Eigen::VectorXd y(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        x(static_cast<Eigen::Index>(i), 0) = xs[i];
        x(static_cast<Eigen::Index>(i), 1) = 1.0;
        y[static_cast<Eigen::Index>(i)] = ys[i];
    }
    out.slope = least_squares(x, y, out.residual)[0];
    return out;
}

double factorial(int m) {
    double f = 1.0;
    for (int k = 2; k <= m; ++k) f *= k;
    return f;
}

double c1_norm(const Spectrum& spectrum, std::size_t l, const Grid& grid) {
    const double value_sup = eigenfunction_values(spectrum, l, grid).cwiseAbs().maxCoeff();
    double grad_sup = 0.0;
    for (const Point& v : eigenfunction_gradients(spectrum, l, grid)) grad_sup = std::max(grad_sup, norm(v));
    return value_sup + grad_sup;
}

}  // namespace

FitResult weyl_fit(const Spectrum& spectrum, int dim) {
    constexpr std::size_t kMinCount = 50;
    constexpr std::size_t kFirst = 10;
    if (spectrum.size() < kMinCount) {
        throw InputError("Weyl fit needs at least " + std::to_string(kMinCount) + " eigenvalues, got " +
                         std::to_string(spectrum.size()));
    }
    if (dim < 1 || dim > 3) throw InputError("Weyl fit dimension must be 1, 2 or 3");

    FitResult r;
    r.l_min = kFirst;
    r.l_max = spectrum.size();
    const double expected = 2.0 / dim;
    const std::size_t n = r.l_max - r.l_min + 1;
    Eigen::MatrixXd x(n, 3);
    Eigen::VectorXd y(n);
    std::vector<double> xs;
    std::vector<double> ys;
    r.low = std::numeric_limits<double>::infinity();
    r.high = 0.0;
    for (std::size_t l = r.l_min; l <= r.l_max; ++l) {
        const auto i = static_cast<Eigen::Index>(l - r.l_min);
        const double ll = static_cast<double>(l);
        const double lam = spectrum.pairs[l - 1].lambda;
        x(i, 0) = std::log(ll);
        x(i, 1) = 1.0;
        x(i, 2) = std::pow(ll, -1.0 / dim);
        y[i] = std::log(lam);
        xs.push_back(std::log(ll));
        ys.push_back(std::log(lam));
        const double ratio = lam / std::pow(ll, expected);
        r.low = std::min(r.low, ratio);
        r.high = std::max(r.high, ratio);
    }
    r.exponent = least_squares(x, y, r.residual)[0];
    r.raw_slope = line_fit(xs, ys).slope;
    r.pass = std::abs(r.exponent - expected) <= 0.05;
    return r;
}

FitResult coefficient_bound_check(const std::vector<double>& pairing, const Spectrum& spectrum, std::size_t l_min) {
    if (pairing.size() > spectrum.size()) throw InputError("more pairings than eigenpairs");
    FitResult r;
    double pmax = 0.0;
    for (double p : pairing) pmax = std::max(pmax, std::abs(p));

    bool finite = true;
    r.low = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> nonzero;
    for (std::size_t l = 0; l < pairing.size(); ++l) {
        const double ratio = std::abs(pairing[l]) / spectrum.pairs[l].lambda;
        finite = finite && std::isfinite(ratio);
        r.high = std::max(r.high, ratio);
        if (std::abs(pairing[l]) > 1e-12 * pmax) {
            nonzero.push_back(l);
            r.low = std::min(r.low, ratio);
        }
    }
    if (nonzero.empty()) r.low = 0.0;

    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t l : nonzero) {
        if (l + 1 < l_min) continue;
        xs.push_back(std::log(spectrum.pairs[l].lambda));
        ys.push_back(std::log(std::abs(pairing[l]) / spectrum.pairs[l].lambda));
    }
    if (xs.size() < 2) {
        xs.clear();
        ys.clear();
        for (std::size_t l : nonzero) {
            xs.push_back(std::log(spectrum.pairs[l].lambda));
            ys.push_back(std::log(std::abs(pairing[l]) / spectrum.pairs[l].lambda));
        }
    }
    const LineFit f = line_fit(xs, ys);
    r.exponent = f.slope;
    r.raw_slope = f.slope;
    r.residual = f.residual;
    r.l_min = std::min(l_min, pairing.size());
    r.l_max = pairing.size();
    r.pass = finite && r.exponent <= 1e-9;
    return r;
}

FitResult c1_growth_fit(const Spectrum& spectrum, const Grid& grid, std::size_t l_min) {
    FitResult r;
    const std::size_t first = spectrum.size() > l_min ? l_min : 1;
    r.l_min = first;
    r.l_max = spectrum.size();
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<double> norms;
    for (std::size_t l = first; l <= spectrum.size(); ++l) {
        const double n = c1_norm(spectrum, l - 1, grid);
        norms.push_back(n);
        xs.push_back(std::log(spectrum.pairs[l - 1].lambda));
        ys.push_back(std::log(n));
    }
    const LineFit f = line_fit(xs, ys);
    r.exponent = f.slope;
    r.raw_slope = f.slope;
    r.residual = f.residual;
    r.low = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < norms.size(); ++i) {
        const double c = norms[i] / std::exp(r.exponent * xs[i]);
        r.low = std::min(r.low, c);
        r.high = std::max(r.high, c);
    }
    r.pass = std::isfinite(r.exponent) && std::isfinite(r.high);
    return r;
}

std::vector<ResolventCheck> resolvent_identity_check(const HelmholtzSolver& solver, const BoundaryDatum& g,
                                                     const Spectrum& spectrum, double omega, int m,
                                                     std::size_t l_max) {
    if (m < 0 || m > 3) throw InputError("resolvent identity check supports orders 0..3");
    if (l_max < 1 || l_max > spectrum.size()) throw InputError("resolvent identity check: mode index out of range");
    const Grid& grid = solver.grid();
    const CoefficientField& coeffs = solver.coeffs();
    const std::vector<SolutionField> ladder = solver.solve_ladder(omega, g, m);

    const std::vector<double> gs = boundary_samples(g, grid);
    const double gnorm = std::sqrt(boundary_inner(grid, gs, gs));
    std::vector<ResolventCheck> out;
    for (std::size_t l = 0; l < l_max; ++l) {
        const Eigen::VectorXd phi = eigenfunction_values(spectrum, l, grid);
        const std::vector<double> psi = boundary_flux(spectrum, l, coeffs, grid);
        const double p = boundary_inner(grid, gs, psi);
        const bool member = std::abs(p) > 1e-12 * gnorm * std::sqrt(boundary_inner(grid, psi, psi));
        const double gap = spectrum.pairs[l].lambda - omega;
        for (int k = 0; k <= m; ++k) {
            ResolventCheck c;
            c.order = k;
            c.l = l + 1;
            c.pairing = p;
            c.lhs = q_inner(grid, coeffs, ladder[static_cast<std::size_t>(k)].values, phi);
            c.rhs = -factorial(k) * p / std::pow(gap, k + 1);
            c.residual = member ? std::abs(c.lhs - c.rhs) / std::abs(c.rhs) : std::abs(c.lhs - c.rhs);
            out.push_back(c);
        }
    }
    return out;
}

double max_residual(const std::vector<ResolventCheck>& checks) {
    double r = 0.0;
    for (const auto& c : checks) r = std::max(r, c.residual);
    return r;
}

double holomorphy_deviation(const HelmholtzSolver& solver, const BoundaryDatum& g, double omega, double h) {
    if (!(h > 0.0)) throw InputError("difference step must be positive");
    const double dist = solver.distance_to_spectrum(omega);
    if (h >= dist) {
        throw ResonanceError("difference step " + std::to_string(h) + " reaches the spectrum (distance " +
                                 std::to_string(dist) + ")",
                             omega, 0);
    }
    const SolutionField base = solver.solve(omega, g);
    const SolutionField derivative =
        solver.options().richardson ? solver.solve_ladder(omega, g, 1)[1] : solver.omega_derivative(base, 1);
    const SolutionField plus = solver.solve(omega + h, g);
    const SolutionField minus = solver.solve(omega - h, g);
    const Eigen::VectorXd centered = (plus.values - minus.values) / (2.0 * h);
    return (derivative.values - centered).cwiseAbs().maxCoeff();
}

double zeta_mean_value_residual(const HelmholtzSolver& solver, const BoundaryDatum& g, std::size_t node,
                                double omega, double radius, int n) {
    if (!(radius > 0.0) || n < 4) throw InputError("mean-value check needs a positive radius and n >= 4");
    if (radius >= solver.distance_to_spectrum(omega)) {
        throw ResonanceError("mean-value circle encloses an eigenvalue", omega, 0);
    }
    const std::complex<double> center = zeta(solver, g, node, omega);
    std::complex<double> mean{0.0, 0.0};
    for (int k = 0; k < n; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / n;
        mean += zeta(solver, g, node, omega + std::polar(radius, theta));
    }
    mean /= static_cast<double>(n);
    return std::abs(center - mean) / std::max(std::abs(center), 1e-300);
}

SandwichCheck sandwich_check(const Spectrum& variable, const Spectrum& laplacian, double lambda_bound) {
    if (!(lambda_bound >= 1.0)) throw InputError("ellipticity bound must be >= 1");
    SandwichCheck s;
    s.bound = lambda_bound;
    const std::size_t n = std::min(variable.size(), laplacian.size());
    s.low = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < n; ++l) {
        const double ratio = variable.pairs[l].lambda / laplacian.pairs[l].lambda;
        s.ratios.push_back(ratio);
        s.low = std::min(s.low, ratio);
        s.high = std::max(s.high, ratio);
    }
    const double b2 = lambda_bound * lambda_bound;
    s.pass = n > 0 && s.low >= 1.0 / b2 && s.high <= b2;
    return s;
}

SeriesTailCheck series_tail_check(const Spectrum& spectrum, const std::vector<double>& pairing, const Grid& grid,
                                  double omega, int m, double growth_exponent) {
    if (pairing.size() != spectrum.size()) throw InputError("pairing count does not match the spectrum");
    if (spectrum.size() < 4) throw InputError("series tail check needs at least 4 pairs");
    SeriesTailCheck s;
    s.order = m;
    s.minimal_order = static_cast<int>(std::floor(growth_exponent + grid.dim() / 2.0)) + 1;
    const std::size_t full = spectrum.size();
    const std::size_t half = full / 2;
    for (std::size_t l = full / 4; l < full; ++l) {
        const double gap = spectrum.pairs[l].lambda - omega;
        if (gap == 0.0) throw ResonanceError("omega coincides with an eigenvalue", omega, static_cast<int>(l + 1));
        const double term = factorial(m) * std::abs(pairing[l]) / std::pow(std::abs(gap), m + 1) *
                            c1_norm(spectrum, l, grid);
        (l < half ? s.tail_half : s.tail_full) += term;
    }
    s.pass = s.tail_full < s.tail_half;
    return s;
}

}  // namespace hcs
