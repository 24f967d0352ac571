#include "hcs/eigenbasis.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hcs/discrete_operator.hpp"
#include "hcs/error.hpp"

namespace hcs {

namespace {

constexpr double kPi = std::numbers::pi;

// Largest interior system the dense eigensolver accepts (d >= 2).
constexpr Eigen::Index kDenseLimit = 4096;

struct Mode {
    double lambda;
    Index3 modes;
};

double mode_lambda(const Domain& domain, const Index3& modes) {
    // Terms are summed in sorted order so that permuted mode numbers on equal sides give
    // bit-identical eigenvalues.
    std::array<double, 3> terms{0.0, 0.0, 0.0};
    for (int k = 0; k < domain.dim(); ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const double l = modes[kk];
        terms[kk] = (l * l) / (domain.side(k) * domain.side(k));
    }
    std::sort(terms.begin(), terms.begin() + domain.dim());
    double s = 0.0;
    for (int k = 0; k < domain.dim(); ++k) s += terms[static_cast<std::size_t>(k)];
    return kPi * kPi * s;
}

void enumerate_modes(const Domain& domain, double cap, int axis, Index3& current, double partial,
                     std::vector<Mode>& out) {
    if (axis == domain.dim()) {
        out.push_back({mode_lambda(domain, current), current});
        return;
    }
    // Remaining axes contribute at least (pi / b_j)^2 each.
    double rest = 0.0;
    for (int j = axis + 1; j < domain.dim(); ++j) rest += (kPi / domain.side(j)) * (kPi / domain.side(j));
    const auto ax = static_cast<std::size_t>(axis);
    for (int l = 1;; ++l) {
        const double term = (l * kPi / domain.side(axis)) * (l * kPi / domain.side(axis));
        if (partial + term + rest > cap) break;
        current[ax] = l;
        enumerate_modes(domain, cap, axis + 1, current, partial + term, out);
    }
    current[ax] = 0;
}

double weyl_cap(const Domain& domain, int count) {
    const int d = domain.dim();
    const double ball = d == 1 ? 2.0 : (d == 2 ? kPi : 4.0 * kPi / 3.0);
    const double scale = std::pow(2.0 * kPi, d) * count / (domain.volume() * ball);
    return 1.5 * std::pow(scale, 2.0 / d) + 1.0;
}

double closed_form_norm(const Domain& domain) {
    double c = 1.0;
    for (double b : domain.sides()) c *= std::sqrt(2.0 / b);
    return c;
}

}  // namespace

std::vector<double> Spectrum::eigenvalues() const {
    std::vector<double> v;
    v.reserve(pairs.size());
    for (const auto& p : pairs) v.push_back(p.lambda);
    return v;
}

bool Spectrum::last_group_complete() const {
    if (pairs.empty() || !next_lambda) return false;
    const double last = pairs.back().lambda;
    return (*next_lambda - last) > cluster_tol * std::abs(last);
}

void Spectrum::flip_sign(std::size_t k) {
    auto& p = pairs.at(k);
    p.sign = -p.sign;
    if (p.values.size() > 0) p.values = -p.values;
}

std::vector<std::size_t> Spectrum::group_ids() const {
    std::vector<std::size_t> ids(pairs.size(), 0);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (std::size_t k : groups[g]) ids[k] = g;
    }
    return ids;
}

Spectrum closed_form_spectrum(const Domain& domain, int count) {
    if (count <= 0) throw InputError("spectrum truncation L must be positive, got " + std::to_string(count));
    const auto want = static_cast<std::size_t>(count) + 1;
    double cap = weyl_cap(domain, count + 1);
    std::vector<Mode> modes;
    for (;;) {
        modes.clear();
        Index3 current{0, 0, 0};
        enumerate_modes(domain, cap, 0, current, 0.0, modes);
        if (modes.size() >= want) break;
        cap *= 2.0;
    }
    std::sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) {
        if (a.lambda != b.lambda) return a.lambda < b.lambda;
        return a.modes < b.modes;
    });

    Spectrum s;
    s.backend = Backend::ClosedForm;
    s.domain = domain;
    for (int i = 0; i < count; ++i) {
        EigenPair p;
        p.index = i + 1;
        p.lambda = modes[static_cast<std::size_t>(i)].lambda;
        p.modes = modes[static_cast<std::size_t>(i)].modes;
        s.pairs.push_back(std::move(p));
    }
    s.next_lambda = modes[static_cast<std::size_t>(count)].lambda;
    return group_multiplicities(std::move(s), kClosedFormClusterTol);
}

Spectrum numeric_spectrum(const CoefficientField& coeffs, const Grid& grid, int count) {
    if (count <= 0) throw InputError("spectrum truncation L must be positive, got " + std::to_string(count));
    const DiscreteOperator op = DiscreteOperator::assemble(grid, coeffs);
    const Eigen::Index n = op.unknowns();
    if (count >= n) {
        throw InputError("spectrum truncation L=" + std::to_string(count) + " must be smaller than the " +
                         std::to_string(n) + " interior nodes");
    }
    if (grid.dim() > 1 && n > kDenseLimit) {
        throw InputError("numeric spectrum needs " + std::to_string(n) + " interior unknowns; the dense solver caps at " +
                         std::to_string(kDenseLimit));
    }

    // Symmetric scaling D A D with D = Q^{-1/2} turns the generalized problem into a standard one.
    const Eigen::VectorXd dscale = op.mass.cwiseSqrt().cwiseInverse();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    if (grid.dim() == 1) {
        Eigen::VectorXd diag(n);
        Eigen::VectorXd sub(std::max<Eigen::Index>(n - 1, 0));
        for (Eigen::Index i = 0; i < n; ++i) {
            diag[i] = op.stiffness.coeff(i, i) * dscale[i] * dscale[i];
            if (i + 1 < n) sub[i] = op.stiffness.coeff(i + 1, i) * dscale[i] * dscale[i + 1];
        }
        solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    } else {
        const Eigen::MatrixXd dense = dscale.asDiagonal() * Eigen::MatrixXd(op.stiffness) * dscale.asDiagonal();
        solver.compute(dense, Eigen::ComputeEigenvectors);
    }
    if (solver.info() != Eigen::Success) {
        const double dmax = op.stiffness.diagonal().maxCoeff();
        const double dmin = op.stiffness.diagonal().minCoeff();
        std::ostringstream os;
        os << "generalized eigensolve failed on " << n << " unknowns (stiffness diagonal range [" << dmin << ", " << dmax
           << "], q range [" << op.mass.minCoeff() << ", " << op.mass.maxCoeff() << "])";
        throw SolverError(os.str());
    }

    const double volume_scale = 1.0 / std::sqrt(grid.cell_volume());
    Spectrum s;
    s.backend = Backend::Numeric;
    s.domain = grid.domain();
    s.grid = std::make_shared<const Grid>(grid);
    for (int i = 0; i < count; ++i) {
        EigenPair p;
        p.index = i + 1;
        p.lambda = solver.eigenvalues()[i];
        if (!(p.lambda > 0.0)) throw SolverError("non-positive discrete eigenvalue at index " + std::to_string(i + 1));
        const Eigen::VectorXd v = dscale.cwiseProduct(solver.eigenvectors().col(i)) * volume_scale;
        const double vmax = v.cwiseAbs().maxCoeff();
        double sign = 1.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (std::abs(v[j]) > 1e-10 * vmax) {
                sign = v[j] > 0.0 ? 1.0 : -1.0;
                break;
            }
        }
        p.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()));
        for (Eigen::Index j = 0; j < n; ++j) {
            p.values[static_cast<Eigen::Index>(op.nodes[static_cast<std::size_t>(j)])] = sign * v[j];
        }
        s.pairs.push_back(std::move(p));
    }
    s.next_lambda = solver.eigenvalues()[count];

    // Discretization error of lambda_1 is about lambda_1 h^2 / 12.
    const double h = grid.max_spacing();
    const double tol = std::min(1e-3, 10.0 * s.pairs.front().lambda * h * h / 12.0);
    return group_multiplicities(std::move(s), tol);
}

Spectrum group_multiplicities(Spectrum spectrum, double cluster_tol) {
    spectrum.cluster_tol = cluster_tol;
    spectrum.groups.clear();
    for (std::size_t k = 0; k < spectrum.pairs.size(); ++k) {
        const bool merge = k > 0 && (spectrum.pairs[k].lambda - spectrum.pairs[k - 1].lambda) <=
                                        cluster_tol * std::abs(spectrum.pairs[k - 1].lambda);
        if (merge) {
            spectrum.groups.back().push_back(k);
        } else {
            spectrum.groups.push_back({k});
        }
    }
    return spectrum;
}

double closed_form_value(const Domain& domain, const EigenPair& pair, const Point& x) {
    double v = pair.sign * closed_form_norm(domain);
    for (int k = 0; k < domain.dim(); ++k) {
        const auto kk = static_cast<std::size_t>(k);
        v *= std::sin(pair.modes[kk] * kPi * x[kk] / domain.side(k));
    }
    return v;
}

Point closed_form_gradient(const Domain& domain, const EigenPair& pair, const Point& x) {
    const int d = domain.dim();
    std::array<double, 3> s{1.0, 1.0, 1.0};
    std::array<double, 3> c{0.0, 0.0, 0.0};
    std::array<double, 3> w{0.0, 0.0, 0.0};
    for (int k = 0; k < d; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        w[kk] = pair.modes[kk] * kPi / domain.side(k);
        s[kk] = std::sin(w[kk] * x[kk]);
        c[kk] = std::cos(w[kk] * x[kk]);
    }
    const double scale = pair.sign * closed_form_norm(domain);
    Point g{};
    for (int k = 0; k < d; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        double v = scale * w[kk] * c[kk];
        for (int j = 0; j < d; ++j) {
            if (j != k) v *= s[static_cast<std::size_t>(j)];
        }
        g[kk] = v;
    }
    return g;
}

Eigen::VectorXd eigenfunction_values(const Spectrum& spectrum, std::size_t k, const Grid& grid) {
    const EigenPair& p = spectrum.pairs.at(k);
    if (spectrum.backend == Backend::Numeric) {
        if (!spectrum.grid || !spectrum.grid->same_layout(grid)) {
            throw InputError("numeric eigenvectors live on a different grid");
        }
        return p.values;
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t f = 0; f < grid.size(); ++f) {
        v[static_cast<Eigen::Index>(f)] = grid.on_boundary(f) ? 0.0 : closed_form_value(spectrum.domain, p, grid.node(f));
    }
    return v;
}

std::vector<Point> eigenfunction_gradients(const Spectrum& spectrum, std::size_t k, const Grid& grid) {
    if (spectrum.backend == Backend::Numeric) {
        return nodal_gradient<double>(grid, eigenfunction_values(spectrum, k, grid));
    }
    const EigenPair& p = spectrum.pairs.at(k);
    std::vector<Point> g(grid.size());
    for (std::size_t f = 0; f < grid.size(); ++f) g[f] = closed_form_gradient(spectrum.domain, p, grid.node(f));
    return g;
}

std::vector<double> boundary_flux(const Spectrum& spectrum, std::size_t k, const CoefficientField& coeffs,
                                  const Grid& grid) {
    const auto& nodes = grid.boundary();
    std::vector<double> psi(nodes.size());
    if (spectrum.backend == Backend::ClosedForm) {
        const EigenPair& p = spectrum.pairs.at(k);
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const Point x = grid.node(nodes[i].node);
            const Point g = closed_form_gradient(spectrum.domain, p, x);
            const Point a = coeffs.a(x);
            const auto ax = static_cast<std::size_t>(nodes[i].axis);
            psi[i] = a[ax] * g[ax] * nodes[i].normal[ax];
        }
        return psi;
    }
    const std::vector<Point> grad = eigenfunction_gradients(spectrum, k, grid);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Point x = grid.node(nodes[i].node);
        const auto ax = static_cast<std::size_t>(nodes[i].axis);
        psi[i] = coeffs.a(x)[ax] * grad[nodes[i].node][ax] * nodes[i].normal[ax];
    }
    return psi;
}

double check_orthonormality(const Spectrum& spectrum, const CoefficientField& coeffs, const Grid& grid,
                            QuadratureRule rule) {
    const std::vector<double> w = grid.volume_weights(rule);
    Eigen::VectorXd wq(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t f = 0; f < grid.size(); ++f) wq[static_cast<Eigen::Index>(f)] = w[f] * coeffs.q(grid.node(f));

    const auto L = static_cast<Eigen::Index>(spectrum.size());
    Eigen::MatrixXd phi(static_cast<Eigen::Index>(grid.size()), L);
    for (Eigen::Index k = 0; k < L; ++k) phi.col(k) = eigenfunction_values(spectrum, static_cast<std::size_t>(k), grid);
    const Eigen::MatrixXd gram = phi.transpose() * wq.asDiagonal() * phi;
    return (gram - Eigen::MatrixXd::Identity(L, L)).cwiseAbs().maxCoeff();
}

}  // namespace hcs
