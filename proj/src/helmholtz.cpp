#include "hcs/helmholtz.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hcs/error.hpp"

namespace hcs {

namespace {

template <class Scalar>
Scalar from_complex(std::complex<double> z);

template <>
double from_complex<double>(std::complex<double> z) {
    return z.real();
}

template <>
std::complex<double> from_complex<std::complex<double>>(std::complex<double> z) {
    return z;
}

}  // namespace

HelmholtzSolver::HelmholtzSolver(Grid grid, CoefficientField coeffs, std::vector<double> sigma, SolverOptions options)
    : coeffs_(std::move(coeffs)),
      sigma_(std::move(sigma)),
      options_(options),
      coarse_{grid, DiscreteOperator::assemble(grid, coeffs_)} {
    if (options_.richardson) {
        Grid fine = grid.refined();
        fine_ = Level{fine, DiscreteOperator::assemble(fine, coeffs_)};
    }
}

double HelmholtzSolver::distance_to_spectrum(std::complex<double> omega) const {
    double d = std::numeric_limits<double>::infinity();
    for (double lam : sigma_) d = std::min(d, std::abs(omega - lam));
    return d;
}

void HelmholtzSolver::check_resonance(std::complex<double> omega) const {
    for (std::size_t l = 0; l < sigma_.size(); ++l) {
        const double lam = sigma_[l];
        if (std::abs(omega - lam) < options_.resonance_band * std::max(1.0, lam)) {
            std::ostringstream os;
            os.precision(17);
            os << "near-resonance: omega = " << omega.real();
            if (omega.imag() != 0.0) os << (omega.imag() > 0 ? "+" : "") << omega.imag() << "i";
            os << " is within the exclusion band of lambda_" << l + 1 << " = " << lam;
            throw ResonanceError(os.str(), lam, static_cast<int>(l + 1));
        }
    }
}

template <class Scalar>
std::vector<Field<Scalar>> HelmholtzSolver::ladder_on(const Level& level, std::complex<double> omega,
                                                       const BoundaryDatum& g, int m) const {
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Sparse = Eigen::SparseMatrix<Scalar>;
    const DiscreteOperator& op = level.op;
    const Grid& grid = level.grid;
    const Eigen::Index n = op.unknowns();
    const Scalar w = from_complex<Scalar>(omega);

    Sparse system = op.stiffness.template cast<Scalar>();
    for (Eigen::Index i = 0; i < n; ++i) system.coeffRef(i, i) -= w * op.mass[i];
    system.makeCompressed();

    Eigen::SparseLU<Sparse, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(system);
    lu.factorize(system);
    if (lu.info() != Eigen::Success) {
        std::ostringstream os;
        os << "sparse LU failed for omega = " << omega << " on " << n << " unknowns: " << lu.lastErrorMessage();
        throw SolverError(os.str());
    }

    std::vector<double> gvals(grid.size(), 0.0);
    for (const auto& b : grid.boundary()) gvals[b.node] = g(grid.node(b.node));

    Vec rhs = Vec::Zero(n);
    for (const auto& c : op.boundary) rhs[c.row] += Scalar(c.weight * gvals[c.node]);

    std::vector<Field<Scalar>> out;
    Vec previous;
    for (int k = 0; k <= m; ++k) {
        if (k > 0) rhs = (Scalar(static_cast<double>(k)) * op.mass.template cast<Scalar>()).cwiseProduct(previous);
        Vec interior = lu.solve(rhs);
        if (lu.info() != Eigen::Success) throw SolverError("sparse LU back-substitution failed");

        Field<Scalar> field;
        field.omega = omega;
        field.order = k;
        field.values = Vec::Zero(static_cast<Eigen::Index>(grid.size()));
        if (k == 0) {
            for (std::size_t f = 0; f < grid.size(); ++f) field.values[static_cast<Eigen::Index>(f)] = Scalar(gvals[f]);
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            field.values[static_cast<Eigen::Index>(op.nodes[static_cast<std::size_t>(i)])] = interior[i];
        }
        field.residual = n > 0 ? (system * interior - rhs).cwiseAbs().maxCoeff() : 0.0;
        field.gradient = nodal_gradient<Scalar>(grid, field.values);
        out.push_back(std::move(field));
        previous = std::move(interior);
    }
    return out;
}

template <class Scalar>
std::vector<Field<Scalar>> HelmholtzSolver::ladder(std::complex<double> omega, const BoundaryDatum& g, int m) const {
    if (m < 0) throw InputError("derivative order must be non-negative");
    check_resonance(omega);
    std::vector<Field<Scalar>> coarse = ladder_on<Scalar>(coarse_, omega, g, m);
    if (!fine_) return coarse;

    const std::vector<Field<Scalar>> fine = ladder_on<Scalar>(*fine_, omega, g, m);
    const Grid& cg = coarse_.grid;
    const Grid& fg = fine_->grid;
    const Scalar four(4.0);
    const Scalar three(3.0);
    for (std::size_t k = 0; k < coarse.size(); ++k) {
        auto& c = coarse[k];
        const auto& f = fine[k];
        for (std::size_t node = 0; node < cg.size(); ++node) {
            Index3 idx = cg.multi_index(node);
            for (auto& i : idx) i *= 2;
            const std::size_t fnode = fg.flat_index(idx);
            const auto ci = static_cast<Eigen::Index>(node);
            c.values[ci] = (four * f.values[static_cast<Eigen::Index>(fnode)] - c.values[ci]) / three;
            for (std::size_t a = 0; a < 3; ++a) c.gradient[node][a] = (four * f.gradient[fnode][a] - c.gradient[node][a]) / three;
        }
        c.residual = std::max(c.residual, f.residual);
    }
    return coarse;
}

SolutionField HelmholtzSolver::solve(double omega, const BoundaryDatum& g) const {
    return std::move(ladder<double>(omega, g, 0).front());
}

std::vector<SolutionField> HelmholtzSolver::solve_ladder(double omega, const BoundaryDatum& g, int m) const {
    return ladder<double>(omega, g, m);
}

ComplexField HelmholtzSolver::solve_complex(std::complex<double> omega, const BoundaryDatum& g) const {
    return std::move(ladder<std::complex<double>>(omega, g, 0).front());
}

SolutionField HelmholtzSolver::omega_derivative(const SolutionField& base, int m) const {
    if (m < 1) throw InputError("omega_derivative needs m >= 1");
    if (base.order != 0) throw InputError("omega_derivative expects the order-0 solution as base");
    const Grid& grid = coarse_.grid;
    if (static_cast<std::size_t>(base.values.size()) != grid.size()) {
        throw InputError("base field does not live on the solver grid");
    }
    check_resonance(base.omega);
    const DiscreteOperator& op = coarse_.op;
    const Eigen::Index n = op.unknowns();
    const double w = base.omega.real();

    Eigen::SparseMatrix<double> system = op.stiffness;
    for (Eigen::Index i = 0; i < n; ++i) system.coeffRef(i, i) -= w * op.mass[i];
    system.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(system);
    if (lu.info() != Eigen::Success) throw SolverError("sparse LU failed in omega_derivative");

    Eigen::VectorXd previous(n);
    for (Eigen::Index i = 0; i < n; ++i) previous[i] = base.values[static_cast<Eigen::Index>(op.nodes[static_cast<std::size_t>(i)])];
    Eigen::VectorXd interior;
    Eigen::VectorXd rhs;
    for (int k = 1; k <= m; ++k) {
        rhs = static_cast<double>(k) * op.mass.cwiseProduct(previous);
        interior = lu.solve(rhs);
        previous = interior;
    }
    SolutionField field;
    field.omega = base.omega;
    field.order = m;
    field.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()));
    for (Eigen::Index i = 0; i < n; ++i) field.values[static_cast<Eigen::Index>(op.nodes[static_cast<std::size_t>(i)])] = interior[i];
    field.residual = (system * interior - rhs).cwiseAbs().maxCoeff();
    field.gradient = nodal_gradient<double>(grid, field.values);
    return field;
}

ClosedForm1D::ClosedForm1D(const Domain& interval, double left, double right, double omega) : omega_(omega) {
    if (interval.dim() != 1) throw InputError("closed-form 1D solution requires an interval");
    const double b = interval.side(0);
    if (omega > 0.0) {
        branch_ = Branch::Oscillatory;
        k_ = std::sqrt(omega);
        const double s = std::sin(k_ * b);
        if (std::abs(s) < 1e-12) {
            const double j = std::round(k_ * b / std::numbers::pi);
            const double lam = (j * std::numbers::pi / b) * (j * std::numbers::pi / b);
            std::ostringstream os;
            os.precision(17);
            os << "resonance: omega = " << omega << " coincides with lambda_" << j << " = " << lam;
            throw ResonanceError(os.str(), lam, static_cast<int>(j));
        }
        a_ = left;
        b_ = (right - left * std::cos(k_ * b)) / s;
    } else if (omega == 0.0) {
        branch_ = Branch::Linear;
        a_ = left;
        b_ = (right - left) / b;
    } else {
        branch_ = Branch::Hyperbolic;
        k_ = std::sqrt(-omega);
        a_ = left;
        b_ = (right - left * std::cosh(k_ * b)) / std::sinh(k_ * b);
    }
}

double ClosedForm1D::value(double x) const {
    switch (branch_) {
        case Branch::Oscillatory:
            return a_ * std::cos(k_ * x) + b_ * std::sin(k_ * x);
        case Branch::Hyperbolic:
            return a_ * std::cosh(k_ * x) + b_ * std::sinh(k_ * x);
        case Branch::Linear:
            break;
    }
    return a_ + b_ * x;
}

double ClosedForm1D::derivative(double x) const {
    switch (branch_) {
        case Branch::Oscillatory:
            return k_ * (-a_ * std::sin(k_ * x) + b_ * std::cos(k_ * x));
        case Branch::Hyperbolic:
            return k_ * (a_ * std::sinh(k_ * x) + b_ * std::cosh(k_ * x));
        case Branch::Linear:
            break;
    }
    return b_;
}

SolutionField ClosedForm1D::sample(const Grid& grid) const {
    if (grid.dim() != 1) throw InputError("closed-form 1D solution sampled on a non-1D grid");
    SolutionField f;
    f.omega = omega_;
    f.values.resize(static_cast<Eigen::Index>(grid.size()));
    f.gradient.assign(grid.size(), {0.0, 0.0, 0.0});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.node(i)[0];
        f.values[static_cast<Eigen::Index>(i)] = value(x);
        f.gradient[i][0] = derivative(x);
    }
    return f;
}

ClosedForm1D solve_closed_form_1d(const Domain& interval, double left, double right, double omega) {
    return ClosedForm1D(interval, left, right, omega);
}

ModalCoefficients spectral_coefficients(const std::vector<double>& pairing, const Spectrum& spectrum, double omega,
                                        double resonance_band) {
    if (pairing.size() != spectrum.size()) throw InputError("pairing count does not match the spectrum");
    ModalCoefficients mc;
    mc.omega = omega;
    mc.pairing = pairing;
    mc.coefficient.reserve(pairing.size());
    for (std::size_t l = 0; l < pairing.size(); ++l) {
        const double lam = spectrum.pairs[l].lambda;
        if (std::abs(omega - lam) < resonance_band * std::max(1.0, lam)) {
            std::ostringstream os;
            os.precision(17);
            os << "near-resonance: omega = " << omega << " is within the exclusion band of lambda_" << l + 1 << " = "
               << lam;
            throw ResonanceError(os.str(), lam, static_cast<int>(l + 1));
        }
        mc.coefficient.push_back(-pairing[l] / (lam - omega));
    }
    return mc;
}

double q_inner(const Grid& grid, const CoefficientField& coeffs, const Eigen::VectorXd& a, const Eigen::VectorXd& b,
               QuadratureRule rule) {
    const std::vector<double> w = grid.volume_weights(rule);
    double s = 0.0;
    for (std::size_t f = 0; f < grid.size(); ++f) {
        const auto i = static_cast<Eigen::Index>(f);
        s += w[f] * coeffs.q(grid.node(f)) * a[i] * b[i];
    }
    return s;
}

SpectralSolution solve_spectral(const Spectrum& spectrum, const std::vector<double>& pairing, double omega,
                                const Grid& grid, const SolutionField& lift, const CoefficientField& coeffs,
                                double tail_tolerance) {
    if (static_cast<std::size_t>(lift.values.size()) != grid.size()) throw InputError("lift does not live on the grid");
    const ModalCoefficients mc = spectral_coefficients(pairing, spectrum, omega);

    SpectralSolution out;
    out.field.omega = omega;
    out.field.values = lift.values;
    out.field.gradient = lift.gradient;
    const std::size_t L = spectrum.size();
    std::vector<double> sup(L, 0.0);
    for (std::size_t l = 0; l < L; ++l) {
        const Eigen::VectorXd phi = eigenfunction_values(spectrum, l, grid);
        const std::vector<Point> grad = eigenfunction_gradients(spectrum, l, grid);
        const double d = mc.coefficient[l] - q_inner(grid, coeffs, lift.values, phi);
        out.corrections.push_back(d);
        out.field.values += d * phi;
        for (std::size_t f = 0; f < grid.size(); ++f) {
            for (std::size_t a = 0; a < 3; ++a) out.field.gradient[f][a] += d * grad[f][a];
        }
        sup[l] = phi.cwiseAbs().maxCoeff();
    }
    const std::size_t tail = std::max<std::size_t>(1, L / 10);
    for (std::size_t l = L - tail; l < L; ++l) out.tail_estimate += std::abs(out.corrections[l]) * sup[l];
    const double scale = std::max(1.0, out.field.values.cwiseAbs().maxCoeff());
    out.tail_warning = out.tail_estimate > tail_tolerance * scale;
    return out;
}

std::complex<double> zeta(const HelmholtzSolver& solver, const BoundaryDatum& g, std::size_t node,
                          std::complex<double> omega) {
    const ComplexField u = solver.solve_complex(omega, g);
    const ComplexField v = omega.imag() == 0.0 ? u : solver.solve_complex(std::conj(omega), g);
    std::complex<double> z{0.0, 0.0};
    for (std::size_t a = 0; a < 3; ++a) z += u.gradient[node][a] * std::conj(v.gradient[node][a]);
    return z;
}

std::complex<double> zeta(const HelmholtzSolver& solver, const BoundaryDatum& g, const Point& x,
                          std::complex<double> omega) {
    const auto node = solver.grid().find_node(x);
    if (!node) throw InputError("zeta needs x to be a grid node");
    return zeta(solver, g, *node, omega);
}

}  // namespace hcs
