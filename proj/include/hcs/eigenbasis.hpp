#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <memory>
#include <vector>

#include "hcs/geometry.hpp"

namespace hcs {

enum class Backend { ClosedForm, Numeric };

/// One Dirichlet eigenpair of -div(a grad phi) = lambda q phi, normalized so that
/// the q-weighted L2 norm is one.
struct EigenPair {
    int index = 0;  ///< 1-based position in the sorted spectrum
    double lambda = 0.0;
    /// Closed form: sine mode numbers (l_1, ..., l_d); zero on unused axes.
    Index3 modes{0, 0, 0};
    /// Closed form: sign applied to the analytic product of sines.
    double sign = 1.0;
    /// Numeric: nodal values on the spectrum grid, zero on the boundary.
    Eigen::VectorXd values;
};

struct Spectrum {
    Backend backend = Backend::ClosedForm;
    Domain domain;
    std::shared_ptr<const Grid> grid;  ///< numeric backend only
    std::vector<EigenPair> pairs;
    /// Multiplicity groups as 0-based indices into `pairs`, in increasing eigenvalue order.
    std::vector<std::vector<std::size_t>> groups;
    double cluster_tol = 0.0;
    /// lambda_{L+1} when it was computed, used to detect a group cut by the truncation.
    std::optional<double> next_lambda;

    std::size_t size() const { return pairs.size(); }
    std::vector<double> eigenvalues() const;
    /// False when the last group may continue beyond the truncation.
    bool last_group_complete() const;
    /// Flips the sign of eigenfunction k (0-based).
    void flip_sign(std::size_t k);
    /// 0-based group id of every pair.
    std::vector<std::size_t> group_ids() const;
};

/// Default relative clustering tolerance for exact closed-form spectra.
inline constexpr double kClosedFormClusterTol = 1e-8;

/// First L eigenpairs of the Dirichlet Laplacian on a box (a = I, q = 1), sorted by eigenvalue with
/// lexicographic tie-break on the mode numbers, grouped with kClosedFormClusterTol.
Spectrum closed_form_spectrum(const Domain& domain, int count);

/// First L eigenpairs of the discrete generalized problem A v = lambda Q v on the grid.
Spectrum numeric_spectrum(const CoefficientField& coeffs, const Grid& grid, int count);

/// Merges consecutive eigenvalues whose relative gap is at most cluster_tol.
Spectrum group_multiplicities(Spectrum spectrum, double cluster_tol);

double closed_form_value(const Domain& domain, const EigenPair& pair, const Point& x);
Point closed_form_gradient(const Domain& domain, const EigenPair& pair, const Point& x);

/// Eigenfunction k (0-based) sampled at every node of `grid`. A numeric spectrum must share the grid layout.
Eigen::VectorXd eigenfunction_values(const Spectrum& spectrum, std::size_t k, const Grid& grid);
std::vector<Point> eigenfunction_gradients(const Spectrum& spectrum, std::size_t k, const Grid& grid);

/// psi_k = (a grad phi_k) . nu at every entry of grid.boundary(). Exact for the closed form,
/// one-sided second order for numeric eigenvectors.
std::vector<double> boundary_flux(const Spectrum& spectrum, std::size_t k, const CoefficientField& coeffs,
                                  const Grid& grid);

/// max_{l,m} | int q phi_l phi_m - delta_lm | by nodal quadrature on `grid`.
double check_orthonormality(const Spectrum& spectrum, const CoefficientField& coeffs, const Grid& grid,
                            QuadratureRule rule = QuadratureRule::Trapezoid);

}  // namespace hcs
