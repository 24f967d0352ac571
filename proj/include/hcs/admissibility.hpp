#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hcs/boundary.hpp"
#include "hcs/eigenbasis.hpp"
#include "hcs/geometry.hpp"

namespace hcs {

struct AdmissibilityOptions {
    /// Relative threshold eps_adm: a group sum counts as nonzero when
    /// |S_lambda(x)| > eps_adm * (sum_l |(g,psi_l)| ||grad phi_l||_inf + tiny).
    double threshold = 1e-9;
    /// Relative tolerance of the O_l membership test; non-members contribute nothing.
    double membership_tol = 1e-12;
    /// Also classify boundary nodes. Box edges and corners are never admissible.
    bool include_boundary = false;
    bool keep_group_sums = false;
    /// Use only the first `truncation` pairs (0 = all).
    std::size_t truncation = 0;
};

struct AdmissibilityVerdict {
    std::size_t node = 0;
    Point x{};
    bool admissible = false;
    std::optional<std::size_t> witness_group;  ///< index into Spectrum::groups
    double witness_lambda = 0.0;               ///< meaningful only with a witness
    double max_norm = 0.0;                     ///< largest |S_lambda(x)| over tested groups
    std::vector<Point> group_sums;             ///< per tested group, when kept
};

struct AdmissibilityReport {
    std::vector<AdmissibilityVerdict> points;
    bool global = false;
    std::vector<std::size_t> failures;  ///< indices into `points`
    std::size_t truncation = 0;
    double threshold = 0.0;
    std::optional<int> axis;            ///< set for the strong variant (0-based)
    std::vector<std::size_t> groups;    ///< groups tested, in increasing eigenvalue order
    std::vector<std::string> warnings;
};

/// Precomputed eigen-gradients and boundary pairings shared by the admissibility checks.
class ModalData {
public:
    ModalData(const BoundaryDatum& g, const Spectrum& spectrum, const CoefficientField& coeffs, const Grid& grid,
              const AdmissibilityOptions& options = {});

    const std::vector<std::vector<std::size_t>>& groups() const { return groups_; }
    double group_lambda(std::size_t group) const { return lambdas_[groups_[group].front()]; }
    bool last_group_complete() const { return last_group_complete_; }
    const Grid& grid() const { return grid_; }
    std::size_t modes() const { return pairing_.size(); }
    /// Raw (g, psi_l).
    const std::vector<double>& pairing() const { return pairing_; }
    /// (g, psi_l), zeroed where g is not in O_l.
    const std::vector<double>& effective_pairing() const { return effective_; }
    const std::vector<bool>& membership() const { return membership_; }
    const std::vector<Point>& gradients(std::size_t l) const { return gradients_[l]; }
    double gradient_sup(std::size_t l, std::optional<int> axis) const;

    /// S_lambda(x) for group `group` at grid node `node`.
    Point group_sum(std::size_t group, std::size_t node) const;

private:
    std::vector<std::vector<std::size_t>> groups_;
    std::vector<double> lambdas_;
    bool last_group_complete_ = false;
    Grid grid_;
    std::vector<double> pairing_;
    std::vector<double> effective_;
    std::vector<bool> membership_;
    std::vector<std::vector<Point>> gradients_;
};

/// g in O_l iff |(g, psi_l)| > tol ||g||_{L2(boundary)} ||psi_l||_{L2(boundary)}. `l` is 1-based.
bool o_l_membership(const BoundaryDatum& g, const Spectrum& spectrum, int l, const CoefficientField& coeffs,
                    const Grid& grid, double tol = 1e-12);

AdmissibilityReport admissibility_map(const ModalData& data, const AdmissibilityOptions& options = {});
AdmissibilityReport admissibility_map(const BoundaryDatum& g, const Spectrum& spectrum, const CoefficientField& coeffs,
                                      const Grid& grid, const AdmissibilityOptions& options = {});

/// Same search using the single component sum_l (g,psi_l) d/dx_axis phi_l(x); axis is 0-based.
AdmissibilityReport strong_admissibility_map(const ModalData& data, int axis, const AdmissibilityOptions& options = {});
AdmissibilityReport strong_admissibility_map(const BoundaryDatum& g, const Spectrum& spectrum,
                                             const CoefficientField& coeffs, const Grid& grid, int axis,
                                             const AdmissibilityOptions& options = {});

/// Nodes where every tested group sum vanishes (the complement of the admissible set).
std::vector<Point> detect_occulting(const AdmissibilityReport& report);
std::vector<Point> detect_occulting(const BoundaryDatum& g, const Spectrum& spectrum, const CoefficientField& coeffs,
                                    const Grid& grid, const AdmissibilityOptions& options = {});

/// Nodes where |grad phi_l(x)| <= threshold * ||grad phi_l||_inf for every l.
std::vector<std::size_t> vanishing_eigengradient_nodes(const ModalData& data, double threshold = 1e-9,
                                                       bool include_boundary = false);

}  // namespace hcs
