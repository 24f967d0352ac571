#include "hcs/admissibility.hpp"

#include <cmath>
#include <sstream>

#include "hcs/error.hpp"

namespace hcs {

namespace {

constexpr double kTiny = 1e-300;

AdmissibilityReport classify(const ModalData& data, std::optional<int> axis, const AdmissibilityOptions& options) {
    const Grid& grid = data.grid();
    if (axis && (*axis < 0 || *axis >= grid.dim())) {
        throw InputError("strong admissibility axis " + std::to_string(*axis + 1) + " out of range");
    }

    AdmissibilityReport report;
    report.truncation = data.modes();
    report.threshold = options.threshold;
    report.axis = axis;

    const auto& groups = data.groups();
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        if (gi + 1 == groups.size() && !data.last_group_complete()) {
            std::ostringstream os;
            os.precision(17);
            os << "group at lambda = " << data.group_lambda(gi)
               << " may be cut by the truncation and was excluded";
            report.warnings.push_back(os.str());
            continue;
        }
        report.groups.push_back(gi);
    }

    // Per-group thresholds relative to the achievable size of each group sum.
    std::vector<double> thresholds;
    for (std::size_t gi : report.groups) {
        double scale = 0.0;
        for (std::size_t l : groups[gi]) scale += std::abs(data.effective_pairing()[l]) * data.gradient_sup(l, axis);
        thresholds.push_back(options.threshold * (scale + kTiny));
    }

    report.global = true;
    for (std::size_t f = 0; f < grid.size(); ++f) {
        if (!options.include_boundary && grid.on_boundary(f)) continue;
        AdmissibilityVerdict v;
        v.node = f;
        v.x = grid.node(f);
        for (std::size_t t = 0; t < report.groups.size(); ++t) {
            const std::size_t gi = report.groups[t];
            const Point s = data.group_sum(gi, f);
            const double size = axis ? std::abs(s[static_cast<std::size_t>(*axis)]) : norm(s);
            if (options.keep_group_sums) v.group_sums.push_back(s);
            v.max_norm = std::max(v.max_norm, size);
            if (!v.witness_group && size > thresholds[t]) {
                v.witness_group = gi;
                v.witness_lambda = data.group_lambda(gi);
            }
        }
        v.admissible = v.witness_group.has_value();
        if (!v.admissible) {
            report.global = false;
            report.failures.push_back(report.points.size());
        }
        report.points.push_back(std::move(v));
    }
    return report;
}

}  // namespace

ModalData::ModalData(const BoundaryDatum& g, const Spectrum& spectrum, const CoefficientField& coeffs, const Grid& grid,
                     const AdmissibilityOptions& options)
    : grid_(grid) {
    const std::size_t count =
        options.truncation == 0 ? spectrum.size() : std::min(options.truncation, spectrum.size());
    for (std::size_t l = 0; l < count; ++l) lambdas_.push_back(spectrum.pairs[l].lambda);

    const std::vector<std::size_t> ids = spectrum.group_ids();
    for (const auto& group : spectrum.groups) {
        if (group.front() >= count) break;
        std::vector<std::size_t> kept;
        for (std::size_t l : group) {
            if (l < count) kept.push_back(l);
        }
        groups_.push_back(std::move(kept));
    }
    last_group_complete_ = count < spectrum.size() ? ids[count - 1] != ids[count] : spectrum.last_group_complete();

    const std::vector<double> gs = boundary_samples(g, grid);
    const double gnorm = std::sqrt(boundary_inner(grid, gs, gs));
    for (std::size_t l = 0; l < count; ++l) {
        const std::vector<double> psi = boundary_flux(spectrum, l, coeffs, grid);
        const double p = boundary_inner(grid, gs, psi);
        const double pnorm = std::sqrt(boundary_inner(grid, psi, psi));
        const bool member = std::abs(p) > options.membership_tol * gnorm * pnorm;
        pairing_.push_back(p);
        membership_.push_back(member);
        effective_.push_back(member ? p : 0.0);
        gradients_.push_back(eigenfunction_gradients(spectrum, l, grid));
    }
}

double ModalData::gradient_sup(std::size_t l, std::optional<int> axis) const {
    double s = 0.0;
    for (const Point& v : gradients_[l]) s = std::max(s, axis ? std::abs(v[static_cast<std::size_t>(*axis)]) : norm(v));
    return s;
}

Point ModalData::group_sum(std::size_t group, std::size_t node) const {
    Point s{};
    for (std::size_t l : groups_[group]) {
        const Point& g = gradients_[l][node];
        for (std::size_t k = 0; k < 3; ++k) s[k] += effective_[l] * g[k];
    }
    return s;
}

bool o_l_membership(const BoundaryDatum& g, const Spectrum& spectrum, int l, const CoefficientField& coeffs,
                    const Grid& grid, double tol) {
    if (l < 1 || static_cast<std::size_t>(l) > spectrum.size()) throw InputError("eigen index out of range");
    const std::vector<double> gs = boundary_samples(g, grid);
    const std::vector<double> psi = boundary_flux(spectrum, static_cast<std::size_t>(l - 1), coeffs, grid);
    const double p = boundary_inner(grid, gs, psi);
    return std::abs(p) > tol * std::sqrt(boundary_inner(grid, gs, gs)) * std::sqrt(boundary_inner(grid, psi, psi));
}

AdmissibilityReport admissibility_map(const ModalData& data, const AdmissibilityOptions& options) {
    return classify(data, std::nullopt, options);
}

AdmissibilityReport admissibility_map(const BoundaryDatum& g, const Spectrum& spectrum, const CoefficientField& coeffs,
                                      const Grid& grid, const AdmissibilityOptions& options) {
    return classify(ModalData(g, spectrum, coeffs, grid, options), std::nullopt, options);
}

AdmissibilityReport strong_admissibility_map(const ModalData& data, int axis, const AdmissibilityOptions& options) {
    return classify(data, axis, options);
}

AdmissibilityReport strong_admissibility_map(const BoundaryDatum& g, const Spectrum& spectrum,
                                             const CoefficientField& coeffs, const Grid& grid, int axis,
                                             const AdmissibilityOptions& options) {
    return classify(ModalData(g, spectrum, coeffs, grid, options), axis, options);
}

std::vector<Point> detect_occulting(const AdmissibilityReport& report) {
    std::vector<Point> out;
    for (std::size_t i : report.failures) out.push_back(report.points[i].x);
    return out;
}

std::vector<Point> detect_occulting(const BoundaryDatum& g, const Spectrum& spectrum, const CoefficientField& coeffs,
                                    const Grid& grid, const AdmissibilityOptions& options) {
    return detect_occulting(admissibility_map(g, spectrum, coeffs, grid, options));
}

std::vector<std::size_t> vanishing_eigengradient_nodes(const ModalData& data, double threshold, bool include_boundary) {
    const Grid& grid = data.grid();
    std::vector<double> sup(data.modes());
    for (std::size_t l = 0; l < data.modes(); ++l) sup[l] = data.gradient_sup(l, std::nullopt);
    std::vector<std::size_t> out;
    for (std::size_t f = 0; f < grid.size(); ++f) {
        if (!include_boundary && grid.on_boundary(f)) continue;
        bool any = false;
        for (std::size_t l = 0; l < data.modes() && !any; ++l) any = norm(data.gradients(l)[f]) > threshold * sup[l];
        if (!any) out.push_back(f);
    }
    return out;
}

}  // namespace hcs
