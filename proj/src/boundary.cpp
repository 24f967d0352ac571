#include "hcs/boundary.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

#include "hcs/error.hpp"

namespace hcs {

BoundaryDatum::BoundaryDatum(Fn fn, std::string description) : fn_(std::move(fn)), description_(std::move(description)) {}

BoundaryDatum BoundaryDatum::constant(double c) {
    std::ostringstream os;
    os << "constant " << c;
    return BoundaryDatum([c](const Point&) { return c; }, os.str());
}

BoundaryDatum BoundaryDatum::linear(const Domain& domain, int axis) {
    if (axis < 0 || axis >= domain.dim()) throw InputError("linear boundary datum axis out of range");
    const double b = domain.side(axis);
    const auto ax = static_cast<std::size_t>(axis);
    return BoundaryDatum([b, ax](const Point& x) { return x[ax] / b; }, "linear axis " + std::to_string(axis));
}

BoundaryDatum BoundaryDatum::endpoints(const Domain& interval, double left, double right) {
    if (interval.dim() != 1) throw InputError("endpoint boundary datum requires an interval");
    const double b = interval.side(0);
    std::ostringstream os;
    os << "endpoints " << left << ' ' << right;
    return BoundaryDatum([=](const Point& x) { return left + (right - left) * x[0] / b; }, os.str());
}

BoundaryDatum BoundaryDatum::random_fourier(const Domain& domain, std::uint64_t seed, int modes) {
    if (modes < 1) throw InputError("random-fourier needs at least one mode");
    const int d = domain.dim();
    std::size_t total = 1;
    for (int k = 0; k < d; ++k) total *= static_cast<std::size_t>(modes);

    // Coefficients from raw engine output so the datum is identical across standard libraries.
    std::mt19937_64 engine(seed);
    auto coeffs = std::make_shared<std::vector<double>>(total);
    for (double& c : *coeffs) c = 2.0 * (static_cast<double>(engine() >> 11) * 0x1.0p-53) - 1.0;

    const std::vector<double> sides = domain.sides();
    auto fn = [coeffs, sides, d, modes](const Point& x) {
        std::array<std::vector<double>, 3> cosines;
        for (int k = 0; k < d; ++k) {
            auto& ck = cosines[static_cast<std::size_t>(k)];
            ck.resize(static_cast<std::size_t>(modes));
            for (int m = 0; m < modes; ++m) {
                ck[static_cast<std::size_t>(m)] =
                    std::cos(m * std::numbers::pi * x[static_cast<std::size_t>(k)] / sides[static_cast<std::size_t>(k)]);
            }
        }
        double v = 0.0;
        for (std::size_t i = 0; i < coeffs->size(); ++i) {
            double term = (*coeffs)[i];
            std::size_t rest = i;
            for (int k = d - 1; k >= 0; --k) {
                term *= cosines[static_cast<std::size_t>(k)][rest % static_cast<std::size_t>(modes)];
                rest /= static_cast<std::size_t>(modes);
            }
            v += term;
        }
        return v;
    };
    return BoundaryDatum(fn, "random-fourier seed " + std::to_string(seed) + " modes " + std::to_string(modes));
}

BoundaryDatum BoundaryDatum::table(std::vector<Point> points, std::vector<double> values) {
    if (points.empty() || points.size() != values.size()) {
        throw InputError("boundary table needs matching, non-empty point and value lists");
    }
    auto data = std::make_shared<const std::pair<std::vector<Point>, std::vector<double>>>(std::move(points),
                                                                                          std::move(values));
    auto fn = [data](const Point& x) {
        std::size_t best = 0;
        double dist = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < data->first.size(); ++i) {
            const Point& p = data->first[i];
            const double dd = (p[0] - x[0]) * (p[0] - x[0]) + (p[1] - x[1]) * (p[1] - x[1]) + (p[2] - x[2]) * (p[2] - x[2]);
            if (dd < dist) {
                dist = dd;
                best = i;
            }
        }
        return data->second[best];
    };
    return BoundaryDatum(fn, "table " + std::to_string(data->first.size()) + " samples");
}

BoundaryDatum BoundaryDatum::scaled(double c) const {
    std::ostringstream os;
    os << c << " * (" << description_ << ')';
    return BoundaryDatum([fn = fn_, c](const Point& x) { return c * fn(x); }, os.str());
}

BoundaryDatum BoundaryDatum::combine(double alpha, const BoundaryDatum& g1, double beta, const BoundaryDatum& g2) {
    std::ostringstream os;
    os << alpha << " * (" << g1.description_ << ") + " << beta << " * (" << g2.description_ << ')';
    return BoundaryDatum([f1 = g1.fn_, f2 = g2.fn_, alpha, beta](const Point& x) { return alpha * f1(x) + beta * f2(x); },
                         os.str());
}

std::vector<double> boundary_samples(const BoundaryDatum& g, const Grid& grid) {
    std::vector<double> v;
    v.reserve(grid.boundary().size());
    for (const auto& b : grid.boundary()) v.push_back(g(grid.node(b.node)));
    return v;
}

double boundary_inner(const Grid& grid, const std::vector<double>& a, const std::vector<double>& b) {
    const auto& nodes = grid.boundary();
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += nodes[i].weight * a[i] * b[i];
    return s;
}

std::vector<double> boundary_pairings(const BoundaryDatum& g, const Spectrum& spectrum, const CoefficientField& coeffs,
                                      const Grid& grid) {
    const std::vector<double> gs = boundary_samples(g, grid);
    std::vector<double> out;
    out.reserve(spectrum.size());
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
        out.push_back(boundary_inner(grid, gs, boundary_flux(spectrum, k, coeffs, grid)));
    }
    return out;
}

}  // namespace hcs
