#include "hcs/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hcs/error.hpp"

namespace hcs {

namespace {

std::string format_point(const Point& x, int dim) {
    std::ostringstream os;
    os << '(';
    for (int k = 0; k < dim; ++k) {
        if (k) os << ", ";
        os << x[static_cast<std::size_t>(k)];
    }
    os << ')';
    return os.str();
}

// 1D trapezoid or Simpson weights for n nodes with spacing h.
std::vector<double> axis_weights(int n, double h, QuadratureRule rule) {
    std::vector<double> w(static_cast<std::size_t>(n), h);
    if (n == 1) {
        w[0] = 1.0;
        return w;
    }
    const int intervals = n - 1;
    if (rule == QuadratureRule::Simpson && intervals % 2 == 0) {
        for (int i = 0; i < n; ++i) {
            const double c = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
            w[static_cast<std::size_t>(i)] = c * h / 3.0;
        }
        return w;
    }
    w.front() = 0.5 * h;
    w.back() = 0.5 * h;
    return w;
}

struct NodeTable {
    Grid grid;
    std::vector<Point> a;
    std::vector<double> q;

    // Multilinear interpolation weights of x against the table grid.
    template <class F>
    void visit(const Point& x, F&& f) const {
        std::array<int, 3> lo{0, 0, 0};
        std::array<double, 3> t{0.0, 0.0, 0.0};
        for (int k = 0; k < grid.dim(); ++k) {
            const auto kk = static_cast<std::size_t>(k);
            const double s = std::clamp(x[kk] / grid.spacing(k), 0.0, grid.count(k) - 1.0);
            lo[kk] = std::min(static_cast<int>(s), grid.count(k) - 2);
            t[kk] = s - lo[kk];
        }
        const int corners = 1 << grid.dim();
        for (int c = 0; c < corners; ++c) {
            Index3 idx{0, 0, 0};
            double w = 1.0;
            for (int k = 0; k < grid.dim(); ++k) {
                const auto kk = static_cast<std::size_t>(k);
                const int bit = (c >> k) & 1;
                idx[kk] = lo[kk] + bit;
                w *= bit ? t[kk] : 1.0 - t[kk];
            }
            if (w != 0.0) f(grid.flat_index(idx), w);
        }
    }
};

}  // namespace

double norm(const Point& v) { return std::sqrt(dot(v, v)); }

double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Point Domain::center() const {
    Point c{};
    for (int k = 0; k < dim_; ++k) c[static_cast<std::size_t>(k)] = 0.5 * side(k);
    return c;
}

double Domain::diameter() const {
    double s = 0.0;
    for (double b : sides_) s += b * b;
    return std::sqrt(s);
}

double Domain::volume() const {
    double v = 1.0;
    for (double b : sides_) v *= b;
    return v;
}

Domain build_domain(int dim, const std::vector<double>& sides) {
    if (dim < 1 || dim > 3) {
        throw InputError("domain dimension must be 1, 2 or 3, got " + std::to_string(dim));
    }
    if (static_cast<int>(sides.size()) != dim) {
        throw InputError("domain has dim " + std::to_string(dim) + " but " + std::to_string(sides.size()) +
                         " side lengths");
    }
    for (std::size_t i = 0; i < sides.size(); ++i) {
        if (!(sides[i] > 0.0) || !std::isfinite(sides[i])) {
            throw InputError("non-positive side on axis " + std::to_string(i));
        }
    }
    Domain d;
    d.dim_ = dim;
    d.sides_ = sides;
    return d;
}

Grid::Grid(const Domain& domain, const Index3& counts) : domain_(domain), counts_{1, 1, 1} {
    const int d = domain.dim();
    for (int k = 0; k < d; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        counts_[kk] = counts[kk];
        spacing_[kk] = domain.side(k) / (counts[kk] - 1);
    }
    size_ = static_cast<std::size_t>(counts_[0]) * counts_[1] * counts_[2];

    for (std::size_t f = 0; f < size_; ++f) {
        if (!on_boundary(f)) interior_.push_back(f);
    }

    for (int axis = 0; axis < d; ++axis) {
        for (int side = 0; side < 2; ++side) {
            for (std::size_t f = 0; f < size_; ++f) {
                const Index3 idx = multi_index(f);
                const int target = side == 0 ? 0 : counts_[static_cast<std::size_t>(axis)] - 1;
                if (idx[static_cast<std::size_t>(axis)] != target) continue;
                BoundaryNode b;
                b.node = f;
                b.axis = axis;
                b.side = side;
                b.normal[static_cast<std::size_t>(axis)] = side == 0 ? -1.0 : 1.0;
                double w = 1.0;
                for (int j = 0; j < d; ++j) {
                    if (j == axis) continue;
                    const auto jj = static_cast<std::size_t>(j);
                    const bool end = idx[jj] == 0 || idx[jj] == counts_[jj] - 1;
                    w *= end ? 0.5 * spacing_[jj] : spacing_[jj];
                }
                b.weight = w;
                boundary_.push_back(b);
            }
        }
    }
}

double Grid::min_spacing() const {
    double h = spacing_[0];
    for (int k = 1; k < dim(); ++k) h = std::min(h, spacing(k));
    return h;
}

double Grid::max_spacing() const {
    double h = spacing_[0];
    for (int k = 1; k < dim(); ++k) h = std::max(h, spacing(k));
    return h;
}

double Grid::cell_volume() const {
    double v = 1.0;
    for (int k = 0; k < dim(); ++k) v *= spacing(k);
    return v;
}

Index3 Grid::multi_index(std::size_t flat) const {
    Index3 idx{0, 0, 0};
    idx[2] = static_cast<int>(flat % static_cast<std::size_t>(counts_[2]));
    flat /= static_cast<std::size_t>(counts_[2]);
    idx[1] = static_cast<int>(flat % static_cast<std::size_t>(counts_[1]));
    idx[0] = static_cast<int>(flat / static_cast<std::size_t>(counts_[1]));
    return idx;
}

std::size_t Grid::flat_index(const Index3& idx) const {
    return (static_cast<std::size_t>(idx[0]) * counts_[1] + static_cast<std::size_t>(idx[1])) * counts_[2] +
           static_cast<std::size_t>(idx[2]);
}

Point Grid::node(std::size_t flat) const {
    const Index3 idx = multi_index(flat);
    Point x{};
    for (int k = 0; k < dim(); ++k) {
        const auto kk = static_cast<std::size_t>(k);
        // The last node is pinned to the side length to avoid round-off off the boundary.
        x[kk] = idx[kk] == counts_[kk] - 1 ? domain_.side(k) : idx[kk] * spacing_[kk];
    }
    return x;
}

bool Grid::on_boundary(std::size_t flat) const {
    const Index3 idx = multi_index(flat);
    for (int k = 0; k < dim(); ++k) {
        const auto kk = static_cast<std::size_t>(k);
        if (idx[kk] == 0 || idx[kk] == counts_[kk] - 1) return true;
    }
    return false;
}

std::optional<std::size_t> Grid::find_node(const Point& x) const {
    Index3 idx{0, 0, 0};
    for (int k = 0; k < dim(); ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const double s = x[kk] / spacing_[kk];
        const long i = std::lround(s);
        if (i < 0 || i >= counts_[kk] || std::abs(s - static_cast<double>(i)) > 1e-9) return std::nullopt;
        idx[kk] = static_cast<int>(i);
    }
    return flat_index(idx);
}

std::size_t Grid::nearest_node(const Point& x) const {
    Index3 idx{0, 0, 0};
    for (int k = 0; k < dim(); ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const long i = std::lround(x[kk] / spacing_[kk]);
        idx[kk] = static_cast<int>(std::clamp<long>(i, 0, counts_[kk] - 1));
    }
    return flat_index(idx);
}

std::vector<double> Grid::volume_weights(QuadratureRule rule) const {
    std::array<std::vector<double>, 3> axis;
    for (int k = 0; k < 3; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        axis[kk] = k < dim() ? axis_weights(counts_[kk], spacing_[kk], rule) : std::vector<double>{1.0};
    }
    std::vector<double> w(size_);
    for (std::size_t f = 0; f < size_; ++f) {
        const Index3 idx = multi_index(f);
        w[f] = axis[0][static_cast<std::size_t>(idx[0])] * axis[1][static_cast<std::size_t>(idx[1])] *
               axis[2][static_cast<std::size_t>(idx[2])];
    }
    return w;
}

Grid Grid::refined() const {
    Index3 c{1, 1, 1};
    for (int k = 0; k < dim(); ++k) c[static_cast<std::size_t>(k)] = 2 * count(k) - 1;
    return Grid(domain_, c);
}

bool Grid::same_layout(const Grid& other) const {
    return counts_ == other.counts_ && domain_.sides() == other.domain_.sides();
}

Grid build_grid(const Domain& domain, int nodes_per_axis) {
    return build_grid(domain, std::vector<int>(static_cast<std::size_t>(domain.dim()), nodes_per_axis));
}

Grid build_grid(const Domain& domain, const std::vector<int>& nodes_per_axis) {
    if (static_cast<int>(nodes_per_axis.size()) != domain.dim()) {
        throw InputError("grid needs one node count per axis");
    }
    Index3 c{1, 1, 1};
    for (std::size_t k = 0; k < nodes_per_axis.size(); ++k) {
        if (nodes_per_axis[k] < 3) {
            throw InputError("nodes_per_axis must be at least 3, got " + std::to_string(nodes_per_axis[k]));
        }
        c[k] = nodes_per_axis[k];
    }
    return Grid(domain, c);
}

CoefficientField CoefficientField::constant(double a0, double q0, double lambda_bound) {
    CoefficientField c;
    c.a_ = [a0](const Point&) { return Point{a0, a0, a0}; };
    c.q_ = [q0](const Point&) { return q0; };
    c.lambda_bound_ = lambda_bound;
    c.unit_ = a0 == 1.0 && q0 == 1.0;
    c.kind_ = "constant";
    return c;
}

CoefficientField CoefficientField::affine(double a0, double slope, int axis, double q0, double lambda_bound) {
    if (axis < 0 || axis > 2) throw InputError("affine coefficient axis out of range");
    CoefficientField c;
    const auto ax = static_cast<std::size_t>(axis);
    c.a_ = [a0, slope, ax](const Point& x) {
        const double v = a0 + slope * x[ax];
        return Point{v, v, v};
    };
    c.q_ = [q0](const Point&) { return q0; };
    c.lambda_bound_ = lambda_bound;
    c.unit_ = a0 == 1.0 && slope == 0.0 && q0 == 1.0;
    c.kind_ = "affine";
    return c;
}

CoefficientField CoefficientField::scalar(ScalarFn a, ScalarFn q, double lambda_bound) {
    CoefficientField c;
    c.a_ = [a = std::move(a)](const Point& x) {
        const double v = a(x);
        return Point{v, v, v};
    };
    c.q_ = std::move(q);
    c.lambda_bound_ = lambda_bound;
    c.kind_ = "scalar";
    return c;
}

CoefficientField CoefficientField::diagonal(DiagonalFn a, ScalarFn q, double lambda_bound) {
    CoefficientField c;
    c.a_ = std::move(a);
    c.q_ = std::move(q);
    c.lambda_bound_ = lambda_bound;
    c.kind_ = "diagonal";
    return c;
}

CoefficientField CoefficientField::tabulated(const Grid& grid, std::vector<Point> a_diag, std::vector<double> q,
                                             double lambda_bound) {
    if (a_diag.size() != grid.size() || q.size() != grid.size()) {
        throw InputError("coefficient table has " + std::to_string(q.size()) + " rows, grid has " +
                         std::to_string(grid.size()) + " nodes");
    }
    auto table = std::make_shared<const NodeTable>(NodeTable{grid, std::move(a_diag), std::move(q)});
    CoefficientField c;
    c.a_ = [table](const Point& x) {
        Point v{};
        table->visit(x, [&](std::size_t f, double w) {
            for (std::size_t k = 0; k < 3; ++k) v[k] += w * table->a[f][k];
        });
        return v;
    };
    c.q_ = [table](const Point& x) {
        double v = 0.0;
        table->visit(x, [&](std::size_t f, double w) { v += w * table->q[f]; });
        return v;
    };
    c.lambda_bound_ = lambda_bound;
    c.kind_ = "table";
    return c;
}

CoefficientField CoefficientField::with_lambda_bound(double lambda_bound) const {
    CoefficientField c = *this;
    c.lambda_bound_ = lambda_bound;
    return c;
}

EllipticityReport validate_ellipticity(const CoefficientField& coeffs, const Grid& grid) {
    const double lam = coeffs.lambda_bound();
    if (!(lam > 0.0)) throw InputError("lambda_bound must be positive");

    EllipticityReport r;
    r.lambda_bound = lam;
    r.a_min = r.q_min = std::numeric_limits<double>::infinity();
    r.a_max = r.q_max = -std::numeric_limits<double>::infinity();
    const int d = grid.dim();
    for (std::size_t f = 0; f < grid.size(); ++f) {
        const Point x = grid.node(f);
        Point a{};
        double q = 0.0;
        try {
            a = coeffs.a(x);
            q = coeffs.q(x);
        } catch (const std::exception& e) {
            throw InputError("coefficient evaluation failed at " + format_point(x, d) + ": " + e.what());
        }
        bool finite = std::isfinite(q);
        for (int k = 0; k < d; ++k) finite = finite && std::isfinite(a[static_cast<std::size_t>(k)]);
        if (!finite) throw InputError("coefficient evaluation failed at " + format_point(x, d) + ": non-finite value");
        for (int k = 0; k < d; ++k) {
            r.a_min = std::min(r.a_min, a[static_cast<std::size_t>(k)]);
            r.a_max = std::max(r.a_max, a[static_cast<std::size_t>(k)]);
        }
        r.q_min = std::min(r.q_min, q);
        r.q_max = std::max(r.q_max, q);
    }
    const double inv = 1.0 / lam;
    const double low = std::min(r.a_min, r.q_min);
    r.lower_ratio = low > 0.0 ? inv / low : std::numeric_limits<double>::infinity();
    r.upper_ratio = std::max(r.a_max, r.q_max) / lam;
    constexpr double tol = 1.0 + 1e-12;
    r.pass = r.lower_ratio <= tol && r.upper_ratio <= tol;
    return r;
}

}  // namespace hcs
