#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace hcs {

/// Point or vector in up to three dimensions. Unused trailing components are zero.
using Point = std::array<double, 3>;
using Index3 = std::array<int, 3>;

double norm(const Point& v);
double dot(const Point& a, const Point& b);

/// Axis-aligned box (0,b_1) x ... x (0,b_d).
class Domain {
public:
    Domain() = default;

    int dim() const { return dim_; }
    const std::vector<double>& sides() const { return sides_; }
    double side(int axis) const { return sides_.at(static_cast<std::size_t>(axis)); }
    Point center() const;
    double diameter() const;
    double volume() const;

    friend Domain build_domain(int dim, const std::vector<double>& sides);

private:
    int dim_ = 0;
    std::vector<double> sides_;
};

/// Validates and builds a box domain. Throws InputError on bad input.
Domain build_domain(int dim, const std::vector<double>& sides);

enum class QuadratureRule { Trapezoid, Simpson };

/// A node of the boundary quadrature. Nodes on box edges and corners appear once per
/// adjacent face, each time with that face's normal.
struct BoundaryNode {
    std::size_t node = 0;  ///< flat grid index
    Point normal{};        ///< unit outward normal of the face
    double weight = 0.0;   ///< trapezoid weight on the face (1 in 1D)
    int axis = 0;          ///< axis normal to the face
    int side = 0;          ///< 0 for x_axis = 0, 1 for x_axis = b_axis
};

/// Uniform tensor grid on a box, including the boundary nodes.
///
/// Flat indices are lexicographic in (i_0, i_1, i_2): axis 0 varies slowest.
class Grid {
public:
    Grid(const Domain& domain, const Index3& counts);

    const Domain& domain() const { return domain_; }
    int dim() const { return domain_.dim(); }
    int count(int axis) const { return counts_[static_cast<std::size_t>(axis)]; }
    const Index3& counts() const { return counts_; }
    double spacing(int axis) const { return spacing_[static_cast<std::size_t>(axis)]; }
    double min_spacing() const;
    double max_spacing() const;
    double cell_volume() const;

    std::size_t size() const { return size_; }
    Index3 multi_index(std::size_t flat) const;
    std::size_t flat_index(const Index3& idx) const;
    Point node(std::size_t flat) const;
    bool on_boundary(std::size_t flat) const;

    const std::vector<std::size_t>& interior() const { return interior_; }
    const std::vector<BoundaryNode>& boundary() const { return boundary_; }

    /// Flat index of the grid node at x, if x is a node up to 1e-9 of the spacing.
    std::optional<std::size_t> find_node(const Point& x) const;
    /// Flat index of the node closest to x.
    std::size_t nearest_node(const Point& x) const;

    /// Volume quadrature weights over all nodes. Simpson falls back to the trapezoid rule
    /// along any axis with an odd number of intervals.
    std::vector<double> volume_weights(QuadratureRule rule) const;

    /// Grid with 2n-1 nodes per axis; every node of this grid is a node of the refined one.
    Grid refined() const;

    bool same_layout(const Grid& other) const;

private:
    Domain domain_;
    Index3 counts_{1, 1, 1};
    std::array<double, 3> spacing_{0.0, 0.0, 0.0};
    std::size_t size_ = 0;
    std::vector<std::size_t> interior_;
    std::vector<BoundaryNode> boundary_;
};

/// Builds a grid with the same node count along every axis. Throws InputError if n < 3.
Grid build_grid(const Domain& domain, int nodes_per_axis);
Grid build_grid(const Domain& domain, const std::vector<int>& nodes_per_axis);

/// Coefficients a (diagonal matrix field) and q (scalar field) of -div(a grad u) - w q u.
class CoefficientField {
public:
    using DiagonalFn = std::function<Point(const Point&)>;
    using ScalarFn = std::function<double(const Point&)>;

    /// a = a0 I, q = q0.
    static CoefficientField constant(double a0, double q0, double lambda_bound);
    /// a(x) = (a0 + slope * x_axis) I, q = q0.
    static CoefficientField affine(double a0, double slope, int axis, double q0, double lambda_bound);
    /// Scalar a promoted to a I.
    static CoefficientField scalar(ScalarFn a, ScalarFn q, double lambda_bound);
    static CoefficientField diagonal(DiagonalFn a, ScalarFn q, double lambda_bound);
    /// Per-node table on `grid`, evaluated off-node by multilinear interpolation.
    static CoefficientField tabulated(const Grid& grid, std::vector<Point> a_diag, std::vector<double> q,
                                      double lambda_bound);

    Point a(const Point& x) const { return a_(x); }
    double q(const Point& x) const { return q_(x); }
    double lambda_bound() const { return lambda_bound_; }
    CoefficientField with_lambda_bound(double lambda_bound) const;

    /// True when a = I and q = 1 were declared (enables the closed-form eigenbasis).
    bool is_unit() const { return unit_; }
    const std::string& kind() const { return kind_; }

private:
    DiagonalFn a_;
    ScalarFn q_;
    double lambda_bound_ = 1.0;
    bool unit_ = false;
    std::string kind_;
};

struct EllipticityReport {
    bool pass = false;
    double lambda_bound = 0.0;
    double a_min = 0.0;  ///< smallest eigenvalue of a over the grid
    double a_max = 0.0;
    double q_min = 0.0;
    double q_max = 0.0;
    /// Worst ratios against the bounds; all <= 1 iff the bounds hold.
    double lower_ratio = 0.0;  ///< max(1/Lambda / a_min, 1/Lambda / q_min)
    double upper_ratio = 0.0;  ///< max(a_max / Lambda, q_max / Lambda)
};

/// Checks Lambda^-1 |xi|^2 <= a xi.xi <= Lambda |xi|^2 and Lambda^-1 <= q <= Lambda at every grid node.
EllipticityReport validate_ellipticity(const CoefficientField& coeffs, const Grid& grid);

}  // namespace hcs
