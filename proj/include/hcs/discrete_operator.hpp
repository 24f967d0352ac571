#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include "hcs/geometry.hpp"

namespace hcs {

/// Second-order flux discretization of -div(a grad .) on the interior nodes of a grid, with
/// Dirichlet rows eliminated. The q mass matrix is diagonal.
struct DiscreteOperator {
    /// Stiffness entry coupling an interior row to a boundary node; Dirichlet data g contributes
    /// weight * g(node) to the right-hand side of that row.
    struct Coupling {
        Eigen::Index row = 0;
        std::size_t node = 0;
        double weight = 0.0;
    };

    std::vector<Eigen::Index> unknown;  ///< flat node -> unknown index, -1 on the boundary
    std::vector<std::size_t> nodes;     ///< unknown index -> flat node
    Eigen::SparseMatrix<double> stiffness;
    Eigen::VectorXd mass;
    std::vector<Coupling> boundary;

    static DiscreteOperator assemble(const Grid& grid, const CoefficientField& coeffs);

    Eigen::Index unknowns() const { return static_cast<Eigen::Index>(nodes.size()); }
};

/// Gradient of nodal values: centered differences where both neighbours exist, one-sided
/// second-order differences on the boundary layer.
template <class Scalar, class Values>
std::vector<std::array<Scalar, 3>> nodal_gradient(const Grid& grid, const Values& values) {
    std::vector<std::array<Scalar, 3>> grad(grid.size(), std::array<Scalar, 3>{Scalar(0), Scalar(0), Scalar(0)});
    const int d = grid.dim();
    for (std::size_t f = 0; f < grid.size(); ++f) {
        const Index3 idx = grid.multi_index(f);
        for (int k = 0; k < d; ++k) {
            const auto kk = static_cast<std::size_t>(k);
            const int n = grid.count(k);
            const double h = grid.spacing(k);
            auto at = [&](int offset) {
                Index3 j = idx;
                j[kk] += offset;
                return Scalar(values[static_cast<Eigen::Index>(grid.flat_index(j))]);
            };
            Scalar g;
            if (idx[kk] == 0) {
                g = (Scalar(-3.0) * at(0) + Scalar(4.0) * at(1) - at(2)) / Scalar(2.0 * h);
            } else if (idx[kk] == n - 1) {
                g = (Scalar(3.0) * at(0) - Scalar(4.0) * at(-1) + at(-2)) / Scalar(2.0 * h);
            } else {
                g = (at(1) - at(-1)) / Scalar(2.0 * h);
            }
            grad[f][kk] = g;
        }
    }
    return grad;
}

template <class Scalar>
double magnitude(const std::array<Scalar, 3>& v) {
    return std::sqrt(std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]));
}

}  // namespace hcs
