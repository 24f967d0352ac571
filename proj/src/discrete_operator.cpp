#include "hcs/discrete_operator.hpp"

namespace hcs {

DiscreteOperator DiscreteOperator::assemble(const Grid& grid, const CoefficientField& coeffs) {
    DiscreteOperator op;
    op.unknown.assign(grid.size(), -1);
    op.nodes = grid.interior();
    for (std::size_t i = 0; i < op.nodes.size(); ++i) op.unknown[op.nodes[i]] = static_cast<Eigen::Index>(i);

    const Eigen::Index n = op.unknowns();
    op.mass.resize(n);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(n) * (1 + 2 * static_cast<std::size_t>(grid.dim())));

    for (Eigen::Index row = 0; row < n; ++row) {
        const std::size_t f = op.nodes[static_cast<std::size_t>(row)];
        const Point x = grid.node(f);
        const Index3 idx = grid.multi_index(f);
        op.mass[row] = coeffs.q(x);
        double diag = 0.0;
        for (int k = 0; k < grid.dim(); ++k) {
            const auto kk = static_cast<std::size_t>(k);
            const double h = grid.spacing(k);
            for (int dir : {-1, 1}) {
                Point mid = x;
                mid[kk] += 0.5 * dir * h;
                const double w = coeffs.a(mid)[kk] / (h * h);
                diag += w;
                Index3 j = idx;
                j[kk] += dir;
                const std::size_t nb = grid.flat_index(j);
                const Eigen::Index col = op.unknown[nb];
                if (col >= 0) {
                    triplets.emplace_back(row, col, -w);
                } else {
                    op.boundary.push_back({row, nb, w});
                }
            }
        }
        triplets.emplace_back(row, row, diag);
    }
    op.stiffness.resize(n, n);
    op.stiffness.setFromTriplets(triplets.begin(), triplets.end());
    op.stiffness.makeCompressed();
    return op;
}

}  // namespace hcs
