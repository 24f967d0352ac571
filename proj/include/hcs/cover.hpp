#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "hcs/boundary.hpp"
#include "hcs/geometry.hpp"
#include "hcs/helmholtz.hpp"

namespace hcs {

/// Dyadic frequency sampling K^(n) of [K_min, K_max] with 2^n + 1 points.
struct FrequencyGrid {
    double k_min = 0.0;
    double k_max = 0.0;
    int level = 0;
    std::vector<double> points;
    std::vector<bool> excluded;

    std::vector<double> usable() const;
};

/// Points are K_min + 2^-n i (K_max - K_min), i = 0..2^n, so K^(n) is a subset of K^(n+1) bit for bit.
FrequencyGrid frequency_grid(double k_min, double k_max, int level);

/// i-th point of level n by the same formula as frequency_grid.
double frequency_point(double k_min, double k_max, int level, std::size_t i);

/// Marks points with |omega - lambda| <= band * max(1, lambda) for some eigenvalue. Throws
/// InputError when nothing usable remains.
FrequencyGrid exclude_spectrum(FrequencyGrid grid, const std::vector<double>& eigenvalues, double band);

using GradientVectors = std::vector<std::array<double, 3>>;

/// Produces grad u_omega^g at every node of a fixed grid.
class GradientSource {
public:
    virtual ~GradientSource() = default;
    virtual const Grid& grid() const = 0;
    virtual GradientVectors gradients(double omega) const = 0;
    std::vector<double> gradient_norms(double omega) const;
};

class DirectGradientSource final : public GradientSource {
public:
    DirectGradientSource(std::shared_ptr<const HelmholtzSolver> solver, BoundaryDatum g)
        : solver_(std::move(solver)), g_(std::move(g)) {}

    const Grid& grid() const override { return solver_->grid(); }
    GradientVectors gradients(double omega) const override;

private:
    std::shared_ptr<const HelmholtzSolver> solver_;
    BoundaryDatum g_;
};

/// Exact 1D constant-coefficient gradients sampled on a grid.
class ClosedFormGradientSource final : public GradientSource {
public:
    ClosedFormGradientSource(Grid grid, double left, double right) : grid_(std::move(grid)), left_(left), right_(right) {}

    const Grid& grid() const override { return grid_; }
    GradientVectors gradients(double omega) const override;

private:
    Grid grid_;
    double left_;
    double right_;
};

/// Memoizes gradients and their norms per frequency. Fills are independent per frequency and may run on
/// up to `threads` workers; each frequency has a single producer.
class FrequencyCache {
public:
    explicit FrequencyCache(const GradientSource& source, unsigned threads = 1) : source_(source), threads_(threads) {}

    const Grid& grid() const { return source_.grid(); }
    const std::vector<double>& get(double omega);
    const GradientVectors& vectors(double omega);
    void prefetch(const std::vector<double>& frequencies);
    std::size_t solves() const { return solves_; }

private:
    const GradientSource& source_;
    unsigned threads_;
    std::mutex mutex_;
    struct Entry {
        GradientVectors vectors;
        std::vector<double> norms;
    };
    const Entry& entry(double omega);

    std::map<double, Entry> cache_;
    std::size_t solves_ = 0;
};

struct ScanOptions {
    double k_min = 0.0;
    double k_max = 0.0;
    int n_max = 8;
    double delta = 0.0;
    /// Eigenvalues to skip and their relative exclusion band.
    std::vector<double> sigma;
    double band = 1e-6;
};

struct PointWitness {
    std::size_t node = 0;
    Point x{};
    int level = 0;
    double omega = 0.0;
    double grad_norm = 0.0;
    double radius = 0.0;
};

/// First (level, omega) in K^(0), K^(1) \ K^(0), ... (increasing omega within a level) with
/// |grad u_omega(x)| > delta.
std::optional<PointWitness> scan_point(std::size_t node, FrequencyCache& cache, const ScanOptions& options);

/// Largest r in {h/2, h, 2h, ...} such that |grad u_omega| > delta / 2 inside the open ball B(x, r)
/// at every node and at every midpoint of neighbouring nodes (gradient averaged), so the ball
/// also holds on the once-refined grid; h is the smallest grid spacing.
double certify_radius(const PointWitness& witness, FrequencyCache& cache, double delta);

struct Ball {
    Point center{};
    double radius = 0.0;
    std::size_t node = 0;
};

struct CoverPiece {
    double omega = 0.0;
    std::vector<Ball> balls;
    double min_grad = 0.0;  ///< min |grad u_omega| over the solve-grid nodes inside the balls
};

struct CoverResult {
    int n_final = 0;
    double delta = 0.0;
    std::vector<CoverPiece> pieces;  ///< sorted by omega
    std::vector<PointWitness> witnesses;
    std::vector<std::size_t> uncovered;  ///< grid nodes without a witness up to n_max
    std::vector<Point> uncovered_points;

    bool complete() const { return uncovered.empty(); }
};

/// Greedy cover: visits nodes in lexicographic order; every node not yet inside a ball is
/// scanned, and its witness ball marks the nodes it contains as covered.
CoverResult build_cover(FrequencyCache& cache, const ScanOptions& options);

struct PieceCheck {
    double omega = 0.0;
    std::size_t nodes_checked = 0;
    double min_grad = 0.0;
    std::vector<Point> violations;
};

struct VerifyReport {
    bool passed = true;
    double delta_check = 0.0;
    std::vector<PieceCheck> pieces;
    std::size_t violations = 0;
    /// Check-grid nodes inside no ball (informational; empty covers are vacuously fine).
    std::size_t uncovered_nodes = 0;
};

/// Re-evaluates every piece on the source grid (typically finer) and checks |grad u_omega| > delta_check
/// at every node inside the piece's balls.
VerifyReport verify_cover(const CoverResult& cover, const GradientSource& source, double delta_check);

}  // namespace hcs
