#include "hcs/cover.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "hcs/error.hpp"

namespace hcs {

namespace {

double distance(const Point& a, const Point& b) {
    return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
}

bool near_spectrum(double omega, const std::vector<double>& sigma, double band) {
    for (double lam : sigma) {
        if (std::abs(omega - lam) <= band * std::max(1.0, lam)) return true;
    }
    return false;
}

// Frequencies that first appear at `level`, in increasing order.
std::vector<double> new_points(const ScanOptions& o, int level) {
    std::vector<double> out;
    const std::size_t count = (std::size_t{1} << level) + 1;
    for (std::size_t i = 0; i < count; ++i) {
        if (level > 0 && i % 2 == 0) continue;
        out.push_back(frequency_point(o.k_min, o.k_max, level, i));
    }
    return out;
}

}  // namespace

std::vector<double> FrequencyGrid::usable() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!excluded[i]) out.push_back(points[i]);
    }
    return out;
}

double frequency_point(double k_min, double k_max, int level, std::size_t i) {
    return k_min + std::ldexp(static_cast<double>(i) * (k_max - k_min), -level);
}

FrequencyGrid frequency_grid(double k_min, double k_max, int level) {
    if (!(k_min < k_max)) throw InputError("frequency interval needs K_min < K_max");
    if (level < 0 || level > 30) throw InputError("frequency level must be in 0..30");
    FrequencyGrid g;
    g.k_min = k_min;
    g.k_max = k_max;
    g.level = level;
    const std::size_t count = (std::size_t{1} << level) + 1;
    for (std::size_t i = 0; i < count; ++i) g.points.push_back(frequency_point(k_min, k_max, level, i));
    g.excluded.assign(count, false);
    return g;
}

FrequencyGrid exclude_spectrum(FrequencyGrid grid, const std::vector<double>& eigenvalues, double band) {
    bool any = false;
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        grid.excluded[i] = near_spectrum(grid.points[i], eigenvalues, band);
        any = any || !grid.excluded[i];
    }
    if (!any) {
        throw InputError("every frequency of K^(" + std::to_string(grid.level) +
                         ") lies in the spectrum exclusion band; use a larger n or another interval");
    }
    return grid;
}

std::vector<double> GradientSource::gradient_norms(double omega) const {
    const GradientVectors v = gradients(omega);
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = magnitude(v[i]);
    return out;
}

GradientVectors DirectGradientSource::gradients(double omega) const { return solver_->solve(omega, g_).gradient; }

GradientVectors ClosedFormGradientSource::gradients(double omega) const {
    const ClosedForm1D u(grid_.domain(), left_, right_, omega);
    GradientVectors out(grid_.size(), {0.0, 0.0, 0.0});
    for (std::size_t i = 0; i < grid_.size(); ++i) out[i][0] = u.derivative(grid_.node(i)[0]);
    return out;
}

const FrequencyCache::Entry& FrequencyCache::entry(double omega) {
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(omega);
        if (it != cache_.end()) return it->second;
    }
    Entry e;
    e.vectors = source_.gradients(omega);
    e.norms.resize(e.vectors.size());
    for (std::size_t i = 0; i < e.vectors.size(); ++i) e.norms[i] = magnitude(e.vectors[i]);
    std::lock_guard<std::mutex> lock(mutex_);
    ++solves_;
    return cache_.emplace(omega, std::move(e)).first->second;
}

const std::vector<double>& FrequencyCache::get(double omega) { return entry(omega).norms; }

const GradientVectors& FrequencyCache::vectors(double omega) { return entry(omega).vectors; }

void FrequencyCache::prefetch(const std::vector<double>& frequencies) {
    std::vector<double> todo;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        for (double w : frequencies) {
            if (!cache_.count(w) && std::find(todo.begin(), todo.end(), w) == todo.end()) todo.push_back(w);
        }
    }
    const unsigned workers = std::max(1u, std::min<unsigned>(threads_, static_cast<unsigned>(todo.size())));
    if (workers <= 1) {
        for (double w : todo) get(w);
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) {
        pool.emplace_back([this, &todo, t, workers] {
            for (std::size_t i = t; i < todo.size(); i += workers) get(todo[i]);
        });
    }
    for (auto& th : pool) th.join();
}

std::optional<PointWitness> scan_point(std::size_t node, FrequencyCache& cache, const ScanOptions& options) {
    if (!(options.delta > 0.0)) throw InputError("scan threshold delta must be positive");
    if (!(options.k_min < options.k_max)) throw InputError("frequency interval needs K_min < K_max");
    for (int level = 0; level <= options.n_max; ++level) {
        for (double omega : new_points(options, level)) {
            if (near_spectrum(omega, options.sigma, options.band)) continue;
            const double g = cache.get(omega)[node];
            if (g > options.delta) {
                PointWitness w;
                w.node = node;
                w.x = cache.grid().node(node);
                w.level = level;
                w.omega = omega;
                w.grad_norm = g;
                return w;
            }
        }
    }
    return std::nullopt;
}

double certify_radius(const PointWitness& witness, FrequencyCache& cache, double delta) {
    const Grid& grid = cache.grid();
    const std::vector<double>& norms = cache.get(witness.omega);
    const GradientVectors& grads = cache.vectors(witness.omega);
    const double floor = 0.5 * delta;
    const int dim = grid.domain().dim();
    // The open ball B(x, r) passes iff r does not exceed the distance to the nearest failing location.
    double nearest_fail = std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < grid.size(); ++f) {
        const Point y = grid.node(f);
        if (!(norms[f] > floor)) nearest_fail = std::min(nearest_fail, distance(y, witness.x));
        const Index3 idx = grid.multi_index(f);
        // Half of the neighbour offsets in {-1,0,1}^d, so each pair is visited once.
        const int offsets = dim == 1 ? 3 : dim == 2 ? 9 : 27;
        for (int code = offsets / 2 + 1; code < offsets; ++code) {
            Index3 nb = idx;
            int c = code;
            bool inside = true;
            for (int a = 0; a < dim; ++a) {
                nb[static_cast<std::size_t>(a)] += c % 3 - 1;
                c /= 3;
                const int v = nb[static_cast<std::size_t>(a)];
                if (v < 0 || v >= grid.count(a)) inside = false;
            }
            if (!inside) continue;
            const std::size_t j = grid.flat_index(nb);
            const std::array<double, 3> mid{0.5 * (grads[f][0] + grads[j][0]), 0.5 * (grads[f][1] + grads[j][1]),
                                            0.5 * (grads[f][2] + grads[j][2])};
            if (magnitude(mid) > floor) continue;
            const Point z = grid.node(j);
            const Point m{0.5 * (y[0] + z[0]), 0.5 * (y[1] + z[1]), 0.5 * (y[2] + z[2])};
            nearest_fail = std::min(nearest_fail, distance(m, witness.x));
        }
    }
    const double h = grid.min_spacing();
    const double reach = grid.domain().diameter();
    double r = nearest_fail >= h ? h : 0.5 * h;
    while (2.0 * r <= nearest_fail && r <= reach) r *= 2.0;
    return r;
}

CoverResult build_cover(FrequencyCache& cache, const ScanOptions& options) {
    const Grid& grid = cache.grid();
    CoverResult result;
    result.delta = options.delta;
    cache.prefetch(new_points(options, 0));

    std::vector<bool> covered(grid.size(), false);
    std::map<double, std::vector<Ball>> balls;
    for (std::size_t f = 0; f < grid.size(); ++f) {
        if (covered[f]) continue;
        auto witness = scan_point(f, cache, options);
        if (!witness) {
            result.uncovered.push_back(f);
            result.uncovered_points.push_back(grid.node(f));
            continue;
        }
        witness->radius = certify_radius(*witness, cache, options.delta);
        for (std::size_t j = 0; j < grid.size(); ++j) {
            if (distance(grid.node(j), witness->x) < witness->radius) covered[j] = true;
        }
        balls[witness->omega].push_back({witness->x, witness->radius, f});
        result.n_final = std::max(result.n_final, witness->level);
        result.witnesses.push_back(*witness);
    }

    for (auto& [omega, list] : balls) {
        CoverPiece piece;
        piece.omega = omega;
        piece.balls = std::move(list);
        const std::vector<double>& norms = cache.get(omega);
        piece.min_grad = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const Point y = grid.node(j);
            for (const Ball& b : piece.balls) {
                if (distance(y, b.center) < b.radius) {
                    piece.min_grad = std::min(piece.min_grad, norms[j]);
                    break;
                }
            }
        }
        result.pieces.push_back(std::move(piece));
    }
    return result;
}

VerifyReport verify_cover(const CoverResult& cover, const GradientSource& source, double delta_check) {
    const Grid& grid = source.grid();
    VerifyReport report;
    report.delta_check = delta_check;
    std::vector<bool> inside_any(grid.size(), false);
    for (const CoverPiece& piece : cover.pieces) {
        const std::vector<double> norms = source.gradient_norms(piece.omega);
        PieceCheck check;
        check.omega = piece.omega;
        check.min_grad = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const Point y = grid.node(j);
            const bool inside = std::any_of(piece.balls.begin(), piece.balls.end(),
                                            [&](const Ball& b) { return distance(y, b.center) < b.radius; });
            if (!inside) continue;
            inside_any[j] = true;
            ++check.nodes_checked;
            check.min_grad = std::min(check.min_grad, norms[j]);
            if (!(norms[j] > delta_check)) check.violations.push_back(y);
        }
        report.violations += check.violations.size();
        report.pieces.push_back(std::move(check));
    }
    if (!cover.pieces.empty()) {
        report.uncovered_nodes = static_cast<std::size_t>(std::count(inside_any.begin(), inside_any.end(), false));
    }
    report.passed = report.violations == 0;
    return report;
}

}  // namespace hcs
