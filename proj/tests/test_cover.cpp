#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hcs/cover.hpp"
#include "hcs/error.hpp"

using namespace hcs;
using std::numbers::pi;

namespace {

std::vector<double> sigma_interval(int count) {
    std::vector<double> s;
    for (int l = 1; l <= count; ++l) s.push_back(pi * pi * l * l / 4.0);
    return s;
}

ScanOptions options(double delta, int n_max = 4) {
    ScanOptions o;
    o.k_min = 1.0;
    o.k_max = 4.0;
    o.n_max = n_max;
    o.delta = delta;
    o.sigma = sigma_interval(10);
    return o;
}

Grid interval(int nodes) { return build_grid(build_domain(1, {2.0}), nodes); }

bool same_cover(const CoverResult& a, const CoverResult& b) {
    if (a.n_final != b.n_final || a.pieces.size() != b.pieces.size() || a.uncovered != b.uncovered) return false;
    for (std::size_t i = 0; i < a.pieces.size(); ++i) {
        if (a.pieces[i].omega != b.pieces[i].omega || a.pieces[i].balls.size() != b.pieces[i].balls.size()) return false;
        for (std::size_t k = 0; k < a.pieces[i].balls.size(); ++k)
            if (a.pieces[i].balls[k].radius != b.pieces[i].balls[k].radius ||
                a.pieces[i].balls[k].node != b.pieces[i].balls[k].node)
                return false;
    }
    return true;
}

}  // namespace

TEST_CASE("dyadic frequency grids") {
    const auto g = frequency_grid(1.0, 4.0, 2);
    CHECK(g.points == std::vector<double>{1.0, 1.75, 2.5, 3.25, 4.0});
    CHECK(frequency_grid(1.0, 4.0, 0).points == std::vector<double>{1.0, 4.0});
    for (int n = 0; n < 10; ++n) {
        const auto coarse = frequency_grid(0.3, 7.1, n);
        const auto fine = frequency_grid(0.3, 7.1, n + 1);
        REQUIRE(fine.points.size() == 2 * coarse.points.size() - 1);
        for (std::size_t i = 0; i < coarse.points.size(); ++i) CHECK(coarse.points[i] == fine.points[2 * i]);
        for (std::size_t i = 0; i < coarse.points.size(); ++i)
            CHECK(frequency_point(0.3, 7.1, n, i) == coarse.points[i]);
    }
    CHECK_THROWS_AS(frequency_grid(4.0, 1.0, 2), InputError);
    CHECK_THROWS_AS(frequency_grid(1.0, 1.0, 2), InputError);
    CHECK_THROWS_AS(frequency_grid(1.0, 2.0, -1), InputError);
}

TEST_CASE("spectrum exclusion") {
    const auto g = exclude_spectrum(frequency_grid(1.0, 4.0, 2), {2.5, 10.0}, 1e-6);
    CHECK(g.excluded == std::vector<bool>{false, false, true, false, false});
    CHECK(g.usable() == std::vector<double>{1.0, 1.75, 3.25, 4.0});
    CHECK_THROWS_AS(exclude_spectrum(frequency_grid(1.0, 4.0, 0), {1.0, 4.0}, 1e-6), InputError);
}

TEST_CASE("scan_point against closed-form gradients") {
    const Grid g = interval(33);
    const ClosedFormGradientSource source(g, 0.0, 1.0);
    FrequencyCache cache(source);

    SUBCASE("first frequency already works") {
        const auto w = scan_point(*g.find_node({0.5, 0, 0}), cache, options(0.5));
        REQUIRE(w.has_value());
        CHECK(w->level == 0);
        CHECK(w->omega == 1.0);
        CHECK(w->grad_norm == doctest::Approx(std::cos(0.5) / std::sin(2.0)).epsilon(1e-14));
    }
    SUBCASE("near the omega = 1 critical point the witness moves to omega = 4") {
        const std::size_t node = g.nearest_node({pi / 2, 0, 0});
        const auto w = scan_point(node, cache, options(0.05));
        REQUIRE(w.has_value());
        CHECK(w->omega == 4.0);
        const double x = g.node(node)[0];
        CHECK(w->grad_norm == doctest::Approx(std::abs(2.0 * std::cos(2.0 * x) / std::sin(4.0))).epsilon(1e-14));
        CHECK(w->grad_norm == doctest::Approx(2.6427).epsilon(1e-3));
    }
    SUBCASE("constant datum has no witness at the midpoint") {
        const ClosedFormGradientSource flat(g, 1.0, 1.0);
        FrequencyCache c(flat);
        CHECK_FALSE(scan_point(*g.find_node({1.0, 0, 0}), c, options(0.05)).has_value());
    }
}

TEST_CASE("certified radius") {
    const Grid g = interval(33);
    const ClosedFormGradientSource source(g, 0.0, 1.0);
    FrequencyCache cache(source);
    const std::size_t node = *g.find_node({0.5, 0, 0});
    const auto w = scan_point(node, cache, options(0.05));
    REQUIRE(w.has_value());
    const double r = certify_radius(*w, cache, 0.05);
    CHECK(r >= 0.9);
    // Every node in the open ball keeps |u'| > delta / 2.
    const auto& grad = cache.get(w->omega);
    for (std::size_t f = 0; f < g.size(); ++f)
        if (std::abs(g.node(f)[0] - 0.5) < r) CHECK(grad[f] > 0.025);
    double previous = r;
    for (double delta : {0.2, 0.5, 1.0}) {
        const double rd = certify_radius(*w, cache, delta);
        CHECK(rd <= previous);
        previous = rd;
    }
}

TEST_CASE("certification sees a gradient zero between nodes") {
    const Grid g = interval(33);
    const ClosedFormGradientSource source(g, 0.0, 1.0);
    FrequencyCache cache(source);
    const std::size_t node = g.nearest_node({pi / 2, 0, 0});
    auto w = scan_point(node, cache, options(0.05));
    REQUIRE(w.has_value());
    REQUIRE(w->omega == 4.0);
    // At omega = 4 the exact gradient vanishes at pi/4, strictly between the nodes 0.75 and 0.8125.
    CHECK(cache.get(4.0)[g.nearest_node({0.75, 0, 0})] > 0.025);
    CHECK(cache.get(4.0)[g.nearest_node({0.8125, 0, 0})] > 0.025);
    CHECK(certify_radius(*w, cache, 0.05) <= g.node(node)[0] - pi / 4);
}

TEST_CASE("cover and verification for the linear datum") {
    const Grid g = interval(33);
    const ClosedFormGradientSource source(g, 0.0, 1.0);
    FrequencyCache cache(source);
    const auto cover = build_cover(cache, options(0.05));
    CHECK(cover.complete());
    CHECK(cover.pieces.size() >= 2);
    for (std::size_t i = 1; i < cover.pieces.size(); ++i) CHECK(cover.pieces[i - 1].omega < cover.pieces[i].omega);
    for (const auto& p : cover.pieces) CHECK(p.min_grad > 0.025);

    const ClosedFormGradientSource fine(interval(65), 0.0, 1.0);
    const auto report = verify_cover(cover, fine, 0.025);
    CHECK(report.passed);
    CHECK(report.violations == 0);
    CHECK(report.uncovered_nodes == 0);

    CoverResult tampered = cover;
    for (auto& p : tampered.pieces)
        for (auto& b : p.balls) b.radius *= 10.0;
    CHECK_FALSE(verify_cover(tampered, fine, 0.025).passed);

    CHECK(verify_cover(CoverResult{}, fine, 0.025).passed);
}

TEST_CASE("constant datum leaves the midpoint uncovered") {
    const Grid g = interval(33);
    const ClosedFormGradientSource source(g, 1.0, 1.0);
    FrequencyCache cache(source);
    const auto cover = build_cover(cache, options(0.05));
    CHECK_FALSE(cover.complete());
    REQUIRE(cover.uncovered_points.size() == 1);
    CHECK(cover.uncovered_points[0][0] == 1.0);
}

TEST_CASE("direct solver source agrees with the closed form") {
    const Grid g = interval(201);
    auto solver = std::make_shared<HelmholtzSolver>(g, CoefficientField::constant(1.0, 1.0, 1.0), sigma_interval(10),
                                                    SolverOptions{1e-6, true});
    const DirectGradientSource direct(solver, BoundaryDatum::endpoints(g.domain(), 0.0, 1.0));
    const ClosedFormGradientSource exact(g, 0.0, 1.0);
    for (double w : {1.0, 3.25}) {
        const auto a = direct.gradient_norms(w);
        const auto b = exact.gradient_norms(w);
        for (std::size_t f = 0; f < g.size(); ++f) CHECK(std::abs(a[f] - b[f]) <= 1e-5);
    }
}

TEST_CASE("covers are deterministic and independent of the thread count") {
    const Grid g = build_grid(build_domain(2, {1.0, 1.0}), 17);
    auto solver = std::make_shared<HelmholtzSolver>(g, CoefficientField::constant(1.0, 1.0, 1.0),
                                                    closed_form_spectrum(g.domain(), 20).eigenvalues());
    const DirectGradientSource source(solver, BoundaryDatum::random_fourier(g.domain(), 4, 3));
    ScanOptions o;
    o.k_min = 5.0;
    o.k_max = 15.0;
    o.n_max = 3;
    o.delta = 0.05;
    o.sigma = solver->sigma();
    FrequencyCache c1(source, 1);
    FrequencyCache c2(source, 1);
    FrequencyCache c4(source, 4);
    const auto a = build_cover(c1, o);
    const auto b = build_cover(c2, o);
    const auto c = build_cover(c4, o);
    CHECK(same_cover(a, b));
    CHECK(same_cover(a, c));
    CHECK(c1.solves() <= static_cast<std::size_t>(frequency_grid(5.0, 15.0, 3).points.size()));
}
