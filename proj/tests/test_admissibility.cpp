#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hcs/admissibility.hpp"
#include "hcs/boundary.hpp"
#include "hcs/error.hpp"

using namespace hcs;
using std::numbers::pi;

namespace {

const CoefficientField kUnit = CoefficientField::constant(1.0, 1.0, 1.0);

std::vector<Point> admissible_points(const AdmissibilityReport& r) {
    std::vector<Point> out;
    for (const auto& v : r.points)
        if (v.admissible) out.push_back(v.x);
    return out;
}

}  // namespace

TEST_CASE("O_l membership on (0,2)") {
    const Grid g = build_grid(build_domain(1, {2.0}), 21);
    const Spectrum s = closed_form_spectrum(g.domain(), 4);
    const auto one = BoundaryDatum::constant(1.0);
    CHECK(o_l_membership(one, s, 1, kUnit, g));
    CHECK_FALSE(o_l_membership(one, s, 2, kUnit, g));
    CHECK(o_l_membership(one, s, 3, kUnit, g));
    const auto lin = BoundaryDatum::linear(g.domain(), 0);
    for (int l = 1; l <= 4; ++l) CHECK(o_l_membership(lin, s, l, kUnit, g));
    CHECK_THROWS_AS(o_l_membership(one, s, 0, kUnit, g), InputError);
    CHECK_THROWS_AS(o_l_membership(one, s, 5, kUnit, g), InputError);
}

TEST_CASE("constant datum on (0,2) is occulted exactly at the midpoint") {
    const Grid g = build_grid(build_domain(1, {2.0}), 201);
    const Spectrum s = closed_form_spectrum(g.domain(), 30);
    const auto r = admissibility_map(BoundaryDatum::constant(1.0), s, kUnit, g);
    CHECK_FALSE(r.global);
    REQUIRE(r.failures.size() == 1);
    CHECK(r.points[r.failures[0]].x[0] == 1.0);
    const auto occ = detect_occulting(r);
    REQUIRE(occ.size() == 1);
    CHECK(occ[0][0] == 1.0);
    for (const auto& v : r.points) {
        if (!v.admissible) continue;
        CHECK(v.witness_lambda == doctest::Approx(pi * pi / 4.0));
    }
}

TEST_CASE("linear datum on (0,2) is admissible everywhere") {
    const Grid g = build_grid(build_domain(1, {2.0}), 201);
    const Spectrum s = closed_form_spectrum(g.domain(), 30);
    const auto r = admissibility_map(BoundaryDatum::linear(g.domain(), 0), s, kUnit, g);
    CHECK(r.global);
    CHECK(r.failures.empty());
    const std::size_t mid = g.interior().size() / 2;
    CHECK(r.points[mid].x[0] == 1.0);
    CHECK(r.points[mid].witness_lambda == doctest::Approx(pi * pi));
}

TEST_CASE("group sums match the analytic series") {
    const Grid g = build_grid(build_domain(1, {2.0}), 41);
    const Spectrum s = closed_form_spectrum(g.domain(), 5);
    AdmissibilityOptions opts;
    opts.keep_group_sums = true;
    const ModalData data(BoundaryDatum::constant(1.0), s, kUnit, g, opts);
    for (std::size_t node : g.interior()) {
        const double x = g.node(node)[0];
        for (std::size_t k = 0; k < 5; ++k) {
            const int l = static_cast<int>(k) + 1;
            const double p = l % 2 ? -l * pi : 0.0;
            const double expected = p * (l * pi / 2.0) * std::cos(l * pi * x / 2.0);
            CHECK(data.group_sum(k, node)[0] == doctest::Approx(expected).epsilon(1e-12).scale(10.0));
        }
    }
}

TEST_CASE("unit cube strong admissibility witnesses") {
    const Grid g = build_grid(build_domain(3, {1.0, 1.0, 1.0}), 9);
    const Spectrum s = closed_form_spectrum(g.domain(), 10);
    const auto datum = BoundaryDatum::random_fourier(g.domain(), 7, 3);
    REQUIRE(o_l_membership(datum, s, 1, kUnit, g));
    REQUIRE(o_l_membership(datum, s, 4, kUnit, g));
    REQUIRE(s.pairs[3].modes == Index3{2, 1, 1});
    AdmissibilityOptions opts;
    opts.keep_group_sums = true;
    const ModalData data(datum, s, kUnit, g, opts);
    const auto r = strong_admissibility_map(data, 0, opts);
    REQUIRE(r.axis.has_value());
    CHECK(*r.axis == 0);
    CHECK(r.global);
    const double p211 = data.pairing()[3];
    for (const auto& v : r.points) {
        REQUIRE(v.witness_group.has_value());
        if (v.x[0] == 0.5) {
            CHECK(v.witness_lambda == doctest::Approx(6 * pi * pi));
            const double expected = p211 * std::sqrt(8.0) * 2.0 * pi * std::cos(pi) * std::sin(pi * v.x[1]) *
                                    std::sin(pi * v.x[2]);
            CHECK(data.group_sum(1, v.node)[0] == doctest::Approx(expected).epsilon(1e-12));
        } else {
            CHECK(v.witness_lambda == doctest::Approx(3 * pi * pi));
        }
    }
}

TEST_CASE("strong admissibility implies admissibility") {
    const Grid g = build_grid(build_domain(2, {1.0, 1.3}), 15);
    const Spectrum s = closed_form_spectrum(g.domain(), 20);
    const auto datum = BoundaryDatum::random_fourier(g.domain(), 3, 3);
    const ModalData data(datum, s, kUnit, g);
    const auto plain = admissibility_map(data);
    for (int axis = 0; axis < 2; ++axis) {
        const auto strong = strong_admissibility_map(data, axis);
        for (std::size_t i = 0; i < strong.points.size(); ++i)
            if (strong.points[i].admissible) CHECK(plain.points[i].admissible);
    }
    CHECK_THROWS_AS(strong_admissibility_map(data, 2), InputError);
}

TEST_CASE("verdicts are invariant under eigenvector sign flips and datum scaling") {
    const Grid g = build_grid(build_domain(2, {1.0, 1.0}), 13);
    Spectrum s = closed_form_spectrum(g.domain(), 25);
    const auto datum = BoundaryDatum::random_fourier(g.domain(), 11, 3);
    AdmissibilityOptions opts;
    opts.keep_group_sums = true;
    const auto base = admissibility_map(datum, s, kUnit, g, opts);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 5; ++i) s.flip_sign(rng() % s.size());
    const auto flipped = admissibility_map(datum, s, kUnit, g, opts);
    const auto scaled = admissibility_map(datum.scaled(3.0), closed_form_spectrum(g.domain(), 25), kUnit, g, opts);
    REQUIRE(base.points.size() == flipped.points.size());
    for (std::size_t i = 0; i < base.points.size(); ++i) {
        CHECK(base.points[i].admissible == flipped.points[i].admissible);
        CHECK(base.points[i].admissible == scaled.points[i].admissible);
        CHECK(base.points[i].witness_group == scaled.points[i].witness_group);
        for (std::size_t k = 0; k < base.points[i].group_sums.size(); ++k)
            for (std::size_t a = 0; a < 2; ++a) {
                const double b = base.points[i].group_sums[k][a];
                CHECK(std::abs(flipped.points[i].group_sums[k][a] - b) <= 1e-14 * std::max(1.0, std::abs(b)) * 100);
                CHECK(scaled.points[i].group_sums[k][a] == doctest::Approx(3.0 * b).epsilon(1e-12).scale(1.0));
            }
    }
}

TEST_CASE("admissible set grows with the truncation") {
    const Grid g = build_grid(build_domain(1, {2.0}), 101);
    const Spectrum s = closed_form_spectrum(g.domain(), 30);
    const auto one = BoundaryDatum::constant(1.0);
    std::size_t previous = 0;
    for (std::size_t L : {1u, 2u, 5u, 30u}) {
        AdmissibilityOptions opts;
        opts.truncation = L;
        const auto r = admissibility_map(one, s, kUnit, g, opts);
        const std::size_t n = admissible_points(r).size();
        CHECK(n >= previous);
        previous = n;
        CHECK(r.truncation == L);
    }
}

TEST_CASE("vanishing eigengradient nodes") {
    const Grid g = build_grid(build_domain(1, {2.0}), 21);
    const ModalData one_mode(BoundaryDatum::linear(g.domain(), 0), closed_form_spectrum(g.domain(), 1), kUnit, g);
    const auto nodes = vanishing_eigengradient_nodes(one_mode);
    REQUIRE(nodes.size() == 1);
    CHECK(g.node(nodes[0])[0] == 1.0);
    const ModalData two_modes(BoundaryDatum::linear(g.domain(), 0), closed_form_spectrum(g.domain(), 2), kUnit, g);
    CHECK(vanishing_eigengradient_nodes(two_modes).empty());
    // An admissible node never lies in the common zero set of all eigen-gradients.
    const auto r = admissibility_map(one_mode);
    for (const auto& v : r.points)
        if (v.admissible) CHECK(v.x[0] != 1.0);
}

TEST_CASE("truncation inside a degenerate group warns") {
    const Grid g = build_grid(build_domain(3, {1.0, 1.0, 1.0}), 7);
    const Spectrum s = closed_form_spectrum(g.domain(), 3);
    const auto r = admissibility_map(BoundaryDatum::random_fourier(g.domain(), 7, 3), s, kUnit, g);
    CHECK_FALSE(r.warnings.empty());
    CHECK(r.groups.size() == 1);
}

TEST_CASE("boundary nodes can be classified") {
    const Grid g = build_grid(build_domain(2, {1.0, 1.0}), 9);
    const Spectrum s = closed_form_spectrum(g.domain(), 10);
    AdmissibilityOptions opts;
    opts.include_boundary = true;
    const auto r = admissibility_map(BoundaryDatum::random_fourier(g.domain(), 2, 3), s, kUnit, g, opts);
    CHECK(r.points.size() == g.size());
    for (const auto& v : r.points) {
        const bool corner = (v.x[0] == 0.0 || v.x[0] == 1.0) && (v.x[1] == 0.0 || v.x[1] == 1.0);
        if (corner) CHECK_FALSE(v.admissible);
    }
}
