#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hcs/eigenbasis.hpp"
#include "hcs/error.hpp"

using namespace hcs;
using std::numbers::pi;

namespace {

const CoefficientField kUnit = CoefficientField::constant(1.0, 1.0, 1.0);

std::vector<double> lattice_eigenvalues(const std::vector<double>& sides, std::size_t count) {
    std::vector<double> out;
    const int d = static_cast<int>(sides.size());
    const int cap = d == 1 ? 200 : 40;
    for (int i = 1; i <= cap; ++i)
        for (int j = 1; j <= (d > 1 ? cap : 1); ++j)
            for (int k = 1; k <= (d > 2 ? cap : 1); ++k) {
                double v = std::pow(i / sides[0], 2);
                if (d > 1) v += std::pow(j / sides[1], 2);
                if (d > 2) v += std::pow(k / sides[2], 2);
                out.push_back(pi * pi * v);
            }
    std::sort(out.begin(), out.end());
    out.resize(count);
    return out;
}

double discrete_laplacian_eigenvalue(int l, double side, int nodes) {
    const double h = side / (nodes - 1);
    return 2.0 / (h * h) * (1.0 - std::cos(l * pi * h / side));
}

}  // namespace

TEST_CASE("closed-form spectrum of an interval") {
    const Spectrum s = closed_form_spectrum(build_domain(1, {2.0}), 10);
    REQUIRE(s.size() == 10);
    for (int l = 1; l <= 10; ++l) {
        CHECK(s.pairs[static_cast<std::size_t>(l - 1)].lambda == doctest::Approx(pi * pi * l * l / 4.0).epsilon(1e-15));
        CHECK(s.pairs[static_cast<std::size_t>(l - 1)].index == l);
    }
    CHECK(s.groups.size() == 10);
    CHECK(s.last_group_complete());
    const Point x{0.3, 0.0, 0.0};
    CHECK(closed_form_value(s.domain, s.pairs[2], x) == doctest::Approx(std::sin(3 * pi * 0.3 / 2.0)));
    CHECK(closed_form_gradient(s.domain, s.pairs[2], x)[0] ==
          doctest::Approx(1.5 * pi * std::cos(3 * pi * 0.3 / 2.0)));
}

TEST_CASE("unit cube multiplicities") {
    const Spectrum s = closed_form_spectrum(build_domain(3, {1.0, 1.0, 1.0}), 10);
    CHECK(s.pairs[0].lambda == doctest::Approx(3 * pi * pi));
    REQUIRE(s.groups.size() >= 3);
    CHECK(s.groups[0].size() == 1);
    REQUIRE(s.groups[1].size() == 3);
    for (std::size_t k : s.groups[1]) CHECK(s.pairs[k].lambda == doctest::Approx(6 * pi * pi));
    CHECK(s.pairs[1].modes == Index3{1, 1, 2});
    CHECK(s.pairs[2].modes == Index3{1, 2, 1});
    CHECK(s.pairs[3].modes == Index3{2, 1, 1});
    CHECK(s.groups[2].size() == 3);
    CHECK(s.pairs[4].lambda == doctest::Approx(9 * pi * pi));
}

TEST_CASE("closed form matches an independent lattice enumeration") {
    for (const auto& sides : std::vector<std::vector<double>>{{1.3}, {1.0, 2.0}, {1.0, 1.5, 0.7}}) {
        const auto expected = lattice_eigenvalues(sides, 80);
        const Spectrum s = closed_form_spectrum(build_domain(static_cast<int>(sides.size()), sides), 80);
        for (std::size_t k = 0; k < 80; ++k) CHECK(s.pairs[k].lambda == doctest::Approx(expected[k]).epsilon(1e-13));
        for (std::size_t k = 1; k < 80; ++k) CHECK(s.pairs[k - 1].lambda <= s.pairs[k].lambda);
    }
}

TEST_CASE("truncation inside a degenerate group is reported") {
    const Spectrum s = closed_form_spectrum(build_domain(3, {1.0, 1.0, 1.0}), 3);
    CHECK_FALSE(s.last_group_complete());
    CHECK(closed_form_spectrum(build_domain(3, {1.0, 1.0, 1.0}), 4).last_group_complete());
    CHECK_THROWS_AS(closed_form_spectrum(build_domain(1, {1.0}), 0), InputError);
}

TEST_CASE("numeric spectrum equals the discrete Laplacian eigenvalues") {
    const Grid g = build_grid(build_domain(1, {1.0}), 41);
    const Spectrum s = numeric_spectrum(kUnit, g, 8);
    REQUIRE(s.size() == 8);
    for (int l = 1; l <= 8; ++l)
        CHECK(s.pairs[static_cast<std::size_t>(l - 1)].lambda ==
              doctest::Approx(discrete_laplacian_eigenvalue(l, 1.0, 41)).epsilon(1e-10));
    CHECK(check_orthonormality(s, kUnit, g) <= 1e-8);
}

TEST_CASE("numeric eigenvalues converge at second order") {
    std::vector<double> err;
    for (int n : {21, 41, 81}) {
        const Spectrum s = numeric_spectrum(kUnit, build_grid(build_domain(1, {1.0}), n), 3);
        err.push_back(std::abs(s.pairs[0].lambda - pi * pi));
    }
    CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.05));
    CHECK(err[1] / err[2] == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("numeric 2D spectrum approaches the closed form") {
    const Domain dom = build_domain(2, {1.0, 2.0});
    const Spectrum exact = closed_form_spectrum(dom, 6);
    const Spectrum num = numeric_spectrum(kUnit, build_grid(dom, 41), 6);
    for (std::size_t k = 0; k < 6; ++k) CHECK(num.pairs[k].lambda == doctest::Approx(exact.pairs[k].lambda).epsilon(1e-2));
}

TEST_CASE("variable coefficient spectrum self-converges") {
    const auto c = CoefficientField::affine(1.0, 0.5, 0, 1.0, 2.0);
    const Domain dom = build_domain(1, {2.0});
    std::vector<double> lam;
    for (int n : {41, 81, 161}) lam.push_back(numeric_spectrum(c, build_grid(dom, n), 2).pairs[0].lambda);
    const double ratio = (lam[0] - lam[1]) / (lam[1] - lam[2]);
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("boundary fluxes on (0,2)") {
    const Grid g = build_grid(build_domain(1, {2.0}), 11);
    const Spectrum s = closed_form_spectrum(g.domain(), 2);
    const auto psi1 = boundary_flux(s, 0, kUnit, g);
    const auto psi2 = boundary_flux(s, 1, kUnit, g);
    REQUIRE(psi1.size() == 2);
    CHECK(psi1[0] == doctest::Approx(-pi / 2));
    CHECK(psi1[1] == doctest::Approx(-pi / 2));
    CHECK(psi2[0] == doctest::Approx(-pi));
    CHECK(psi2[1] == doctest::Approx(pi));

    const Grid fine = build_grid(g.domain(), 401);
    const Spectrum n = numeric_spectrum(kUnit, fine, 2);
    const auto npsi = boundary_flux(n, 0, kUnit, fine);
    CHECK(npsi[0] == doctest::Approx(-pi / 2).epsilon(1e-3));
    CHECK(npsi[1] == doctest::Approx(-pi / 2).epsilon(1e-3));
}

TEST_CASE("first eigenfunction flux is strictly negative at face interiors") {
    const Grid g = build_grid(build_domain(2, {1.0, 1.5}), 9);
    const Spectrum s = closed_form_spectrum(g.domain(), 1);
    const auto psi = boundary_flux(s, 0, kUnit, g);
    const auto& b = g.boundary();
    int face_interior = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        const Point x = g.node(b[i].node);
        const bool corner = (x[0] == 0.0 || x[0] == 1.0) && (x[1] == 0.0 || x[1] == 1.5);
        if (corner) continue;
        ++face_interior;
        CHECK(psi[i] < 0.0);
    }
    CHECK(face_interior > 0);
}

TEST_CASE("closed-form orthonormality and sign flips") {
    const Domain dom = build_domain(2, {1.0, 2.0});
    Spectrum s = closed_form_spectrum(dom, 10);
    CHECK(check_orthonormality(s, kUnit, build_grid(dom, 65), QuadratureRule::Simpson) <= 1e-6);
    const Grid g = build_grid(dom, 9);
    const auto before = eigenfunction_values(s, 3, g);
    s.flip_sign(3);
    const auto after = eigenfunction_values(s, 3, g);
    CHECK((before + after).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("cluster tolerance groups nearby eigenvalues") {
    Spectrum s = closed_form_spectrum(build_domain(2, {1.0, 1.0 + 1e-6}), 3);
    CHECK(s.groups.size() == 3);
    s = group_multiplicities(s, 1e-4);
    CHECK(s.groups.size() == 2);
    CHECK(s.group_ids() == std::vector<std::size_t>{0, 1, 1});
}
