#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hcs/commands.hpp"
#include "hcs/error.hpp"
#include "hcs/scenario.hpp"

using namespace hcs;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = fs::path(HCS_SOURCE_DIR) / "scenarios";

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("hcs_cli_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

int run(const std::string& cmd, const std::string& scenario, const fs::path& out, CommandOptions o = {}) {
    o.out = out.string();
    std::ostringstream log, err;
    return run_command(cmd, kScenarios / scenario, o, log, err);
}

int shell(const std::string& args) {
    const int status = std::system((std::string(HCS_BINARY) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kMinimal = R"(# comment
[domain]
dim = 1
sides = 2

[frequency]
K_min = 1
K_max = 4
)";

}  // namespace

TEST_CASE("scenario parsing") {
    const Scenario s = parse_scenario(kMinimal, "mini");
    CHECK(s.domain.dim == 1);
    CHECK(s.domain.sides == std::vector<double>{2.0});
    CHECK(s.domain.nodes_per_axis == 101);
    CHECK(s.frequency.k_max == 4.0);
    CHECK(s.spectrum.count == 30);
    CHECK(std::find(s.defaults_applied.begin(), s.defaults_applied.end(), "spectrum.L = 30") != s.defaults_applied.end());

    try {
        parse_scenario("[domain]\ndim = 1\nsides = 2\n[frequency]\nK_min = 1\n", "bad");
        FAIL("expected missing field");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("missing required field frequency.K_max") != std::string::npos);
    }
    try {
        parse_scenario(std::string(kMinimal) + "bogus = 3\n", "bad");
        FAIL("expected unknown key");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("bad:9:") != std::string::npos);
        CHECK(std::string(e.what()).find("bogus") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_scenario(std::string(kMinimal) + "[nowhere]\n"), InputError);
    CHECK_THROWS_AS(parse_scenario("[domain]\ndim = x\n"), InputError);
    CHECK_THROWS_AS(parse_scenario("[domain]\ndim = 1\ndim = 1\nsides = 2\n[frequency]\nK_min = 1\nK_max = 2\n"),
                    InputError);
    CHECK_THROWS_AS(load_scenario(kScenarios / "does_not_exist.cfg"), InputError);
}

TEST_CASE("scenario files round-trip") {
    for (const auto& entry : fs::directory_iterator(kScenarios)) {
        if (entry.path().extension() != ".cfg") continue;
        const Scenario s = load_scenario(entry.path());
        const Scenario back = parse_scenario(write_scenario(s), s.name, s.base_dir);
        CHECK(back == s);
        CHECK(write_scenario(back) == write_scenario(s));
    }
}

TEST_CASE("shortest round-trip number formatting") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2.0) == "2");
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng);
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("overrides are validated") {
    const Scenario s = load_scenario(kScenarios / "example_linear.cfg");
    CommandOptions o;
    o.n_max = 2;
    o.delta = 0.1;
    o.grid = 51;
    const Scenario t = apply_overrides(s, o);
    CHECK(t.frequency.n_max == 2);
    CHECK(t.thresholds.delta == 0.1);
    CHECK(t.solve_nodes() == 51);
    o.delta = -1.0;
    CHECK_THROWS_AS(apply_overrides(s, o), InputError);
}

TEST_CASE("spectrum command") {
    const fs::path out = scratch("spectrum");
    REQUIRE(run("spectrum", "example_2_3.cfg", out) == kExitOk);
    const auto j = read_json(out / "spectrum.json");
    CHECK(j["spectrum"]["L"] == 30);
    CHECK(j["spectrum"]["eigenvalues"][0].get<double>() == doctest::Approx(pi * pi / 4.0).epsilon(1e-15));
    CHECK(j["spectrum"]["groups"].size() == 30);
    CHECK(j["scenario"]["name"] == "example_2_3");
}

TEST_CASE("admissibility command flags the occulting midpoint") {
    const fs::path out = scratch("adm");
    CHECK(run("admissibility", "example_2_3.cfg", out) == kExitMathFailure);
    const auto j = read_json(out / "admissibility.json")["admissibility"];
    CHECK(j["global"] == false);
    REQUIRE(j["failures"].size() == 1);
    CHECK(j["failures"][0][0].get<double>() == 1.0);

    const fs::path out2 = scratch("adm_linear");
    CHECK(run("admissibility", "example_linear.cfg", out2) == kExitOk);
    CHECK(read_json(out2 / "admissibility.json")["admissibility"]["global"] == true);
}

TEST_CASE("cover, verify and determinism") {
    const fs::path a = scratch("cover_a");
    const fs::path b = scratch("cover_b");
    CHECK(run("cover", "example_linear.cfg", a) == kExitOk);
    CommandOptions threaded;
    threaded.threads = 3;
    CHECK(run("cover", "example_linear.cfg", b, threaded) == kExitOk);
    CHECK(slurp(a / "cover.json") == slurp(b / "cover.json"));
    const auto c = read_json(a / "cover.json")["cover"];
    CHECK(c["complete"] == true);
    CHECK(c["frequencies_used"].get<int>() >= 2);

    const fs::path v = scratch("verify");
    CHECK(run("verify", "example_linear.cfg", v) == kExitOk);
    const auto r = read_json(v / "verify.json")["verify"];
    CHECK(r["passed"] == true);
    CHECK(r["delta_check"].get<double>() == 0.025);

    const fs::path u = scratch("cover_const");
    CHECK(run("cover", "example_2_3.cfg", u) == kExitMathFailure);
    const auto uc = read_json(u / "cover.json")["cover"];
    REQUIRE(uc["uncovered"].size() == 1);
    CHECK(uc["uncovered"][0][0].get<double>() == 1.0);
}

TEST_CASE("solve command writes the critical trace") {
    const fs::path out = scratch("solve");
    CommandOptions o;
    o.n_max = 2;
    o.omega = 1.0;
    CHECK(run("solve", "example_linear.cfg", out, o) == kExitOk);
    const std::string csv = slurp(out / "critical_trace.csv");
    CHECK(csv.rfind("omega,x1,grad_norm,note\n", 0) == 0);
    CHECK(fs::exists(out / "solution.csv"));
}

TEST_CASE("input errors exit with status 2") {
    std::ostringstream log, err;
    Scenario s = load_scenario(kScenarios / "example_linear.cfg");
    CHECK(run_command("nonsense", s, {}, log, err) == kExitInputError);
    s.domain.sides = {-1.0};
    CommandOptions o;
    o.out = scratch("bad").string();
    CHECK(run_command("spectrum", s, o, log, err) == kExitInputError);
    CHECK(err.str().find("domain.sides") != std::string::npos);
    CHECK(run_command("spectrum", kScenarios / "missing.cfg", o, log, err) == kExitInputError);
}

TEST_CASE("critical trace rows") {
    const Grid g = build_grid(build_domain(1, {2.0}), 401);
    std::vector<double> sigma;
    for (int l = 1; l <= 10; ++l) sigma.push_back(pi * pi * l * l / 4.0);
    const HelmholtzSolver solver(g, CoefficientField::constant(1.0, 1.0, 1.0), sigma);
    const auto lin = BoundaryDatum::endpoints(g.domain(), 0.0, 1.0);
    const auto rows = emit_critical_trace(lin, {1.0, 4.0, pi * pi / 4.0, -1.0}, solver);
    std::vector<CriticalRow> at1, at4, res, neg;
    for (const auto& r : rows) {
        if (r.omega == 1.0) at1.push_back(r);
        else if (r.omega == 4.0) at4.push_back(r);
        else if (r.omega == -1.0) neg.push_back(r);
        else res.push_back(r);
    }
    const double h = g.min_spacing();
    REQUIRE(at1.size() == 1);
    CHECK(std::abs((*at1[0].x)[0] - pi / 2) <= h);
    REQUIRE(at4.size() == 1);
    CHECK(std::abs((*at4[0].x)[0] - pi / 4) <= h);
    REQUIRE(res.size() == 1);
    CHECK_FALSE(res[0].x.has_value());
    CHECK_FALSE(res[0].note.empty());
    REQUIRE(neg.size() == 1);
    CHECK_FALSE(neg[0].x.has_value());
    const std::string csv = critical_trace_csv(rows, 1);
    CHECK(csv.rfind("omega,x1,grad_norm,note\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(rows.size() + 1));
}

TEST_CASE("command line binary") {
    const std::string cfg = (kScenarios / "example_linear.cfg").string();
    const fs::path out = scratch("binary");
    CHECK(shell("--help") == 0);
    CHECK(shell("") == 2);
    CHECK(shell("bogus " + cfg) == 2);
    CHECK(shell("spectrum /nonexistent.cfg") == 2);
    CHECK(shell("spectrum " + cfg + " --n-max notanumber") == 2);
    CHECK(shell("spectrum " + cfg + " --out " + out.string()) == 0);
    CHECK(fs::exists(out / "spectrum.json"));
    CHECK(shell("admissibility " + (kScenarios / "example_2_3.cfg").string() + " --out " + out.string()) == 1);
    CHECK(shell("cover " + cfg + " --out " + (out / "t1").string()) == 0);
    CHECK(std::system(("HCS_THREADS=2 " + std::string(HCS_BINARY) + " cover " + cfg + " --out " +
                       (out / "t2").string() + " >/dev/null 2>&1").c_str()) == 0);
    CHECK(slurp(out / "t1" / "cover.json") == slurp(out / "t2" / "cover.json"));
}
