#include "hcs/report.hpp"

#include <cmath>
#include <fstream>

#include "hcs/error.hpp"

namespace hcs {

namespace {

Json number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

}  // namespace

Json point_json(const Point& x, int dim) {
    Json a = Json::array();
    for (int i = 0; i < dim; ++i) a.push_back(x[static_cast<std::size_t>(i)]);
    return a;
}

Json scenario_json(const Scenario& scenario) {
    Json j;
    j["name"] = scenario.name;
    Json config = Json::object();
    for (const auto& [section, entries] : scenario_sections(scenario)) {
        if (section == "output") continue;
        Json s = Json::object();
        for (const auto& [key, value] : entries) s[key] = value;
        config[section] = s;
    }
    j["config"] = config;
    j["defaults_applied"] = scenario.defaults_applied;
    return j;
}

Json spectrum_json(const Spectrum& spectrum) {
    Json j;
    const int dim = spectrum.domain.dim();
    j["backend"] = spectrum.backend == Backend::ClosedForm ? "closed-form" : "numeric";
    j["L"] = spectrum.size();
    j["cluster_tol"] = spectrum.cluster_tol;
    j["last_group_complete"] = spectrum.last_group_complete();
    j["next_lambda"] = spectrum.next_lambda ? Json(*spectrum.next_lambda) : Json(nullptr);

    const std::vector<std::size_t> ids = spectrum.group_ids();
    Json pairs = Json::array();
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
        const EigenPair& p = spectrum.pairs[k];
        Json e;
        e["l"] = p.index;
        e["lambda"] = p.lambda;
        e["group_id"] = ids[k];
        if (spectrum.backend == Backend::ClosedForm) {
            Json modes = Json::array();
            for (int i = 0; i < dim; ++i) modes.push_back(p.modes[static_cast<std::size_t>(i)]);
            e["multi_index"] = modes;
        }
        pairs.push_back(e);
    }
    Json groups = Json::array();
    for (const auto& g : spectrum.groups) {
        Json e;
        e["lambda"] = spectrum.pairs[g.front()].lambda;
        e["multiplicity"] = g.size();
        Json idx = Json::array();
        for (std::size_t k : g) idx.push_back(k + 1);
        e["indices"] = idx;
        groups.push_back(e);
    }
    j["eigenvalues"] = spectrum.eigenvalues();
    j["pairs"] = pairs;
    j["groups"] = groups;
    return j;
}

Json admissibility_json(const AdmissibilityReport& report, const Spectrum& spectrum, int dim) {
    Json j;
    j["L"] = report.truncation;
    j["threshold"] = report.threshold;
    j["global"] = report.global;
    j["axis"] = report.axis ? Json(*report.axis + 1) : Json(nullptr);
    Json tested = Json::array();
    for (std::size_t g : report.groups) tested.push_back(spectrum.pairs[spectrum.groups[g].front()].lambda);
    j["tested_group_lambdas"] = tested;
    j["warnings"] = report.warnings;
    Json failures = Json::array();
    for (std::size_t i : report.failures) failures.push_back(point_json(report.points[i].x, dim));
    j["failures"] = failures;
    Json points = Json::array();
    for (const auto& v : report.points) {
        Json p;
        p["x"] = point_json(v.x, dim);
        p["admissible"] = v.admissible;
        p["witness_lambda"] = v.witness_group ? Json(v.witness_lambda) : Json(nullptr);
        p["max_norm"] = v.max_norm;
        points.push_back(p);
    }
    j["per_point"] = points;
    return j;
}

Json cover_json(const CoverResult& cover, int dim) {
    Json j;
    j["delta"] = cover.delta;
    j["n_final"] = cover.n_final;
    j["complete"] = cover.complete();
    j["frequencies_used"] = cover.pieces.size();
    Json pieces = Json::array();
    for (const auto& piece : cover.pieces) {
        Json p;
        p["omega"] = piece.omega;
        p["min_grad"] = number(piece.min_grad);
        Json balls = Json::array();
        for (const auto& b : piece.balls) {
            Json e;
            e["center"] = point_json(b.center, dim);
            e["radius"] = b.radius;
            balls.push_back(e);
        }
        p["balls"] = balls;
        pieces.push_back(p);
    }
    j["pieces"] = pieces;
    Json uncovered = Json::array();
    for (const auto& x : cover.uncovered_points) uncovered.push_back(point_json(x, dim));
    j["uncovered"] = uncovered;
    Json witnesses = Json::array();
    for (const auto& w : cover.witnesses) {
        Json e;
        e["x"] = point_json(w.x, dim);
        e["level"] = w.level;
        e["omega"] = w.omega;
        e["grad_norm"] = w.grad_norm;
        e["radius"] = w.radius;
        witnesses.push_back(e);
    }
    j["witnesses"] = witnesses;
    return j;
}

Json verify_json(const VerifyReport& report, int dim) {
    Json j;
    j["passed"] = report.passed;
    j["delta_check"] = report.delta_check;
    j["violations"] = report.violations;
    j["uncovered_check_nodes"] = report.uncovered_nodes;
    Json pieces = Json::array();
    for (const auto& p : report.pieces) {
        Json e;
        e["omega"] = p.omega;
        e["nodes_checked"] = p.nodes_checked;
        e["min_grad"] = number(p.min_grad);
        Json v = Json::array();
        for (const auto& x : p.violations) v.push_back(point_json(x, dim));
        e["violations"] = v;
        pieces.push_back(e);
    }
    j["pieces"] = pieces;
    return j;
}

Json fit_json(const FitResult& fit) {
    Json j;
    j["exponent"] = number(fit.exponent);
    j["raw_slope"] = number(fit.raw_slope);
    j["low"] = number(fit.low);
    j["high"] = number(fit.high);
    j["residual"] = number(fit.residual);
    j["l_min"] = fit.l_min;
    j["l_max"] = fit.l_max;
    j["pass"] = fit.pass;
    return j;
}

std::string dump(const Json& json) { return json.dump(2) + "\n"; }

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + tmp.string() + "'");
        out << content;
        if (!out.flush()) throw Error("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace hcs
