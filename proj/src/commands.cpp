#include "hcs/commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>

#include "hcs/admissibility.hpp"
#include "hcs/cover.hpp"
#include "hcs/diagnostics.hpp"
#include "hcs/error.hpp"
#include "hcs/report.hpp"

namespace hcs {

namespace {

struct Context {
    Scenario scenario;
    Grid grid;
    CoefficientField coeffs;
    BoundaryDatum g;
    Spectrum spectrum;
    std::filesystem::path out;
    unsigned threads;

    Context(const Scenario& s, unsigned threads_)
        : scenario(s),
          grid(scenario_grid(s, s.solve_nodes())),
          coeffs(scenario_coefficients(s, grid)),
          g(scenario_boundary(s)),
          spectrum(scenario_spectrum(s, coeffs, grid)),
          out(s.output_dir),
          threads(std::max(1u, threads_)) {
        const EllipticityReport e = validate_ellipticity(coeffs, grid);
        if (!e.pass) {
            std::ostringstream os;
            os.precision(17);
            os << "coefficients.lambda_bound: " << e.lambda_bound << " does not bound the coefficients (a in [" << e.a_min
               << ", " << e.a_max << "], q in [" << e.q_min << ", " << e.q_max << "])";
            throw InputError(os.str());
        }
        if (scenario.thresholds.delta == 0.0) scenario.thresholds.delta = pilot_delta();
    }

    // 1e-2 * max |grad u| at the first frequency of K^(n_max) outside the exclusion band.
    double pilot_delta() const {
        const auto fg = exclude_spectrum(frequency_grid(scenario.frequency.k_min, scenario.frequency.k_max,
                                                        scenario.frequency.n_max),
                                         spectrum.eigenvalues(), scenario.frequency.band);
        const auto norms = solver(grid)->solve(fg.usable().front(), g).gradient_norms();
        const double top = *std::max_element(norms.begin(), norms.end());
        if (!(top > 0.0)) throw InputError("thresholds.delta: pilot solve has a vanishing gradient; set delta explicitly");
        return 1e-2 * top;
    }

    int dim() const { return grid.dim(); }

    std::shared_ptr<const HelmholtzSolver> solver(const Grid& on, bool richardson = false) const {
        SolverOptions o;
        o.resonance_band = scenario.frequency.band;
        o.richardson = richardson;
        return std::make_shared<HelmholtzSolver>(on, coeffs, spectrum.eigenvalues(), o);
    }

    ScanOptions scan_options() const {
        ScanOptions o;
        o.k_min = scenario.frequency.k_min;
        o.k_max = scenario.frequency.k_max;
        o.n_max = scenario.frequency.n_max;
        o.delta = scenario.thresholds.delta;
        o.sigma = spectrum.eigenvalues();
        o.band = scenario.frequency.band;
        return o;
    }

    Json header() const {
        Json j;
        j["scenario"] = scenario_json(scenario);
        return j;
    }

    void write(const std::string& file, const std::string& content, std::ostream& log) const {
        write_atomic(out / file, content);
        log << "wrote " << (out / file).string() << "\n";
    }
};

Json with_header(const Context& ctx, const std::string& key, Json body) {
    Json j = ctx.header();
    j[key] = std::move(body);
    return j;
}

CoverResult run_cover(const Context& ctx) {
    const auto solver = ctx.solver(ctx.grid);
    DirectGradientSource source(solver, ctx.g);
    FrequencyCache cache(source, ctx.threads);
    return build_cover(cache, ctx.scan_options());
}

void print_cover(const CoverResult& cover, int dim, std::ostream& log) {
    log << "cover: " << cover.pieces.size() << " frequencies, n_final = " << cover.n_final << ", "
        << cover.uncovered.size() << " uncovered nodes\n";
    for (const auto& x : cover.uncovered_points) {
        log << "  uncovered x = (";
        for (int i = 0; i < dim; ++i) log << (i ? ", " : "") << format_double(x[static_cast<std::size_t>(i)]);
        log << ")\n";
    }
}

int cmd_spectrum(const Context& ctx, std::ostream& log) {
    Json body = spectrum_json(ctx.spectrum);
    if (ctx.spectrum.backend == Backend::Numeric) {
        body["orthonormality_deviation"] = check_orthonormality(ctx.spectrum, ctx.coeffs, ctx.grid);
    }
    ctx.write("spectrum.json", dump(with_header(ctx, "spectrum", body)), log);
    log << "lambda_1 = " << format_double(ctx.spectrum.pairs.front().lambda) << ", " << ctx.spectrum.groups.size()
        << " groups\n";
    return kExitOk;
}

int cmd_solve(const Context& ctx, const CommandOptions& options, std::ostream& log) {
    const auto solver = ctx.solver(ctx.grid);
    const FrequencyGrid fg = frequency_grid(ctx.scenario.frequency.k_min, ctx.scenario.frequency.k_max,
                                            ctx.scenario.frequency.n_max);
    const auto rows = emit_critical_trace(ctx.g, fg.points, *solver);
    ctx.write("critical_trace.csv", critical_trace_csv(rows, ctx.dim()), log);
    if (options.omega) {
        const SolutionField u = solver->solve(*options.omega, ctx.g);
        std::ostringstream csv;
        for (int i = 0; i < ctx.dim(); ++i) csv << "x" << i + 1 << ",";
        csv << "u,grad_norm\n";
        const auto norms = u.gradient_norms();
        for (std::size_t f = 0; f < ctx.grid.size(); ++f) {
            const Point x = ctx.grid.node(f);
            for (int i = 0; i < ctx.dim(); ++i) csv << format_double(x[static_cast<std::size_t>(i)]) << ",";
            csv << format_double(u.values[static_cast<Eigen::Index>(f)]) << "," << format_double(norms[f]) << "\n";
        }
        ctx.write("solution.csv", csv.str(), log);
    }
    return kExitOk;
}

int cmd_admissibility(const Context& ctx, std::ostream& log) {
    AdmissibilityOptions o;
    o.threshold = ctx.scenario.thresholds.eps_adm;
    o.include_boundary = ctx.scenario.admissibility.include_boundary;
    const ModalData data(ctx.g, ctx.spectrum, ctx.coeffs, ctx.grid, o);
    const int axis = ctx.scenario.admissibility.axis;
    const AdmissibilityReport report =
        axis == 0 ? admissibility_map(data, o) : strong_admissibility_map(data, axis - 1, o);
    ctx.write("admissibility.json", dump(with_header(ctx, "admissibility", admissibility_json(report, ctx.spectrum, ctx.dim()))), log);
    for (const auto& w : report.warnings) log << "warning: " << w << "\n";
    log << (report.global ? "admissible at every tested node" : "occulting points found: ")
        << (report.global ? "" : std::to_string(report.failures.size())) << "\n";
    return report.global ? kExitOk : kExitMathFailure;
}

int cmd_scan(const Context& ctx, std::ostream& log) {
    const auto solver = ctx.solver(ctx.grid);
    DirectGradientSource source(solver, ctx.g);
    FrequencyCache cache(source, ctx.threads);
    const ScanOptions o = ctx.scan_options();
    Json nodes = Json::array();
    std::size_t missing = 0;
    for (std::size_t f = 0; f < ctx.grid.size(); ++f) {
        Json e;
        e["x"] = point_json(ctx.grid.node(f), ctx.dim());
        if (auto w = scan_point(f, cache, o)) {
            e["level"] = w->level;
            e["omega"] = w->omega;
            e["grad_norm"] = w->grad_norm;
        } else {
            e["level"] = nullptr;
            e["omega"] = nullptr;
            e["grad_norm"] = nullptr;
            ++missing;
        }
        nodes.push_back(e);
    }
    Json body;
    body["delta"] = o.delta;
    body["n_max"] = o.n_max;
    body["without_witness"] = missing;
    body["nodes"] = nodes;
    ctx.write("scan.json", dump(with_header(ctx, "scan", body)), log);
    log << missing << " nodes without a witness frequency\n";
    return missing == 0 ? kExitOk : kExitMathFailure;
}

int cmd_cover(const Context& ctx, std::ostream& log) {
    const CoverResult cover = run_cover(ctx);
    ctx.write("cover.json", dump(with_header(ctx, "cover", cover_json(cover, ctx.dim()))), log);
    print_cover(cover, ctx.dim(), log);
    return cover.complete() ? kExitOk : kExitMathFailure;
}

int cmd_verify(const Context& ctx, std::ostream& log) {
    const CoverResult cover = run_cover(ctx);
    ctx.write("cover.json", dump(with_header(ctx, "cover", cover_json(cover, ctx.dim()))), log);
    print_cover(cover, ctx.dim(), log);
    const Grid fine = scenario_grid(ctx.scenario, ctx.scenario.verify_nodes());
    DirectGradientSource source(ctx.solver(fine), ctx.g);
    const VerifyReport report = verify_cover(cover, source, 0.5 * ctx.scenario.thresholds.delta);
    ctx.write("verify.json", dump(with_header(ctx, "verify", verify_json(report, ctx.dim()))), log);
    log << "verify at delta/2 on " << ctx.scenario.verify_nodes() << " nodes per axis: "
        << (report.passed ? "passed" : "failed") << " (" << report.violations << " violations)\n";
    return report.passed && cover.complete() ? kExitOk : kExitMathFailure;
}

std::string status(bool ok, bool hard) { return ok ? "pass" : hard ? "fail" : "warn"; }

int cmd_diagnose(const Context& ctx, std::ostream& log) {
    const Scenario& s = ctx.scenario;
    const int d = ctx.dim();
    Json body;
    bool failed = false;

    const Spectrum laplacian = closed_form_spectrum(ctx.grid.domain(), d == 3 ? 300 : 200);
    const FitResult weyl = weyl_fit(laplacian, d);
    Json w = fit_json(weyl);
    w["expected"] = 2.0 / d;
    w["status"] = status(weyl.pass, true);
    failed = failed || !weyl.pass;
    body["weyl"] = w;

    const std::vector<double> pairing = boundary_pairings(ctx.g, ctx.spectrum, ctx.coeffs, ctx.grid);
    const FitResult bound = coefficient_bound_check(pairing, ctx.spectrum);
    Json b = fit_json(bound);
    b["status"] = status(bound.pass, false);
    body["coefficient_bound"] = b;

    const FitResult growth = c1_growth_fit(ctx.spectrum, ctx.grid);
    Json c = fit_json(growth);
    c["status"] = status(growth.pass, false);
    body["c1_growth"] = c;

    // Frequency for the identity checks: the first sample of K^(2) well away from the spectrum.
    const auto solver = ctx.solver(ctx.grid, d == 1);
    const FrequencyGrid fg = frequency_grid(s.frequency.k_min, s.frequency.k_max, 2);
    double omega = std::numeric_limits<double>::quiet_NaN();
    double best = 0.0;
    for (double p : fg.points) {
        const double dist = solver->distance_to_spectrum(p);
        if (dist > 0.05) {
            omega = p;
            break;
        }
        if (dist > best) {
            best = dist;
            omega = p;
        }
    }
    const double dist = solver->distance_to_spectrum(omega);

    Json r;
    r["omega"] = omega;
    try {
        const auto checks =
            resolvent_identity_check(*solver, ctx.g, ctx.spectrum, omega, 2, std::min<std::size_t>(ctx.spectrum.size(), 30));
        const double worst = max_residual(checks);
        r["max_order"] = 2;
        r["modes"] = std::min<std::size_t>(ctx.spectrum.size(), 30);
        r["max_residual"] = worst;
        r["tolerance"] = 1e-5;
        r["status"] = status(worst <= 1e-5, false);
    } catch (const ResonanceError& e) {
        r["status"] = "warn";
        r["note"] = e.what();
    }
    body["resolvent_identity"] = r;

    Json h;
    h["omega"] = omega;
    try {
        const auto plain = ctx.solver(ctx.grid);
        const double d1 = holomorphy_deviation(*plain, ctx.g, omega, 1e-2);
        const double d2 = holomorphy_deviation(*plain, ctx.g, omega, 1e-3);
        h["deviation_h1e-2"] = d1;
        h["deviation_h1e-3"] = d2;
        h["ratio"] = d1 / d2;
        h["status"] = status(d1 / d2 >= 80.0 && d1 / d2 <= 120.0, false);
    } catch (const ResonanceError& e) {
        h["status"] = "warn";
        h["note"] = e.what();
    }
    body["holomorphy"] = h;

    Json z;
    std::size_t node = ctx.grid.nearest_node(ctx.grid.domain().center());
    try {
        const auto norms = ctx.solver(ctx.grid)->solve(omega, ctx.g).gradient_norms();
        node = static_cast<std::size_t>(std::max_element(norms.begin(), norms.end()) - norms.begin());
    } catch (const ResonanceError&) {
    }
    const double radius = std::min(0.1, dist / 4.0);
    z["omega"] = omega;
    z["x"] = point_json(ctx.grid.node(node), d);
    z["radius"] = radius;
    try {
        const double res = zeta_mean_value_residual(*ctx.solver(ctx.grid), ctx.g, node, omega, radius, d == 3 ? 16 : 32);
        z["residual"] = res;
        z["status"] = status(res <= 1e-8, false);
    } catch (const Error& e) {
        z["status"] = "warn";
        z["note"] = e.what();
    }
    body["zeta_mean_value"] = z;

    Json sw;
    if (ctx.coeffs.is_unit()) {
        sw["status"] = "skipped";
        sw["note"] = "unit coefficients";
    } else {
        const int count = std::min(s.spectrum.count, 20);
        const Spectrum variable = ctx.spectrum.backend == Backend::Numeric && ctx.spectrum.size() >= static_cast<std::size_t>(count)
                                      ? ctx.spectrum
                                      : numeric_spectrum(ctx.coeffs, ctx.grid, count);
        const SandwichCheck check = sandwich_check(variable, closed_form_spectrum(ctx.grid.domain(), count),
                                                   ctx.coeffs.lambda_bound());
        sw["lambda_bound"] = check.bound;
        sw["low"] = check.low;
        sw["high"] = check.high;
        sw["status"] = status(check.pass, true);
        failed = failed || !check.pass;
    }
    body["sandwich"] = sw;

    Json t;
    try {
        const int m = std::max(1, static_cast<int>(std::floor(growth.exponent + d / 2.0)) + 1);
        const SeriesTailCheck tail = series_tail_check(ctx.spectrum, pairing, ctx.grid, omega, m, growth.exponent);
        t["order"] = tail.order;
        t["minimal_order"] = tail.minimal_order;
        t["tail_half"] = tail.tail_half;
        t["tail_full"] = tail.tail_full;
        t["status"] = status(tail.pass, false);
    } catch (const Error& e) {
        t["status"] = "warn";
        t["note"] = e.what();
    }
    body["series_tail"] = t;

    ctx.write("diagnostics.json", dump(with_header(ctx, "diagnostics", body)), log);
    for (const auto& [key, value] : body.items()) log << key << ": " << value.value("status", "") << "\n";
    return failed ? kExitMathFailure : kExitOk;
}

int cmd_occulting_demo(const Context& ctx, std::ostream& log) {
    const int adm = cmd_admissibility(ctx, log);
    const int cov = cmd_cover(ctx, log);
    const auto solver = ctx.solver(ctx.grid);
    const FrequencyGrid fg = frequency_grid(ctx.scenario.frequency.k_min, ctx.scenario.frequency.k_max,
                                            std::min(ctx.scenario.frequency.n_max, 6));
    ctx.write("critical_trace.csv", critical_trace_csv(emit_critical_trace(ctx.g, fg.points, *solver), ctx.dim()), log);
    return adm == kExitOk && cov == kExitOk ? kExitOk : kExitMathFailure;
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"spectrum", "solve", "admissibility", "scan",
                                                   "cover", "verify", "diagnose", "occulting-demo"};
    return names;
}

Scenario apply_overrides(Scenario s, const CommandOptions& o) {
    if (o.out) s.output_dir = *o.out;
    if (o.n_max) s.frequency.n_max = *o.n_max;
    if (o.delta) {
        if (!(*o.delta > 0.0)) throw InputError("--delta must be positive");
        s.thresholds.delta = *o.delta;
    }
    if (o.grid) {
        s.grid.solve = *o.grid;
        if (s.grid.verify != 0 && s.grid.verify <= *o.grid) s.grid.verify = 0;
    }
    if (o.seed) s.boundary.seed = *o.seed;
    validate_scenario(s);
    return s;
}

int run_command(const std::string& name, const Scenario& scenario, const CommandOptions& options, std::ostream& log,
                std::ostream& err) {
    const auto& names = command_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
        err << "unknown command '" << name << "'\n";
        return kExitInputError;
    }
    try {
        const Context ctx(apply_overrides(scenario, options), options.threads);
        if (name == "spectrum") return cmd_spectrum(ctx, log);
        if (name == "solve") return cmd_solve(ctx, options, log);
        if (name == "admissibility") return cmd_admissibility(ctx, log);
        if (name == "scan") return cmd_scan(ctx, log);
        if (name == "cover") return cmd_cover(ctx, log);
        if (name == "verify") return cmd_verify(ctx, log);
        if (name == "diagnose") return cmd_diagnose(ctx, log);
        return cmd_occulting_demo(ctx, log);
    } catch (const InputError& e) {
        err << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const ResonanceError& e) {
        err << "resonance: " << e.what() << "\n";
        return kExitMathFailure;
    } catch (const SolverError& e) {
        err << "solver failure: " << e.what() << "\n";
        return kExitMathFailure;
    }
}

int run_command(const std::string& name, const std::filesystem::path& scenario_path, const CommandOptions& options,
                std::ostream& log, std::ostream& err) {
    try {
        return run_command(name, load_scenario(scenario_path), options, log, err);
    } catch (const InputError& e) {
        err << "input error: " << e.what() << "\n";
        return kExitInputError;
    }
}

std::vector<CriticalRow> emit_critical_trace(const BoundaryDatum& g, const std::vector<double>& frequencies,
                                             const HelmholtzSolver& solver) {
    const Grid& grid = solver.grid();
    std::vector<CriticalRow> rows;
    for (double omega : frequencies) {
        std::vector<double> norms;
        try {
            norms = solver.solve(omega, g).gradient_norms();
        } catch (const ResonanceError& e) {
            rows.push_back({omega, std::nullopt, std::numeric_limits<double>::quiet_NaN(), e.what()});
            continue;
        }
        const double top = *std::max_element(norms.begin(), norms.end());
        std::size_t found = 0;
        for (std::size_t f = 0; f < grid.size(); ++f) {
            if (!(norms[f] < 0.1 * top)) continue;
            const Index3 idx = grid.multi_index(f);
            bool minimum = true;
            for (int a = 0; a < grid.dim() && minimum; ++a) {
                for (int step : {-1, 1}) {
                    Index3 n = idx;
                    n[static_cast<std::size_t>(a)] += step;
                    if (n[static_cast<std::size_t>(a)] < 0 || n[static_cast<std::size_t>(a)] >= grid.count(a)) continue;
                    if (norms[grid.flat_index(n)] < norms[f]) {
                        minimum = false;
                        break;
                    }
                }
            }
            if (!minimum) continue;
            rows.push_back({omega, grid.node(f), norms[f], ""});
            ++found;
        }
        if (found == 0) rows.push_back({omega, std::nullopt, std::numeric_limits<double>::quiet_NaN(), "no critical point"});
    }
    return rows;
}

std::string critical_trace_csv(const std::vector<CriticalRow>& rows, int dim) {
    std::ostringstream out;
    out << "omega";
    for (int i = 0; i < dim; ++i) out << ",x" << i + 1;
    out << ",grad_norm,note\n";
    for (const auto& r : rows) {
        out << format_double(r.omega);
        for (int i = 0; i < dim; ++i) {
            out << ",";
            if (r.x) out << format_double((*r.x)[static_cast<std::size_t>(i)]);
        }
        out << ",";
        if (r.x) out << format_double(r.grad_norm);
        std::string note = r.note;
        std::replace(note.begin(), note.end(), ',', ';');
        out << "," << note << "\n";
    }
    return out.str();
}

}  // namespace hcs
