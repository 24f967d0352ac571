#include "hcs/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "hcs/error.hpp"

namespace hcs {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& text) {
    const std::string s = trim(text);
    double v = 0.0;
    const char* begin = s.data();
    const char* end = begin + s.size();
    if (!s.empty() && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end || s.empty()) throw InputError("expected a number, got '" + s + "'");
    return v;
}

long long parse_integer(const std::string& text) {
    const std::string s = trim(text);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw InputError("expected an integer, got '" + s + "'");
    }
    return v;
}

bool parse_bool(const std::string& text) {
    const std::string s = trim(text);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw InputError("expected true or false, got '" + s + "'");
}

std::vector<double> parse_list(const std::string& text) {
    std::string s = text;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream in(s);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(parse_double(tok));
    if (out.empty()) throw InputError("expected a list of numbers");
    return out;
}

struct Key {
    std::string section;
    std::string key;
    std::function<void(Scenario&, const std::string&)> set;
    std::function<std::string(const Scenario&)> get;
};

template <class T>
Key number_key(std::string section, std::string key, T Scenario::*group, double T::*member) {
    return {section, key, [=](Scenario& s, const std::string& v) { (s.*group).*member = parse_double(v); },
            [=](const Scenario& s) { return format_double((s.*group).*member); }};
}

template <class T>
Key int_key(std::string section, std::string key, T Scenario::*group, int T::*member) {
    return {section, key,
            [=](Scenario& s, const std::string& v) {
                const long long x = parse_integer(v);
                if (x < -1000000000LL || x > 1000000000LL) throw InputError("integer out of range");
                (s.*group).*member = static_cast<int>(x);
            },
            [=](const Scenario& s) { return std::to_string((s.*group).*member); }};
}

template <class T>
Key string_key(std::string section, std::string key, T Scenario::*group, std::string T::*member) {
    return {section, key, [=](Scenario& s, const std::string& v) { (s.*group).*member = trim(v); },
            [=](const Scenario& s) { return (s.*group).*member; }};
}

const std::vector<Key>& keys() {
    static const std::vector<Key> table = [] {
        std::vector<Key> k;
        k.push_back(int_key("domain", "dim", &Scenario::domain, &DomainSpec::dim));
        k.push_back({"domain", "sides", [](Scenario& s, const std::string& v) { s.domain.sides = parse_list(v); },
                     [](const Scenario& s) {
                         std::string out;
                         for (std::size_t i = 0; i < s.domain.sides.size(); ++i) {
                             out += (i ? ", " : "") + format_double(s.domain.sides[i]);
                         }
                         return out;
                     }});
        k.push_back(int_key("domain", "nodes_per_axis", &Scenario::domain, &DomainSpec::nodes_per_axis));

        k.push_back(string_key("coefficients", "kind", &Scenario::coefficients, &CoefficientSpec::kind));
        k.push_back(number_key("coefficients", "a", &Scenario::coefficients, &CoefficientSpec::a));
        k.push_back(number_key("coefficients", "q", &Scenario::coefficients, &CoefficientSpec::q));
        k.push_back(number_key("coefficients", "slope", &Scenario::coefficients, &CoefficientSpec::slope));
        k.push_back(int_key("coefficients", "axis", &Scenario::coefficients, &CoefficientSpec::axis));
        k.push_back(string_key("coefficients", "table", &Scenario::coefficients, &CoefficientSpec::table));
        k.push_back(number_key("coefficients", "lambda_bound", &Scenario::coefficients, &CoefficientSpec::lambda_bound));

        k.push_back(string_key("boundary", "kind", &Scenario::boundary, &BoundarySpec::kind));
        k.push_back(number_key("boundary", "value", &Scenario::boundary, &BoundarySpec::value));
        k.push_back(int_key("boundary", "axis", &Scenario::boundary, &BoundarySpec::axis));
        k.push_back({"boundary", "seed",
                     [](Scenario& s, const std::string& v) {
                         const long long x = parse_integer(v);
                         if (x < 0) throw InputError("seed must be non-negative");
                         s.boundary.seed = static_cast<std::uint64_t>(x);
                     },
                     [](const Scenario& s) { return std::to_string(s.boundary.seed); }});
        k.push_back(int_key("boundary", "modes", &Scenario::boundary, &BoundarySpec::modes));
        k.push_back(string_key("boundary", "table", &Scenario::boundary, &BoundarySpec::table));

        k.push_back(string_key("spectrum", "backend", &Scenario::spectrum, &SpectrumSpec::backend));
        k.push_back(int_key("spectrum", "L", &Scenario::spectrum, &SpectrumSpec::count));
        k.push_back(number_key("spectrum", "cluster_tol", &Scenario::spectrum, &SpectrumSpec::cluster_tol));

        k.push_back(number_key("frequency", "K_min", &Scenario::frequency, &FrequencySpec::k_min));
        k.push_back(number_key("frequency", "K_max", &Scenario::frequency, &FrequencySpec::k_max));
        k.push_back(int_key("frequency", "n_max", &Scenario::frequency, &FrequencySpec::n_max));
        k.push_back(number_key("frequency", "band", &Scenario::frequency, &FrequencySpec::band));

        k.push_back(number_key("thresholds", "delta", &Scenario::thresholds, &ThresholdSpec::delta));
        k.push_back(number_key("thresholds", "eps_adm", &Scenario::thresholds, &ThresholdSpec::eps_adm));

        k.push_back(int_key("grid", "solve", &Scenario::grid, &GridSpec::solve));
        k.push_back(int_key("grid", "verify", &Scenario::grid, &GridSpec::verify));

        k.push_back(int_key("admissibility", "axis", &Scenario::admissibility, &AdmissibilitySpec::axis));
        k.push_back({"admissibility", "include_boundary",
                     [](Scenario& s, const std::string& v) { s.admissibility.include_boundary = parse_bool(v); },
                     [](const Scenario& s) { return std::string(s.admissibility.include_boundary ? "true" : "false"); }});

        k.push_back({"output", "dir", [](Scenario& s, const std::string& v) { s.output_dir = trim(v); },
                     [](const Scenario& s) { return s.output_dir; }});
        return k;
    }();
    return table;
}

const std::set<std::string> kRequired = {"domain.dim", "domain.sides", "frequency.K_min", "frequency.K_max"};

std::vector<std::vector<double>> read_rows(const std::filesystem::path& path, std::size_t columns,
                                           const std::string& field) {
    std::ifstream in(path);
    if (!in) throw InputError(field + ": cannot open table '" + path.string() + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string t = trim(line.substr(0, line.find('#')));
        if (t.empty()) continue;
        std::vector<double> row;
        try {
            row = parse_list(t);
        } catch (const InputError& e) {
            throw InputError(path.string() + ":" + std::to_string(number) + ": " + e.what());
        }
        if (row.size() != columns) {
            throw InputError(path.string() + ":" + std::to_string(number) + ": expected " + std::to_string(columns) +
                             " columns, got " + std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InputError(field + ": table '" + path.string() + "' is empty");
    return rows;
}

std::filesystem::path resolve(const Scenario& s, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() || s.base_dir.empty() ? path : s.base_dir / path;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw Error("float formatting failed");
    return std::string(buf, ptr);
}

bool Scenario::operator==(const Scenario& o) const {
    return write_scenario(*this) == write_scenario(o);
}

Scenario parse_scenario(const std::string& text, const std::string& name, const std::filesystem::path& base_dir) {
    Scenario s;
    s.name = name;
    s.base_dir = base_dir;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int number = 0;
    std::set<std::string> seen;
    auto fail = [&](const std::string& msg) { throw InputError(name + ":" + std::to_string(number) + ": " + msg); };

    while (std::getline(in, line)) {
        ++number;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (const auto hash = t.find(" #"); hash != std::string::npos) t = trim(t.substr(0, hash));
        if (t.front() == '[') {
            if (t.back() != ']') fail("unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            const bool known = std::any_of(keys().begin(), keys().end(), [&](const Key& k) { return k.section == section; });
            if (!known) fail("unknown section [" + section + "]");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) fail("expected 'key = value'");
        if (section.empty()) fail("key outside of a section");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        const auto it = std::find_if(keys().begin(), keys().end(),
                                     [&](const Key& k) { return k.section == section && k.key == key; });
        if (it == keys().end()) fail("unknown key '" + key + "' in [" + section + "]");
        const std::string path = section + "." + key;
        if (!seen.insert(path).second) fail("duplicate key " + path);
        try {
            it->set(s, value);
        } catch (const InputError& e) {
            fail(path + ": " + e.what());
        }
    }

    for (const auto& r : kRequired) {
        if (!seen.count(r)) throw InputError(name + ": missing required field " + r);
    }
    if (!seen.count("domain.nodes_per_axis")) s.domain.nodes_per_axis = s.domain.dim == 1 ? 101 : s.domain.dim == 2 ? 33 : 17;
    for (const Key& k : keys()) {
        const std::string path = k.section + "." + k.key;
        if (!seen.count(path)) s.defaults_applied.push_back(path + " = " + k.get(s));
    }
    validate_scenario(s);
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open scenario '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    Scenario s = parse_scenario(buf.str(), path.string(), path.parent_path());
    s.name = path.stem().string();
    return s;
}

void validate_scenario(const Scenario& s) {
    auto fail = [&](const std::string& field, const std::string& msg) { throw InputError(field + ": " + msg); };
    const int d = s.domain.dim;
    if (d < 1 || d > 3) fail("domain.dim", "must be 1, 2 or 3");
    if (static_cast<int>(s.domain.sides.size()) != d) {
        fail("domain.sides", "expected " + std::to_string(d) + " side lengths, got " + std::to_string(s.domain.sides.size()));
    }
    for (double b : s.domain.sides) {
        if (!(b > 0.0) || !std::isfinite(b)) fail("domain.sides", "side lengths must be positive");
    }
    if (s.domain.nodes_per_axis < 3) fail("domain.nodes_per_axis", "needs at least 3 nodes");

    const auto& c = s.coefficients;
    if (c.kind != "constant" && c.kind != "affine" && c.kind != "table") {
        fail("coefficients.kind", "expected constant, affine or table, got '" + c.kind + "'");
    }
    if (c.axis < 1 || c.axis > d) fail("coefficients.axis", "must be between 1 and " + std::to_string(d));
    if (c.kind == "table" && c.table.empty()) fail("coefficients.table", "required for kind = table");
    if (!(c.lambda_bound >= 1.0)) fail("coefficients.lambda_bound", "must be >= 1");

    const auto& g = s.boundary;
    if (g.kind != "constant" && g.kind != "linear" && g.kind != "corner-zero-linear" && g.kind != "random-fourier" &&
        g.kind != "table") {
        fail("boundary.kind", "expected constant, linear, corner-zero-linear, random-fourier or table, got '" + g.kind + "'");
    }
    if (g.axis < 1 || g.axis > d) fail("boundary.axis", "must be between 1 and " + std::to_string(d));
    if (g.modes < 1 || g.modes > 64) fail("boundary.modes", "must be between 1 and 64");
    if (g.kind == "table" && g.table.empty()) fail("boundary.table", "required for kind = table");

    if (s.spectrum.backend != "closed-form" && s.spectrum.backend != "numeric") {
        fail("spectrum.backend", "expected closed-form or numeric, got '" + s.spectrum.backend + "'");
    }
    if (s.spectrum.count < 1) fail("spectrum.L", "must be positive");
    if (s.spectrum.cluster_tol < 0.0) fail("spectrum.cluster_tol", "must be non-negative");
    const bool unit = c.kind == "constant" ? (c.a == 1.0 && c.q == 1.0) : c.kind == "affine" && c.a == 1.0 && c.slope == 0.0 && c.q == 1.0;
    if (s.spectrum.backend == "closed-form" && !unit) fail("spectrum.backend", "closed-form requires a = 1 and q = 1");

    if (!(s.frequency.k_min < s.frequency.k_max)) fail("frequency.K_max", "must exceed frequency.K_min");
    if (s.frequency.n_max < 0 || s.frequency.n_max > 20) fail("frequency.n_max", "must be between 0 and 20");
    if (!(s.frequency.band >= 0.0)) fail("frequency.band", "must be non-negative");
    if (!(s.thresholds.delta >= 0.0)) fail("thresholds.delta", "must be non-negative (0 selects the pilot-solve default)");
    if (!(s.thresholds.eps_adm > 0.0)) fail("thresholds.eps_adm", "must be positive");
    if (s.grid.solve != 0 && s.grid.solve < 3) fail("grid.solve", "needs at least 3 nodes");
    if (s.verify_nodes() <= s.solve_nodes()) fail("grid.verify", "must be finer than the solve grid");
    if (s.admissibility.axis < 0 || s.admissibility.axis > d) {
        fail("admissibility.axis", "must be 0 (full gradient) or between 1 and " + std::to_string(d));
    }
    if (s.output_dir.empty()) fail("output.dir", "must not be empty");
}

ScenarioSections scenario_sections(const Scenario& s) {
    ScenarioSections out;
    for (const Key& k : keys()) {
        if (out.empty() || out.back().first != k.section) out.push_back({k.section, {}});
        out.back().second.emplace_back(k.key, k.get(s));
    }
    return out;
}

std::string write_scenario(const Scenario& s) {
    std::ostringstream out;
    bool first = true;
    for (const auto& [section, entries] : scenario_sections(s)) {
        if (!first) out << '\n';
        first = false;
        out << '[' << section << "]\n";
        for (const auto& [key, value] : entries) out << key << " = " << value << '\n';
    }
    return out.str();
}

Domain scenario_domain(const Scenario& s) { return build_domain(s.domain.dim, s.domain.sides); }

Grid scenario_grid(const Scenario& s, int nodes_per_axis) { return build_grid(scenario_domain(s), nodes_per_axis); }

CoefficientField scenario_coefficients(const Scenario& s, const Grid& grid) {
    const auto& c = s.coefficients;
    if (c.kind == "constant") return CoefficientField::constant(c.a, c.q, c.lambda_bound);
    if (c.kind == "affine") return CoefficientField::affine(c.a, c.slope, c.axis - 1, c.q, c.lambda_bound);

    const int d = grid.dim();
    const auto rows = read_rows(resolve(s, c.table), static_cast<std::size_t>(d) + 2, "coefficients.table");
    std::vector<Point> a(grid.size(), Point{0.0, 0.0, 0.0});
    std::vector<double> q(grid.size(), 0.0);
    std::vector<bool> filled(grid.size(), false);
    for (const auto& row : rows) {
        Point x{0.0, 0.0, 0.0};
        for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] = row[static_cast<std::size_t>(i)];
        const auto node = grid.find_node(x);
        if (!node) throw InputError("coefficients.table: row at a point that is not a solve-grid node");
        const double av = row[static_cast<std::size_t>(d)];
        a[*node] = Point{av, d > 1 ? av : 0.0, d > 2 ? av : 0.0};
        q[*node] = row[static_cast<std::size_t>(d) + 1];
        filled[*node] = true;
    }
    if (std::find(filled.begin(), filled.end(), false) != filled.end()) {
        throw InputError("coefficients.table: every solve-grid node needs a row");
    }
    return CoefficientField::tabulated(grid, std::move(a), std::move(q), c.lambda_bound);
}

BoundaryDatum scenario_boundary(const Scenario& s) {
    const auto& g = s.boundary;
    const Domain domain = scenario_domain(s);
    if (g.kind == "constant") return BoundaryDatum::constant(g.value);
    if (g.kind == "linear") return BoundaryDatum::linear(domain, g.axis - 1);
    if (g.kind == "corner-zero-linear") {
        if (domain.dim() == 1) return BoundaryDatum::endpoints(domain, 0.0, 1.0);
        return BoundaryDatum::linear(domain, g.axis - 1);
    }
    if (g.kind == "random-fourier") return BoundaryDatum::random_fourier(domain, g.seed, g.modes);

    const int d = domain.dim();
    const auto rows = read_rows(resolve(s, g.table), static_cast<std::size_t>(d) + 1, "boundary.table");
    std::vector<Point> points;
    std::vector<double> values;
    for (const auto& row : rows) {
        Point x{0.0, 0.0, 0.0};
        for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] = row[static_cast<std::size_t>(i)];
        points.push_back(x);
        values.push_back(row[static_cast<std::size_t>(d)]);
    }
    return BoundaryDatum::table(std::move(points), std::move(values));
}

Spectrum scenario_spectrum(const Scenario& s, const CoefficientField& coeffs, const Grid& grid) {
    Spectrum sp = s.spectrum.backend == "closed-form" ? closed_form_spectrum(grid.domain(), s.spectrum.count)
                                                      : numeric_spectrum(coeffs, grid, s.spectrum.count);
    if (s.spectrum.cluster_tol > 0.0) sp = group_multiplicities(std::move(sp), s.spectrum.cluster_tol);
    return sp;
}

}  // namespace hcs
