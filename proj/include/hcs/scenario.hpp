#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hcs/boundary.hpp"
#include "hcs/eigenbasis.hpp"
#include "hcs/geometry.hpp"

namespace hcs {

struct DomainSpec {
    int dim = 1;
    std::vector<double> sides{1.0};
    int nodes_per_axis = 101;
};

struct CoefficientSpec {
    std::string kind = "constant";  ///< constant | affine | table
    double a = 1.0;
    double q = 1.0;
    double slope = 0.0;  ///< affine: a(x) = a + slope * x_axis
    int axis = 1;        ///< 1-based
    std::string table;   ///< rows "x_1 .. x_d a q", one per solve-grid node
    double lambda_bound = 1.0;
};

struct BoundarySpec {
    std::string kind = "constant";  ///< constant | linear | corner-zero-linear | random-fourier | table
    double value = 1.0;
    int axis = 1;  ///< 1-based
    std::uint64_t seed = 1;
    int modes = 3;
    std::string table;  ///< rows "x_1 .. x_d g"
};

struct SpectrumSpec {
    std::string backend = "closed-form";  ///< closed-form | numeric
    int count = 30;
    double cluster_tol = 0.0;  ///< 0 selects the backend default
};

struct FrequencySpec {
    double k_min = 0.0;
    double k_max = 0.0;
    int n_max = 8;
    double band = 1e-6;
};

struct ThresholdSpec {
    double delta = 0.0;  ///< 0: 1e-2 * max |grad u| of a pilot solve at the first usable frequency
    double eps_adm = 1e-9;
};

struct GridSpec {
    int solve = 0;   ///< 0: domain.nodes_per_axis
    int verify = 0;  ///< 0: refinement of the solve grid (2n - 1)
};

struct AdmissibilitySpec {
    int axis = 0;  ///< 0: full gradient, otherwise 1-based axis of the strong variant
    bool include_boundary = false;
};

struct Scenario {
    std::string name;
    DomainSpec domain;
    CoefficientSpec coefficients;
    BoundarySpec boundary;
    SpectrumSpec spectrum;
    FrequencySpec frequency;
    ThresholdSpec thresholds;
    GridSpec grid;
    AdmissibilitySpec admissibility;
    std::string output_dir = "out";
    /// Directory that relative table paths are resolved against.
    std::filesystem::path base_dir;
    /// Keys that were filled with defaults, as "section.key".
    std::vector<std::string> defaults_applied;

    int solve_nodes() const { return grid.solve > 0 ? grid.solve : domain.nodes_per_axis; }
    int verify_nodes() const { return grid.verify > 0 ? grid.verify : 2 * solve_nodes() - 1; }

    bool operator==(const Scenario& other) const;
};

/// Ordered "section" -> ordered "key = value" view of a scenario, used for writing and echoing.
using ScenarioSections = std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>>;

Scenario parse_scenario(const std::string& text, const std::string& name = "scenario",
                        const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

/// Re-validates cross-field consistency; throws InputError naming the field path.
void validate_scenario(const Scenario& scenario);

ScenarioSections scenario_sections(const Scenario& scenario);
std::string write_scenario(const Scenario& scenario);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

Domain scenario_domain(const Scenario& scenario);
Grid scenario_grid(const Scenario& scenario, int nodes_per_axis);
CoefficientField scenario_coefficients(const Scenario& scenario, const Grid& solve_grid);
BoundaryDatum scenario_boundary(const Scenario& scenario);
Spectrum scenario_spectrum(const Scenario& scenario, const CoefficientField& coeffs, const Grid& solve_grid);

}  // namespace hcs
