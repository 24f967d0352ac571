#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hcs/boundary.hpp"
#include "hcs/helmholtz.hpp"
#include "hcs/scenario.hpp"

namespace hcs {

enum ExitCode : int { kExitOk = 0, kExitMathFailure = 1, kExitInputError = 2 };

struct CommandOptions {
    std::optional<std::string> out;
    std::optional<int> n_max;
    std::optional<double> delta;
    std::optional<int> grid;
    std::optional<std::uint64_t> seed;
    std::optional<double> omega;  ///< solve: also write the field at this frequency
    unsigned threads = 1;
};

const std::vector<std::string>& command_names();

/// Applies command-line overrides to a loaded scenario and re-validates it.
Scenario apply_overrides(Scenario scenario, const CommandOptions& options);

/// Runs one command and returns its exit status. Messages go to `log`, errors to `err`.
int run_command(const std::string& name, const Scenario& scenario, const CommandOptions& options, std::ostream& log,
                std::ostream& err);
int run_command(const std::string& name, const std::filesystem::path& scenario_path, const CommandOptions& options,
                std::ostream& log, std::ostream& err);

struct CriticalRow {
    double omega = 0.0;
    std::optional<Point> x;  ///< empty on note rows
    double grad_norm = 0.0;
    std::string note;
};

/// For each frequency, the grid nodes where |grad u| is a local minimum along every axis and below
/// 0.1 max|grad u|. Resonant frequencies and frequencies without such nodes yield a single note row.
std::vector<CriticalRow> emit_critical_trace(const BoundaryDatum& g, const std::vector<double>& frequencies,
                                             const HelmholtzSolver& solver);

/// CSV with header omega,x1[,x2[,x3]],grad_norm,note; LF line endings.
std::string critical_trace_csv(const std::vector<CriticalRow>& rows, int dim);

}  // namespace hcs
