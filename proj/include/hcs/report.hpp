#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "hcs/admissibility.hpp"
#include "hcs/cover.hpp"
#include "hcs/diagnostics.hpp"
#include "hcs/eigenbasis.hpp"
#include "hcs/scenario.hpp"

namespace hcs {

using Json = nlohmann::ordered_json;

/// Point truncated to the first `dim` coordinates.
Json point_json(const Point& x, int dim);

Json scenario_json(const Scenario& scenario);
Json spectrum_json(const Spectrum& spectrum);
Json admissibility_json(const AdmissibilityReport& report, const Spectrum& spectrum, int dim);
Json cover_json(const CoverResult& cover, int dim);
Json verify_json(const VerifyReport& report, int dim);
Json fit_json(const FitResult& fit);

/// Serialized with two-space indent and a trailing newline.
std::string dump(const Json& json);

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace hcs
