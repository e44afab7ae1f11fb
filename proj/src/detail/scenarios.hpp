#pragma once

#include <filesystem>

#include "detail/json_io.hpp"
#include "farfield/harness.hpp"

namespace farfield::detail {

/// Runs the scenario pipeline, appending checks and artifact names to `bundle` and scenario
/// results to `results`. Artifacts are written into `dir`.
void run_scenario(const ExperimentConfig& c, const std::filesystem::path& dir, ResultBundle& bundle, Json& results);

}  // namespace farfield::detail
