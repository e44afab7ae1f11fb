#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "farfield/operator_core.hpp"

namespace farfield {

struct GridBlock {
  double r_out = 64.0;
  int radial_nodes = 127;
  int angular_nodes = 128;
  /// Orthogonal frames of the polar scheme.
  int stencil_directions = 8;
};

struct ExtractionBlock {
  std::vector<double> schedule{4.0, 8.0, 16.0, 32.0, 64.0};
  double tolerance = 1e-3;
  double solver_tolerance = 1e-10;
  double constraint_tolerance = 0.05;
};

/// One experiment. Parsed from JSON; fields a config leaves out take the scenario defaults.
struct ExperimentConfig {
  std::string scenario;
  OperatorSpec op = OperatorSpec::laplace(2);
  double rhs = 0.0;
  GridBlock grid;
  ExtractionBlock extraction;
  std::string output_dir = "farfield-out";
  std::uint64_t seed = 0;
};

/// Scenario defaults overlaid with the given JSON object. Unknown keys, unknown scenarios,
/// non-positive tolerances and non-increasing schedules raise InvalidConfiguration.
ExperimentConfig parse_config(const std::string& json_text);

/// Every field except the output directory, in a fixed key order.
std::string canonical_json(const ExperimentConfig& c);
/// 64-bit FNV-1a of canonical_json as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

struct ScenarioInfo {
  std::string name;
  /// Case of the main theorems the scenario exercises.
  std::string theorem_case;
  /// Estimate the scenario checks, in words.
  std::string estimate;
};

const std::vector<ScenarioInfo>& scenario_catalog();
ExperimentConfig default_config(const std::string& scenario);

/// A pass/fail flag: value must lie in [lo, hi].
struct Check {
  std::string name;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool pass = false;
};

struct ResultBundle {
  std::string scenario;
  std::string config_hash;
  std::string theorem_case;
  std::string estimate;
  std::vector<Check> checks;
  /// Artifact file names relative to `directory`.
  std::vector<std::string> files;
  std::filesystem::path directory;
  /// Scenario-specific fits, classifications and traces as a JSON object.
  std::string results_json = "{}";
  std::optional<std::string> error;

  bool passed() const;
  std::string to_json() const;
};

/// Output root: FARFIELD_OUTPUT_ROOT when set, else the config's output directory.
std::filesystem::path output_root(const ExperimentConfig& c);

/// Runs the scenario and writes config.json, bundle.json and its artifacts into `directory`.
/// Solver and extraction errors are captured in the bundle.
ResultBundle run(const ExperimentConfig& c, const std::filesystem::path& directory);

struct SweepAxis {
  /// Dotted config path such as "operator.Lambda".
  std::string key;
  std::vector<double> values;
};

struct SweepResult {
  std::vector<ResultBundle> bundles;
  std::filesystem::path summary;
  bool passed() const;
};

/// Runs every combination of the axes on top of `base_json` in run-<k> subdirectories of
/// `directory` using up to `jobs` threads and writes summary.csv. Failed combinations are
/// recorded and the sweep continues. An empty grid raises InvalidConfiguration.
SweepResult sweep(const std::string& base_json, const std::vector<SweepAxis>& axes, const std::filesystem::path& directory,
                  int jobs = 1);

/// Parses {"base": {...}, "grid": {"operator.Lambda": [...], ...}}.
void parse_sweep(const std::string& json_text, std::string& base_json, std::vector<SweepAxis>& axes);

struct DiffEntry {
  std::string file;
  std::string field;
  std::string expected;
  std::string actual;
};

struct DiffReport {
  std::vector<DiffEntry> entries;
  bool empty() const noexcept { return entries.empty(); }
  std::string to_text() const;
};

/// Compares every JSON and CSV artifact of `golden` with its counterpart in `bundle_dir`.
/// Numbers match within abs 1e-9 + rel 1e-6 unless golden/tolerances.json overrides a field
/// name; wall_ms fields are ignored. Throws MissingBaseline when a golden file is absent.
DiffReport verify(const std::filesystem::path& bundle_dir, const std::filesystem::path& golden);

}  // namespace farfield
