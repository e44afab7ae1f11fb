#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "farfield/errors.hpp"
#include "farfield/harness.hpp"
#include "farfield/io.hpp"

namespace {

using farfield::ResultBundle;

void print_bundle(const ResultBundle& b) {
  std::cout << b.scenario << " [" << b.config_hash << "] " << (b.passed() ? "PASS" : "FAIL") << "\n";
  for (const auto& c : b.checks) {
    std::cout << "  " << (c.pass ? "pass " : "FAIL ") << c.name << " = " << farfield::format_number(c.value) << " in ["
              << farfield::format_number(c.lo) << ", " << farfield::format_number(c.hi) << "]\n";
  }
  if (b.error) std::cout << "  error: " << *b.error << "\n";
  std::cout << "  artifacts: " << b.directory.string() << "\n";
}

int cmd_run(const std::string& config_path, const std::string& out, std::optional<std::uint64_t> seed) {
  farfield::ExperimentConfig c = farfield::parse_config(farfield::read_text(config_path));
  if (seed) c.seed = *seed;
  const std::filesystem::path dir = out.empty() ? farfield::output_root(c) / c.scenario : std::filesystem::path(out);
  const ResultBundle b = farfield::run(c, dir);
  print_bundle(b);
  return b.passed() ? 0 : 1;
}

int cmd_sweep(const std::string& config_path, const std::string& out, std::optional<std::uint64_t> seed, int jobs) {
  std::string base;
  std::vector<farfield::SweepAxis> axes;
  farfield::parse_sweep(farfield::read_text(config_path), base, axes);
  const farfield::ExperimentConfig c = farfield::parse_config(base);
  if (seed) {
    auto j = nlohmann::json::parse(base);
    j["seed"] = *seed;
    base = j.dump();
  }
  const std::filesystem::path dir = out.empty() ? farfield::output_root(c) / "sweep" : std::filesystem::path(out);
  const farfield::SweepResult r = farfield::sweep(base, axes, dir, jobs);
  for (const auto& b : r.bundles) print_bundle(b);
  std::cout << "summary: " << r.summary.string() << "\n";
  return r.passed() ? 0 : 1;
}

int cmd_verify(const std::string& out, const std::string& golden) {
  const farfield::DiffReport d = farfield::verify(out, golden);
  if (d.empty()) {
    std::cout << "no differences\n";
    return 0;
  }
  std::cout << d.to_text();
  return 1;
}

int cmd_list() {
  for (const auto& s : farfield::scenario_catalog()) {
    std::cout << s.name << "\n  case: " << s.theorem_case << "\n  checks: " << s.estimate << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Far-field asymptotics experiments for fully nonlinear elliptic equations"};
  app.require_subcommand(1);

  std::string config, out, golden;
  std::uint64_t seed_value = 0;
  int jobs = 1;

  auto* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("--config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "Output directory (default: output root / scenario)");
  auto* run_seed = run->add_option("--seed", seed_value, "Override the config seed");

  auto* sw = app.add_subcommand("sweep", "Run a parameter sweep");
  sw->add_option("--config", config, "Sweep file with 'base' and 'grid'")->required()->check(CLI::ExistingFile);
  sw->add_option("--out", out, "Output directory (default: output root / sweep)");
  auto* sw_seed = sw->add_option("--seed", seed_value, "Override the base seed");
  sw->add_option("--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);

  auto* ver = app.add_subcommand("verify", "Compare a bundle directory with golden files");
  ver->add_option("--out", out, "Bundle directory")->required()->check(CLI::ExistingDirectory);
  ver->add_option("golden", golden, "Golden directory")->required();

  auto* list = app.add_subcommand("list-scenarios", "List the built-in scenarios");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config, out, *run_seed ? std::optional<std::uint64_t>(seed_value) : std::nullopt);
    if (sw->parsed()) {
      return cmd_sweep(config, out, *sw_seed ? std::optional<std::uint64_t>(seed_value) : std::nullopt, jobs);
    }
    if (ver->parsed()) return cmd_verify(out, golden);
    if (list->parsed()) return cmd_list();
  } catch (const farfield::MissingBaseline& e) {
    std::cerr << "missing baseline: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
