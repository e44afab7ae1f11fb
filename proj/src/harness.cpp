#include "farfield/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "detail/json_io.hpp"
#include "detail/scenarios.hpp"
#include "farfield/errors.hpp"
#include "farfield/fundamental_solutions.hpp"
#include "farfield/io.hpp"

namespace farfield {

using detail::Json;

namespace {

Json config_value(const ExperimentConfig& c) {
  Json j;
  j["scenario"] = c.scenario;
  Json op = detail::operator_to_value(c.op);
  op["rhs"] = c.rhs;
  j["operator"] = op;
  j["grid"] = {{"r_out", c.grid.r_out},
               {"radial_nodes", c.grid.radial_nodes},
               {"angular_nodes", c.grid.angular_nodes},
               {"stencil_directions", c.grid.stencil_directions}};
  j["extraction"] = {{"schedule", c.extraction.schedule},
                     {"tolerance", c.extraction.tolerance},
                     {"solver_tolerance", c.extraction.solver_tolerance},
                     {"constraint_tolerance", c.extraction.constraint_tolerance}};
  j["seed"] = c.seed;
  return j;
}

template <class T>
T get(const Json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidConfiguration(where + ": field '" + key + "' is missing or has the wrong type");
  }
}

void validate(const ExperimentConfig& c) {
  const auto& s = c.extraction.schedule;
  if (s.empty()) throw InvalidConfiguration("extraction.schedule must not be empty");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s[i] > 0.0) || (i > 0 && !(s[i] > s[i - 1]))) {
      throw InvalidConfiguration("extraction.schedule must be positive and strictly increasing");
    }
  }
  if (!(c.extraction.tolerance > 0.0) || !(c.extraction.solver_tolerance > 0.0) ||
      !(c.extraction.constraint_tolerance > 0.0)) {
    throw InvalidConfiguration("extraction tolerances must be positive");
  }
  if (!(c.grid.r_out > 1.0)) throw InvalidConfiguration("grid.r_out must exceed 1");
  if (c.grid.radial_nodes < 3) throw InvalidConfiguration("grid.radial_nodes must be at least 3");
  if (c.grid.angular_nodes < 8 || c.grid.angular_nodes % 2 != 0) {
    throw InvalidConfiguration("grid.angular_nodes must be even and at least 8");
  }
  if (c.grid.stencil_directions < 4) throw InvalidConfiguration("grid.stencil_directions must be at least 4");
  if (!std::isfinite(c.rhs)) throw InvalidConfiguration("operator.rhs must be finite");
}

ExperimentConfig config_from_value(const Json& j) {
  detail::require_keys(j, {"scenario", "operator", "grid", "extraction", "output", "seed"}, "config");
  ExperimentConfig c;
  c.scenario = get<std::string>(j, "scenario", "config");
  Json op = j.at("operator");
  if (!op.is_object()) throw InvalidConfiguration("config: operator must be an object");
  if (op.contains("rhs")) {
    c.rhs = get<double>(op, "rhs", "operator");
    op.erase("rhs");
  }
  c.op = detail::operator_from_value(op);

  const Json& g = j.at("grid");
  detail::require_keys(g, {"r_out", "radial_nodes", "angular_nodes", "stencil_directions"}, "grid");
  c.grid.r_out = get<double>(g, "r_out", "grid");
  c.grid.radial_nodes = get<int>(g, "radial_nodes", "grid");
  c.grid.angular_nodes = get<int>(g, "angular_nodes", "grid");
  c.grid.stencil_directions = get<int>(g, "stencil_directions", "grid");

  const Json& x = j.at("extraction");
  detail::require_keys(x, {"schedule", "tolerance", "solver_tolerance", "constraint_tolerance"}, "extraction");
  c.extraction.schedule = get<std::vector<double>>(x, "schedule", "extraction");
  c.extraction.tolerance = get<double>(x, "tolerance", "extraction");
  c.extraction.solver_tolerance = get<double>(x, "solver_tolerance", "extraction");
  c.extraction.constraint_tolerance = get<double>(x, "constraint_tolerance", "extraction");

  if (j.contains("output")) c.output_dir = get<std::string>(j, "output", "config");
  c.seed = get<std::uint64_t>(j, "seed", "config");
  validate(c);
  return c;
}

Json parse_json(const std::string& text, const std::string& where) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidConfiguration(where + ": malformed JSON: " + e.what());
  }
}

/// Default config of the named scenario with the user's fields laid over it. The operator
/// block is replaced as a whole unless it only sets rhs.
Json merged_value(const Json& user) {
  if (!user.is_object()) throw InvalidConfiguration("config: expected a JSON object");
  if (!user.contains("scenario") || !user.at("scenario").is_string()) {
    throw InvalidConfiguration("config: missing 'scenario'");
  }
  Json j = config_value(default_config(user.at("scenario").get<std::string>()));
  for (const auto& item : user.items()) {
    const std::string& k = item.key();
    if ((k == "grid" || k == "extraction") && item.value().is_object()) {
      for (const auto& sub : item.value().items()) j[k][sub.key()] = sub.value();
    } else if (k == "operator" && item.value().is_object()) {
      const Json& op = item.value();
      if (op.size() == 1 && op.contains("rhs")) {
        j[k]["rhs"] = op.at("rhs");
      } else {
        const Json rhs = j[k]["rhs"];
        j[k] = op;
        if (!op.contains("rhs")) j[k]["rhs"] = rhs;
      }
    } else {
      j[k] = item.value();
    }
  }
  return j;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  return config_from_value(merged_value(parse_json(json_text, "config")));
}

std::string canonical_json(const ExperimentConfig& c) { return config_value(c).dump(); }

std::string config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : canonical_json(c)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool ResultBundle::passed() const {
  if (error) return false;
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string ResultBundle::to_json() const {
  Json j;
  j["scenario"] = scenario;
  j["config_hash"] = config_hash;
  j["theorem_case"] = theorem_case;
  j["estimate"] = estimate;
  j["passed"] = passed();
  j["error"] = error ? Json(*error) : Json(nullptr);
  Json checks_json = Json::array();
  for (const auto& c : checks) {
    checks_json.push_back({{"name", c.name},
                           {"value", detail::number(c.value)},
                           {"lo", detail::number(c.lo)},
                           {"hi", detail::number(c.hi)},
                           {"pass", c.pass}});
  }
  j["checks"] = checks_json;
  j["files"] = files;
  j["results"] = Json::parse(results_json);
  return j.dump(2) + "\n";
}

std::filesystem::path output_root(const ExperimentConfig& c) {
  if (const char* env = std::getenv("FARFIELD_OUTPUT_ROOT"); env && *env) return env;
  return c.output_dir;
}

ResultBundle run(const ExperimentConfig& c, const std::filesystem::path& directory) {
  validate(c);
  ResultBundle b;
  b.scenario = c.scenario;
  b.config_hash = config_hash(c);
  b.directory = directory;
  for (const auto& s : scenario_catalog()) {
    if (s.name == c.scenario) {
      b.theorem_case = s.theorem_case;
      b.estimate = s.estimate;
    }
  }
  write_text_atomic(directory / "config.json", config_value(c).dump(2) + "\n");

  Json results = Json::object();
  try {
    detail::run_scenario(c, directory, b, results);
  } catch (const std::exception& e) {
    b.error = e.what();
  }
  b.results_json = results.dump();
  write_text_atomic(directory / "bundle.json", b.to_json());
  return b;
}

bool SweepResult::passed() const {
  return std::all_of(bundles.begin(), bundles.end(), [](const ResultBundle& b) { return b.passed(); });
}

namespace {

void set_path(Json& j, const std::string& dotted, double v) {
  Json* node = &j;
  std::size_t start = 0;
  for (;;) {
    const std::size_t dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot - start);
    if (dot == std::string::npos) {
      (*node)[key] = v;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

}  // namespace

void parse_sweep(const std::string& json_text, std::string& base_json, std::vector<SweepAxis>& axes) {
  const Json j = parse_json(json_text, "sweep");
  detail::require_keys(j, {"base", "grid"}, "sweep");
  if (!j.contains("base") || !j.contains("grid")) throw InvalidConfiguration("sweep: needs 'base' and 'grid'");
  base_json = j.at("base").dump();
  axes.clear();
  if (!j.at("grid").is_object()) throw InvalidConfiguration("sweep: grid must be an object");
  for (const auto& item : j.at("grid").items()) {
    SweepAxis a;
    a.key = item.key();
    try {
      a.values = item.value().get<std::vector<double>>();
    } catch (const nlohmann::json::exception&) {
      throw InvalidConfiguration("sweep: axis '" + a.key + "' must be a list of numbers");
    }
    axes.push_back(a);
  }
  if (axes.empty()) throw InvalidConfiguration("sweep: empty parameter grid");
}

SweepResult sweep(const std::string& base_json, const std::vector<SweepAxis>& axes, const std::filesystem::path& directory,
                  int jobs) {
  if (axes.empty()) throw InvalidConfiguration("sweep: empty parameter grid");
  std::size_t total = 1;
  for (const auto& a : axes) {
    if (a.values.empty()) throw InvalidConfiguration("sweep: axis '" + a.key + "' has no values");
    total *= a.values.size();
  }
  const Json base = parse_json(base_json, "sweep base");

  SweepResult out;
  out.bundles.resize(total);
  std::vector<std::string> labels(total, "unknown");
  std::vector<std::vector<double>> combos(total);
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t rest = k;
    combos[k].resize(axes.size());
    for (std::size_t a = axes.size(); a-- > 0;) {
      combos[k][a] = axes[a].values[rest % axes[a].values.size()];
      rest /= axes[a].values.size();
    }
  }

  auto run_one = [&](std::size_t k) {
    const std::filesystem::path dir = directory / ("run-" + std::to_string(k));
    ResultBundle& b = out.bundles[k];
    try {
      Json j = base;
      for (std::size_t a = 0; a < axes.size(); ++a) set_path(j, axes[a].key, combos[k][a]);
      // Integer-valued fields arrive as doubles from the axis list.
      for (const char* key : {"n"}) {
        if (j.contains("operator") && j["operator"].contains(key) && j["operator"][key].is_number_float()) {
          j["operator"][key] = static_cast<int>(std::lround(j["operator"][key].get<double>()));
        }
      }
      for (const char* key : {"radial_nodes", "angular_nodes", "stencil_directions"}) {
        if (j.contains("grid") && j["grid"].contains(key) && j["grid"][key].is_number_float()) {
          j["grid"][key] = static_cast<int>(std::lround(j["grid"][key].get<double>()));
        }
      }
      const ExperimentConfig c = parse_config(j.dump());
      labels[k] = to_string(decay_case(c.op.ellipticity()));
      b = run(c, dir);
    } catch (const std::exception& e) {
      b.scenario = base.value("scenario", "");
      b.directory = dir;
      b.error = e.what();
    }
  };

  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(total)));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k; (k = next.fetch_add(1)) < total;) run_one(k);
    });
  }
  for (auto& t : pool) t.join();

  std::ostringstream csv;
  csv << "# farfield-csv v" << kCsvVersion << " sweep_summary\n";
  csv << "index";
  for (const auto& a : axes) csv << ',' << csv_field(a.key);
  csv << ",scenario,config_hash,case,passed,error\n";
  for (std::size_t k = 0; k < total; ++k) {
    const ResultBundle& b = out.bundles[k];
    csv << k;
    for (double v : combos[k]) csv << ',' << format_number(v);
    csv << ',' << csv_field(b.scenario) << ',' << b.config_hash << ',' << labels[k] << ',' << (b.passed() ? 1 : 0) << ','
        << csv_field(b.error.value_or("")) << '\n';
  }
  out.summary = directory / "summary.csv";
  write_text_atomic(out.summary, csv.str());
  return out;
}

std::string DiffReport::to_text() const {
  std::ostringstream s;
  for (const auto& e : entries) {
    s << e.file << ": " << e.field << ": expected " << e.expected << ", got " << e.actual << '\n';
  }
  return s.str();
}

namespace {

struct Tolerances {
  Json per_field = Json::object();
  double abs = 1e-9;
  double rel = 1e-6;

  bool close(const std::string& field, double a, double b) const {
    if (std::isnan(a) && std::isnan(b)) return true;
    if (std::isinf(a) || std::isinf(b)) return a == b;
    double tol = abs + rel * std::max(std::abs(a), std::abs(b));
    if (per_field.contains(field)) tol = per_field.at(field).get<double>();
    return std::abs(a - b) <= tol;
  }
};

void diff_json(const Json& exp, const Json& act, const std::string& path, const std::string& key, const std::string& file,
               const Tolerances& tol, DiffReport& rep) {
  if (key == "wall_ms") return;
  if (exp.is_number() && act.is_number()) {
    if (!tol.close(key, exp.get<double>(), act.get<double>())) {
      rep.entries.push_back({file, path, exp.dump(), act.dump()});
    }
    return;
  }
  if (exp.type() != act.type()) {
    rep.entries.push_back({file, path, exp.dump(), act.dump()});
    return;
  }
  if (exp.is_object()) {
    for (const auto& item : exp.items()) {
      const std::string sub = path.empty() ? item.key() : path + "." + item.key();
      if (!act.contains(item.key())) {
        if (item.key() != "wall_ms") rep.entries.push_back({file, sub, item.value().dump(), "<missing>"});
        continue;
      }
      diff_json(item.value(), act.at(item.key()), sub, item.key(), file, tol, rep);
    }
    for (const auto& item : act.items()) {
      if (!exp.contains(item.key()) && item.key() != "wall_ms") {
        rep.entries.push_back({file, path.empty() ? item.key() : path + "." + item.key(), "<missing>", item.value().dump()});
      }
    }
    return;
  }
  if (exp.is_array()) {
    if (exp.size() != act.size()) {
      rep.entries.push_back({file, path + ".size", std::to_string(exp.size()), std::to_string(act.size())});
      return;
    }
    for (std::size_t i = 0; i < exp.size(); ++i) {
      diff_json(exp[i], act[i], path + "[" + std::to_string(i) + "]", key, file, tol, rep);
    }
    return;
  }
  if (exp != act) rep.entries.push_back({file, path, exp.dump(), act.dump()});
}

void diff_csv(const std::string& exp_text, const std::string& act_text, const std::string& file, const Tolerances& tol,
              DiffReport& rep) {
  const CsvTable e = CsvTable::parse(exp_text), a = CsvTable::parse(act_text);
  if (e.schema != a.schema || e.columns != a.columns) {
    rep.entries.push_back({file, "header", e.schema, a.schema});
    return;
  }
  if (e.rows.size() != a.rows.size()) {
    rep.entries.push_back({file, "rows", std::to_string(e.rows.size()), std::to_string(a.rows.size())});
    return;
  }
  for (std::size_t i = 0; i < e.rows.size(); ++i) {
    for (std::size_t k = 0; k < e.columns.size(); ++k) {
      if (e.columns[k] == "wall_ms") continue;
      if (!tol.close(e.columns[k], e.rows[i][k], a.rows[i][k])) {
        rep.entries.push_back({file, e.columns[k] + "[" + std::to_string(i) + "]", format_number(e.rows[i][k]),
                               format_number(a.rows[i][k])});
      }
    }
  }
}

}  // namespace

DiffReport verify(const std::filesystem::path& bundle_dir, const std::filesystem::path& golden) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(golden)) throw MissingBaseline("golden directory not found: " + golden.string());
  if (!fs::exists(golden / "bundle.json")) throw MissingBaseline("golden bundle missing: " + (golden / "bundle.json").string());
  if (!fs::exists(bundle_dir / "bundle.json")) throw InvalidInput("no bundle.json in " + bundle_dir.string());

  Tolerances tol;
  if (fs::exists(golden / "tolerances.json")) tol.per_field = parse_json(read_text(golden / "tolerances.json"), "tolerances");

  const Json bundle = parse_json(read_text(bundle_dir / "bundle.json"), "bundle");
  std::vector<std::string> files{"bundle.json"};
  for (const auto& f : bundle.value("files", Json::array())) files.push_back(f.get<std::string>());

  DiffReport rep;
  for (const auto& name : files) {
    if (!fs::exists(golden / name)) throw MissingBaseline("golden file missing: " + (golden / name).string());
    const std::string exp = read_text(golden / name), act = read_text(bundle_dir / name);
    if (fs::path(name).extension() == ".csv") {
      diff_csv(exp, act, name, tol, rep);
    } else {
      diff_json(parse_json(exp, name), parse_json(act, name), "", "", name, tol, rep);
    }
  }
  return rep;
}

}  // namespace farfield
