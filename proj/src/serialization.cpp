#include "farfield/serialization.hpp"

#include <cmath>

#include "detail/json_io.hpp"
#include "farfield/errors.hpp"
#include "farfield/io.hpp"

namespace farfield {

namespace detail {

void require_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw InvalidConfiguration(where + ": expected an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || item.key() == k;
    if (!known) throw InvalidConfiguration(where + ": unknown key '" + item.key() + "'");
  }
}

Json number(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

namespace {

Json matrix_value(const SymMatrix& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.order(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.order(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

SymMatrix matrix_from(const Json& j, int n, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) throw InvalidConfiguration(where + ": matrix must have n rows");
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != n) {
      throw InvalidConfiguration(where + ": matrix rows must have n entries");
    }
    for (int k = 0; k < n; ++k) {
      if (!j[i][k].is_number()) throw InvalidConfiguration(where + ": matrix entries must be numbers");
      m(i, k) = j[i][k].get<double>();
    }
  }
  try {
    return SymMatrix(m);
  } catch (const InvalidInput& e) {
    throw InvalidConfiguration(where + ": " + e.what());
  }
}

template <class T>
T field(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw InvalidConfiguration(where + ": missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidConfiguration(where + ": field '" + key + "' has the wrong type");
  }
}

Ellipticity ellipticity_from(const Json& j) {
  try {
    return Ellipticity(field<double>(j, "lambda", "operator"), field<double>(j, "Lambda", "operator"),
                       field<int>(j, "n", "operator"));
  } catch (const InvalidInput& e) {
    throw InvalidConfiguration(std::string("operator: ") + e.what());
  }
}

void put_ellipticity(Json& j, const Ellipticity& e) {
  j["lambda"] = e.lower();
  j["Lambda"] = e.upper();
  j["n"] = e.dim();
}

}  // namespace

Json operator_to_value(const OperatorSpec& f) {
  Json j;
  switch (f.kind()) {
    case OperatorKind::PucciPlus:
      j["kind"] = "pucci_plus";
      put_ellipticity(j, f.ellipticity());
      break;
    case OperatorKind::PucciMinus:
      j["kind"] = "pucci_minus";
      put_ellipticity(j, f.ellipticity());
      break;
    case OperatorKind::Laplace:
      j["kind"] = "laplace";
      j["n"] = f.dim();
      break;
    case OperatorKind::Bellman: {
      j["kind"] = "bellman";
      put_ellipticity(j, f.ellipticity());
      Json controls = Json::array();
      for (const auto& a : f.controls()) controls.push_back(matrix_value(a));
      j["controls"] = controls;
      j["control_set"] = f.control_set() == ControlSet::Fixed ? "fixed" : "rotation_closed";
      break;
    }
    case OperatorKind::Shifted:
      j["kind"] = "shifted";
      j["base"] = operator_to_value(*f.base());
      j["offset"] = matrix_value(f.offset());
      j["shift"] = f.shift();
      break;
    case OperatorKind::Dual:
      j["kind"] = "dual";
      j["base"] = operator_to_value(*f.base());
      break;
  }
  return j;
}

OperatorSpec operator_from_value(const Json& j) {
  if (!j.is_object()) throw InvalidConfiguration("operator: expected an object");
  const std::string kind = field<std::string>(j, "kind", "operator");
  if (kind == "pucci_plus" || kind == "pucci_minus") {
    require_keys(j, {"kind", "lambda", "Lambda", "n"}, "operator");
    const Ellipticity e = ellipticity_from(j);
    return kind == "pucci_plus" ? OperatorSpec::pucci_plus(e) : OperatorSpec::pucci_minus(e);
  }
  if (kind == "laplace") {
    require_keys(j, {"kind", "n"}, "operator");
    try {
      return OperatorSpec::laplace(field<int>(j, "n", "operator"));
    } catch (const InvalidInput& e) {
      throw InvalidConfiguration(std::string("operator: ") + e.what());
    }
  }
  if (kind == "bellman") {
    require_keys(j, {"kind", "lambda", "Lambda", "n", "controls", "control_set"}, "operator");
    const Ellipticity e = ellipticity_from(j);
    const Json& list = j.contains("controls") ? j.at("controls") : Json();
    if (!list.is_array()) throw InvalidConfiguration("operator: bellman needs a 'controls' list");
    std::vector<SymMatrix> controls;
    for (const auto& c : list) controls.push_back(matrix_from(c, e.dim(), "operator.controls"));
    ControlSet set = ControlSet::Fixed;
    if (j.contains("control_set")) {
      const std::string s = field<std::string>(j, "control_set", "operator");
      if (s == "rotation_closed") {
        set = ControlSet::RotationClosed;
      } else if (s != "fixed") {
        throw InvalidConfiguration("operator: control_set must be 'fixed' or 'rotation_closed'");
      }
    }
    return OperatorSpec::bellman(e, std::move(controls), set);
  }
  if (kind == "shifted") {
    require_keys(j, {"kind", "base", "offset", "shift"}, "operator");
    const OperatorSpec base = operator_from_value(j.at("base"));
    const SymMatrix offset = j.contains("offset") ? matrix_from(j.at("offset"), base.dim(), "operator.offset")
                                                  : SymMatrix::zero(base.dim());
    const double shift = j.contains("shift") ? field<double>(j, "shift", "operator") : 0.0;
    return OperatorSpec::shifted(base, offset, shift);
  }
  if (kind == "dual") {
    require_keys(j, {"kind", "base"}, "operator");
    if (!j.contains("base")) throw InvalidConfiguration("operator: dual needs a 'base'");
    return operator_from_value(j.at("base")).dual();
  }
  throw InvalidConfiguration("operator: unknown kind '" + kind + "'");
}

}  // namespace detail

std::string to_json(const OperatorSpec& f) { return detail::operator_to_value(f).dump(); }

OperatorSpec operator_from_json(std::string_view text) {
  detail::Json j;
  try {
    j = detail::Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidConfiguration(std::string("operator: malformed JSON: ") + e.what());
  }
  return detail::operator_from_value(j);
}

}  // namespace farfield
