#pragma once

#include <initializer_list>
#include <string>

#include <json.hpp>

#include "farfield/operator_core.hpp"

namespace farfield::detail {

using Json = nlohmann::ordered_json;

Json operator_to_value(const OperatorSpec& f);
OperatorSpec operator_from_value(const Json& j);

/// Throws InvalidConfiguration when j has a key outside `allowed`.
void require_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where);

/// Non-finite doubles as their string form, finite ones unchanged.
Json number(double v);

}  // namespace farfield::detail
