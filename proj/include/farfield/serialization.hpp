#pragma once

#include <string>
#include <string_view>

#include "farfield/operator_core.hpp"

namespace farfield {

/// Operator block of the harness config as compact JSON, e.g.
/// {"kind":"pucci_plus","lambda":1.0,"Lambda":2.0,"n":2}. Bellman operators add "controls" (a list
/// of row-major matrices) and "control_set" ("fixed" or "rotation_closed"); "shifted" carries
/// "base", "offset" and "shift"; "dual" carries "base".
std::string to_json(const OperatorSpec& f);

/// Inverse of to_json. Unknown keys, missing fields and invalid operators raise
/// InvalidConfiguration.
OperatorSpec operator_from_json(std::string_view text);

}  // namespace farfield
