#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bohmflow/scenario.hpp"

namespace bohmflow {

/// mueller-brown, double-slit-500, free-gaussian-oracle, mixed-qc-harmonic.
std::vector<std::string> preset_names();

/// Scenario document of a preset. "mueller-brown-p0-<v>" selects the
/// Mueller-Brown preset with initial momentum parameter p0 = v.
/// Throws ValidationError("preset") for unknown names.
json preset(std::string_view name);

}  // namespace bohmflow
