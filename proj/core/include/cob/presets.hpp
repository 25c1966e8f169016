#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cob/config.hpp"

namespace cob {

/// Names accepted by preset(), in listing order.
const std::vector<std::string>& preset_names();

/// One-line description of a preset.
std::string_view preset_summary(std::string_view name);

/// Throws ConfigError listing the valid names when `name` is unknown.
SimConfig preset(std::string_view name);

}  // namespace cob
