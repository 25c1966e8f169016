#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cob/flow.hpp"
#include "cob/sampling.hpp"
#include "cob/types.hpp"

namespace cob {

struct EventCount {
  std::uint64_t n = 0;
  friend bool operator==(const EventCount&, const EventCount&) = default;
};

struct Duration {
  double seconds = 0.0;
  friend bool operator==(const Duration&, const Duration&) = default;
};

/// Length of a run or of its warmup, in events or simulated seconds.
using Span = std::variant<EventCount, Duration>;

struct SimConfig {
  std::string preset = "custom";
  RateSet rates;
  LevelModel level_model;
  VolumeModel volume_model_limit = PowerLaw{2.8, 1000};
  VolumeModel volume_model_market = PowerLaw{2.5, 100};
  Guards guards{200, 200};
  double tick = 1.0;
  PriceTick initial_reference{100000};
  Span horizon = EventCount{1'000'000};
  /// Empty means 10% of the horizon, in the horizon's unit.
  std::optional<Span> warmup;
  std::uint64_t seed = 1;
  double snapshot_every = 1.0;
  int profile_window = 100;
};

/// Warmup as configured, or the default share of the horizon.
Span effective_warmup(const SimConfig& config);

/// Throws ConfigError when the configuration is inconsistent.
void validate(const SimConfig& config);

/// Parses the flat `key = value` format. Lines starting with '#' and blank
/// lines are ignored. Unknown or duplicate keys are errors; messages carry
/// `source:line:` prefixes.
SimConfig parse_config(std::string_view text, std::string_view source = "<config>");
SimConfig load_config(const std::filesystem::path& path);

/// Every key of the configuration in canonical order; parse_config of the
/// result reproduces the configuration exactly.
std::string format_config(const SimConfig& config);

/// Applies `key=value` overrides on top of a configuration.
SimConfig apply_overrides(const SimConfig& config, const std::vector<std::string>& overrides);

/// Shortest decimal form that round-trips through strtod.
std::string format_double(double value);

/// Fixed-point decimal rendering, locale independent.
std::string format_fixed(double value, int decimals);

/// Decimal places needed to print multiples of `tick` exactly (capped at 9).
int tick_decimals(double tick);

}  // namespace cob
