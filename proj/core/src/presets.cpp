#include "cob/presets.hpp"

#include "cob/error.hpp"
#include "cob/sampling.hpp"

namespace cob {

namespace {

SimConfig base(std::string_view name) {
  SimConfig c;
  c.preset = std::string(name);
  c.tick = 5.0;
  c.initial_reference = PriceTick{30000};
  c.level_model = LevelModel{2.5, 10, 1000};
  c.volume_model_limit = PowerLaw{2.8, 1000};
  c.volume_model_market = PowerLaw{2.5, 100};
  c.guards = Guards{200, 200};
  c.horizon = EventCount{1'000'000};
  c.seed = 1;
  c.snapshot_every = 1.0;
  c.profile_window = 100;
  return c;
}

RateSet symmetric(double limit, double market, double cancel) {
  return RateSet{limit, limit, market, market, cancel, cancel};
}

struct Entry {
  std::string_view name;
  std::string_view summary;
  SimConfig (*make)();
};

// Limit orders spread uniformly over all levels. Used by the regimes whose
// book profile should stay flat.
constexpr LevelModel kUniformLevels{2.5, 1000, 1000};

// Flow rates where market orders on each side are offset by limit inflow:
// limit = cancel + market * S^M / S^L, so the expected side change is zero
// when cancelled orders carry the mean limit volume.
RateSet stationary_flow(const SimConfig& c, double market_bid, double market_ask, double cancel) {
  const double ratio = VolumeSampler(c.volume_model_market).mean() / VolumeSampler(c.volume_model_limit).mean();
  return RateSet{cancel + market_bid * ratio, cancel + market_ask * ratio, market_bid, market_ask, cancel, cancel};
}

const Entry kPresets[] = {
    {"no_market", "limit orders and cancellations only, equal rates per side, uniform level placement",
     [] {
       auto c = base("no_market");
       c.rates = symmetric(50.0, 0.0, 50.0);
       c.level_model = kUniformLevels;
       c.snapshot_every = 10.0;
       c.profile_window = 600;
       return c;
     }},
    {"small_market", "no_market with market orders at 0.25% of all events per side",
     [] {
       auto c = base("small_market");
       c.rates = symmetric(50.0, 0.5, 50.0);
       c.level_model = kUniformLevels;
       c.snapshot_every = 10.0;
       c.profile_window = 600;
       return c;
     }},
    {"high_market", "market orders near 10% of all events per side",
     [] {
       auto c = base("high_market");
       c.rates = symmetric(50.0, 20.0, 32.0);
       return c;
     }},
    {"balanced", "179 events/s split symmetrically; both sides drain toward their guards",
     [] {
       auto c = base("balanced");
       c.rates = symmetric(40.0, 10.0, 39.5);
       c.horizon = Duration{1000.0};
       return c;
     }},
    {"book_disbalance_up", "balanced rates with the sell-side guard below the buy-side guard",
     [] {
       auto c = base("book_disbalance_up");
       c.rates = symmetric(40.0, 10.0, 39.5);
       c.guards = Guards{150, 600};
       c.horizon = Duration{1000.0};
       return c;
     }},
    {"book_disbalance_down", "balanced rates with the buy-side guard below the sell-side guard",
     [] {
       auto c = base("book_disbalance_down");
       c.rates = symmetric(40.0, 10.0, 39.5);
       c.guards = Guards{600, 150};
       c.horizon = Duration{1000.0};
       return c;
     }},
    {"flow_disbalance_up", "twice as many market buys as sells; limit rates compensate per side",
     [] {
       auto c = base("flow_disbalance_up");
       c.rates = stationary_flow(c, 10.0, 20.0, 39.5);
       c.horizon = Duration{1000.0};
       return c;
     }},
};

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& e : kPresets) out.emplace_back(e.name);
    return out;
  }();
  return names;
}

std::string_view preset_summary(std::string_view name) {
  for (const auto& e : kPresets) {
    if (e.name == name) return e.summary;
  }
  return {};
}

SimConfig preset(std::string_view name) {
  for (const auto& e : kPresets) {
    if (e.name == name) return e.make();
  }
  std::string choices;
  for (const auto& n : preset_names()) choices += (choices.empty() ? "" : ", ") + n;
  throw ConfigError("unknown preset '" + std::string(name) + "'; choose one of: " + choices);
}

}  // namespace cob
