#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "cob/book.hpp"
#include "cob/rng.hpp"
#include "cob/sampling.hpp"

namespace cob {

/// The six event streams. The suffix names the book side affected:
/// `MarketBid` is a market sell hitting the bids, `MarketAsk` a market buy
/// lifting the asks.
enum class EventKind : std::uint8_t { LimitBid, LimitAsk, MarketBid, MarketAsk, CancelBid, CancelAsk };

inline constexpr std::array<EventKind, 6> kEventKinds = {
    EventKind::LimitBid,  EventKind::LimitAsk,  EventKind::MarketBid,
    EventKind::MarketAsk, EventKind::CancelBid, EventKind::CancelAsk};

std::string_view to_string(EventKind kind) noexcept;
std::optional<EventKind> parse_event_kind(std::string_view name) noexcept;

constexpr bool is_limit(EventKind k) noexcept { return k == EventKind::LimitBid || k == EventKind::LimitAsk; }
constexpr bool is_market(EventKind k) noexcept { return k == EventKind::MarketBid || k == EventKind::MarketAsk; }
constexpr bool is_cancel(EventKind k) noexcept { return k == EventKind::CancelBid || k == EventKind::CancelAsk; }

/// Side of the book whose resting orders the event adds to or removes from.
constexpr Side book_side(EventKind k) noexcept {
  switch (k) {
    case EventKind::LimitBid:
    case EventKind::MarketBid:
    case EventKind::CancelBid:
      return Side::Buy;
    default:
      return Side::Sell;
  }
}

/// Direction of the order the event carries (a market order hitting the
/// bids is a sell).
constexpr Side order_side(EventKind k) noexcept {
  return is_market(k) ? opposite(book_side(k)) : book_side(k);
}

/// Poisson rates in events per second.
struct RateSet {
  double limit_bid = 0.0;
  double limit_ask = 0.0;
  double market_bid = 0.0;
  double market_ask = 0.0;
  double cancel_bid = 0.0;
  double cancel_ask = 0.0;

  double total() const { return limit_bid + limit_ask + market_bid + market_ask + cancel_bid + cancel_ask; }
  double rate(EventKind kind) const;
  double& rate(EventKind kind);

  friend bool operator==(const RateSet&, const RateSet&) = default;
};

/// Throws ConfigError on negative or non-finite rates or a zero total.
void validate(const RateSet& rates);

struct SampledEvent {
  EventKind kind;
  double dt = 0.0;
};

/// Next event of the superposed flow: waiting time ~ Exp(total) and type with
/// probability rate/total. Empty when every rate is zero.
std::optional<SampledEvent> sample_event(const RateSet& rates, Rng& rng);

/// Depth floors below which market orders and cancellations against a side
/// are switched off.
struct Guards {
  Volume s_min = 0;
  Volume d_min = 0;
};

/// Zeroes market_bid/cancel_bid when d_total < d_min and
/// market_ask/cancel_ask when s_total < s_min. Limit rates pass through.
RateSet apply_guards(const RateSet& rates, const DepthView& depth, const Guards& guards);

/// Running mean and standard error of cancelled volumes.
class CancelVolumeTracker {
 public:
  void add(Volume v);
  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  /// Standard error of the mean; 0 with fewer than two samples.
  double standard_error() const;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct FlowDiagnostics {
  double S_L = 0.0;  // expected limit volume
  double S_M = 0.0;  // expected market volume
  double S_C = 0.0;  // cancelled-volume mean used below
  double S_C_error = 0.0;
  bool S_C_provisional = false;  // no cancellations seen yet; S_C = S_L
  double V_in = 0.0;
  double V_out = 0.0;
  double delta_s = 0.0;
  double delta_d = 0.0;
  double supply = 0.0;  // aggregated sell supply S
  double demand = 0.0;  // aggregated buy demand D
  /// Sign of delta_s / delta_d: -1, 0 or +1. Both negative is the
  /// non-explosive regime.
  int delta_s_sign = 0;
  int delta_d_sign = 0;
};

/// Expected-value bookkeeping of the flow. `cancelled` is the measured
/// cancelled-volume estimate; pass an empty tracker before any cancellation.
FlowDiagnostics flow_diagnostics(const RateSet& rates, const VolumeSampler& limit_volume,
                                 const VolumeSampler& market_volume,
                                 const CancelVolumeTracker& cancelled);

}  // namespace cob
