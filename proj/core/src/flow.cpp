#include "cob/flow.hpp"

#include <cmath>

#include "cob/error.hpp"

namespace cob {

std::string_view to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::LimitBid: return "limit_bid";
    case EventKind::LimitAsk: return "limit_ask";
    case EventKind::MarketBid: return "market_bid";
    case EventKind::MarketAsk: return "market_ask";
    case EventKind::CancelBid: return "cancel_bid";
    case EventKind::CancelAsk: return "cancel_ask";
  }
  return "unknown";
}

std::optional<EventKind> parse_event_kind(std::string_view name) noexcept {
  for (const auto k : kEventKinds) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

double RateSet::rate(EventKind kind) const {
  return const_cast<RateSet*>(this)->rate(kind);
}

double& RateSet::rate(EventKind kind) {
  switch (kind) {
    case EventKind::LimitBid: return limit_bid;
    case EventKind::LimitAsk: return limit_ask;
    case EventKind::MarketBid: return market_bid;
    case EventKind::MarketAsk: return market_ask;
    case EventKind::CancelBid: return cancel_bid;
    case EventKind::CancelAsk: break;
  }
  return cancel_ask;
}

void validate(const RateSet& rates) {
  for (const auto k : kEventKinds) {
    const double r = rates.rate(k);
    if (!std::isfinite(r) || r < 0.0) {
      throw ConfigError("rate " + std::string(to_string(k)) + " must be finite and nonnegative");
    }
  }
  if (!(rates.total() > 0.0)) throw ConfigError("total event rate must be positive");
}

std::optional<SampledEvent> sample_event(const RateSet& rates, Rng& rng) {
  const double total = rates.total();
  if (!(total > 0.0)) return std::nullopt;
  const double dt = rng.exponential(total);
  const double target = rng.uniform01() * total;
  double acc = 0.0;
  EventKind chosen = EventKind::CancelAsk;
  for (const auto k : kEventKinds) {
    const double r = rates.rate(k);
    if (r <= 0.0) continue;
    acc += r;
    chosen = k;
    if (target < acc) break;
  }
  return SampledEvent{chosen, dt};
}

RateSet apply_guards(const RateSet& rates, const DepthView& depth, const Guards& guards) {
  RateSet out = rates;
  if (depth.d_total < guards.d_min) {
    out.market_bid = 0.0;
    out.cancel_bid = 0.0;
  }
  if (depth.s_total < guards.s_min) {
    out.market_ask = 0.0;
    out.cancel_ask = 0.0;
  }
  return out;
}

void CancelVolumeTracker::add(Volume v) {
  ++n_;
  const double x = static_cast<double>(v);
  const double d = x - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (x - mean_);
}

double CancelVolumeTracker::standard_error() const {
  if (n_ < 2) return 0.0;
  const double var = m2_ / static_cast<double>(n_ - 1);
  return std::sqrt(var / static_cast<double>(n_));
}

namespace {
int sign(double x) { return (x > 0.0) - (x < 0.0); }
}  // namespace

FlowDiagnostics flow_diagnostics(const RateSet& r, const VolumeSampler& limit_volume,
                                 const VolumeSampler& market_volume,
                                 const CancelVolumeTracker& cancelled) {
  FlowDiagnostics d;
  d.S_L = limit_volume.mean();
  d.S_M = market_volume.mean();
  if (cancelled.count() == 0) {
    d.S_C = d.S_L;
    d.S_C_provisional = true;
  } else {
    d.S_C = cancelled.mean();
    d.S_C_error = cancelled.standard_error();
  }
  d.V_in = d.S_L * (r.limit_ask + r.limit_bid);
  d.V_out = d.S_M * (r.market_ask + r.market_bid) + d.S_C * (r.cancel_ask + r.cancel_bid);
  d.delta_s = r.limit_ask * d.S_L - r.market_ask * d.S_M - r.cancel_ask * d.S_C;
  d.delta_d = r.limit_bid * d.S_L - r.market_bid * d.S_M - r.cancel_bid * d.S_C;
  d.supply = r.limit_ask * d.S_L + r.market_bid * d.S_M - r.cancel_ask * d.S_C;
  d.demand = r.limit_bid * d.S_L + r.market_ask * d.S_M - r.cancel_bid * d.S_C;
  d.delta_s_sign = sign(d.delta_s);
  d.delta_d_sign = sign(d.delta_d);
  return d;
}

}  // namespace cob
