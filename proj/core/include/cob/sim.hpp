#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cob/book.hpp"
#include "cob/config.hpp"
#include "cob/flow.hpp"
#include "cob/rng.hpp"

namespace cob {

inline constexpr std::int64_t kMicrosPerSecond = 1'000'000;
/// Window of the per-second depth columns s(100) and d(100).
inline constexpr std::int64_t kSeriesDepthLevels = 100;

enum class Phase : std::uint8_t { Seed, Warmup, Main };

std::string_view to_string(Phase phase) noexcept;
std::optional<Phase> parse_phase(std::string_view name) noexcept;

/// Bits of SimEvent::gates: consumers of that side were switched off when
/// the event was drawn.
inline constexpr std::uint8_t kBidGated = 1;
inline constexpr std::uint8_t kAskGated = 2;

struct SimEvent {
  std::uint64_t index = 0;  // 0 for seeding orders, then 1, 2, ...
  std::int64_t t_us = 0;    // event time, microseconds since start
  EventKind kind = EventKind::LimitBid;
  Side side = Side::Buy;    // direction of the order carried by the event
  int level = 0;            // limit orders only
  Volume volume = 0;        // requested (limit, market) or removed (cancel)
  OrderId order_id;         // new or cancelled order; 0 for market orders
  PriceTick price;          // resting price of the new or cancelled order
  std::vector<Fill> fills;
  Volume unfilled = 0;
  std::optional<std::int64_t> spread_after;  // market orders only
  bool gated = false;
  std::uint8_t gates = 0;
  Phase phase = Phase::Main;

  friend bool operator==(const SimEvent&, const SimEvent&) = default;
};

struct TradeRecord {
  std::int64_t t_us = 0;
  Side side = Side::Buy;  // taker direction
  Volume volume = 0;
  Volume filled = 0;
  Volume unfilled = 0;
  std::optional<std::int64_t> spread_after;
  PriceTick first_price;
  PriceTick last_price;
  std::size_t fills = 0;

  friend bool operator==(const TradeRecord&, const TradeRecord&) = default;
};

/// Book state at a whole second of simulated time.
struct SeriesRow {
  std::int64_t second = 0;
  std::optional<PriceTick> best_bid;
  std::optional<PriceTick> best_ask;
  Volume s_total = 0;
  Volume d_total = 0;
  Volume s_window = 0;  // s(100)
  Volume d_window = 0;  // d(100)

  /// Twice the mid price in ticks, when both sides are present.
  std::optional<std::int64_t> mid2() const;
  std::optional<std::int64_t> spread() const;

  friend bool operator==(const SeriesRow&, const SeriesRow&) = default;
};

struct ProfileSnapshot {
  std::int64_t t_us = 0;
  std::vector<Volume> x;  // layout of Book::profile_snapshot

  friend bool operator==(const ProfileSnapshot&, const ProfileSnapshot&) = default;
};

struct DiagnosticsRow {
  std::int64_t t_us = 0;
  FlowDiagnostics diagnostics;
};

struct SideCounters {
  Volume seeded = 0;
  Volume submitted = 0;
  Volume cancelled = 0;
  Volume filled = 0;
  std::uint64_t rejected = 0;

  friend bool operator==(const SideCounters&, const SideCounters&) = default;
};

struct Counters {
  SideCounters bid;
  SideCounters ask;
  std::uint64_t events = 0;
  std::uint64_t gated = 0;

  const SideCounters& side(Side s) const { return s == Side::Buy ? bid : ask; }
  SideCounters& side(Side s) { return s == Side::Buy ? bid : ask; }

  friend bool operator==(const Counters&, const Counters&) = default;
};

struct RunOutput {
  SimConfig config;
  /// Seeding orders, warmup and main-phase events in order.
  std::vector<SimEvent> events;
  /// Statistics below cover the main phase only.
  std::vector<TradeRecord> trades;
  std::vector<SeriesRow> series;
  std::vector<ProfileSnapshot> profiles;
  std::vector<DiagnosticsRow> diagnostics;
  /// Measured cancelled-volume mean over the main phase.
  CancelVolumeTracker cancelled;
  Counters counters;
  DepthView final_depth;
  std::int64_t end_t_us = 0;
  /// Time of the first statistics row; warmup ends here.
  std::int64_t stats_start_us = 0;
  /// Every effective rate became zero before the horizon.
  bool halted = false;
};

struct RunOptions {
  bool keep_events = true;
  /// Called after each applied event (seeding included) with the live book.
  std::function<void(const SimEvent&, const Book&)> observer;
};

/// Seeds an empty book with alternating limit orders until both side totals
/// reach their guards. Clock stays at zero. Seeding events are appended to
/// `log` when given.
Book init_book(const SimConfig& config, Rng& rng, std::vector<SimEvent>* log = nullptr,
               Counters* counters = nullptr);

RunOutput run(const SimConfig& config, const RunOptions& options = {});

}  // namespace cob
