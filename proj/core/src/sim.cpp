#include "cob/sim.hpp"

#include <cmath>
#include <limits>

namespace cob {

std::string_view to_string(Phase phase) noexcept {
  switch (phase) {
    case Phase::Seed: return "seed";
    case Phase::Warmup: return "warmup";
    case Phase::Main: break;
  }
  return "main";
}

std::optional<Phase> parse_phase(std::string_view name) noexcept {
  for (const auto p : {Phase::Seed, Phase::Warmup, Phase::Main}) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

std::optional<std::int64_t> SeriesRow::mid2() const {
  if (!best_bid || !best_ask) return std::nullopt;
  return best_bid->value + best_ask->value;
}

std::optional<std::int64_t> SeriesRow::spread() const {
  if (!best_bid || !best_ask) return std::nullopt;
  return best_ask->value - best_bid->value;
}

namespace {

struct Samplers {
  LevelSampler level;
  VolumeSampler limit_volume;
  VolumeSampler market_volume;

  explicit Samplers(const SimConfig& c)
      : level(c.level_model), limit_volume(c.volume_model_limit), market_volume(c.volume_model_market) {}
};

Book seed_book(const SimConfig& config, const Samplers& samplers, Rng& rng, std::vector<SimEvent>* log,
               Counters* counters, const RunOptions* options) {
  Book book(config.tick, config.initial_reference, config.level_model.max_level);
  auto place = [&](Side side) {
    const int level = samplers.level(rng);
    const Volume volume = samplers.limit_volume(rng);
    try {
      const auto order = book.submit_limit(side, level, volume);
      SimEvent ev;
      ev.kind = side == Side::Buy ? EventKind::LimitBid : EventKind::LimitAsk;
      ev.side = side;
      ev.level = level;
      ev.volume = volume;
      ev.order_id = order.id;
      ev.price = order.price;
      ev.phase = Phase::Seed;
      if (counters) counters->side(side).seeded += volume;
      if (options && options->observer) options->observer(ev, book);
      if (log) log->push_back(std::move(ev));
    } catch (const std::out_of_range&) {
      if (counters) ++counters->side(side).rejected;
    }
  };
  while (book.total(Side::Buy) < config.guards.d_min || book.total(Side::Sell) < config.guards.s_min) {
    if (book.total(Side::Buy) < config.guards.d_min) place(Side::Buy);
    if (book.total(Side::Sell) < config.guards.s_min) place(Side::Sell);
  }
  return book;
}

std::int64_t to_micros(double seconds) {
  return static_cast<std::int64_t>(std::llround(seconds * static_cast<double>(kMicrosPerSecond)));
}

}  // namespace

Book init_book(const SimConfig& config, Rng& rng, std::vector<SimEvent>* log, Counters* counters) {
  validate(config);
  const Samplers samplers(config);
  return seed_book(config, samplers, rng, log, counters, nullptr);
}

RunOutput run(const SimConfig& config, const RunOptions& options) {
  validate(config);
  RunOutput out;
  out.config = config;
  const Samplers samplers(config);
  Rng rng(config.seed);

  std::vector<SimEvent>* log = options.keep_events ? &out.events : nullptr;
  Book book = seed_book(config, samplers, rng, log, &out.counters, &options);

  const auto warm = effective_warmup(config);
  const bool by_events = std::holds_alternative<EventCount>(config.horizon);
  const std::uint64_t horizon_events = by_events ? std::get<EventCount>(config.horizon).n : 0;
  const std::uint64_t warm_events = by_events ? std::get<EventCount>(warm).n : 0;
  const std::int64_t horizon_us = by_events ? std::numeric_limits<std::int64_t>::max()
                                            : to_micros(std::get<Duration>(config.horizon).seconds);

  // Statistics start once warmup is over; for event-count warmups that is
  // the time of the last warmup event.
  constexpr auto kNever = std::numeric_limits<std::int64_t>::max();
  std::int64_t stats_start = by_events ? (warm_events == 0 ? 0 : kNever)
                                       : to_micros(std::get<Duration>(warm).seconds);

  const std::int64_t snap_us = std::max<std::int64_t>(1, to_micros(config.snapshot_every));
  std::int64_t next_second = 1;
  std::int64_t next_snapshot = 1;  // in units of snap_us

  auto emit_rows_until = [&](std::int64_t t_us) {
    // Emits every whole-second row and profile snapshot at or before t_us,
    // describing the book after every event strictly earlier than the row time.
    while (next_second * kMicrosPerSecond <= t_us) {
      const auto at = next_second * kMicrosPerSecond;
      if (at > stats_start) {
        SeriesRow row;
        row.second = next_second;
        row.best_bid = book.best_bid();
        row.best_ask = book.best_ask();
        const auto d = book.depth(kSeriesDepthLevels);
        row.s_total = d.s_total;
        row.d_total = d.d_total;
        row.s_window = d.s_l;
        row.d_window = d.d_l;
        out.series.push_back(row);
      }
      ++next_second;
    }
    while (next_snapshot * snap_us <= t_us) {
      const auto at = next_snapshot * snap_us;
      if (at > stats_start) {
        if (auto x = book.profile_snapshot(config.profile_window)) {
          out.profiles.push_back(ProfileSnapshot{at, std::move(*x)});
        }
        out.diagnostics.push_back(DiagnosticsRow{
            at, flow_diagnostics(config.rates, samplers.limit_volume, samplers.market_volume, out.cancelled)});
      }
      ++next_snapshot;
    }
  };

  double clock = 0.0;
  std::int64_t t_us = 0;
  std::uint64_t index = 0;
  while (!by_events || index < horizon_events) {
    const auto depth = book.depth();
    const RateSet effective = apply_guards(config.rates, depth, config.guards);
    std::uint8_t gates = 0;
    if (depth.d_total < config.guards.d_min) gates |= kBidGated;
    if (depth.s_total < config.guards.s_min) gates |= kAskGated;

    const auto drawn = sample_event(effective, rng);
    if (!drawn) {
      out.halted = true;
      break;
    }
    const double next_clock = clock + drawn->dt;
    const auto next_us = to_micros(next_clock);
    if (next_us > horizon_us) break;
    clock = next_clock;
    t_us = next_us;
    emit_rows_until(t_us);
    ++index;

    const bool warmup = by_events ? index <= warm_events : t_us <= stats_start;
    const Phase phase = warmup ? Phase::Warmup : Phase::Main;

    SimEvent ev;
    ev.index = index;
    ev.t_us = t_us;
    ev.kind = drawn->kind;
    ev.side = order_side(drawn->kind);
    ev.gates = gates;
    ev.phase = phase;
    const Side affected = book_side(drawn->kind);
    auto& side_counters = out.counters.side(affected);

    if (is_limit(drawn->kind)) {
      ev.level = samplers.level(rng);
      ev.volume = samplers.limit_volume(rng);
      try {
        const auto order = book.submit_limit(ev.side, ev.level, ev.volume);
        ev.order_id = order.id;
        ev.price = order.price;
        side_counters.submitted += ev.volume;
      } catch (const std::out_of_range&) {
        ev.gated = true;
        ++side_counters.rejected;
      }
    } else if (is_market(drawn->kind)) {
      ev.volume = samplers.market_volume(rng);
      auto report = book.execute_market(ev.side, ev.volume);
      side_counters.filled += report.filled_total;
      ev.unfilled = report.unfilled;
      ev.spread_after = report.spread_after;
      if (phase == Phase::Main) {
        TradeRecord tr;
        tr.t_us = t_us;
        tr.side = ev.side;
        tr.volume = ev.volume;
        tr.filled = report.filled_total;
        tr.unfilled = report.unfilled;
        tr.spread_after = report.spread_after;
        tr.fills = report.fills.size();
        if (!report.fills.empty()) {
          tr.first_price = report.fills.front().price;
          tr.last_price = report.fills.back().price;
        }
        out.trades.push_back(tr);
      }
      ev.fills = std::move(report.fills);
    } else {
      if (const auto cancelled = book.cancel_uniform(affected, rng)) {
        ev.order_id = cancelled->id;
        ev.price = cancelled->price;
        ev.volume = cancelled->remaining;
        side_counters.cancelled += cancelled->remaining;
        if (phase == Phase::Main) out.cancelled.add(cancelled->remaining);
      } else {
        ev.gated = true;
      }
    }
    if (ev.gated) ++out.counters.gated;
    ++out.counters.events;

    if (by_events && index == warm_events) stats_start = t_us;
    if (options.observer) options.observer(ev, book);
    if (log) log->push_back(std::move(ev));
  }

  const auto end_us = by_events || out.halted ? t_us : horizon_us;
  emit_rows_until(end_us);
  out.end_t_us = end_us;
  out.stats_start_us = stats_start == kNever ? end_us : stats_start;
  out.final_depth = book.depth();
  return out;
}

}  // namespace cob
