#include <gtest/gtest.h>

#include "cob/presets.hpp"
#include "cob/sim.hpp"
#include "support/shadow_book.hpp"

namespace cob {
namespace {

SimConfig small_config(std::uint64_t events = 20000) {
  auto c = preset("balanced");
  c.horizon = EventCount{events};
  c.warmup = EventCount{events / 10};
  c.snapshot_every = 1.0;
  return c;
}

TEST(InitBook, MinimalGuardsStopAfterTwoOrders) {
  SimConfig c;
  c.rates = RateSet{1, 1, 0, 0, 0, 0};
  c.volume_model_market = PowerLaw{2.5, 1};
  c.volume_model_limit = RoundLotMixture{0.0, 1.0, 0.0, 2.8, 2.5, 2.0, 1000};
  c.guards = Guards{2, 2};
  Rng rng(1);
  std::vector<SimEvent> log;
  const auto book = init_book(c, rng, &log);
  EXPECT_EQ(log.size(), 2u);
  EXPECT_EQ(book.order_count(Side::Buy), 1u);
  EXPECT_EQ(book.order_count(Side::Sell), 1u);
}

TEST(InitBook, ReachesGuardsForAnySeed) {
  auto c = preset("book_disbalance_up");
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    std::vector<SimEvent> log;
    Counters counters;
    const auto book = init_book(c, rng, &log, &counters);
    const auto d = book.depth();
    EXPECT_GE(d.s_total, c.guards.s_min);
    EXPECT_GE(d.d_total, c.guards.d_min);
    EXPECT_EQ(counters.bid.seeded, d.d_total);
    EXPECT_EQ(counters.ask.seeded, d.s_total);
    for (const auto& ev : log) {
      EXPECT_EQ(ev.phase, Phase::Seed);
      EXPECT_EQ(ev.t_us, 0);
    }
  }
}

TEST(InitBook, SameSeedSameBook) {
  const auto c = preset("high_market");
  Rng a(77), b(77);
  std::vector<SimEvent> la, lb;
  const auto ba = init_book(c, a, &la);
  const auto bb = init_book(c, b, &lb);
  EXPECT_EQ(la, lb);
  EXPECT_EQ(ba.profile_snapshot(1000), bb.profile_snapshot(1000));
}

TEST(Run, OnlyLimitOrdersGrowTheBook) {
  auto c = small_config(5000);
  c.rates = RateSet{10, 10, 0, 0, 0, 0};
  Volume last = -1;
  RunOptions options;
  options.observer = [&](const SimEvent&, const Book& book) {
    const auto total = book.total(Side::Buy) + book.total(Side::Sell);
    ASSERT_GE(total, last);
    last = total;
  };
  const auto out = run(c, options);
  EXPECT_TRUE(out.trades.empty());
  EXPECT_EQ(out.counters.bid.filled + out.counters.ask.filled, 0);
}

TEST(Run, SameSeedIdenticalOutput) {
  const auto c = small_config();
  const auto a = run(c);
  const auto b = run(c);
  EXPECT_EQ(a.events, b.events);
  EXPECT_EQ(a.trades, b.trades);
  EXPECT_EQ(a.series, b.series);
  EXPECT_EQ(a.profiles, b.profiles);
  EXPECT_EQ(a.counters, b.counters);
  auto c2 = c;
  c2.seed = 2;
  EXPECT_NE(run(c2).events, a.events);
}

TEST(Run, ConservationAtEnd) {
  for (const auto& name : {"balanced", "high_market", "flow_disbalance_up"}) {
    auto c = preset(name);
    c.horizon = EventCount{30000};
    c.warmup.reset();
    const auto out = run(c);
    for (const auto side : {Side::Buy, Side::Sell}) {
      const auto& k = out.counters.side(side);
      const auto depth = side == Side::Buy ? out.final_depth.d_total : out.final_depth.s_total;
      EXPECT_EQ(k.seeded + k.submitted - k.cancelled - k.filled, depth) << name;
    }
    EXPECT_EQ(out.counters.events, 30000u);
  }
}

TEST(Run, ClockAndPhases) {
  const auto out = run(small_config());
  std::int64_t last = 0;
  std::uint64_t last_index = 0;
  bool seen_main = false;
  for (const auto& ev : out.events) {
    ASSERT_GE(ev.t_us, last);
    last = ev.t_us;
    if (ev.phase == Phase::Seed) {
      ASSERT_EQ(ev.index, 0u);
      continue;
    }
    ASSERT_EQ(ev.index, last_index + 1);
    last_index = ev.index;
    if (ev.phase == Phase::Main) seen_main = true;
    if (seen_main) {
      ASSERT_EQ(ev.phase, Phase::Main);
    }
    ASSERT_EQ(!ev.fills.empty(), is_market(ev.kind) && !ev.gated);
  }
  EXPECT_EQ(last_index, 20000u);
  for (const auto& t : out.trades) EXPECT_GE(t.t_us, out.stats_start_us);
  for (const auto& r : out.series) EXPECT_GT(r.second * kMicrosPerSecond, out.stats_start_us);
}

TEST(Run, GatedEventsLeaveBookUnchanged) {
  auto c = small_config(50000);
  c.rates = RateSet{20, 20, 10, 10, 30, 30};  // drains toward the guards
  std::uint64_t gated = 0;
  DepthView prev{};
  RunOptions options;
  options.observer = [&](const SimEvent& ev, const Book& book) {
    const auto now = book.depth();
    if (ev.gated && ev.phase != Phase::Seed) {
      ++gated;
      ASSERT_EQ(now.s_total, prev.s_total);
      ASSERT_EQ(now.d_total, prev.d_total);
    }
    prev = now;
  };
  const auto out = run(c, options);
  EXPECT_EQ(gated, out.counters.gated);
}

TEST(Run, HaltsWhenEveryRateIsGated) {
  auto c = small_config(100000);
  c.rates = RateSet{0, 0, 5, 5, 5, 5};
  const auto out = run(c);
  EXPECT_TRUE(out.halted);
  EXPECT_LT(out.counters.events, 100000u);
  EXPECT_LT(out.final_depth.s_total, c.guards.s_min);
  EXPECT_LT(out.final_depth.d_total, c.guards.d_min);
}

TEST(Run, DurationHorizonStopsAtTime) {
  auto c = preset("balanced");
  c.horizon = Duration{50.0};
  c.warmup = Duration{5.0};
  const auto out = run(c);
  EXPECT_EQ(out.end_t_us, 50 * kMicrosPerSecond);
  EXPECT_EQ(out.stats_start_us, 5 * kMicrosPerSecond);
  ASSERT_FALSE(out.series.empty());
  EXPECT_EQ(out.series.front().second, 6);
  EXPECT_EQ(out.series.back().second, 50);
  EXPECT_LE(out.events.back().t_us, out.end_t_us);
}

TEST(Run, SeriesRowsMatchReplayAtSecondBoundaries) {
  const auto out = run(small_config(40000));
  testing::ShadowBook shadow(out.config.initial_reference);
  std::size_t row = 0;
  auto check_rows_before = [&](std::int64_t t_us) {
    while (row < out.series.size() && out.series[row].second * kMicrosPerSecond <= t_us) {
      const auto& r = out.series[row];
      ASSERT_EQ(r.s_total, shadow.total(Side::Sell)) << "second " << r.second;
      ASSERT_EQ(r.d_total, shadow.total(Side::Buy));
      ASSERT_EQ(r.s_window, shadow.window(Side::Sell, kSeriesDepthLevels));
      ASSERT_EQ(r.d_window, shadow.window(Side::Buy, kSeriesDepthLevels));
      ASSERT_EQ(r.best_bid ? std::optional(r.best_bid->value) : std::nullopt, shadow.best(Side::Buy));
      ASSERT_EQ(r.best_ask ? std::optional(r.best_ask->value) : std::nullopt, shadow.best(Side::Sell));
      ++row;
    }
  };
  for (const auto& ev : out.events) {
    check_rows_before(ev.t_us);
    ASSERT_EQ(shadow.apply(ev), "") << "event " << ev.index;
  }
  check_rows_before(out.end_t_us);
  EXPECT_EQ(row, out.series.size());
}

TEST(Run, ProfilesAndDiagnosticsAreTimestamped) {
  const auto out = run(small_config(40000));
  ASSERT_FALSE(out.profiles.empty());
  for (const auto& p : out.profiles) {
    EXPECT_EQ(p.x.size(), 2u * static_cast<std::size_t>(out.config.profile_window));
    EXPECT_GT(p.t_us, out.stats_start_us);
  }
  ASSERT_FALSE(out.diagnostics.empty());
  EXPECT_FALSE(out.diagnostics.back().diagnostics.S_C_provisional);
}

TEST(Run, KeepEventsOffStillCountsAndObserves) {
  auto c = small_config(5000);
  RunOptions options;
  options.keep_events = false;
  std::size_t seen = 0;
  options.observer = [&](const SimEvent&, const Book&) { ++seen; };
  const auto out = run(c, options);
  EXPECT_TRUE(out.events.empty());
  EXPECT_EQ(seen, run(c).events.size());
}

}  // namespace
}  // namespace cob
