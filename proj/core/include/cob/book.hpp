#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cob/error.hpp"
#include "cob/rng.hpp"
#include "cob/types.hpp"

namespace cob {

struct Order {
  OrderId id;
  Side side = Side::Buy;
  PriceTick price;
  Volume remaining = 0;
  std::uint64_t seq = 0;
};

struct Fill {
  PriceTick price;
  Volume volume = 0;
  OrderId maker;

  friend bool operator==(const Fill&, const Fill&) = default;
};

struct ExecutionReport {
  std::vector<Fill> fills;
  Volume filled_total = 0;
  Volume unfilled = 0;
  /// Spread in ticks after the execution; empty when a side is empty.
  std::optional<std::int64_t> spread_after;
  /// The opposite side ran out before the order was filled.
  bool depleted = false;
};

/// s(l), d(l) and the side totals. Sell-side depth is `s_*`, buy-side `d_*`.
struct DepthView {
  Volume s_l = 0;
  Volume d_l = 0;
  Volume s_total = 0;
  Volume d_total = 0;
};

struct Quote {
  PriceTick best_bid;
  PriceTick best_ask;
  std::int64_t spread = 0;  // (ask - bid) in ticks
};

struct LevelView {
  PriceTick price;
  Volume volume = 0;
  std::size_t orders = 0;
};

inline constexpr int kDefaultMaxLevel = 1000;

/// Consolidated limit order book on an integer price grid with price-time
/// priority.
///
/// Limit orders are placed `level` ticks away from the opposite best quote
/// (buys below the ask, sells above the bid), so a submission never crosses.
/// When the opposite side is empty the level is resolved against the last
/// trade price, or the initial reference before any trade.
///
/// Naming: `tick` is the money value of one grid step; `s_total`/`d_total`
/// are the resting sell/buy volumes.
class Book {
 public:
  Book(double tick, PriceTick initial_reference, int max_level = kDefaultMaxLevel);

  /// Throws std::out_of_range if level is outside [1, max_level], volume < 1,
  /// or the resolved price falls below one tick.
  Order submit_limit(Side side, int level, Volume volume);

  /// Resting price a limit order at `level` would get right now.
  PriceTick resolve_price(Side side, int level) const;

  /// `side` is the taker's direction: a Buy consumes asks.
  ExecutionReport execute_market(Side side, Volume volume);

  /// Removes one resting order of `side`, chosen uniformly over orders.
  std::optional<Order> cancel_uniform(Side side, Rng& rng);

  /// Removes the order at position `index` of the side's live-order table.
  std::optional<Order> cancel_at(Side side, std::size_t index);

  /// Windowed depth; `levels` empty means the whole book.
  DepthView depth(std::optional<std::int64_t> levels = std::nullopt) const;

  std::optional<Quote> spread_and_best() const;

  /// Signed profile around the mid price, or empty if a side is empty.
  ///
  /// Slots [0, window) hold bid levels window..1 (positive volumes) and
  /// [window, 2*window) hold ask levels 1..window (negative volumes). The
  /// level of a price is its distance from the mid rounded up to whole
  /// ticks, so the best quotes sit at level 1 when the spread is 1 or 2.
  std::optional<std::vector<Volume>> profile_snapshot(int window) const;

  std::optional<PriceTick> best_bid() const;
  std::optional<PriceTick> best_ask() const;
  std::optional<PriceTick> last_trade() const { return last_trade_; }
  PriceTick initial_reference() const { return initial_reference_; }
  double tick() const { return tick_; }
  int max_level() const { return max_level_; }

  std::size_t order_count(Side side) const { return live(side).size(); }
  Volume total(Side side) const { return side == Side::Buy ? bid_total_ : ask_total_; }

  /// Levels from the best price outward.
  std::vector<LevelView> levels(Side side) const;
  /// Resting orders at one price in FIFO order.
  std::vector<Order> orders_at(Side side, PriceTick price) const;
  /// Every resting order of a side, in no particular order.
  std::vector<Order> orders(Side side) const;

 private:
  static constexpr std::uint32_t kNil = 0xffffffffu;

  struct Node {
    Order order;
    std::uint32_t prev = kNil;
    std::uint32_t next = kNil;
    std::uint32_t live_pos = 0;
  };

  struct Level {
    std::uint32_t head = kNil;
    std::uint32_t tail = kNil;
    Volume volume = 0;
    std::size_t count = 0;
  };

  using BidLevels = std::map<std::int64_t, Level, std::greater<>>;
  using AskLevels = std::map<std::int64_t, Level, std::less<>>;

  std::uint32_t allocate(const Order& order);
  void release(std::uint32_t slot);
  void unlink(Side side, std::uint32_t slot);
  std::vector<std::uint32_t>& live(Side side) { return side == Side::Buy ? bid_live_ : ask_live_; }
  const std::vector<std::uint32_t>& live(Side side) const {
    return side == Side::Buy ? bid_live_ : ask_live_;
  }
  Volume& total_ref(Side side) { return side == Side::Buy ? bid_total_ : ask_total_; }
  PriceTick fallback_reference() const { return last_trade_.value_or(initial_reference_); }

  template <class Levels>
  ExecutionReport consume(Levels& levels, Side resting, Volume volume);

  template <class Levels>
  std::vector<LevelView> collect(const Levels& levels) const;

  double tick_;
  PriceTick initial_reference_;
  int max_level_;
  std::optional<PriceTick> last_trade_;
  std::uint64_t next_seq_ = 1;

  BidLevels bids_;
  AskLevels asks_;
  Volume bid_total_ = 0;
  Volume ask_total_ = 0;

  std::vector<Node> nodes_;
  std::vector<std::uint32_t> free_;
  std::vector<std::uint32_t> bid_live_;
  std::vector<std::uint32_t> ask_live_;
};

}  // namespace cob
