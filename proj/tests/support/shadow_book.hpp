#pragma once

// Naive replay of an event log: plain maps of FIFO deques, no shared code
// with the engine's book beyond the record types.

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>

#include "cob/sim.hpp"

namespace cob::testing {

class ShadowBook {
 public:
  explicit ShadowBook(PriceTick initial_reference) : reference_(initial_reference.value) {}

  /// Applies one logged event. Returns an empty string or a description of
  /// the first inconsistency found.
  std::string apply(const SimEvent& ev) {
    if (ev.gated) return ev.fills.empty() ? "" : "gated event with fills";
    if (is_limit(ev.kind)) return apply_limit(ev);
    if (is_market(ev.kind)) return apply_market(ev);
    return apply_cancel(ev);
  }

  std::int64_t total(Side side) const { return side == Side::Buy ? bid_total_ : ask_total_; }

  std::optional<std::int64_t> best(Side side) const {
    if (side == Side::Buy) return bids_.empty() ? std::nullopt : std::optional(bids_.rbegin()->first);
    return asks_.empty() ? std::nullopt : std::optional(asks_.begin()->first);
  }

  /// Resting volume from the side's best price through `levels` ticks beyond it.
  std::int64_t window(Side side, std::int64_t levels) const {
    const auto b = best(side);
    if (!b) return 0;
    std::int64_t sum = 0;
    for (const auto& [price, queue] : side == Side::Buy ? bids_ : asks_) {
      const auto distance = side == Side::Buy ? *b - price : price - *b;
      if (distance > levels) continue;
      for (const auto& o : queue) sum += o.remaining;
    }
    return sum;
  }

 private:
  struct Resting {
    std::uint64_t id;
    std::int64_t remaining;
  };
  using Ladder = std::map<std::int64_t, std::deque<Resting>>;

  Ladder& ladder(Side s) { return s == Side::Buy ? bids_ : asks_; }
  std::int64_t& total_ref(Side s) { return s == Side::Buy ? bid_total_ : ask_total_; }

  std::string apply_limit(const SimEvent& ev) {
    const auto opposite_best = best(opposite(ev.side));
    const auto anchor = opposite_best ? *opposite_best : last_trade_.value_or(reference_);
    const auto expected = ev.side == Side::Buy ? anchor - ev.level : anchor + ev.level;
    if (ev.price.value != expected) {
      return "limit price " + std::to_string(ev.price.value) + " but level rule gives " + std::to_string(expected);
    }
    ladder(ev.side)[ev.price.value].push_back({ev.order_id.value, ev.volume});
    where_[ev.order_id.value] = ev.price.value;
    total_ref(ev.side) += ev.volume;
    return {};
  }

  std::string apply_market(const SimEvent& ev) {
    const Side resting = opposite(ev.side);
    auto& book = ladder(resting);
    std::int64_t filled = 0;
    for (const auto& f : ev.fills) {
      const auto b = best(resting);
      if (!b || *b != f.price.value) return "fill not at the best opposite price";
      auto& queue = book[*b];
      auto& front = queue.front();
      if (front.id != f.maker.value) {
        return "fill maker " + std::to_string(f.maker.value) + " is not the queue head " + std::to_string(front.id);
      }
      if (f.volume < 1 || f.volume > front.remaining) return "fill volume exceeds the head order";
      front.remaining -= f.volume;
      filled += f.volume;
      total_ref(resting) -= f.volume;
      last_trade_ = f.price.value;
      if (front.remaining == 0) {
        where_.erase(front.id);
        queue.pop_front();
        if (queue.empty()) book.erase(*b);
      } else if (&f != &ev.fills.back()) {
        return "partial head fill followed by another fill";
      }
    }
    if (filled + ev.unfilled != ev.volume) return "fills and unfilled do not add up to the order volume";
    if (ev.unfilled > 0 && total(resting) != 0) return "unfilled volume with liquidity left";
    const auto bid = best(Side::Buy), ask = best(Side::Sell);
    const std::optional<std::int64_t> spread = bid && ask ? std::optional(*ask - *bid) : std::nullopt;
    if (spread != ev.spread_after) return "recorded spread_after disagrees with the replayed book";
    return {};
  }

  std::string apply_cancel(const SimEvent& ev) {
    const Side side = book_side(ev.kind);
    const auto it = where_.find(ev.order_id.value);
    if (it == where_.end()) return "cancel of an unknown order " + std::to_string(ev.order_id.value);
    if (it->second != ev.price.value) return "cancel price mismatch";
    auto& book = ladder(side);
    auto level = book.find(it->second);
    if (level == book.end()) return "cancel on the wrong side";
    auto& queue = level->second;
    for (auto q = queue.begin(); q != queue.end(); ++q) {
      if (q->id != ev.order_id.value) continue;
      if (q->remaining != ev.volume) return "cancelled volume differs from the resting remainder";
      total_ref(side) -= q->remaining;
      queue.erase(q);
      if (queue.empty()) book.erase(level);
      where_.erase(it);
      return {};
    }
    return "cancelled order not found on its side";
  }

  std::int64_t reference_;
  std::optional<std::int64_t> last_trade_;
  Ladder bids_, asks_;
  std::int64_t bid_total_ = 0, ask_total_ = 0;
  std::unordered_map<std::uint64_t, std::int64_t> where_;
};

}  // namespace cob::testing
