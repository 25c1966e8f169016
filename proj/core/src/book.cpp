#include "cob/book.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cob {

Book::Book(double tick, PriceTick initial_reference, int max_level)
    : tick_(tick), initial_reference_(initial_reference), max_level_(max_level) {
  if (!(tick > 0.0) || !std::isfinite(tick)) {
    throw ConfigError("tick must be positive");
  }
  if (initial_reference.value < 1) {
    throw ConfigError("initial reference must be at least one tick");
  }
  if (max_level < 1) {
    throw ConfigError("max level must be at least 1");
  }
}

std::optional<PriceTick> Book::best_bid() const {
  if (bids_.empty()) return std::nullopt;
  return PriceTick{bids_.begin()->first};
}

std::optional<PriceTick> Book::best_ask() const {
  if (asks_.empty()) return std::nullopt;
  return PriceTick{asks_.begin()->first};
}

PriceTick Book::resolve_price(Side side, int level) const {
  if (side == Side::Buy) {
    const auto ref = asks_.empty() ? fallback_reference().value : asks_.begin()->first;
    return PriceTick{ref - level};
  }
  const auto ref = bids_.empty() ? fallback_reference().value : bids_.begin()->first;
  return PriceTick{ref + level};
}

std::uint32_t Book::allocate(const Order& order) {
  std::uint32_t slot;
  if (!free_.empty()) {
    slot = free_.back();
    free_.pop_back();
    nodes_[slot] = Node{order};
  } else {
    slot = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(Node{order});
  }
  return slot;
}

void Book::release(std::uint32_t slot) { free_.push_back(slot); }

Order Book::submit_limit(Side side, int level, Volume volume) {
  if (level < 1 || level > max_level_) {
    throw std::out_of_range("level " + std::to_string(level) + " outside [1, " +
                            std::to_string(max_level_) + "]");
  }
  if (volume < 1) {
    throw std::out_of_range("limit volume must be at least 1");
  }
  const auto price = resolve_price(side, level);
  if (price.value < 1) {
    throw std::out_of_range("resolved price below one tick");
  }

  const auto seq = next_seq_++;
  const Order order{OrderId{seq}, side, price, volume, seq};
  const auto slot = allocate(order);
  auto& table = live(side);
  nodes_[slot].live_pos = static_cast<std::uint32_t>(table.size());
  table.push_back(slot);

  auto append = [&](Level& lvl) {
    nodes_[slot].prev = lvl.tail;
    if (lvl.tail != kNil) {
      nodes_[lvl.tail].next = slot;
    } else {
      lvl.head = slot;
    }
    lvl.tail = slot;
    lvl.volume += volume;
    ++lvl.count;
  };
  if (side == Side::Buy) {
    append(bids_[price.value]);
  } else {
    append(asks_[price.value]);
  }
  total_ref(side) += volume;
  return order;
}

// Detaches a node from its level queue and the live table; the level is
// erased once it empties. Does not touch the side total.
void Book::unlink(Side side, std::uint32_t slot) {
  auto& node = nodes_[slot];
  auto detach = [&](auto& levels) {
    auto it = levels.find(node.order.price.value);
    auto& lvl = it->second;
    if (node.prev != kNil) {
      nodes_[node.prev].next = node.next;
    } else {
      lvl.head = node.next;
    }
    if (node.next != kNil) {
      nodes_[node.next].prev = node.prev;
    } else {
      lvl.tail = node.prev;
    }
    lvl.volume -= node.order.remaining;
    if (--lvl.count == 0) levels.erase(it);
  };
  if (side == Side::Buy) {
    detach(bids_);
  } else {
    detach(asks_);
  }

  auto& table = live(side);
  const auto pos = node.live_pos;
  const auto last = table.back();
  table[pos] = last;
  nodes_[last].live_pos = pos;
  table.pop_back();
}

template <class Levels>
ExecutionReport Book::consume(Levels& levels, Side resting, Volume volume) {
  ExecutionReport report;
  Volume left = volume;
  auto& side_total = total_ref(resting);
  while (left > 0 && !levels.empty()) {
    auto it = levels.begin();
    auto& lvl = it->second;
    const PriceTick price{it->first};
    while (left > 0 && lvl.head != kNil) {
      const auto slot = lvl.head;
      auto& node = nodes_[slot];
      const auto take = std::min(left, node.order.remaining);
      report.fills.push_back(Fill{price, take, node.order.id});
      left -= take;
      side_total -= take;
      if (take == node.order.remaining) {
        lvl.head = node.next;
        if (lvl.head != kNil) {
          nodes_[lvl.head].prev = kNil;
        } else {
          lvl.tail = kNil;
        }
        lvl.volume -= take;
        --lvl.count;
        auto& table = live(resting);
        const auto pos = node.live_pos;
        const auto last = table.back();
        table[pos] = last;
        nodes_[last].live_pos = pos;
        table.pop_back();
        release(slot);
      } else {
        node.order.remaining -= take;
        lvl.volume -= take;
      }
    }
    last_trade_ = price;
    if (lvl.head == kNil) levels.erase(it);
  }
  report.filled_total = volume - left;
  report.unfilled = left;
  report.depleted = left > 0;
  if (const auto q = spread_and_best()) report.spread_after = q->spread;
  return report;
}

ExecutionReport Book::execute_market(Side side, Volume volume) {
  if (volume < 1) {
    throw std::out_of_range("market volume must be at least 1");
  }
  if (side == Side::Buy) return consume(asks_, Side::Sell, volume);
  return consume(bids_, Side::Buy, volume);
}

std::optional<Order> Book::cancel_at(Side side, std::size_t index) {
  const auto& table = live(side);
  if (index >= table.size()) return std::nullopt;
  const auto slot = table[index];
  const Order order = nodes_[slot].order;
  unlink(side, slot);
  total_ref(side) -= order.remaining;
  release(slot);
  return order;
}

std::optional<Order> Book::cancel_uniform(Side side, Rng& rng) {
  const auto n = live(side).size();
  if (n == 0) return std::nullopt;
  return cancel_at(side, static_cast<std::size_t>(rng.below(n)));
}

DepthView Book::depth(std::optional<std::int64_t> levels) const {
  DepthView view;
  view.s_total = ask_total_;
  view.d_total = bid_total_;
  if (!levels) {
    view.s_l = ask_total_;
    view.d_l = bid_total_;
    return view;
  }
  if (!asks_.empty()) {
    const auto limit = asks_.begin()->first + *levels;
    for (auto it = asks_.begin(); it != asks_.end() && it->first <= limit; ++it) {
      view.s_l += it->second.volume;
    }
  }
  if (!bids_.empty()) {
    const auto limit = bids_.begin()->first - *levels;
    for (auto it = bids_.begin(); it != bids_.end() && it->first >= limit; ++it) {
      view.d_l += it->second.volume;
    }
  }
  return view;
}

std::optional<Quote> Book::spread_and_best() const {
  if (bids_.empty() || asks_.empty()) return std::nullopt;
  const auto bid = bids_.begin()->first;
  const auto ask = asks_.begin()->first;
  return Quote{PriceTick{bid}, PriceTick{ask}, ask - bid};
}

std::optional<std::vector<Volume>> Book::profile_snapshot(int window) const {
  if (window < 1) throw std::out_of_range("profile window must be at least 1");
  if (bids_.empty() || asks_.empty()) return std::nullopt;
  std::vector<Volume> x(2 * static_cast<std::size_t>(window), 0);
  // Twice the mid price keeps the arithmetic integral.
  const auto mid2 = bids_.begin()->first + asks_.begin()->first;
  for (const auto& [price, lvl] : bids_) {
    const auto level = (mid2 - 2 * price + 1) / 2;
    if (level > window) break;
    x[static_cast<std::size_t>(window - level)] += lvl.volume;
  }
  for (const auto& [price, lvl] : asks_) {
    const auto level = (2 * price - mid2 + 1) / 2;
    if (level > window) break;
    x[static_cast<std::size_t>(window + level - 1)] -= lvl.volume;
  }
  return x;
}

template <class Levels>
std::vector<LevelView> Book::collect(const Levels& levels) const {
  std::vector<LevelView> out;
  out.reserve(levels.size());
  for (const auto& [price, lvl] : levels) {
    out.push_back(LevelView{PriceTick{price}, lvl.volume, lvl.count});
  }
  return out;
}

std::vector<LevelView> Book::levels(Side side) const {
  return side == Side::Buy ? collect(bids_) : collect(asks_);
}

std::vector<Order> Book::orders_at(Side side, PriceTick price) const {
  std::vector<Order> out;
  auto walk = [&](const auto& levels) {
    const auto it = levels.find(price.value);
    if (it == levels.end()) return;
    for (auto slot = it->second.head; slot != kNil; slot = nodes_[slot].next) {
      out.push_back(nodes_[slot].order);
    }
  };
  if (side == Side::Buy) {
    walk(bids_);
  } else {
    walk(asks_);
  }
  return out;
}

std::vector<Order> Book::orders(Side side) const {
  std::vector<Order> out;
  const auto& table = live(side);
  out.reserve(table.size());
  for (const auto slot : table) out.push_back(nodes_[slot].order);
  return out;
}

}  // namespace cob
