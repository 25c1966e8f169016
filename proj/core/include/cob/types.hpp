#pragma once

#include <compare>
#include <cstdint>
#include <string_view>

namespace cob {

using Volume = std::int64_t;

enum class Side : std::uint8_t { Buy, Sell };

constexpr Side opposite(Side side) noexcept {
  return side == Side::Buy ? Side::Sell : Side::Buy;
}

constexpr std::string_view to_string(Side side) noexcept {
  return side == Side::Buy ? "buy" : "sell";
}

/// Position on the integer price grid: price = value * tick.
struct PriceTick {
  std::int64_t value = 0;

  friend constexpr auto operator<=>(PriceTick, PriceTick) = default;
};

struct OrderId {
  std::uint64_t value = 0;

  friend constexpr auto operator<=>(OrderId, OrderId) = default;
};

}  // namespace cob
