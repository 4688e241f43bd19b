#pragma once

#include <cstdint>
#include <functional>
#include <list>
#include <map>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace nms::lob {

using Price = std::int64_t;
using Qty = std::int64_t;
using OrderId = std::uint64_t;
using TraderId = std::int64_t;
using Tick = std::int64_t;

enum class Side { Bid, Ask };

std::string_view to_string(Side s) noexcept;

struct Order {
  OrderId order_id{0};
  TraderId trader_id{0};
  Side side{Side::Bid};
  Price price{0};
  Qty quantity{1};
  Tick time{0};

  friend bool operator==(const Order&, const Order&) = default;
};

struct Trade {
  Tick time{0};
  Price price{0};
  Qty quantity{0};
  TraderId buyer_id{0};
  TraderId seller_id{0};
  OrderId bid_order_id{0};
  OrderId ask_order_id{0};

  friend bool operator==(const Trade&, const Trade&) = default;
};

struct BookSnapshot {
  std::optional<Price> best_bid;
  std::optional<Price> best_ask;
  Price worst_bid{0};  // lowest resting bid, or the system minimum
  Price worst_ask{0};  // highest resting ask, or the system maximum
};

// Continuous double auction over a single instrument. Price-time priority,
// fills at the resting order's price, one resting order per trader.
class LimitOrderBook {
public:
  LimitOrderBook(Price price_min = 1, Price price_max = 500);

  // Replaces any resting order of the same trader, then matches. Throws
  // Errc::RejectedOrder on out-of-bounds price, non-positive quantity or a
  // reused order id. Returned trades are also appended to the tape.
  std::vector<Trade> submit(const Order& order);

  // Removes the trader's resting order. Returns false when there was none.
  bool cancel(TraderId trader);

  BookSnapshot snapshot() const;
  std::optional<Price> best_bid() const;
  std::optional<Price> best_ask() const;

  // Resting orders, best first.
  std::vector<Order> bids() const;
  std::vector<Order> asks() const;

  std::optional<Order> resting_order(TraderId trader) const;
  std::size_t resting_count() const noexcept { return index_.size(); }

  const std::vector<Trade>& tape() const noexcept { return tape_; }
  Price price_min() const noexcept { return price_min_; }
  Price price_max() const noexcept { return price_max_; }

private:
  using Level = std::list<Order>;
  struct Locator {
    Side side;
    Price price;
    Level::iterator it;
  };

  template <typename Book>
  void match(Order& incoming, Book& opposite, std::vector<Trade>& fills);

  template <typename Book>
  void rest(const Order& order, Book& book);

  Price price_min_;
  Price price_max_;
  std::map<Price, Level, std::greater<>> bids_;
  std::map<Price, Level> asks_;
  std::unordered_map<TraderId, Locator> index_;
  std::unordered_set<OrderId> seen_ids_;
  std::vector<Trade> tape_;
};

}  // namespace nms::lob
