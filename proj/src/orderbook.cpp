#include "nms/orderbook.hpp"

#include <algorithm>
#include <string>

#include "nms/error.hpp"

namespace nms::lob {

std::string_view to_string(Side s) noexcept { return s == Side::Bid ? "bid" : "ask"; }

LimitOrderBook::LimitOrderBook(Price price_min, Price price_max)
    : price_min_(price_min), price_max_(price_max) {
  if (price_min < 0 || price_max < price_min)
    throw Error(Errc::InvalidParams, "price bounds must satisfy 0 <= min <= max");
}

std::vector<Trade> LimitOrderBook::submit(const Order& order) {
  if (order.price < price_min_ || order.price > price_max_)
    throw Error(Errc::RejectedOrder, "price " + std::to_string(order.price) + " outside [" +
                                         std::to_string(price_min_) + ", " +
                                         std::to_string(price_max_) + "]");
  if (order.quantity < 1) throw Error(Errc::RejectedOrder, "quantity must be >= 1");
  if (seen_ids_.contains(order.order_id))
    throw Error(Errc::RejectedOrder, "duplicate order id " + std::to_string(order.order_id));
  seen_ids_.insert(order.order_id);

  cancel(order.trader_id);

  std::vector<Trade> fills;
  Order incoming = order;
  if (incoming.side == Side::Bid) {
    match(incoming, asks_, fills);
    if (incoming.quantity > 0) rest(incoming, bids_);
  } else {
    match(incoming, bids_, fills);
    if (incoming.quantity > 0) rest(incoming, asks_);
  }
  tape_.insert(tape_.end(), fills.begin(), fills.end());
  return fills;
}

template <typename Book>
void LimitOrderBook::match(Order& incoming, Book& opposite, std::vector<Trade>& fills) {
  const bool buying = incoming.side == Side::Bid;
  while (incoming.quantity > 0 && !opposite.empty()) {
    auto level = opposite.begin();
    const Price best = level->first;
    if (buying ? incoming.price < best : incoming.price > best) break;

    Order& resting = level->second.front();
    const Qty qty = std::min(incoming.quantity, resting.quantity);
    Trade t;
    t.time = incoming.time;
    t.price = resting.price;
    t.quantity = qty;
    t.buyer_id = buying ? incoming.trader_id : resting.trader_id;
    t.seller_id = buying ? resting.trader_id : incoming.trader_id;
    t.bid_order_id = buying ? incoming.order_id : resting.order_id;
    t.ask_order_id = buying ? resting.order_id : incoming.order_id;
    fills.push_back(t);

    incoming.quantity -= qty;
    resting.quantity -= qty;
    if (resting.quantity == 0) {
      index_.erase(resting.trader_id);
      level->second.pop_front();
      if (level->second.empty()) opposite.erase(level);
    }
  }
}

template <typename Book>
void LimitOrderBook::rest(const Order& order, Book& book) {
  Level& level = book[order.price];
  level.push_back(order);
  index_[order.trader_id] = Locator{order.side, order.price, std::prev(level.end())};
}

bool LimitOrderBook::cancel(TraderId trader) {
  auto found = index_.find(trader);
  if (found == index_.end()) return false;
  const Locator loc = found->second;
  index_.erase(found);
  auto drop = [&](auto& book) {
    auto level = book.find(loc.price);
    level->second.erase(loc.it);
    if (level->second.empty()) book.erase(level);
  };
  if (loc.side == Side::Bid) drop(bids_);
  else drop(asks_);
  return true;
}

std::optional<Price> LimitOrderBook::best_bid() const {
  if (bids_.empty()) return std::nullopt;
  return bids_.begin()->first;
}

std::optional<Price> LimitOrderBook::best_ask() const {
  if (asks_.empty()) return std::nullopt;
  return asks_.begin()->first;
}

BookSnapshot LimitOrderBook::snapshot() const {
  BookSnapshot s;
  s.best_bid = best_bid();
  s.best_ask = best_ask();
  s.worst_bid = bids_.empty() ? price_min_ : bids_.rbegin()->first;
  s.worst_ask = asks_.empty() ? price_max_ : asks_.rbegin()->first;
  return s;
}

std::vector<Order> LimitOrderBook::bids() const {
  std::vector<Order> out;
  for (const auto& [price, level] : bids_) out.insert(out.end(), level.begin(), level.end());
  return out;
}

std::vector<Order> LimitOrderBook::asks() const {
  std::vector<Order> out;
  for (const auto& [price, level] : asks_) out.insert(out.end(), level.begin(), level.end());
  return out;
}

std::optional<Order> LimitOrderBook::resting_order(TraderId trader) const {
  auto found = index_.find(trader);
  if (found == index_.end()) return std::nullopt;
  return *found->second.it;
}

}  // namespace nms::lob
