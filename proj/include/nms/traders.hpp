#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "nms/opinion_dynamics.hpp"
#include "nms/orderbook.hpp"
#include "nms/rng.hpp"

namespace nms::traders {

using lob::Price;

enum class Strategy { ZIC, OZIC, NZI, ONZI };
enum class Role { Buyer, Seller };

std::string_view to_string(Strategy s) noexcept;
std::string_view to_string(Role r) noexcept;
std::optional<Strategy> parse_strategy(std::string_view name) noexcept;

inline bool is_opinionated(Strategy s) noexcept {
  return s == Strategy::OZIC || s == Strategy::ONZI;
}
inline bool uses_limit_prices(Strategy s) noexcept {
  return s == Strategy::ZIC || s == Strategy::OZIC;
}

struct TraderState {
  lob::TraderId trader_id{0};
  Strategy strategy{Strategy::ZIC};
  Role role{Role::Buyer};
  double balance{0.0};
  std::int64_t inventory{0};
  std::optional<Price> limit_price;          // customer order, ZIC/OZIC only
  std::optional<std::size_t> opinion_index;  // OZIC/ONZI only
};

// Per-period view of the asset for the near-zero-intelligence family.
struct MarketContext {
  int t{1};                 // trading period, 1-based
  int T{10};                // number of periods
  double d_bar{1.5};        // expected dividend per unit
  double final_value{40.0}; // default value after the last period
  double p_prev{0.0};       // mean trade price of the previous period
  double k{4.0846};
  double alpha{0.848};
  double phi{0.0};

  void validate() const;
};

// Quote bounds a ZIC-family trader reads off the book: the worst bid below
// and the best ask above, falling back to the system bounds.
struct QuoteBounds {
  Price min_quote{0};
  Price max_quote{0};
};

QuoteBounds quote_bounds(const lob::BookSnapshot& snap) noexcept;

// Rounds half-up to the nearest tick and clamps into [lo, hi].
Price to_tick(double price, Price lo, Price hi) noexcept;

// Budget-constrained uniform quote: buyers on [min_quote, L], sellers on
// [L, max_quote]. nullopt when the interval is empty.
std::optional<Price> zic_quote(const TraderState& state, const lob::BookSnapshot& snap, Rng& rng);

// Buyer: (L(1+x) + M(1-x))/2 with M the minimum price.
// Seller: (L(1-x) + M(1+x))/2 with M the maximum price.
double ozic_opinionated_limit(double limit, double bound, double x, Role role);

std::optional<Price> ozic_quote(const TraderState& state, const lob::BookSnapshot& snap,
                                const od::Opinion& opinion, Rng& rng);

// d_bar * (T - t + 1) + final_value, for 1 <= t <= T + 1.
double nzi_default_value(const MarketContext& ctx);

// max(0.5 - phi * t, 0).
double nzi_buyer_prob(const MarketContext& ctx) noexcept;

// (1 - alpha) * u + alpha * p_prev.
double nzi_anchored_price(double u, const MarketContext& ctx) noexcept;

// Real-valued quote before rounding. Sellers need a unit to offer; buyers
// need cash and are capped at their balance.
std::optional<double> nzi_quote(const TraderState& state, const MarketContext& ctx, Rng& rng);
std::optional<double> nzi_quote_from_draw(const TraderState& state, const MarketContext& ctx,
                                          double u);

// Upper end of the opinionated uncertainty: k * D(t) * (1 + x) / 2.
double onzi_uncertainty_bound(const MarketContext& ctx, double x);

std::optional<double> onzi_quote(const TraderState& state, const MarketContext& ctx,
                                 const od::Opinion& opinion, Rng& rng);

}  // namespace nms::traders
