#include "nms/traders.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nms/error.hpp"

namespace nms::traders {

namespace {

// Tolerance for floor/ceil of real-valued limits that should land on a tick.
constexpr double kTickEps = 1e-9;

void check_opinion(double x) {
  if (!(x >= -1.0 && x <= 1.0))
    throw Error(Errc::InvalidOpinion, "opinion " + std::to_string(x) + " outside [-1, 1]");
}

Price require_limit(const TraderState& state) {
  if (!state.limit_price)
    throw Error(Errc::InvalidParams, "trader " + std::to_string(state.trader_id) +
                                         " has no limit price");
  return *state.limit_price;
}

bool can_quote(const TraderState& state) noexcept {
  return state.role == Role::Seller ? state.inventory >= 1 : state.balance > 0.0;
}

std::optional<double> cap_to_budget(const TraderState& state, double price) noexcept {
  if (state.role == Role::Buyer) return std::min(price, state.balance);
  return price;
}

}  // namespace

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::ZIC: return "zic";
    case Strategy::OZIC: return "ozic";
    case Strategy::NZI: return "nzi";
    case Strategy::ONZI: return "onzi";
  }
  return "?";
}

std::string_view to_string(Role r) noexcept { return r == Role::Buyer ? "buyer" : "seller"; }

std::optional<Strategy> parse_strategy(std::string_view name) noexcept {
  for (auto s : {Strategy::ZIC, Strategy::OZIC, Strategy::NZI, Strategy::ONZI})
    if (to_string(s) == name) return s;
  return std::nullopt;
}

void MarketContext::validate() const {
  auto fail = [](const std::string& msg) { throw Error(Errc::InvalidParams, msg); };
  if (T < 1) fail("T must be >= 1");
  if (!(k > 0.0)) fail("k must be > 0");
  if (!(alpha > 0.0 && alpha < 1.0)) fail("alpha must lie in (0, 1)");
  if (!(phi >= 0.0 && phi < 0.5 / T)) fail("phi must lie in [0, 0.5/T)");
  if (!(p_prev >= 0.0)) fail("p_prev must be >= 0");
  if (!(d_bar >= 0.0)) fail("d_bar must be >= 0");
}

QuoteBounds quote_bounds(const lob::BookSnapshot& snap) noexcept {
  return {snap.worst_bid, snap.best_ask.value_or(snap.worst_ask)};
}

Price to_tick(double price, Price lo, Price hi) noexcept {
  const auto tick = static_cast<Price>(std::floor(price + 0.5));
  return std::clamp(tick, lo, hi);
}

std::optional<Price> zic_quote(const TraderState& state, const lob::BookSnapshot& snap, Rng& rng) {
  const Price limit = require_limit(state);
  const QuoteBounds b = quote_bounds(snap);
  if (state.role == Role::Buyer) {
    if (limit < b.min_quote) return std::nullopt;
    return rng.uniform_int(b.min_quote, limit);
  }
  if (limit > b.max_quote) return std::nullopt;
  return rng.uniform_int(limit, b.max_quote);
}

double ozic_opinionated_limit(double limit, double bound, double x, Role role) {
  check_opinion(x);
  if (role == Role::Buyer) return (limit * (1.0 + x) + bound * (1.0 - x)) / 2.0;
  return (limit * (1.0 - x) + bound * (1.0 + x)) / 2.0;
}

std::optional<Price> ozic_quote(const TraderState& state, const lob::BookSnapshot& snap,
                                const od::Opinion& opinion, Rng& rng) {
  const Price limit = require_limit(state);
  const QuoteBounds b = quote_bounds(snap);
  if (state.role == Role::Buyer) {
    if (limit < b.min_quote) return std::nullopt;
    const double ol = ozic_opinionated_limit(static_cast<double>(limit),
                                             static_cast<double>(b.min_quote), opinion.value,
                                             Role::Buyer);
    const auto hi = static_cast<Price>(std::floor(ol + kTickEps));
    return rng.uniform_int(b.min_quote, std::max(hi, b.min_quote));
  }
  if (limit > b.max_quote) return std::nullopt;
  const double ol = ozic_opinionated_limit(static_cast<double>(limit),
                                           static_cast<double>(b.max_quote), opinion.value,
                                           Role::Seller);
  const auto lo = static_cast<Price>(std::ceil(ol - kTickEps));
  return rng.uniform_int(std::min(lo, b.max_quote), b.max_quote);
}

double nzi_default_value(const MarketContext& ctx) {
  if (ctx.t < 1 || ctx.t > ctx.T + 1)
    throw Error(Errc::InvalidPeriod, "period " + std::to_string(ctx.t) + " outside [1, " +
                                         std::to_string(ctx.T + 1) + "]");
  return ctx.d_bar * static_cast<double>(ctx.T - ctx.t + 1) + ctx.final_value;
}

double nzi_buyer_prob(const MarketContext& ctx) noexcept {
  return std::max(0.5 - ctx.phi * static_cast<double>(ctx.t), 0.0);
}

double nzi_anchored_price(double u, const MarketContext& ctx) noexcept {
  return (1.0 - ctx.alpha) * u + ctx.alpha * ctx.p_prev;
}

std::optional<double> nzi_quote_from_draw(const TraderState& state, const MarketContext& ctx,
                                          double u) {
  if (!can_quote(state)) return std::nullopt;
  return cap_to_budget(state, nzi_anchored_price(u, ctx));
}

std::optional<double> nzi_quote(const TraderState& state, const MarketContext& ctx, Rng& rng) {
  if (!can_quote(state)) return std::nullopt;
  const double u = rng.uniform(0.0, ctx.k * nzi_default_value(ctx));
  return nzi_quote_from_draw(state, ctx, u);
}

double onzi_uncertainty_bound(const MarketContext& ctx, double x) {
  check_opinion(x);
  return 0.5 * ctx.k * nzi_default_value(ctx) * (1.0 + x);
}

std::optional<double> onzi_quote(const TraderState& state, const MarketContext& ctx,
                                 const od::Opinion& opinion, Rng& rng) {
  const double upper = onzi_uncertainty_bound(ctx, opinion.value);
  if (!can_quote(state)) return std::nullopt;
  const double ou = rng.uniform(0.0, upper);
  return nzi_quote_from_draw(state, ctx, ou);
}

}  // namespace nms::traders
