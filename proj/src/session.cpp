#include "nms/session.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <string>

#include "nms/error.hpp"

namespace nms::session {

using traders::Role;
using traders::Strategy;
using traders::TraderState;

namespace {

// Fixed stream labels; trader i draws from kTraderStreamBase + i.
constexpr std::uint64_t kScheduleStream = 1;
constexpr std::uint64_t kOpinionStream = 2;
constexpr std::uint64_t kDividendStream = 3;
constexpr std::uint64_t kTraderStreamBase = 1000;

void config_fail(const std::string& msg) { throw Error(Errc::ConfigError, msg); }

class Simulation {
public:
  explicit Simulation(const ExperimentConfig& cfg)
      : cfg_(cfg),
        book_(cfg.market.price_min, cfg.market.price_max),
        schedule_rng_(derive_seed(cfg.seed, kScheduleStream)),
        opinion_rng_(derive_seed(cfg.seed, kOpinionStream)),
        dividend_rng_(derive_seed(cfg.seed, kDividendStream)),
        population_(init_population(cfg.n_buyers + cfg.n_sellers, cfg.od, opinion_rng_)) {
    ctx_.T = cfg.market.periods;
    ctx_.d_bar = cfg.market.expected_dividend();
    ctx_.final_value = cfg.market.final_value;
    ctx_.k = cfg.market.k;
    ctx_.alpha = cfg.market.alpha;
    ctx_.phi = cfg.market.phi;
    ctx_.t = 1;
    ctx_.p_prev = 0.0;
    setup_traders();
  }

  RunOutput run();

private:
  void setup_traders();
  void issue_customer_order(std::size_t i);
  void start_period();
  void trader_turn(Tick tick, int period);
  void settle(const lob::Trade& t, int period);
  void opinion_turn();
  void end_period(int period, std::size_t first_trade);
  void sample_opinions(Tick tick);
  std::optional<Price> quote(std::size_t i);

  const ExperimentConfig& cfg_;
  lob::LimitOrderBook book_;
  Rng schedule_rng_;
  Rng opinion_rng_;
  Rng dividend_rng_;
  od::OpinionPopulation population_;
  std::vector<TraderState> traders_;
  std::vector<Rng> trader_rngs_;
  traders::MarketContext ctx_;
  lob::OrderId next_order_id_{1};
  RunOutput out_;
};

std::optional<Price> Simulation::quote(std::size_t i) {
  const TraderState& st = traders_[i];
  Rng& rng = trader_rngs_[i];
  const auto& m = cfg_.market;
  switch (st.strategy) {
    case Strategy::ZIC: return traders::zic_quote(st, book_.snapshot(), rng);
    case Strategy::OZIC:
      return traders::ozic_quote(st, book_.snapshot(), population_[*st.opinion_index], rng);
    case Strategy::NZI:
    case Strategy::ONZI: {
      const auto raw = st.strategy == Strategy::NZI
                           ? traders::nzi_quote(st, ctx_, rng)
                           : traders::onzi_quote(st, ctx_, population_[*st.opinion_index], rng);
      if (!raw) return std::nullopt;
      Price price = traders::to_tick(*raw, m.price_min, m.price_max);
      if (st.role == Role::Buyer && static_cast<double>(price) > st.balance)
        price = static_cast<Price>(std::floor(st.balance));
      if (price < m.price_min) return std::nullopt;
      return price;
    }
  }
  return std::nullopt;
}

void Simulation::setup_traders() {
  const std::size_t n = cfg_.n_buyers + cfg_.n_sellers;
  traders_.resize(n);
  trader_rngs_.reserve(n);
  const double d1 = traders::nzi_default_value(ctx_);
  for (std::size_t i = 0; i < n; ++i) {
    trader_rngs_.emplace_back(derive_seed(cfg_.seed, kTraderStreamBase + i));
    TraderState& st = traders_[i];
    st.trader_id = static_cast<lob::TraderId>(i);
    st.strategy = cfg_.strategy;
    st.role = i < cfg_.n_buyers ? Role::Buyer : Role::Seller;
    if (traders::is_opinionated(cfg_.strategy)) st.opinion_index = i;
    if (traders::uses_limit_prices(cfg_.strategy)) {
      issue_customer_order(i);
    } else {
      st.inventory = cfg_.market.units_for(st.role);
      st.balance = cfg_.market.endowment_value - d1 * static_cast<double>(st.inventory);
    }
  }
  out_.initial_traders = traders_;
}

// A customer order hands a buyer the cash to pay its limit, or a seller the
// unit to sell; both are passed on to the customer when the order fills.
void Simulation::issue_customer_order(std::size_t i) {
  TraderState& st = traders_[i];
  const Price limit = trader_rngs_[i].uniform_int(cfg_.market.limit_lo, cfg_.market.limit_hi);
  st.limit_price = limit;
  if (st.role == Role::Buyer) {
    st.balance += static_cast<double>(limit);
    out_.issued_buyer_limits.push_back(limit);
  } else {
    st.inventory += 1;
    out_.issued_seller_limits.push_back(limit);
  }
}

void Simulation::start_period() {
  if (!cfg_.market.buyer_prob_roles || traders::uses_limit_prices(cfg_.strategy)) return;
  const double pi = traders::nzi_buyer_prob(ctx_);
  for (std::size_t i = 0; i < traders_.size(); ++i) {
    const Role role = trader_rngs_[i].bernoulli(pi) ? Role::Buyer : Role::Seller;
    if (role != traders_[i].role) {
      book_.cancel(traders_[i].trader_id);
      traders_[i].role = role;
    }
  }
}

void Simulation::trader_turn(Tick tick, int period) {
  const std::size_t i = schedule_rng_.index(traders_.size());
  const auto price = quote(i);
  if (!price) return;
  lob::Order order;
  order.order_id = next_order_id_++;
  order.trader_id = traders_[i].trader_id;
  order.side = traders_[i].role == Role::Buyer ? lob::Side::Bid : lob::Side::Ask;
  order.price = *price;
  order.quantity = 1;
  order.time = tick;
  for (const auto& t : book_.submit(order)) settle(t, period);
}

void Simulation::settle(const lob::Trade& t, int period) {
  TraderState& buyer = traders_[static_cast<std::size_t>(t.buyer_id)];
  TraderState& seller = traders_[static_cast<std::size_t>(t.seller_id)];
  out_.tape.push_back({t, period, buyer.limit_price, seller.limit_price});

  const double cash = static_cast<double>(t.price * t.quantity);
  buyer.balance -= cash;
  buyer.inventory += t.quantity;
  seller.balance += cash;
  seller.inventory -= t.quantity;

  if (traders::uses_limit_prices(cfg_.strategy)) {
    buyer.inventory -= t.quantity;
    seller.balance -= static_cast<double>(*seller.limit_price * t.quantity);
    issue_customer_order(static_cast<std::size_t>(t.buyer_id));
    issue_customer_order(static_cast<std::size_t>(t.seller_id));
  }
}

void Simulation::opinion_turn() {
  if (cfg_.interactions_per_tick <= 0) return;
  const auto& p = cfg_.od;
  if (p.model == od::Model::BC) {
    od::bc_step(population_, p);
    return;
  }
  const std::size_t n = population_.size();
  for (int k = 0; k < cfg_.interactions_per_tick; ++k) {
    const std::size_t i = opinion_rng_.index(n);
    std::size_t j = opinion_rng_.index(n - 1);
    if (j >= i) ++j;
    if (p.model == od::Model::RA) od::ra_interact(population_, i, j, p);
    else od::rd_interact(population_, i, j, p, opinion_rng_);
  }
}

void Simulation::end_period(int period, std::size_t first_trade) {
  PeriodSummary s;
  s.period = period;
  s.trade_count = out_.tape.size() - first_trade;
  s.default_value = traders::nzi_default_value(ctx_);
  s.half_k_default_value = 0.5 * ctx_.k * s.default_value;
  if (s.trade_count > 0) {
    double sum = 0.0;
    for (std::size_t k = first_trade; k < out_.tape.size(); ++k)
      sum += static_cast<double>(out_.tape[k].trade.price);
    s.mean_price = sum / static_cast<double>(s.trade_count);
    ctx_.p_prev = *s.mean_price;
  }
  if (cfg_.pays_dividends()) {
    const auto& support = cfg_.market.dividends;
    const double dividend = support[dividend_rng_.index(support.size())];
    for (auto& st : traders_) st.balance += dividend * static_cast<double>(st.inventory);
    s.dividend = dividend;
  }
  out_.period_summaries.push_back(s);
  ctx_.t += 1;
}

void Simulation::sample_opinions(Tick tick) {
  for (std::size_t i = 0; i < population_.size(); ++i)
    out_.opinion_series.push_back({tick, i, population_[i].value, population_[i].uncertainty});
}

RunOutput Simulation::run() {
  const Tick total = cfg_.total_ticks();
  const Tick per = cfg_.market.period_seconds;
  const Tick sample_every = cfg_.opinion_sample_every;
  std::size_t period_first_trade = 0;

  for (Tick tick = 0; tick < total; ++tick) {
    const int period = static_cast<int>(tick / per) + 1;
    if (tick % per == 0) {
      period_first_trade = out_.tape.size();
      start_period();
    }
    if (cfg_.shift_tick && tick == *cfg_.shift_tick) od::shift_extremists(population_);
    if (tick % sample_every == 0) sample_opinions(tick);

    trader_turn(tick, period);
    opinion_turn();

    if ((tick + 1) % per == 0) end_period(period, period_first_trade);
  }
  sample_opinions(total);

  try {
    const double y = od::y_metric(population_);
    out_.final_metrics.y = y;
    out_.final_metrics.convergence = od::classify_convergence(y);
  } catch (const Error& e) {
    if (e.code() != Errc::UndefinedMetric) throw;
  }

  if (traders::uses_limit_prices(cfg_.strategy)) {
    std::vector<metrics::LimitedTrade> limited;
    limited.reserve(out_.tape.size());
    for (const auto& r : out_.tape)
      limited.push_back({static_cast<double>(r.trade.price), static_cast<double>(*r.buyer_limit),
                         static_cast<double>(*r.seller_limit)});
    std::vector<double> buyers(out_.issued_buyer_limits.begin(), out_.issued_buyer_limits.end());
    std::vector<double> sellers(out_.issued_seller_limits.begin(),
                                out_.issued_seller_limits.end());
    out_.final_metrics.efficiency = metrics::allocative_efficiency(limited, buyers, sellers);
  }

  out_.final_traders = traders_;
  return std::move(out_);
}

}  // namespace

double MarketParams::expected_dividend() const {
  if (dividends.empty()) return 0.0;
  return std::accumulate(dividends.begin(), dividends.end(), 0.0) /
         static_cast<double>(dividends.size());
}

std::int64_t MarketParams::units_for(Role role) const noexcept {
  const auto& specific = role == Role::Buyer ? buyer_units : seller_units;
  return specific.value_or(endowment_units);
}

bool ExperimentConfig::pays_dividends() const noexcept {
  if (market.pay_dividends) return *market.pay_dividends;
  return !traders::uses_limit_prices(strategy);
}

void ExperimentConfig::validate() const {
  try {
    od.validate();
  } catch (const Error& e) {
    config_fail(std::string("od: ") + e.what());
  }
  if (n_buyers + n_sellers < 2) config_fail("session: need at least 2 traders in total");
  const auto& m = market;
  if (m.periods < 1) config_fail("market.periods must be >= 1");
  if (m.period_seconds < 1) config_fail("market.period_seconds must be > 0");
  if (m.dividends.empty()) config_fail("market.dividends must not be empty");
  for (double d : m.dividends)
    if (!(d >= 0.0)) config_fail("market.dividends must be >= 0");
  if (!(m.k > 0.0)) config_fail("market.k must be > 0");
  if (!(m.alpha > 0.0 && m.alpha < 1.0)) config_fail("market.alpha must lie in (0, 1)");
  if (!(m.phi >= 0.0 && m.phi < 0.5 / m.periods))
    config_fail("market.phi must lie in [0, 0.5/periods)");
  if (m.price_min < 0 || m.price_max < m.price_min)
    config_fail("market.price_min/price_max must satisfy 0 <= min <= max");
  if (m.limit_lo < m.price_min || m.limit_hi > m.price_max || m.limit_lo > m.limit_hi)
    config_fail("market.limit_range must lie within [price_min, price_max]");
  if (!traders::uses_limit_prices(strategy)) {
    const double d1 = m.expected_dividend() * m.periods + m.final_value;
    for (Role role : {Role::Buyer, Role::Seller}) {
      const auto units = m.units_for(role);
      if (units < 0) config_fail("market endowment units must be >= 0");
      if (m.endowment_value - d1 * static_cast<double>(units) < 0.0)
        config_fail("market.endowment_value too small: initial cash would be negative");
    }
  }
  if (interactions_per_tick < 0) config_fail("session.interactions_per_tick must be >= 0");
  if (opinion_sample_every < 1) config_fail("session.opinion_sample_every must be >= 1");
  if (shift_tick && (*shift_tick < 0 || *shift_tick >= total_ticks()))
    config_fail("session.shift_tick must lie in [0, total ticks)");
  if (replications < 1) config_fail("replications must be >= 1");
}

std::vector<std::optional<double>> RunOutput::period_means() const {
  std::vector<std::optional<double>> means;
  means.reserve(period_summaries.size());
  for (const auto& s : period_summaries) means.push_back(s.mean_price);
  return means;
}

RunOutput run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  Simulation sim(cfg);
  return sim.run();
}

std::vector<RunOutput> run_replications(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<std::future<RunOutput>> pending;
  pending.reserve(static_cast<std::size_t>(cfg.replications));
  for (int r = 0; r < cfg.replications; ++r) {
    ExperimentConfig rep = cfg;
    rep.seed = cfg.seed + static_cast<std::uint64_t>(r);
    rep.replications = 1;
    pending.push_back(std::async(std::launch::async, [rep] { return run_experiment(rep); }));
  }
  std::vector<RunOutput> outputs;
  outputs.reserve(pending.size());
  for (auto& f : pending) outputs.push_back(f.get());
  return outputs;
}

std::vector<PeriodBounds> period_bounds(const ExperimentConfig& cfg) {
  std::vector<PeriodBounds> bounds;
  const Tick per = cfg.market.period_seconds;
  for (int p = 0; p < cfg.market.periods; ++p) bounds.push_back({p * per, (p + 1) * per});
  return bounds;
}

std::vector<std::optional<double>> mean_price_per_period(std::span<const lob::Trade> tape,
                                                         std::span<const PeriodBounds> periods) {
  std::vector<std::optional<double>> means(periods.size());
  std::size_t k = 0;
  for (std::size_t p = 0; p < periods.size(); ++p) {
    while (k < tape.size() && tape[k].time < periods[p].begin) ++k;
    double sum = 0.0;
    std::size_t count = 0;
    while (k < tape.size() && tape[k].time < periods[p].end) {
      sum += static_cast<double>(tape[k].price);
      ++count;
      ++k;
    }
    if (count > 0) means[p] = sum / static_cast<double>(count);
  }
  return means;
}

}  // namespace nms::session
