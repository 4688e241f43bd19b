#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nms/metrics.hpp"
#include "nms/opinion_dynamics.hpp"
#include "nms/orderbook.hpp"
#include "nms/traders.hpp"

namespace nms::session {

using lob::Price;
using lob::Tick;

struct MarketParams {
  int periods{10};
  int period_seconds{240};
  std::vector<double> dividends{0.0, 1.0, 2.0, 3.0};
  std::optional<bool> pay_dividends;  // unset: NZI/ONZI markets only
  double k{4.0846};
  double alpha{0.848};
  double phi{0.0};
  bool buyer_prob_roles{false};  // redraw roles each period with prob. pi_t
  double final_value{40.0};
  Price price_min{1};
  Price price_max{500};
  Price limit_lo{50};
  Price limit_hi{150};
  std::int64_t endowment_units{10};
  std::optional<std::int64_t> buyer_units;   // overrides endowment_units for buyers
  std::optional<std::int64_t> seller_units;  // overrides endowment_units for sellers
  double endowment_value{715.0};  // x + D(1) * y, equal for all traders

  double expected_dividend() const;
  std::int64_t units_for(traders::Role role) const noexcept;
};

struct ExperimentConfig {
  traders::Strategy strategy{traders::Strategy::ZIC};
  std::size_t n_buyers{100};
  std::size_t n_sellers{100};
  od::OdParams od;
  MarketParams market;
  int interactions_per_tick{1};
  std::optional<Tick> shift_tick;
  int opinion_sample_every{10};
  std::uint64_t seed{1};
  int replications{1};

  // Throws Errc::ConfigError naming the offending field.
  void validate() const;

  Tick total_ticks() const noexcept {
    return static_cast<Tick>(market.periods) * market.period_seconds;
  }
  bool pays_dividends() const noexcept;
};

struct TradeRecord {
  lob::Trade trade;
  int period{1};
  std::optional<Price> buyer_limit;
  std::optional<Price> seller_limit;
};

struct OpinionSample {
  Tick tick{0};
  std::size_t agent_id{0};
  double value{0.0};
  double uncertainty{0.0};
};

struct PeriodSummary {
  int period{1};
  std::optional<double> mean_price;
  std::size_t trade_count{0};
  double default_value{0.0};
  double half_k_default_value{0.0};
  std::optional<double> dividend;  // per-unit payout at period end
};

struct FinalMetrics {
  std::optional<double> y;
  std::optional<od::Convergence> convergence;
  std::optional<metrics::EfficiencyReport> efficiency;
};

struct RunOutput {
  std::vector<TradeRecord> tape;
  std::vector<OpinionSample> opinion_series;
  std::vector<PeriodSummary> period_summaries;
  FinalMetrics final_metrics;
  std::vector<traders::TraderState> initial_traders;
  std::vector<traders::TraderState> final_traders;
  std::vector<Price> issued_buyer_limits;
  std::vector<Price> issued_seller_limits;

  std::vector<std::optional<double>> period_means() const;
};

// Runs one replication with cfg.seed as its seed.
RunOutput run_experiment(const ExperimentConfig& cfg);

// Runs cfg.replications replications concurrently; replication r uses seed
// cfg.seed + r. Results are ordered by replication index.
std::vector<RunOutput> run_replications(const ExperimentConfig& cfg);

struct PeriodBounds {
  Tick begin{0};  // inclusive
  Tick end{0};    // exclusive
};

std::vector<PeriodBounds> period_bounds(const ExperimentConfig& cfg);

// Arithmetic mean of trade prices per period; nullopt for periods without trades.
std::vector<std::optional<double>> mean_price_per_period(std::span<const lob::Trade> tape,
                                                         std::span<const PeriodBounds> periods);

}  // namespace nms::session
