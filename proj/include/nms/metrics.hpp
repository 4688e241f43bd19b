#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace nms::metrics {

// A trade together with the limit prices of the two customer orders it filled.
struct LimitedTrade {
  double price{0.0};
  double buyer_limit{0.0};
  double seller_limit{0.0};
};

struct EfficiencyReport {
  double realized_surplus{0.0};
  double max_surplus{0.0};
  double efficiency{0.0};  // percent
};

// Competitive-equilibrium surplus: pair buyer limits (descending) with seller
// limits (ascending) while the pair is profitable.
double max_surplus(std::span<const double> buyer_limits, std::span<const double> seller_limits);

// Throws Errc::Inconsistency when there is realized surplus but no attainable one.
EfficiencyReport allocative_efficiency(std::span<const LimitedTrade> trades,
                                       std::span<const double> buyer_limits,
                                       std::span<const double> seller_limits);

struct PricePathFeatures {
  std::size_t peak_period{0};  // 1-based
  double peak_value{0.0};
  double initial_gradient{0.0};
  double terminal_mean{0.0};
};

// Periods with no trades are skipped. Throws Errc::InsufficientData when
// fewer than two periods have a mean.
PricePathFeatures price_path_features(std::span<const std::optional<double>> period_means);

}  // namespace nms::metrics
