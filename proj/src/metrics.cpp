#include "nms/metrics.hpp"

#include <algorithm>
#include <functional>

#include "nms/error.hpp"

namespace nms::metrics {

double max_surplus(std::span<const double> buyer_limits, std::span<const double> seller_limits) {
  std::vector<double> buyers(buyer_limits.begin(), buyer_limits.end());
  std::vector<double> sellers(seller_limits.begin(), seller_limits.end());
  std::sort(buyers.begin(), buyers.end(), std::greater<>());
  std::sort(sellers.begin(), sellers.end());
  double total = 0.0;
  for (std::size_t i = 0; i < std::min(buyers.size(), sellers.size()); ++i) {
    if (buyers[i] < sellers[i]) break;
    total += buyers[i] - sellers[i];
  }
  return total;
}

EfficiencyReport allocative_efficiency(std::span<const LimitedTrade> trades,
                                       std::span<const double> buyer_limits,
                                       std::span<const double> seller_limits) {
  EfficiencyReport report;
  for (const auto& t : trades)
    report.realized_surplus += (t.buyer_limit - t.price) + (t.price - t.seller_limit);
  report.max_surplus = max_surplus(buyer_limits, seller_limits);
  if (report.max_surplus > 0.0) {
    report.efficiency = 100.0 * report.realized_surplus / report.max_surplus;
  } else if (report.realized_surplus > 0.0) {
    throw Error(Errc::Inconsistency, "realized surplus with zero attainable surplus");
  }
  return report;
}

PricePathFeatures price_path_features(std::span<const std::optional<double>> period_means) {
  std::vector<std::pair<std::size_t, double>> present;
  for (std::size_t i = 0; i < period_means.size(); ++i)
    if (period_means[i]) present.emplace_back(i + 1, *period_means[i]);
  if (present.size() < 2)
    throw Error(Errc::InsufficientData, "need at least two periods with trades");

  PricePathFeatures f;
  f.peak_period = present.front().first;
  f.peak_value = present.front().second;
  for (const auto& [period, mean] : present) {
    if (mean > f.peak_value) {
      f.peak_period = period;
      f.peak_value = mean;
    }
  }
  const auto& [p1, m1] = present[0];
  const auto& [p2, m2] = present[1];
  f.initial_gradient = (m2 - m1) / static_cast<double>(p2 - p1);
  f.terminal_mean = present.back().second;
  return f;
}

}  // namespace nms::metrics
