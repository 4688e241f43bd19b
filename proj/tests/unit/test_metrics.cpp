#include <doctest.h>

#include <cmath>
#include <vector>

#include "nms/error.hpp"
#include "nms/metrics.hpp"
#include "nms/rng.hpp"
#include "oracles/oracles.hpp"

using namespace nms::metrics;
using nms::Errc;
using nms::Error;

TEST_CASE("efficiency worked examples") {
  const std::vector<double> buyers{120};
  const std::vector<double> sellers{80};
  SUBCASE("no trades") {
    const auto r = allocative_efficiency({}, buyers, sellers);
    CHECK(r.max_surplus == 40.0);
    CHECK(r.efficiency == 0.0);
  }
  SUBCASE("surplus independent of the split") {
    for (double p : {80.0, 95.0, 120.0}) {
      const std::vector<LimitedTrade> trades{{p, 120, 80}};
      const auto r = allocative_efficiency(trades, buyers, sellers);
      CHECK(r.realized_surplus == 40.0);
      CHECK(r.efficiency == 100.0);
    }
  }
  SUBCASE("realized surplus without attainable surplus is inconsistent") {
    const std::vector<double> b{50};
    const std::vector<double> s{60};
    const std::vector<LimitedTrade> trades{{55, 70, 60}};
    try {
      allocative_efficiency(trades, b, s);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::Inconsistency);
    }
  }
}

TEST_CASE("max surplus matches exhaustive search") {
  nms::Rng rng(10);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> buyers(static_cast<std::size_t>(rng.uniform_int(0, 10)));
    std::vector<double> sellers(static_cast<std::size_t>(rng.uniform_int(0, 10)));
    for (auto& b : buyers) b = static_cast<double>(rng.uniform_int(50, 150));
    for (auto& s : sellers) s = static_cast<double>(rng.uniform_int(50, 150));
    CHECK(max_surplus(buyers, sellers) == oracle::max_surplus_exhaustive(buyers, sellers));
  }
}

TEST_CASE("efficiency stays at or below 100 for limit-respecting trades") {
  nms::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = static_cast<std::size_t>(rng.uniform_int(1, 10));
    std::vector<double> buyers(n);
    std::vector<double> sellers(n);
    for (auto& b : buyers) b = static_cast<double>(rng.uniform_int(50, 150));
    for (auto& s : sellers) s = static_cast<double>(rng.uniform_int(50, 150));
    // Random feasible matching of buyer k with seller k.
    std::vector<LimitedTrade> trades;
    for (std::size_t k = 0; k < n; ++k)
      if (buyers[k] >= sellers[k] && rng.bernoulli(0.7))
        trades.push_back({rng.uniform(sellers[k], buyers[k]), buyers[k], sellers[k]});
    const auto r = allocative_efficiency(trades, buyers, sellers);
    CHECK(r.efficiency <= 100.0 + 1e-9);
    CHECK(r.efficiency >= 0.0);
  }
}

TEST_CASE("price path features") {
  using V = std::vector<std::optional<double>>;
  SUBCASE("hump") {
    const V means{10.0, 50.0, 40.0, 30.0};
    const auto f = price_path_features(means);
    CHECK(f.peak_period == 2);
    CHECK(f.peak_value == 50.0);
    CHECK(f.initial_gradient == 40.0);
    CHECK(f.terminal_mean == 30.0);
  }
  SUBCASE("monotone series peaks last") {
    const V means{1.0, 2.0, 3.0, 4.0, 5.0};
    CHECK(price_path_features(means).peak_period == 5);
  }
  SUBCASE("absent periods are skipped") {
    const V means{std::nullopt, 20.0, std::nullopt, 26.0};
    const auto f = price_path_features(means);
    CHECK(f.peak_period == 4);
    CHECK(f.initial_gradient == 3.0);
  }
  SUBCASE("order matters") {
    const V a{10.0, 50.0, 40.0};
    const V b{40.0, 50.0, 10.0};
    CHECK(price_path_features(a).terminal_mean != price_path_features(b).terminal_mean);
  }
  SUBCASE("insufficient data") {
    const V means{std::nullopt, 5.0, std::nullopt};
    try {
      price_path_features(means);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::InsufficientData);
    }
  }
}
