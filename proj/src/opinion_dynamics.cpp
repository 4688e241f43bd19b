#include "nms/opinion_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nms/error.hpp"

namespace nms::od {

std::string_view to_string(Model m) noexcept {
  switch (m) {
    case Model::BC: return "bc";
    case Model::RA: return "ra";
    case Model::RD: return "rd";
  }
  return "?";
}

std::string_view to_string(ExtremistSign s) noexcept {
  switch (s) {
    case ExtremistSign::Split: return "split";
    case ExtremistSign::Positive: return "positive";
    case ExtremistSign::Negative: return "negative";
  }
  return "?";
}

std::string_view to_string(Convergence c) noexcept {
  switch (c) {
    case Convergence::Central: return "central";
    case Convergence::Bipolar: return "bipolar";
    case Convergence::SingleExtreme: return "single_extreme";
    case Convergence::Indeterminate: return "indeterminate";
  }
  return "?";
}

void OdParams::validate() const {
  auto fail = [](const std::string& msg) { throw Error(Errc::InvalidParams, msg); };
  if (!(mu > 0.0 && mu <= 0.5)) fail("mu must lie in (0, 0.5]");
  if (!(bc_threshold >= 0.0)) fail("bc_threshold must be >= 0");
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail("lambda must lie in [0, 1]");
  if (!(pe >= 0.0 && pe <= 1.0)) fail("pe must lie in [0, 1]");
  if (!(u_lo > 0.0 && u_lo <= u_hi)) fail("uncertainty range must satisfy 0 < lo <= hi");
  if (!(extreme_threshold > 0.0 && extreme_threshold <= 1.0))
    fail("extreme_threshold must lie in (0, 1]");
}

OpinionPopulation::OpinionPopulation(std::vector<Opinion> agents, double extreme_threshold)
    : agents_(std::move(agents)), initial_(agents_), extreme_threshold_(extreme_threshold) {}

bool OpinionPopulation::is_extremist(double value) const noexcept {
  return std::abs(value) >= extreme_threshold_;
}

Opinion clamp(Opinion o) noexcept {
  o.value = std::clamp(o.value, -1.0, 1.0);
  o.uncertainty = std::max(o.uncertainty, kMinUncertainty);
  return o;
}

OpinionPopulation init_population(std::size_t n, const OdParams& params, Rng& rng) {
  if (n < 2) throw Error(Errc::InvalidPopulation, "population needs at least 2 agents");
  params.validate();

  const double thr = params.extreme_threshold;
  const auto n_ext = static_cast<std::size_t>(std::lround(params.pe * static_cast<double>(n)));
  std::size_t n_pos = 0;
  switch (params.extremist_sign) {
    case ExtremistSign::Split: n_pos = (n_ext + 1) / 2; break;
    case ExtremistSign::Positive: n_pos = n_ext; break;
    case ExtremistSign::Negative: n_pos = 0; break;
  }

  std::vector<Opinion> agents;
  agents.reserve(n);
  for (std::size_t k = 0; k < n_ext; ++k) {
    const double magnitude = rng.uniform(thr, 1.0);
    agents.push_back({k < n_pos ? magnitude : -magnitude, params.u_lo});
  }
  for (std::size_t k = n_ext; k < n; ++k) {
    double v = rng.uniform(-thr, thr);
    while (std::abs(v) >= thr) v = rng.uniform(-thr, thr);
    agents.push_back({v, rng.uniform(params.u_lo, params.u_hi)});
  }
  rng.shuffle(std::span<Opinion>(agents));
  for (auto& a : agents) a = clamp(a);
  return OpinionPopulation(std::move(agents), thr);
}

void bc_step(OpinionPopulation& pop, const OdParams& params) {
  const std::size_t n = pop.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pop[a].value < pop[b].value; });

  std::vector<double> sorted(n);
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    sorted[k] = pop[order[k]].value;
    prefix[k + 1] = prefix[k] + sorted[k];
  }

  // Neighbourhoods are contiguous windows of the sorted values.
  std::vector<double> next(n);
  std::size_t lo = 0;
  std::size_t hi = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = sorted[k];
    while (x - sorted[lo] > params.bc_threshold) ++lo;
    if (hi < k) hi = k;
    while (hi + 1 < n && sorted[hi + 1] - x <= params.bc_threshold) ++hi;
    next[order[k]] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi + 1 - lo);
  }
  for (std::size_t i = 0; i < n; ++i) pop[i].value = std::clamp(next[i], -1.0, 1.0);
}

namespace {

void check_pair(const OpinionPopulation& pop, std::size_t i, std::size_t j) {
  if (i == j) throw Error(Errc::InvalidPair, "agent cannot interact with itself");
  if (i >= pop.size() || j >= pop.size()) throw Error(Errc::InvalidPair, "agent index out of range");
}

}  // namespace

bool ra_interact(OpinionPopulation& pop, std::size_t i, std::size_t j, const OdParams& params) {
  check_pair(pop, i, j);
  const Opinion a = pop[i];
  const Opinion b = pop[j];
  const double overlap = std::min(a.value + a.uncertainty, b.value + b.uncertainty) -
                         std::max(a.value - a.uncertainty, b.value - b.uncertainty);
  if (!(overlap > a.uncertainty)) return false;

  const double agreement = overlap / a.uncertainty - 1.0;
  Opinion updated{b.value + params.mu * agreement * (a.value - b.value),
                  b.uncertainty + params.mu * agreement * (a.uncertainty - b.uncertainty)};
  pop[j] = clamp(updated);
  return true;
}

bool rd_interact(OpinionPopulation& pop, std::size_t i, std::size_t j, const OdParams& params,
                 Rng& rng) {
  check_pair(pop, i, j);
  const Opinion a = pop[i];
  const Opinion b = pop[j];
  const double gap = std::max(a.value - a.uncertainty, b.value - b.uncertainty) -
                     std::min(a.value + a.uncertainty, b.value + b.uncertainty);
  if (!(gap > a.uncertainty)) return false;
  if (!(rng.uniform01() < params.lambda)) return false;

  // Reactance: j moves away from i.
  const double disagreement = gap / a.uncertainty - 1.0;
  Opinion updated{b.value + params.mu * disagreement * (b.value - a.value),
                  b.uncertainty + params.mu * disagreement * (b.uncertainty - a.uncertainty)};
  pop[j] = clamp(updated);
  return true;
}

double y_metric(const OpinionPopulation& pop) {
  const double thr = pop.extreme_threshold();
  std::size_t moderates = 0;
  std::size_t to_pos = 0;
  std::size_t to_neg = 0;
  const auto initial = pop.initial();
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (std::abs(initial[i].value) >= thr) continue;
    ++moderates;
    if (pop[i].value >= thr) ++to_pos;
    else if (pop[i].value <= -thr) ++to_neg;
  }
  if (moderates == 0) throw Error(Errc::UndefinedMetric, "no initially moderate agents");
  const double p_pos = static_cast<double>(to_pos) / static_cast<double>(moderates);
  const double p_neg = static_cast<double>(to_neg) / static_cast<double>(moderates);
  return p_pos * p_pos + p_neg * p_neg;
}

Convergence classify_convergence(double y, const ConvergenceBands& bands) noexcept {
  if (y < bands.central_below) return Convergence::Central;
  if (y < bands.bipolar_below) return Convergence::Bipolar;
  if (y < bands.single_below) return Convergence::SingleExtreme;
  return Convergence::Indeterminate;
}

void shift_extremists(OpinionPopulation& pop) {
  for (auto& a : pop.agents()) {
    if (pop.is_extremist(a.value)) a.value = -a.value;
  }
}

}  // namespace nms::od
