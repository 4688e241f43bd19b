#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "nms/rng.hpp"

namespace nms::od {

// Floor applied to every uncertainty so RA/RD ratios stay finite.
inline constexpr double kMinUncertainty = 1e-4;

struct Opinion {
  double value{0.0};        // in [-1, +1]
  double uncertainty{1.0};  // >= kMinUncertainty
};

enum class Model { BC, RA, RD };

// How the extremist share is split between the two poles.
enum class ExtremistSign { Split, Positive, Negative };

enum class Convergence { Central, Bipolar, SingleExtreme, Indeterminate };

std::string_view to_string(Model m) noexcept;
std::string_view to_string(ExtremistSign s) noexcept;
std::string_view to_string(Convergence c) noexcept;

struct OdParams {
  Model model{Model::RA};
  double mu{0.5};             // (0, 0.5]
  double bc_threshold{0.2};   // >= 0
  double lambda{0.5};         // [0, 1]
  double pe{0.0};             // [0, 1]
  double u_lo{0.2};
  double u_hi{2.0};
  double extreme_threshold{0.9};  // (0, 1]
  ExtremistSign extremist_sign{ExtremistSign::Split};

  // Throws Errc::InvalidParams on any out-of-range field.
  void validate() const;
};

class OpinionPopulation {
public:
  OpinionPopulation(std::vector<Opinion> agents, double extreme_threshold);

  std::size_t size() const noexcept { return agents_.size(); }
  double extreme_threshold() const noexcept { return extreme_threshold_; }

  const Opinion& operator[](std::size_t i) const { return agents_[i]; }
  Opinion& operator[](std::size_t i) { return agents_[i]; }

  std::span<const Opinion> agents() const noexcept { return agents_; }
  std::span<Opinion> agents() noexcept { return agents_; }
  std::span<const Opinion> initial() const noexcept { return initial_; }

  bool is_extremist(double value) const noexcept;

private:
  std::vector<Opinion> agents_;
  std::vector<Opinion> initial_;
  double extreme_threshold_;
};

// Clamps value to [-1, 1] and uncertainty to [kMinUncertainty, inf).
Opinion clamp(Opinion o) noexcept;

OpinionPopulation init_population(std::size_t n, const OdParams& params, Rng& rng);

// Synchronous Hegselmann-Krause step: each agent moves to the mean of every
// agent (itself included) within bc_threshold of it.
void bc_step(OpinionPopulation& pop, const OdParams& params);

// Relative-agreement influence of agent i on agent j.
// Returns true when j was updated.
bool ra_interact(OpinionPopulation& pop, std::size_t i, std::size_t j, const OdParams& params);

// Relative-disagreement influence of agent i on agent j. Draws exactly one
// variate from rng when the disagreement condition holds and none otherwise.
// Returns true when j was updated.
bool rd_interact(OpinionPopulation& pop, std::size_t i, std::size_t j, const OdParams& params,
                 Rng& rng);

// y = p+^2 + p-^2 over the agents that started moderate.
double y_metric(const OpinionPopulation& pop);

struct ConvergenceBands {
  double central_below{0.25};
  double bipolar_below{0.75};
  double single_below{1.25};
};

Convergence classify_convergence(double y, const ConvergenceBands& bands = {}) noexcept;

// Negates the opinion of every current extremist.
void shift_extremists(OpinionPopulation& pop);

}  // namespace nms::od
