// Acceptance suite: one PASS/FAIL line per criterion. A criterion passes only
// when its property holds and it finishes inside its runtime budget.
// Usage: acceptance [criterion numbers...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nms/config.hpp"
#include "nms/error.hpp"
#include "nms/metrics.hpp"
#include "nms/opinion_dynamics.hpp"
#include "nms/orderbook.hpp"
#include "nms/output.hpp"
#include "nms/rng.hpp"
#include "nms/session.hpp"
#include "nms/traders.hpp"
#include "oracles/oracles.hpp"

using namespace nms;

namespace {

struct Outcome {
  bool ok{false};
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> check;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------- criterion 1

Outcome od_unit_suite() {
  constexpr double tol = 1e-12;
  int failures = 0;
  int checks = 0;
  auto expect = [&](bool cond) {
    ++checks;
    failures += !cond;
  };
  od::OdParams p;

  {
    od::OpinionPopulation pop({{0.5, 0.2}, {0.4, 0.2}}, 0.9);
    p.model = od::Model::RA;
    p.mu = 0.5;
    expect(od::ra_interact(pop, 0, 1, p));
    expect(std::abs(pop[1].value - 0.425) <= tol);
    expect(std::abs(pop[1].uncertainty - 0.2) <= tol);
  }
  {
    od::OpinionPopulation pop({{0.9, 0.1}, {-0.9, 0.1}}, 0.9);
    expect(!od::ra_interact(pop, 0, 1, p));
    expect(pop[1].value == -0.9 && pop[1].uncertainty == 0.1);
  }
  {
    od::OpinionPopulation pop({{-0.3, 0.6}, {-0.3, 0.6}}, 0.9);
    od::ra_interact(pop, 0, 1, p);
    expect(std::abs(pop[1].value + 0.3) <= tol && std::abs(pop[1].uncertainty - 0.6) <= tol);
  }
  {
    od::OpinionPopulation pop({{0.5, 0.1}, {0.1, 0.1}}, 0.9);
    p.model = od::Model::RD;
    p.mu = 0.1;
    p.lambda = 1.0;
    Rng rng(1);
    expect(od::rd_interact(pop, 0, 1, p, rng));
    expect(std::abs(pop[1].value - 0.06) <= tol);
  }
  {
    od::OpinionPopulation pop({{0.0, 0.2}, {0.2, 0.2}, {0.4, 0.2}}, 0.9);
    p.model = od::Model::BC;
    p.bc_threshold = 0.3;
    od::bc_step(pop, p);
    expect(std::abs(pop[0].value - 0.1) <= tol);
    expect(std::abs(pop[1].value - 0.2) <= tol);
    expect(std::abs(pop[2].value - 0.3) <= tol);
  }
  {
    od::OpinionPopulation pop({{-0.8, 0.2}, {0.8, 0.2}}, 0.9);
    p.bc_threshold = 0.5;
    od::bc_step(pop, p);
    expect(std::abs(pop[0].value + 0.8) <= tol && std::abs(pop[1].value - 0.8) <= tol);
  }
  {
    const std::vector<od::Opinion> start{{0.0, 0.5}, {0.1, 0.5}, {-0.1, 0.5}, {0.2, 0.5}};
    auto y_of = [&](std::vector<double> finals) {
      od::OpinionPopulation pop(start, 0.9);
      for (std::size_t i = 0; i < finals.size(); ++i) pop[i].value = finals[i];
      return od::y_metric(pop);
    };
    expect(std::abs(y_of({0.0, 0.1, -0.1, 0.05}) - 0.0) <= tol);
    expect(std::abs(y_of({0.95, 0.95, -0.95, -0.95}) - 0.5) <= tol);
    expect(std::abs(y_of({0.95, 0.95, 0.95, 0.95}) - 1.0) <= tol);
  }
  return {failures == 0, fmt("%d/%d checks within 1e-12", checks - failures, checks)};
}

// ------------------------------------------------------------ criteria 2 and 3

// Stand-alone opinion run: same pairing protocol as the session loop.
od::Convergence od_run(const od::OdParams& p, std::size_t n, long interactions, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 2));
  auto pop = od::init_population(n, p, rng);
  for (long k = 0; k < interactions; ++k) {
    const std::size_t i = rng.index(n);
    std::size_t j = rng.index(n - 1);
    if (j >= i) ++j;
    if (p.model == od::Model::RA) od::ra_interact(pop, i, j, p);
    else od::rd_interact(pop, i, j, p, rng);
  }
  return od::classify_convergence(od::y_metric(pop));
}

constexpr std::size_t kOdAgents = 200;
constexpr long kOdInteractions = 200'000;

Outcome ra_modes() {
  constexpr int seeds = 50;
  constexpr int min_count = 3;  // 5% of 50, rounded up
  std::set<od::Convergence> reached;
  std::string detail;
  for (double pe : {0.0, 0.25, 0.5}) {
    od::OdParams p;
    p.model = od::Model::RA;
    p.mu = 0.5;
    p.pe = pe;
    int counts[4] = {0, 0, 0, 0};
    for (int s = 0; s < seeds; ++s) counts[static_cast<int>(od_run(p, kOdAgents, kOdInteractions, s))]++;
    for (auto c : {od::Convergence::Central, od::Convergence::Bipolar, od::Convergence::SingleExtreme})
      if (counts[static_cast<int>(c)] >= min_count) reached.insert(c);
    detail += fmt("pe=%.2f C/B/S/I=%d/%d/%d/%d; ", pe, counts[0], counts[1], counts[2], counts[3]);
  }
  detail += fmt("modes at >=5%%: %zu/3", reached.size());
  return {reached.size() == 3, detail};
}

Outcome rd_emergence() {
  constexpr int runs = 100;
  od::OdParams p;
  p.model = od::Model::RD;
  p.mu = 0.5;
  p.lambda = 0.5;
  p.pe = 0.0;
  int polarized = 0;
  for (int s = 0; s < runs; ++s) {
    const auto c = od_run(p, kOdAgents, kOdInteractions, s);
    polarized += c == od::Convergence::Bipolar || c == od::Convergence::SingleExtreme;
  }
  return {polarized * 10 >= runs, fmt("%d/%d runs Bipolar or SingleExtreme (need >= 10%%)", polarized, runs)};
}

// ---------------------------------------------------------------- criterion 4

Outcome matching_oracle() {
  constexpr int sequences = 1000;
  Rng rng(derive_seed(4, 4));
  int mismatched = 0;
  long orders = 0;
  for (int trial = 0; trial < sequences; ++trial) {
    lob::LimitOrderBook book(1, 60);
    oracle::NaiveBook naive(1, 60);
    const auto n = rng.uniform_int(1, 50);
    bool agree = true;
    for (lob::OrderId id = 1; id <= static_cast<lob::OrderId>(n); ++id) {
      lob::Order o;
      o.order_id = id > 1 && rng.bernoulli(0.03) ? id - 1 : id;
      o.trader_id = rng.uniform_int(0, 15);
      o.side = rng.bernoulli(0.5) ? lob::Side::Bid : lob::Side::Ask;
      o.price = rng.uniform_int(0, 61);
      o.quantity = rng.uniform_int(1, 3);
      o.time = static_cast<lob::Tick>(id);
      bool accepted = true;
      try {
        book.submit(o);
      } catch (const Error&) {
        accepted = false;
      }
      agree = agree && naive.submit(o) == accepted;
      ++orders;
    }
    agree = agree && book.tape() == naive.tape() && book.bids() == naive.bids() &&
            book.asks() == naive.asks();
    mismatched += !agree;
  }
  return {mismatched == 0,
          fmt("%d/%d sequences identical (%ld orders)", sequences - mismatched, sequences, orders)};
}

// ------------------------------------------------------------ market criteria

constexpr int kSeedCount = 20;

session::ExperimentConfig ozic_experiment(od::ExtremistSign sign) {
  session::ExperimentConfig cfg;
  cfg.strategy = traders::Strategy::OZIC;
  cfg.od.model = od::Model::RA;
  cfg.od.pe = 0.5;
  cfg.od.mu = 0.5;
  cfg.od.u_lo = 0.2;
  cfg.od.u_hi = 2.0;
  cfg.od.extremist_sign = sign;
  cfg.interactions_per_tick = 5;
  return cfg;
}

double mean_price(const session::RunOutput& out, lob::Tick from, lob::Tick to) {
  double sum = 0.0;
  long n = 0;
  for (const auto& r : out.tape)
    if (r.trade.time >= from && r.trade.time < to) {
      sum += static_cast<double>(r.trade.price);
      ++n;
    }
  return n > 0 ? sum / static_cast<double>(n) : std::nan("");
}

Outcome zic_efficiency() {
  session::ExperimentConfig cfg;
  cfg.strategy = traders::Strategy::ZIC;
  double sum = 0.0;
  double lo = 1e9;
  for (int s = 0; s < kSeedCount; ++s) {
    cfg.seed = static_cast<std::uint64_t>(s);
    const double e = session::run_experiment(cfg).final_metrics.efficiency->efficiency;
    sum += e;
    lo = std::min(lo, e);
  }
  const double mean = sum / kSeedCount;
  return {mean >= 90.0, fmt("mean efficiency %.2f%% (min %.2f%%) over %d seeds, need >= 90%%", mean, lo, kSeedCount)};
}

Outcome ozic_ordering() {
  int wins = 0;
  double gap = 0.0;
  for (int s = 0; s < kSeedCount; ++s) {
    auto pos = ozic_experiment(od::ExtremistSign::Positive);
    auto neg = ozic_experiment(od::ExtremistSign::Negative);
    pos.seed = neg.seed = static_cast<std::uint64_t>(s);
    const double mp = mean_price(session::run_experiment(pos), 0, pos.total_ticks());
    const double mn = mean_price(session::run_experiment(neg), 0, neg.total_ticks());
    wins += mp > mn;
    gap += mp - mn;
  }
  return {wins >= 19, fmt("positive > negative in %d/%d pairs (mean gap %.1f), need >= 19", wins, kSeedCount, gap / kSeedCount)};
}

Outcome ozic_shift() {
  int down = 0;
  int up = 0;
  for (int s = 0; s < kSeedCount; ++s) {
    for (auto sign : {od::ExtremistSign::Positive, od::ExtremistSign::Negative}) {
      auto cfg = ozic_experiment(sign);
      cfg.seed = static_cast<std::uint64_t>(s);
      cfg.shift_tick = cfg.total_ticks() / 2;
      const auto out = session::run_experiment(cfg);
      const double pre = mean_price(out, 0, *cfg.shift_tick);
      const double post = mean_price(out, *cfg.shift_tick, cfg.total_ticks());
      if (sign == od::ExtremistSign::Positive) down += post < pre;
      else up += post > pre;
    }
  }
  return {down >= 19 && up >= 19,
          fmt("positive->negative fell in %d/%d, negative->positive rose in %d/%d, need >= 19 each",
              down, kSeedCount, up, kSeedCount)};
}

bool is_hump(const std::vector<std::optional<double>>& means) {
  const std::size_t T = means.size();
  for (const auto& m : means)
    if (!m) return false;
  std::size_t peak = 0;
  for (std::size_t k = 1; k < T; ++k)
    if (*means[k] > *means[peak]) peak = k;
  const double pv = *means[peak];
  if (peak == 0 || peak == T - 1) return false;  // strictly inside (1, T)
  if (!(*means[T - 1] < pv)) return false;
  for (std::size_t k = peak + 1; k < T; ++k)
    if (*means[k] - *means[k - 1] > 0.05 * pv) return false;
  return true;
}

Outcome nzi_hump() {
  session::ExperimentConfig cfg;
  cfg.strategy = traders::Strategy::NZI;
  int humps = 0;
  int peak_hist[11] = {};
  for (int s = 0; s < kSeedCount; ++s) {
    cfg.seed = static_cast<std::uint64_t>(s);
    const auto means = session::run_experiment(cfg).period_means();
    humps += is_hump(means);
    try {
      const auto f = metrics::price_path_features(means);
      if (f.peak_period <= 10) peak_hist[f.peak_period]++;
    } catch (const Error&) {
    }
  }
  std::string hist;
  for (int p = 1; p <= 10; ++p) hist += fmt("%s%d", p > 1 ? "," : "", peak_hist[p]);
  return {humps >= 18, fmt("hump in %d/%d seeds, need >= 18; peak-period counts p1..p10 = [%s]", humps, kSeedCount, hist.c_str())};
}

Outcome onzi_bubble() {
  int wins = 0;
  double pos_sum = 0.0;
  double neg_sum = 0.0;
  for (int s = 0; s < kSeedCount; ++s) {
    auto pos = ozic_experiment(od::ExtremistSign::Positive);
    auto neg = ozic_experiment(od::ExtremistSign::Negative);
    pos.strategy = neg.strategy = traders::Strategy::ONZI;
    pos.seed = neg.seed = static_cast<std::uint64_t>(s);
    const double pp = metrics::price_path_features(session::run_experiment(pos).period_means()).peak_value;
    const double np = metrics::price_path_features(session::run_experiment(neg).period_means()).peak_value;
    wins += pp > np;
    pos_sum += pp;
    neg_sum += np;
  }

  // Quote-level reduction: x = +1 against plain NZI in two market states.
  constexpr int n = 100'000;
  bool ks_ok = true;
  double worst = 0.0;
  const double crit = oracle::ks_critical(n, n);
  for (double p_prev : {0.0, 60.0}) {
    traders::MarketContext ctx;
    ctx.t = p_prev > 0.0 ? 4 : 1;
    ctx.p_prev = p_prev;
    traders::TraderState st;
    st.strategy = traders::Strategy::ONZI;
    st.role = traders::Role::Seller;
    st.inventory = 1;
    Rng ra(derive_seed(9, 1));
    Rng rb(derive_seed(9, 2));
    std::vector<double> a;
    std::vector<double> b;
    a.reserve(n);
    b.reserve(n);
    for (int k = 0; k < n; ++k) {
      a.push_back(*traders::onzi_quote(st, ctx, {1.0, 0.2}, ra));
      b.push_back(*traders::nzi_quote(st, ctx, rb));
    }
    const double d = oracle::ks_statistic(a, b);
    worst = std::max(worst, d);
    ks_ok = ks_ok && d < crit;
  }
  return {wins >= 19 && ks_ok,
          fmt("positive peak > negative peak in %d/%d pairs (mean peaks %.1f vs %.1f), need >= 19; "
              "KS D=%.4f vs critical %.4f",
              wins, kSeedCount, pos_sum / kSeedCount, neg_sum / kSeedCount, worst, crit)};
}

// ---------------------------------------------------------------- criterion 10

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  struct Spot {
    traders::Strategy strategy;
    od::Model model;
    double pe;
    bool shift;
  };
  const Spot spots[] = {
      {traders::Strategy::ZIC, od::Model::BC, 0.0, false},
      {traders::Strategy::OZIC, od::Model::RA, 0.5, true},
      {traders::Strategy::NZI, od::Model::RD, 0.0, false},
      {traders::Strategy::ONZI, od::Model::RA, 0.3, false},
      {traders::Strategy::OZIC, od::Model::RD, 0.2, true},
  };
  const auto root = std::filesystem::temp_directory_path() / "nms_acceptance_determinism";
  std::filesystem::remove_all(root);
  int identical = 0;
  int idx = 0;
  for (const auto& spot : spots) {
    session::ExperimentConfig cfg;
    cfg.strategy = spot.strategy;
    cfg.od.model = spot.model;
    cfg.od.pe = spot.pe;
    cfg.seed = 1000 + static_cast<std::uint64_t>(idx);
    if (spot.shift) cfg.shift_tick = cfg.total_ticks() / 2;
    const auto digest = config::config_digest(cfg);
    const auto a = root / fmt("spot%d_a", idx);
    const auto b = root / fmt("spot%d_b", idx);
    output::write_run(a, session::run_experiment(cfg), digest, cfg.seed);
    output::write_run(b, session::run_experiment(cfg), digest, cfg.seed);
    bool same = true;
    for (const char* f : {"trades.csv", "opinions.csv", "summary.csv", "manifest.json"})
      same = same && slurp(a / f) == slurp(b / f) && !slurp(a / f).empty();
    identical += same;
    ++idx;
  }
  std::filesystem::remove_all(root);
  return {identical == 5, fmt("%d/5 spot configurations byte-identical across reruns", identical)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "OD unit suite", 1.0, od_unit_suite},
      {2, "RA convergence modes", 60.0, ra_modes},
      {3, "RD extremist-free emergence", 60.0, rd_emergence},
      {4, "Matching-engine oracle", 10.0, matching_oracle},
      {5, "ZIC market efficiency", 120.0, zic_efficiency},
      {6, "OZIC opinion-price ordering", 120.0, ozic_ordering},
      {7, "OZIC regime shift", 120.0, ozic_shift},
      {8, "NZI hump", 120.0, nzi_hump},
      {9, "ONZI opinion-scaled bubble", 180.0, onzi_bubble},
      {10, "Determinism", 60.0, determinism},
  };

  std::set<int> selected;
  for (int k = 1; k < argc; ++k) selected.insert(std::atoi(argv[k]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.contains(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = c.check();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_seconds;
    const bool pass = r.ok && in_time;
    failed += !pass;
    std::printf("%s  %2d  %-30s %s [%.2fs, budget %.0fs%s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                r.detail.c_str(), secs, c.budget_seconds, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
