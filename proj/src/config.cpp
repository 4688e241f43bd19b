#include "nms/config.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>

#include "nms/error.hpp"

namespace nms::config {

using nlohmann::json;
using session::ExperimentConfig;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(Errc::ConfigError, msg); }

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// Reads typed fields out of one JSON object and remembers which keys were
// consumed so leftovers can be reported as unknown.
class Section {
public:
  Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail(where("") + " must be an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key) && !obj_.at(key).is_null();
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return obj_.at(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_number()) fail(where(key) + " must be a number");
    return v.get<double>();
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (d == static_cast<double>(static_cast<std::int64_t>(d))) return static_cast<std::int64_t>(d);
    }
    fail(where(key) + " must be an integer");
  }

  std::int64_t integer_in(const std::string& key, std::int64_t fallback, std::int64_t lo,
                          std::int64_t hi) {
    const auto v = integer(key, fallback);
    if (v < lo || v > hi)
      fail(where(key) + " = " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
           std::to_string(hi) + "]");
    return v;
  }

  double number_in(const std::string& key, double fallback, double lo, double hi) {
    const double v = number(key, fallback);
    if (!(v >= lo && v <= hi))
      fail(where(key) + " = " + num(v) + " outside [" + num(lo) + ", " + num(hi) + "]");
    return v;
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_boolean()) fail(where(key) + " must be true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_string()) fail(where(key) + " must be a string");
    return v.get<std::string>();
  }

  std::pair<double, double> range(const std::string& key, std::pair<double, double> fallback) {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      fail(where(key) + " must be a [lo, hi] pair");
    return {v[0].get<double>(), v[1].get<double>()};
  }

  void reject_unknown() const {
    for (const auto& [key, value] : obj_.items())
      if (!seen_.contains(key)) fail("unknown key " + where(key));
  }

  std::string where(const std::string& key) const {
    if (path_.empty()) return key;
    return key.empty() ? path_ : path_ + "." + key;
  }

private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_od(Section s, od::OdParams& p) {
  const auto model = s.string("model", std::string(od::to_string(p.model)));
  if (model == "bc") p.model = od::Model::BC;
  else if (model == "ra") p.model = od::Model::RA;
  else if (model == "rd") p.model = od::Model::RD;
  else fail(s.where("model") + " must be one of bc, ra, rd");

  p.mu = s.number("mu", p.mu);
  if (!(p.mu > 0.0 && p.mu <= 0.5)) fail(s.where("mu") + " outside (0, 0.5]");
  p.bc_threshold = s.number_in("bc_threshold", p.bc_threshold, 0.0, 1e9);
  p.lambda = s.number_in("lambda", p.lambda, 0.0, 1.0);
  p.pe = s.number_in("pe", p.pe, 0.0, 1.0);
  const auto [lo, hi] = s.range("uncertainty", {p.u_lo, p.u_hi});
  if (!(lo > 0.0 && lo <= hi)) fail(s.where("uncertainty") + " must satisfy 0 < lo <= hi");
  p.u_lo = lo;
  p.u_hi = hi;
  p.extreme_threshold = s.number("extreme_threshold", p.extreme_threshold);
  if (!(p.extreme_threshold > 0.0 && p.extreme_threshold <= 1.0))
    fail(s.where("extreme_threshold") + " outside (0, 1]");
  const auto sign = s.string("extremist_sign", std::string(od::to_string(p.extremist_sign)));
  if (sign == "split") p.extremist_sign = od::ExtremistSign::Split;
  else if (sign == "positive") p.extremist_sign = od::ExtremistSign::Positive;
  else if (sign == "negative") p.extremist_sign = od::ExtremistSign::Negative;
  else fail(s.where("extremist_sign") + " must be one of split, positive, negative");
  s.reject_unknown();
}

void read_market(Section s, session::MarketParams& m) {
  m.periods = static_cast<int>(s.integer_in("periods", m.periods, 1, 1'000'000));
  m.period_seconds =
      static_cast<int>(s.integer_in("period_seconds", m.period_seconds, 1, 1'000'000'000));
  if (s.has("dividends")) {
    const json& v = s.raw("dividends");
    if (!v.is_array() || v.empty()) fail(s.where("dividends") + " must be a non-empty array");
    m.dividends.clear();
    for (const auto& d : v) {
      if (!d.is_number() || d.get<double>() < 0.0)
        fail(s.where("dividends") + " entries must be numbers >= 0");
      m.dividends.push_back(d.get<double>());
    }
  }
  if (s.has("pay_dividends")) {
    const json& v = s.raw("pay_dividends");
    if (v.is_boolean()) m.pay_dividends = v.get<bool>();
    else if (v.is_string() && v.get<std::string>() == "auto") m.pay_dividends.reset();
    else fail(s.where("pay_dividends") + " must be true, false or \"auto\"");
  }
  m.k = s.number("k", m.k);
  if (!(m.k > 0.0)) fail(s.where("k") + " must be > 0");
  m.alpha = s.number("alpha", m.alpha);
  if (!(m.alpha > 0.0 && m.alpha < 1.0)) fail(s.where("alpha") + " outside (0, 1)");
  m.phi = s.number("phi", m.phi);
  if (!(m.phi >= 0.0 && m.phi < 0.5 / m.periods))
    fail(s.where("phi") + " outside [0, 0.5/periods)");
  m.buyer_prob_roles = s.boolean("buyer_prob_roles", m.buyer_prob_roles);
  m.final_value = s.number_in("final_value", m.final_value, 0.0, 1e12);
  m.price_min = s.integer_in("price_min", m.price_min, 0, 1'000'000'000);
  m.price_max = s.integer_in("price_max", m.price_max, m.price_min, 1'000'000'000);
  const auto [llo, lhi] = s.range("limit_range", {static_cast<double>(m.limit_lo),
                                                  static_cast<double>(m.limit_hi)});
  m.limit_lo = static_cast<lob::Price>(llo);
  m.limit_hi = static_cast<lob::Price>(lhi);
  if (static_cast<double>(m.limit_lo) != llo || static_cast<double>(m.limit_hi) != lhi)
    fail(s.where("limit_range") + " must hold integers");
  m.endowment_units = s.integer_in("endowment_units", m.endowment_units, 0, 1'000'000'000);
  if (s.has("buyer_units")) m.buyer_units = s.integer_in("buyer_units", 0, 0, 1'000'000'000);
  if (s.has("seller_units")) m.seller_units = s.integer_in("seller_units", 0, 0, 1'000'000'000);
  m.endowment_value = s.number_in("endowment_value", m.endowment_value, 0.0, 1e15);
  s.reject_unknown();
}

void read_session(Section s, ExperimentConfig& cfg) {
  cfg.n_buyers = static_cast<std::size_t>(s.integer_in("buyers", static_cast<std::int64_t>(cfg.n_buyers), 0, 1'000'000));
  cfg.n_sellers = static_cast<std::size_t>(s.integer_in("sellers", static_cast<std::int64_t>(cfg.n_sellers), 0, 1'000'000));
  cfg.interactions_per_tick =
      static_cast<int>(s.integer_in("interactions_per_tick", cfg.interactions_per_tick, 0, 1'000'000));
  cfg.opinion_sample_every =
      static_cast<int>(s.integer_in("opinion_sample_every", cfg.opinion_sample_every, 1, 1'000'000'000));
  if (s.has("shift_tick")) {
    const json& v = s.raw("shift_tick");
    if (v.is_string() && v.get<std::string>() == "mid") cfg.shift_tick = cfg.total_ticks() / 2;
    else if (v.is_number_integer()) cfg.shift_tick = v.get<std::int64_t>();
    else fail(s.where("shift_tick") + " must be an integer tick, \"mid\" or null");
  }
  s.reject_unknown();
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

ExperimentConfig from_json(const json& doc) {
  Section top(doc, "");
  ExperimentConfig cfg;

  if (!top.has("strategy")) fail("missing required key strategy");
  const auto name = top.string("strategy", "");
  const auto strategy = traders::parse_strategy(name);
  if (!strategy) fail("strategy must be one of zic, ozic, nzi, onzi (got \"" + name + "\")");
  cfg.strategy = *strategy;

  if (top.has("seed")) {
    const json& v = top.raw("seed");
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
      fail("seed must be a non-negative integer");
    cfg.seed = v.get<std::uint64_t>();
  }
  cfg.replications = static_cast<int>(top.integer_in("replications", cfg.replications, 1, 100'000));

  // Market first: the "mid" shift tick depends on the session length.
  if (top.has("market")) read_market(Section(top.raw("market"), "market"), cfg.market);
  if (top.has("od")) read_od(Section(top.raw("od"), "od"), cfg.od);
  if (top.has("session")) read_session(Section(top.raw("session"), "session"), cfg);
  top.reject_unknown();

  cfg.validate();
  return cfg;
}

json to_json(const ExperimentConfig& cfg) {
  const auto& m = cfg.market;
  const auto& p = cfg.od;
  json market = {
      {"periods", m.periods},
      {"period_seconds", m.period_seconds},
      {"dividends", m.dividends},
      {"k", m.k},
      {"alpha", m.alpha},
      {"phi", m.phi},
      {"buyer_prob_roles", m.buyer_prob_roles},
      {"final_value", m.final_value},
      {"price_min", m.price_min},
      {"price_max", m.price_max},
      {"limit_range", {m.limit_lo, m.limit_hi}},
      {"endowment_units", m.endowment_units},
      {"buyer_units", m.buyer_units ? json(*m.buyer_units) : json(nullptr)},
      {"seller_units", m.seller_units ? json(*m.seller_units) : json(nullptr)},
      {"endowment_value", m.endowment_value},
  };
  market["pay_dividends"] = m.pay_dividends ? json(*m.pay_dividends) : json("auto");
  json od = {
      {"model", od::to_string(p.model)},
      {"mu", p.mu},
      {"bc_threshold", p.bc_threshold},
      {"lambda", p.lambda},
      {"pe", p.pe},
      {"uncertainty", {p.u_lo, p.u_hi}},
      {"extreme_threshold", p.extreme_threshold},
      {"extremist_sign", od::to_string(p.extremist_sign)},
  };
  json sess = {
      {"buyers", cfg.n_buyers},
      {"sellers", cfg.n_sellers},
      {"interactions_per_tick", cfg.interactions_per_tick},
      {"opinion_sample_every", cfg.opinion_sample_every},
      {"shift_tick", cfg.shift_tick ? json(*cfg.shift_tick) : json(nullptr)},
  };
  return json{{"strategy", traders::to_string(cfg.strategy)},
              {"seed", cfg.seed},
              {"replications", cfg.replications},
              {"market", market},
              {"od", od},
              {"session", sess}};
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    fail("malformed config " + path.string() + ": " + e.what());
  }
  return from_json(doc);
}

void apply_override(json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0)
    fail("override must look like key=value (got \"" + std::string(assignment) + "\")");
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));

  json value;
  try {
    value = json::parse(text);
  } catch (const json::exception&) {
    value = text;
  }

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) fail("override key \"" + key + "\" has an empty segment");
    if (!node->is_object()) fail("override key \"" + key + "\" descends into a non-object");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

std::string config_digest(const ExperimentConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a64(to_json(cfg).dump()));
  return buf;
}

}  // namespace nms::config
