#include "nms/cli.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nms/config.hpp"
#include "nms/error.hpp"
#include "nms/output.hpp"

namespace nms::cli {

namespace {

std::string rep_dir_name(int r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "rep_%03d", r);
  return buf;
}

std::uint64_t parse_env_seed(const std::string& text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw Error(Errc::ConfigError, "NMS_SEED must be a non-negative integer (got \"" + text + "\")");
  return v;
}

session::ExperimentConfig resolve(const RunRequest& req) {
  std::ifstream in(req.config_path);
  if (!in) throw Error(Errc::ConfigError, "cannot open config file " + req.config_path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ConfigError, "malformed config " + req.config_path.string() + ": " + e.what());
  }
  for (const auto& o : req.overrides) config::apply_override(doc, o);
  auto cfg = config::from_json(doc);
  if (req.env_seed) cfg.seed = parse_env_seed(*req.env_seed);
  if (req.seed) cfg.seed = *req.seed;
  if (req.replications) cfg.replications = *req.replications;
  cfg.validate();
  return cfg;
}

}  // namespace

int run(const RunRequest& req) {
  session::ExperimentConfig cfg;
  try {
    cfg = resolve(req);
  } catch (const Error& e) {
    std::cerr << "nms: " << e.what() << '\n';
    return e.code() == Errc::IoError ? kRuntimeError : kConfigError;
  }

  try {
    const auto runs = session::run_replications(cfg);
    for (std::size_t r = 0; r < runs.size(); ++r) {
      auto rep_cfg = cfg;
      rep_cfg.seed = cfg.seed + r;
      rep_cfg.replications = 1;
      output::write_run(req.out_dir / rep_dir_name(static_cast<int>(r)), runs[r],
                        config::config_digest(rep_cfg), rep_cfg.seed);
    }
  } catch (const std::exception& e) {
    std::cerr << "nms: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}

int main(int argc, char** argv) {
  CLI::App app{"Opinionated-trader market simulator"};
  RunRequest req;
  std::string config_path;
  std::string out_dir = req.out_dir.string();
  std::uint64_t seed = 0;
  int replications = 1;

  app.add_option("--config", config_path, "Experiment config (JSON)")->required();
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "Seed (overrides config and NMS_SEED)");
  auto* reps_opt =
      app.add_option("--replications", replications, "Number of replications")->check(CLI::PositiveNumber);
  app.add_option("--set", req.overrides, "Override a config field, e.g. od.pe=0.25")
      ->allow_extra_args(false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  req.config_path = config_path;
  req.out_dir = out_dir;
  if (*seed_opt) req.seed = seed;
  if (*reps_opt) req.replications = replications;
  if (const char* env = std::getenv("NMS_SEED"); env != nullptr && *env != '\0') req.env_seed = env;
  return run(req);
}

}  // namespace nms::cli
