#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nms/cli.hpp"
#include "nms/output.hpp"

using namespace nms;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Workspace {
  fs::path root = fs::temp_directory_path() / "nms_cli_test";
  Workspace() {
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Workspace() { fs::remove_all(root); }

  fs::path write_config(const std::string& name, const std::string& text) const {
    const auto p = root / name;
    std::ofstream(p) << text;
    return p;
  }
};

constexpr const char* kSmall = R"({
  "strategy": "ozic", "seed": 3,
  "session": {"buyers": 6, "sellers": 6},
  "od": {"pe": 0.5},
  "market": {"periods": 2, "period_seconds": 40}
})";

int run_binary(const std::string& args, const char* env = nullptr) {
  const char* exe = std::getenv("NMS_CLI");
  REQUIRE_MESSAGE(exe != nullptr, "NMS_CLI must point at the nms executable");
  std::string cmd;
  if (env) cmd += std::string(env) + " ";
  cmd += std::string(exe) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("run writes per-replication outputs with manifests") {
  Workspace ws;
  cli::RunRequest req;
  req.config_path = ws.write_config("c.json", kSmall);
  req.out_dir = ws.root / "out";
  req.replications = 2;
  CHECK(cli::run(req) == cli::kOk);
  for (const char* rep : {"rep_000", "rep_001"}) {
    const auto m = output::read_manifest(req.out_dir / rep / "manifest.json");
    CHECK(fs::exists(m.trades));
    CHECK(fs::exists(m.opinions));
    CHECK(fs::exists(m.summary));
  }
  CHECK(output::read_manifest(req.out_dir / "rep_000" / "manifest.json").seed == 3);
  CHECK(output::read_manifest(req.out_dir / "rep_001" / "manifest.json").seed == 4);
}

TEST_CASE("reruns are byte-identical and the seed changes the digest") {
  Workspace ws;
  cli::RunRequest req;
  req.config_path = ws.write_config("c.json", kSmall);
  req.out_dir = ws.root / "a";
  CHECK(cli::run(req) == cli::kOk);
  req.out_dir = ws.root / "b";
  CHECK(cli::run(req) == cli::kOk);
  for (const char* f : {"trades.csv", "opinions.csv", "summary.csv", "manifest.json"})
    CHECK(slurp(ws.root / "a/rep_000" / f) == slurp(ws.root / "b/rep_000" / f));

  req.out_dir = ws.root / "c";
  req.seed = 99;
  CHECK(cli::run(req) == cli::kOk);
  const auto base = output::read_manifest(ws.root / "a/rep_000/manifest.json");
  const auto seeded = output::read_manifest(ws.root / "c/rep_000/manifest.json");
  CHECK(seeded.seed == 99);
  CHECK(seeded.config_digest != base.config_digest);
}

TEST_CASE("seed precedence: config < env < flag") {
  Workspace ws;
  cli::RunRequest req;
  req.config_path = ws.write_config("c.json", kSmall);
  req.out_dir = ws.root / "env";
  req.env_seed = "41";
  CHECK(cli::run(req) == cli::kOk);
  CHECK(output::read_manifest(req.out_dir / "rep_000/manifest.json").seed == 41);
  req.out_dir = ws.root / "flag";
  req.seed = 7;
  CHECK(cli::run(req) == cli::kOk);
  CHECK(output::read_manifest(req.out_dir / "rep_000/manifest.json").seed == 7);
  req.env_seed = "oops";
  req.seed.reset();
  CHECK(cli::run(req) == cli::kConfigError);
}

TEST_CASE("trades.csv rows equal the in-memory tape length") {
  Workspace ws;
  cli::RunRequest req;
  req.config_path = ws.write_config("c.json", kSmall);
  req.out_dir = ws.root / "out";
  CHECK(cli::run(req) == cli::kOk);
  auto cfg = session::ExperimentConfig{};
  cfg.strategy = traders::Strategy::OZIC;
  cfg.seed = 3;
  cfg.n_buyers = 6;
  cfg.n_sellers = 6;
  cfg.od.pe = 0.5;
  cfg.market.periods = 2;
  cfg.market.period_seconds = 40;
  const auto run = session::run_experiment(cfg);
  CHECK(output::read_trades(req.out_dir / "rep_000/trades.csv").size() == run.tape.size());
}

TEST_CASE("overrides and config errors") {
  Workspace ws;
  cli::RunRequest req;
  req.config_path = ws.write_config("c.json", kSmall);
  req.out_dir = ws.root / "out";
  req.overrides = {"od.pe=1.5"};
  CHECK(cli::run(req) == cli::kConfigError);
  req.overrides = {"od.model=rd", "session.interactions_per_tick=3"};
  CHECK(cli::run(req) == cli::kOk);
  req.config_path = ws.root / "missing.json";
  req.overrides.clear();
  CHECK(cli::run(req) == cli::kConfigError);
}

TEST_CASE("binary exit codes") {
  Workspace ws;
  const auto cfg = ws.write_config("c.json", kSmall);
  const auto bad = ws.write_config("bad.json", R"({"strategy": "zic", "od": {"pe": 1.5}})");
  const auto out = (ws.root / "out").string();
  CHECK(run_binary("--config " + cfg.string() + " --out " + out) == 0);
  CHECK(fs::exists(ws.root / "out/rep_000/manifest.json"));
  CHECK(run_binary("--config " + bad.string() + " --out " + out) == 2);
  CHECK(run_binary("--out " + out) == 2);
  CHECK(run_binary("--config " + cfg.string() + " --set od.pe=0.25 --seed 5 --replications 2 --out " + out) == 0);
  CHECK(output::read_manifest(ws.root / "out/rep_001/manifest.json").seed == 6);
  CHECK(run_binary("--config " + cfg.string() + " --out " + out, "NMS_SEED=12") == 0);
  CHECK(output::read_manifest(ws.root / "out/rep_000/manifest.json").seed == 12);

  // Output directory under a regular file cannot be created.
  std::ofstream(ws.root / "blocker") << "x";
  CHECK(run_binary("--config " + cfg.string() + " --out " + (ws.root / "blocker/sub").string()) == 3);
}
