#include "nms/output.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nms/error.hpp"

namespace nms::output {

namespace fs = std::filesystem;

namespace {

constexpr const char* kTradesHeader = "tick,period,price,quantity,buyer_id,seller_id";
constexpr const char* kOpinionsHeader = "tick,agent_id,value,uncertainty";
constexpr const char* kSummaryHeader =
    "period,mean_price,trade_count,default_value,half_k_default_value,y_metric_final,efficiency";

[[noreturn]] void io_fail(const std::string& msg) { throw Error(Errc::IoError, msg); }

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) io_fail("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) io_fail("write failed for " + path.string());
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) return cells;
    start = comma + 1;
  }
}

template <class T>
T parse_num(const std::string& cell, const fs::path& path) {
  T v{};
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size())
    io_fail("bad number \"" + cell + "\" in " + path.string());
  return v;
}

std::optional<double> parse_opt(const std::string& cell, const fs::path& path) {
  if (cell.empty()) return std::nullopt;
  return parse_num<double>(cell, path);
}

// Returns data rows of a CSV after checking header and column count.
std::vector<std::vector<std::string>> read_csv(const fs::path& path, const char* header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != header) io_fail("unexpected header in " + path.string());
  const auto width = split(header).size();
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    auto cells = split(line);
    if (cells.size() != width) io_fail("wrong column count in " + path.string());
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

std::string format_fixed9(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 9);
  if (ec != std::errc()) io_fail("cannot format value");
  std::string s(buf, ptr);
  if (s == "-0.000000000") s.erase(0, 1);
  return s;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) io_fail("cannot format value");
  return std::string(buf, ptr);
}

std::vector<TradeRow> trade_rows(const session::RunOutput& run) {
  std::vector<TradeRow> rows;
  rows.reserve(run.tape.size());
  for (const auto& rec : run.tape)
    rows.push_back({rec.trade.time, rec.period, rec.trade.price, rec.trade.quantity,
                    rec.trade.buyer_id, rec.trade.seller_id});
  return rows;
}

std::vector<OpinionRow> opinion_rows(const session::RunOutput& run) {
  std::vector<OpinionRow> rows;
  rows.reserve(run.opinion_series.size());
  for (const auto& s : run.opinion_series)
    rows.push_back({s.tick, s.agent_id, s.value, s.uncertainty});
  return rows;
}

std::vector<SummaryRow> summary_rows(const session::RunOutput& run) {
  std::optional<double> eff;
  if (run.final_metrics.efficiency) eff = run.final_metrics.efficiency->efficiency;
  std::vector<SummaryRow> rows;
  for (const auto& p : run.period_summaries)
    rows.push_back({p.period, p.mean_price, p.trade_count, p.default_value, p.half_k_default_value,
                    run.final_metrics.y, eff});
  return rows;
}

void write_trades(const fs::path& path, const std::vector<TradeRow>& rows) {
  auto out = open_out(path);
  out << kTradesHeader << '\n';
  for (const auto& r : rows)
    out << r.tick << ',' << r.period << ',' << r.price << ',' << r.quantity << ',' << r.buyer_id
        << ',' << r.seller_id << '\n';
  finish(out, path);
}

void write_opinions(const fs::path& path, const std::vector<OpinionRow>& rows) {
  auto out = open_out(path);
  out << kOpinionsHeader << '\n';
  for (const auto& r : rows)
    out << r.tick << ',' << r.agent_id << ',' << format_fixed9(r.value) << ','
        << format_fixed9(r.uncertainty) << '\n';
  finish(out, path);
}

void write_summary(const fs::path& path, const std::vector<SummaryRow>& rows) {
  auto out = open_out(path);
  out << kSummaryHeader << '\n';
  for (const auto& r : rows)
    out << r.period << ',' << opt(r.mean_price) << ',' << r.trade_count << ','
        << format_double(r.default_value) << ',' << format_double(r.half_k_default_value) << ','
        << opt(r.y_metric_final) << ',' << opt(r.efficiency) << '\n';
  finish(out, path);
}

std::vector<TradeRow> read_trades(const fs::path& path) {
  std::vector<TradeRow> rows;
  for (const auto& c : read_csv(path, kTradesHeader))
    rows.push_back({parse_num<lob::Tick>(c[0], path), parse_num<int>(c[1], path),
                    parse_num<lob::Price>(c[2], path), parse_num<lob::Qty>(c[3], path),
                    parse_num<lob::TraderId>(c[4], path), parse_num<lob::TraderId>(c[5], path)});
  return rows;
}

std::vector<OpinionRow> read_opinions(const fs::path& path) {
  std::vector<OpinionRow> rows;
  for (const auto& c : read_csv(path, kOpinionsHeader))
    rows.push_back({parse_num<lob::Tick>(c[0], path), parse_num<std::size_t>(c[1], path),
                    parse_num<double>(c[2], path), parse_num<double>(c[3], path)});
  return rows;
}

std::vector<SummaryRow> read_summary(const fs::path& path) {
  std::vector<SummaryRow> rows;
  for (const auto& c : read_csv(path, kSummaryHeader))
    rows.push_back({parse_num<int>(c[0], path), parse_opt(c[1], path),
                    parse_num<std::size_t>(c[2], path), parse_num<double>(c[3], path),
                    parse_num<double>(c[4], path), parse_opt(c[5], path), parse_opt(c[6], path)});
  return rows;
}

RunManifest write_run(const fs::path& dir, const session::RunOutput& run,
                      const std::string& config_digest, std::uint64_t seed) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) io_fail("cannot create " + dir.string() + ": " + ec.message());

  RunManifest m{config_digest, seed, dir / "trades.csv", dir / "opinions.csv",
                dir / "summary.csv", dir / "manifest.json"};
  // A stale manifest must not vouch for half-written CSVs.
  fs::remove(m.manifest, ec);

  write_trades(m.trades, trade_rows(run));
  write_opinions(m.opinions, opinion_rows(run));
  write_summary(m.summary, summary_rows(run));

  const nlohmann::json doc = {{"config_digest", config_digest},
                              {"seed", seed},
                              {"trades", m.trades.filename().string()},
                              {"opinions", m.opinions.filename().string()},
                              {"summary", m.summary.filename().string()},
                              {"manifest", m.manifest.filename().string()}};
  const auto tmp = dir / "manifest.json.tmp";
  {
    auto out = open_out(tmp);
    out << doc.dump(2) << '\n';
    finish(out, tmp);
  }
  fs::rename(tmp, m.manifest, ec);
  if (ec) io_fail("cannot finalize " + m.manifest.string() + ": " + ec.message());
  return m;
}

RunManifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) io_fail("cannot open " + path.string());
  try {
    const auto doc = nlohmann::json::parse(in);
    const auto dir = path.parent_path();
    return {doc.at("config_digest").get<std::string>(), doc.at("seed").get<std::uint64_t>(),
            dir / doc.at("trades").get<std::string>(), dir / doc.at("opinions").get<std::string>(),
            dir / doc.at("summary").get<std::string>(), path};
  } catch (const nlohmann::json::exception& e) {
    io_fail("malformed manifest " + path.string() + ": " + e.what());
  }
}

}  // namespace nms::output
