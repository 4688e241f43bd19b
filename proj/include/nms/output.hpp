#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nms/session.hpp"

namespace nms::output {

struct TradeRow {
  lob::Tick tick{0};
  int period{0};
  lob::Price price{0};
  lob::Qty quantity{0};
  lob::TraderId buyer_id{0};
  lob::TraderId seller_id{0};
  bool operator==(const TradeRow&) const = default;
};

struct OpinionRow {
  lob::Tick tick{0};
  std::size_t agent_id{0};
  double value{0.0};
  double uncertainty{0.0};
  bool operator==(const OpinionRow&) const = default;
};

struct SummaryRow {
  int period{0};
  std::optional<double> mean_price;
  std::size_t trade_count{0};
  double default_value{0.0};
  double half_k_default_value{0.0};
  std::optional<double> y_metric_final;
  std::optional<double> efficiency;
  bool operator==(const SummaryRow&) const = default;
};

struct RunManifest {
  std::string config_digest;
  std::uint64_t seed{0};
  std::filesystem::path trades;
  std::filesystem::path opinions;
  std::filesystem::path summary;
  std::filesystem::path manifest;
};

// Fixed 9-decimal text used for opinion values.
std::string format_fixed9(double v);
// Shortest text that parses back to the same double.
std::string format_double(double v);

std::vector<TradeRow> trade_rows(const session::RunOutput& run);
std::vector<OpinionRow> opinion_rows(const session::RunOutput& run);
// The final y metric and efficiency are repeated on every row.
std::vector<SummaryRow> summary_rows(const session::RunOutput& run);

void write_trades(const std::filesystem::path& path, const std::vector<TradeRow>& rows);
void write_opinions(const std::filesystem::path& path, const std::vector<OpinionRow>& rows);
void write_summary(const std::filesystem::path& path, const std::vector<SummaryRow>& rows);

std::vector<TradeRow> read_trades(const std::filesystem::path& path);
std::vector<OpinionRow> read_opinions(const std::filesystem::path& path);
std::vector<SummaryRow> read_summary(const std::filesystem::path& path);

// Writes the three CSVs and then manifest.json into dir (created if needed).
// Throws Errc::IoError on any filesystem failure.
RunManifest write_run(const std::filesystem::path& dir, const session::RunOutput& run,
                      const std::string& config_digest, std::uint64_t seed);

RunManifest read_manifest(const std::filesystem::path& path);

}  // namespace nms::output
