#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mvbid/types.hpp"

namespace mvbid {

enum class LogFormat { csv, jsonl };

/// Column (CSV header) or key (JSONL) names for each Opportunity field.
struct ColumnMapping {
  std::string id = "id";
  std::string timestamp = "timestamp";
  std::string wp = "wp";
  std::string ctr = "ctr";
  std::string cvr = "cvr";
};

/// Format from the file extension: ".jsonl"/".json" is JSONL, anything else CSV.
LogFormat format_for(const std::filesystem::path& path);

BidLog read_log(std::istream& in, LogFormat format, const ColumnMapping& schema = {},
                std::string day_label = "");
BidLog load_log(const std::filesystem::path& path, const ColumnMapping& schema = {},
                std::string day_label = "");

/// Canonical output: shortest round-trip decimal for reals, header
/// `id,timestamp,wp,ctr,cvr` for CSV, one object per line for JSONL.
void write_log(std::ostream& out, const BidLog& log, LogFormat format);
void write_log(const std::filesystem::path& path, const BidLog& log);

/// Shortest decimal that parses back to the same double.
std::string format_real(double x);

struct LogSummary {
  std::size_t count = 0;
  double mean_ctr = 0.0;
  double mean_cvr = 0.0;
  double mean_wp = 0.0;
  std::vector<std::size_t> step_volumes;
};

LogSummary summarize_log(const BidLog& log, int step_seconds = 3600, int num_steps = 24);

}  // namespace mvbid
