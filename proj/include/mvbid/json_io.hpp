#pragma once

#include <filesystem>
#include <iosfwd>

#include <json.hpp>

#include "mvbid/dual.hpp"
#include "mvbid/experiment.hpp"
#include "mvbid/synthetic.hpp"

namespace mvbid {

using nlohmann::json;

/// Bumped whenever a CSV/JSONL/JSON output layout changes.
inline constexpr int kSchemaVersion = 1;

// Readers require every field to be present (SyntheticConfig, CampaignSpec
// budget/cap, DualSolution). Missing or mistyped fields raise DataError.
void to_json(json& j, const BetaShape& v);
void from_json(const json& j, BetaShape& v);
void to_json(json& j, const Drift& v);
void from_json(const json& j, Drift& v);
void to_json(json& j, const SyntheticConfig& v);
void from_json(const json& j, SyntheticConfig& v);
void to_json(json& j, const CampaignSpec& v);
void from_json(const json& j, CampaignSpec& v);
void to_json(json& j, const DualSolution& v);
void from_json(const json& j, DualSolution& v);
void to_json(json& j, const PidGains& v);
void from_json(const json& j, PidGains& v);
void to_json(json& j, const MpcWeights& v);
void from_json(const json& j, MpcWeights& v);
void to_json(json& j, const PidLimits& v);
void from_json(const json& j, PidLimits& v);
void to_json(json& j, const ControlConfig& v);
void from_json(const json& j, ControlConfig& v);
void to_json(json& j, const TunedConfig& v);
void from_json(const json& j, TunedConfig& v);
void to_json(json& j, const SearchSpace& v);
void from_json(const json& j, SearchSpace& v);
void to_json(json& j, const BatchConfig& v);
void from_json(const json& j, BatchConfig& v);
void to_json(json& j, const CampaignResult& v);
void to_json(json& j, const StrategySummary& v);

/// Parses a JSON file; DataError on I/O or syntax problems.
json read_json_file(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline.
void write_json_file(const std::filesystem::path& path, const json& j);

/// strategy,CPC_ratio,Value_ratio
void write_report_csv(std::ostream& out, const BatchReport& report);
/// One CampaignResult object per line.
void write_campaigns_jsonl(std::ostream& out, const BatchReport& report);

/// Converts nlohmann exceptions raised inside fn into DataError.
template <typename T>
T parse_as(const json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw DataError(std::string(what) + ": " + e.what());
  }
}

}  // namespace mvbid
