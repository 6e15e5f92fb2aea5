#include "mvbid/bid_log.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace mvbid {

namespace {

std::string field_error(const char* field, double value, const char* bounds) {
  std::ostringstream os;
  os << field << "=" << value << " out of bounds " << bounds;
  return os.str();
}

}  // namespace

void validate(const Opportunity& opp) {
  auto where = [&](const std::string& msg) {
    return DataError("opportunity " + std::to_string(opp.id) + ": " + msg);
  };
  if (opp.timestamp < 0 || opp.timestamp >= kSecondsPerDay)
    throw where(field_error("timestamp", opp.timestamp, "[0, 86400)"));
  if (!(opp.wp > 0.0) || !std::isfinite(opp.wp)) throw where(field_error("wp", opp.wp, "(0, inf)"));
  if (!(opp.ctr >= 0.0 && opp.ctr <= 1.0)) throw where(field_error("ctr", opp.ctr, "[0, 1]"));
  if (!(opp.cvr >= 0.0 && opp.cvr <= 1.0)) throw where(field_error("cvr", opp.cvr, "[0, 1]"));
}

BidLog::BidLog(std::vector<Opportunity> opportunities, std::string day_label)
    : opps_(std::move(opportunities)), day_label_(std::move(day_label)) {
  if (opps_.empty()) throw DataError("bid log is empty");
  for (const auto& o : opps_) validate(o);
  std::sort(opps_.begin(), opps_.end(), [](const Opportunity& a, const Opportunity& b) {
    return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.id < b.id;
  });
  std::vector<std::int64_t> ids;
  ids.reserve(opps_.size());
  for (const auto& o : opps_) ids.push_back(o.id);
  std::sort(ids.begin(), ids.end());
  auto dup = std::adjacent_find(ids.begin(), ids.end());
  if (dup != ids.end()) throw DataError("duplicate opportunity id " + std::to_string(*dup));
}

void validate(const CampaignSpec& spec) {
  if (!(spec.budget >= 0.0) || !std::isfinite(spec.budget))
    throw DataError("campaign " + spec.campaign_id + ": budget must be >= 0");
  if (!(spec.cpc_cap > 0.0) || !std::isfinite(spec.cpc_cap))
    throw DataError("campaign " + spec.campaign_id + ": cpc cap must be > 0");
  if (spec.step_seconds <= 0 || spec.num_steps <= 0 ||
      static_cast<long>(spec.step_seconds) * spec.num_steps != kSecondsPerDay)
    throw DataError("campaign " + spec.campaign_id +
                    ": step_seconds * num_steps must equal 86400");
}

LogFormat format_for(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  return (ext == ".jsonl" || ext == ".json") ? LogFormat::jsonl : LogFormat::csv;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view text, const std::string& column, std::size_t row) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw DataError("row " + std::to_string(row) + ": cannot parse column '" + column +
                    "' from '" + std::string(text) + "'");
  return value;
}

BidLog read_csv(std::istream& in, const ColumnMapping& schema, std::string day_label) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("missing CSV header");
  auto header = split_csv(line);
  auto column = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError("CSV header lacks column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_id = column(schema.id), c_ts = column(schema.timestamp),
                    c_wp = column(schema.wp), c_ctr = column(schema.ctr),
                    c_cvr = column(schema.cvr);

  std::vector<Opportunity> opps;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto cells = split_csv(line);
    if (cells.size() != header.size())
      throw DataError("row " + std::to_string(row) + ": expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(cells.size()));
    Opportunity o;
    o.id = parse_number<std::int64_t>(cells[c_id], schema.id, row);
    o.timestamp = parse_number<std::int32_t>(cells[c_ts], schema.timestamp, row);
    o.wp = parse_number<double>(cells[c_wp], schema.wp, row);
    o.ctr = parse_number<double>(cells[c_ctr], schema.ctr, row);
    o.cvr = parse_number<double>(cells[c_cvr], schema.cvr, row);
    try {
      validate(o);
    } catch (const DataError& e) {
      throw DataError("row " + std::to_string(row) + ": " + e.what());
    }
    opps.push_back(o);
  }
  return BidLog(std::move(opps), std::move(day_label));
}

BidLog read_jsonl(std::istream& in, const ColumnMapping& schema, std::string day_label) {
  std::vector<Opportunity> opps;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    Opportunity o;
    try {
      auto j = nlohmann::json::parse(line);
      o.id = j.at(schema.id).get<std::int64_t>();
      o.timestamp = j.at(schema.timestamp).get<std::int32_t>();
      o.wp = j.at(schema.wp).get<double>();
      o.ctr = j.at(schema.ctr).get<double>();
      o.cvr = j.at(schema.cvr).get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw DataError("row " + std::to_string(row) + ": " + e.what());
    }
    try {
      validate(o);
    } catch (const DataError& e) {
      throw DataError("row " + std::to_string(row) + ": " + e.what());
    }
    opps.push_back(o);
  }
  return BidLog(std::move(opps), std::move(day_label));
}

}  // namespace

BidLog read_log(std::istream& in, LogFormat format, const ColumnMapping& schema,
                std::string day_label) {
  return format == LogFormat::csv ? read_csv(in, schema, std::move(day_label))
                                  : read_jsonl(in, schema, std::move(day_label));
}

BidLog load_log(const std::filesystem::path& path, const ColumnMapping& schema,
                std::string day_label) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open bid log " + path.string());
  return read_log(in, format_for(path), schema, std::move(day_label));
}

std::string format_real(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_log(std::ostream& out, const BidLog& log, LogFormat format) {
  if (format == LogFormat::csv) {
    out << "id,timestamp,wp,ctr,cvr\n";
    for (const auto& o : log)
      out << o.id << ',' << o.timestamp << ',' << format_real(o.wp) << ','
          << format_real(o.ctr) << ',' << format_real(o.cvr) << '\n';
  } else {
    for (const auto& o : log)
      out << "{\"id\":" << o.id << ",\"timestamp\":" << o.timestamp
          << ",\"wp\":" << format_real(o.wp) << ",\"ctr\":" << format_real(o.ctr)
          << ",\"cvr\":" << format_real(o.cvr) << "}\n";
  }
}

void write_log(const std::filesystem::path& path, const BidLog& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write bid log " + path.string());
  write_log(out, log, format_for(path));
}

LogSummary summarize_log(const BidLog& log, int step_seconds, int num_steps) {
  LogSummary s;
  s.count = log.size();
  s.step_volumes.assign(static_cast<std::size_t>(num_steps), 0);
  double ctr = 0.0, cvr = 0.0, wp = 0.0;
  for (const auto& o : log) {
    ctr += o.ctr;
    cvr += o.cvr;
    wp += o.wp;
    int t = std::min(o.timestamp / step_seconds, num_steps - 1);
    ++s.step_volumes[static_cast<std::size_t>(t)];
  }
  if (s.count > 0) {
    const double n = static_cast<double>(s.count);
    s.mean_ctr = ctr / n;
    s.mean_cvr = cvr / n;
    s.mean_wp = wp / n;
  }
  return s;
}

}  // namespace mvbid
