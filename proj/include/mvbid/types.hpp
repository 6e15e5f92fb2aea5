#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mvbid {

// Error categories map one-to-one onto CLI exit codes.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kSecondsPerDay = 86400;

/// One logged bid request.
struct Opportunity {
  std::int64_t id = 0;
  std::int32_t timestamp = 0;  // seconds since the start of the campaign day
  double wp = 0.0;             // winning price
  double ctr = 0.0;
  double cvr = 0.0;  // conditioned on a click

  /// Expected conversions if won.
  double value() const { return ctr * cvr; }

  bool operator==(const Opportunity&) const = default;
};

/// Throws DataError naming the offending field.
void validate(const Opportunity& opp);

/// Validated, (timestamp, id)-sorted sequence of opportunities for one day.
class BidLog {
 public:
  BidLog() = default;
  /// Validates every opportunity, sorts by (timestamp, id) and rejects
  /// empty input or duplicate ids.
  BidLog(std::vector<Opportunity> opportunities, std::string day_label);

  const std::vector<Opportunity>& opportunities() const { return opps_; }
  const std::string& day_label() const { return day_label_; }
  std::size_t size() const { return opps_.size(); }
  bool empty() const { return opps_.empty(); }
  auto begin() const { return opps_.begin(); }
  auto end() const { return opps_.end(); }
  const Opportunity& operator[](std::size_t i) const { return opps_[i]; }

  bool operator==(const BidLog&) const = default;

 private:
  std::vector<Opportunity> opps_;
  std::string day_label_;
};

struct CampaignSpec {
  std::string campaign_id = "campaign";
  double budget = 0.0;   // B
  double cpc_cap = 0.0;  // C
  int step_seconds = 3600;
  int num_steps = 24;

  int step_of(std::int32_t timestamp) const {
    int t = timestamp / step_seconds;
    return t < num_steps ? t : num_steps - 1;
  }

  bool operator==(const CampaignSpec&) const = default;
};

/// Throws DataError unless B >= 0, C > 0 and the steps tile one day.
void validate(const CampaignSpec& spec);

}  // namespace mvbid
