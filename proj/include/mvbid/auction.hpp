#pragma once

#include <cmath>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mvbid/types.hpp"

namespace mvbid {

struct AuctionOutcome {
  std::int64_t opportunity_id = 0;
  bool won = false;
  double price_paid = 0.0;
  double bid = 0.0;
  bool operator==(const AuctionOutcome&) const = default;
};

/// Second-price replay against the logged winning price: won iff
/// bid > wp (ties lose) and wp fits in the remaining budget.
AuctionOutcome run_auction(const Opportunity& opp, double bid, double remaining_budget);

/// cost / clicks, undefined when there are no expected clicks.
std::optional<double> cpc_of(double cost, double clicks);

/// Aggregates for one control step plus running totals.
struct StepFeedback {
  int t = 0;
  std::size_t auctions = 0;
  std::size_t wins = 0;
  double cost = 0.0;
  double clicks = 0.0;       // sum of ctr over wins
  double conversions = 0.0;  // sum of ctr * cvr over wins
  std::optional<double> cpc;
  double cum_cost = 0.0;
  double cum_clicks = 0.0;
  double cum_conversions = 0.0;
  std::optional<double> cum_cpc;
  bool operator==(const StepFeedback&) const = default;
};

/// Controller-side values for a step; unset fields do not apply to the strategy.
struct StepControl {
  std::optional<double> cost_ref;
  std::optional<double> p, q;
  std::optional<double> b0, cap;
  std::optional<double> u_p, u_q;
  std::optional<double> u_p_mixed, u_q_mixed;
  bool operator==(const StepControl&) const = default;
};

/// A bid policy, optionally closed-loop. bid() may return any real; the
/// simulator clamps negatives to zero.
class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual std::string_view name() const = 0;
  virtual double bid(const Opportunity& opp) const = 0;
  /// Fired after the last auction of step t and before the first of t + 1.
  virtual void on_step(const StepFeedback&) {}
  virtual StepControl snapshot() const = 0;
};

enum class Termination { budget_exhausted, log_end };

std::string_view to_string(Termination t);

struct StepRecord {
  StepFeedback feedback;
  /// Parameters in effect during the step, signals computed from its feedback.
  StepControl control;
  bool operator==(const StepRecord&) const = default;
};

struct SimulationTrace {
  std::vector<AuctionOutcome> outcomes;  // filled only when requested
  std::vector<StepRecord> steps;         // one per control step
  double cost = 0.0;
  double value = 0.0;  // R
  double clicks = 0.0;
  std::optional<double> cpc;
  Termination termination = Termination::log_end;
  bool operator==(const SimulationTrace&) const = default;
};

struct SimulationOptions {
  bool record_outcomes = false;
};

/// Replays the log in timestamp order. Step feedback reaches the strategy at
/// every step boundary; the run stops for good the first time a winning bid
/// cannot be paid for. Always emits spec.num_steps step records.
SimulationTrace simulate_day(const BidLog& log, const CampaignSpec& spec, Strategy& strategy,
                             const SimulationOptions& options = {});

/// Accumulated CPC at the end of a prefix of step records.
std::optional<double> accumulated_cpc(std::span<const StepRecord> prefix);

/// One JSON object per step:
/// {t, cost, cost_ref, cum_cost, cpc, cum_cpc, clicks, conversions, p, q, ...}.
/// Undefined values are written as null.
void write_trace_jsonl(std::ostream& out, const SimulationTrace& trace);

}  // namespace mvbid
