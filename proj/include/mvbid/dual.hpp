#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mvbid/kernels.hpp"
#include "mvbid/types.hpp"

namespace mvbid {

/// Minimizer of the dual objective
///   g(p, q) = B p + sum_i max(0, v_i - wp_i p - (wp_i - ctr_i C) q),   p, q >= 0.
/// By strong duality g(p*, q*) equals the fractional primal optimum.
struct DualSolution {
  double p = 0.0;
  double q = 0.0;
  double dual_objective = 0.0;
  int iterations = 0;
  double tolerance_achieved = 0.0;

  bool operator==(const DualSolution&) const = default;
};

/// Raised when the search hits its iteration cap; carries the best iterate.
class DualNonConvergence : public NumericalError {
 public:
  DualNonConvergence(const std::string& what, DualSolution best)
      : NumericalError(what), best_(best) {}
  const DualSolution& best() const { return best_; }

 private:
  DualSolution best_;
};

double dual_objective(const BidLog& log, const CampaignSpec& spec, double p, double q);
double dual_objective(const DualTerms& terms, double p, double q,
                      Execution exec = Execution::parallel);

/// 1e-8 * (1 + g(0, 0)).
double default_dual_tolerance(const DualTerms& terms);

/// Search box outside of which the objective cannot improve.
struct DualBracket {
  double p_max = 0.0;  // max_i v_i / wp_i
  double q_max = 0.0;  // max over wp_i > ctr_i C of v_i / (wp_i - ctr_i C)
};
DualBracket dual_bracket(const DualTerms& terms);

struct DualSolveOptions {
  std::optional<double> tol;  // objective tolerance; default_dual_tolerance when unset
  int max_iterations = 400;   // per golden-section level
};

/// Nested golden-section search: outer over p, inner over q. Valid because g
/// is jointly convex, so min_q g(p, q) is convex in p.
DualSolution solve_dual(const BidLog& log, const CampaignSpec& spec,
                        const DualSolveOptions& options = {});
DualSolution solve_dual(const DualTerms& terms, const DualSolveOptions& options = {});

/// R*: optimum of the fractional allocation problem, via the dual.
double hindsight_optimal_value(const BidLog& log, const CampaignSpec& spec,
                               const DualSolveOptions& options = {});

/// Exhaustive 0/1 allocation search for small logs (N <= 20).
struct BruteForceResult {
  double best_value = 0.0;
  std::vector<bool> assignment;
};
BruteForceResult brute_force_primal(const BidLog& log, const CampaignSpec& spec);

inline constexpr std::size_t kBruteForceLimit = 20;

struct SlacknessRecord {
  std::int64_t id = 0;
  double x = 0.0;
  double bid = 0.0;
  double wp = 0.0;
  double r = 0.0;
  double stationarity = 0.0;     // x_i (v_i - wp_i p - (wp_i - ctr_i C) q - r_i)
  double complementarity = 0.0;  // (x_i - 1) r_i
};

struct SlacknessReport {
  std::vector<SlacknessRecord> records;
  double max_violation = 0.0;
};

/// Evaluates both complementary-slackness products for every opportunity.
/// Throws DataError when the assignment length does not match the log.
SlacknessReport check_slackness(const BidLog& log, const CampaignSpec& spec,
                                const DualSolution& dual, const std::vector<double>& assignment);

/// x_i = 1 where the optimal bid at (p, q) strictly beats wp_i.
std::vector<double> assignment_from_bids(const BidLog& log, const CampaignSpec& spec,
                                         const DualSolution& dual);

}  // namespace mvbid
