#include "mvbid/dual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mvbid/bidding.hpp"

namespace mvbid {

double dual_objective(const DualTerms& terms, double p, double q, Execution exec) {
  const double hinges = exec == Execution::serial ? hinge_sum_serial(terms, p, q)
                                                  : hinge_sum_parallel(terms, p, q);
  return terms.budget * p + hinges;
}

double dual_objective(const BidLog& log, const CampaignSpec& spec, double p, double q) {
  return dual_objective(DualTerms::from(log, spec), p, q);
}

double default_dual_tolerance(const DualTerms& terms) {
  return 1e-8 * (1.0 + std::abs(dual_objective(terms, 0.0, 0.0)));
}

DualBracket dual_bracket(const DualTerms& terms) {
  DualBracket b;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    b.p_max = std::max(b.p_max, terms.value[i] / terms.wp[i]);
    if (terms.cpc_slope[i] > 0.0) b.q_max = std::max(b.q_max, terms.value[i] / terms.cpc_slope[i]);
  }
  return b;
}

namespace {

struct LineMinimum {
  double x = 0.0;
  double fx = 0.0;
  double width = 0.0;
  int iterations = 0;
  bool converged = true;
};

// Golden-section search on [lo, hi] for a convex f. Endpoints are evaluated
// too, so minima sitting on the boundary come back exactly; ties go to lo.
template <typename F>
LineMinimum golden_minimize(F&& f, double lo, double hi, double x_tol, int max_iter) {
  LineMinimum best{lo, f(lo), 0.0, 0, true};
  if (!(hi > lo)) return best;

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  int iter = 0;
  auto done = [&] {
    const double w = b - a;
    const double floor = 4.0 * std::numeric_limits<double>::epsilon() *
                             std::max({std::abs(a), std::abs(b), 1e-300});
    return w <= x_tol || w <= floor;
  };
  while (!done()) {
    if (iter >= max_iter) {
      best.converged = false;
      break;
    }
    ++iter;
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x_mid = fc <= fd ? c : d;
  const double f_mid = fc <= fd ? fc : fd;
  if (f_mid < best.fx) {
    best.x = x_mid;
    best.fx = f_mid;
  }
  const double f_hi = f(hi);
  if (f_hi < best.fx) {
    best.x = hi;
    best.fx = f_hi;
  }
  best.width = b - a;
  best.iterations = iter;
  return best;
}

}  // namespace

DualSolution solve_dual(const DualTerms& terms, const DualSolveOptions& options) {
  if (terms.size() == 0) throw DataError("solve_dual: empty log");
  const double tol = options.tol ? *options.tol : default_dual_tolerance(terms);
  if (!(tol > 0.0)) throw DataError("solve_dual: tolerance must be positive");

  const DualBracket box = dual_bracket(terms);
  double lip_p = terms.budget, lip_q = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    lip_p += terms.wp[i];
    lip_q += std::abs(terms.cpc_slope[i]);
  }
  const double p_tol = lip_p > 0.0 ? 0.5 * tol / lip_p : std::numeric_limits<double>::infinity();
  const double q_tol = lip_q > 0.0 ? 0.25 * tol / lip_q : std::numeric_limits<double>::infinity();

  bool inner_converged = true;
  double inner_error = 0.0;
  auto inner = [&](double p) {
    auto m = golden_minimize([&](double q) { return dual_objective(terms, p, q); }, 0.0,
                             box.q_max, q_tol, options.max_iterations);
    inner_converged = inner_converged && m.converged;
    inner_error = std::max(inner_error, lip_q * m.width);
    return m;
  };
  auto outer = golden_minimize([&](double p) { return inner(p).fx; }, 0.0, box.p_max, p_tol,
                               options.max_iterations);

  DualSolution sol;
  sol.p = outer.x;
  sol.q = inner(sol.p).x;
  sol.dual_objective = dual_objective(terms, sol.p, sol.q);
  sol.iterations = outer.iterations;
  sol.tolerance_achieved = lip_p * outer.width + inner_error;
  if (!outer.converged || !inner_converged)
    throw DualNonConvergence("solve_dual: iteration cap reached", sol);
  return sol;
}

DualSolution solve_dual(const BidLog& log, const CampaignSpec& spec,
                        const DualSolveOptions& options) {
  return solve_dual(DualTerms::from(log, spec), options);
}

double hindsight_optimal_value(const BidLog& log, const CampaignSpec& spec,
                               const DualSolveOptions& options) {
  return solve_dual(log, spec, options).dual_objective;
}

BruteForceResult brute_force_primal(const BidLog& log, const CampaignSpec& spec) {
  const std::size_t n = log.size();
  if (n > kBruteForceLimit)
    throw DataError("brute_force_primal: " + std::to_string(n) + " opportunities exceeds " +
                    std::to_string(kBruteForceLimit));
  BruteForceResult best;
  best.assignment.assign(n, false);
  std::uint32_t best_mask = 0;
  const std::uint32_t subsets = 1u << n;
  for (std::uint32_t mask = 1; mask < subsets; ++mask) {
    double cost = 0.0, clicks = 0.0, value = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        cost += log[i].wp;
        clicks += log[i].ctr;
        value += log[i].value();
      }
    }
    const double slack = 1e-12 * std::max(1.0, cost);
    if (cost > spec.budget + slack) continue;
    if (cost > spec.cpc_cap * clicks + slack) continue;
    if (value > best.best_value) {
      best.best_value = value;
      best_mask = mask;
    }
  }
  for (std::size_t i = 0; i < n; ++i) best.assignment[i] = (best_mask >> i) & 1u;
  return best;
}

std::vector<double> assignment_from_bids(const BidLog& log, const CampaignSpec& spec,
                                         const DualSolution& dual) {
  std::vector<double> x;
  x.reserve(log.size());
  const bool unbounded = dual.p + dual.q <= 0.0;
  for (const auto& o : log) {
    const double bid =
        unbounded ? std::numeric_limits<double>::infinity()
                  : optimal_bid(o, OptimalBidParams{dual.p, dual.q, spec.cpc_cap});
    x.push_back(bid > o.wp ? 1.0 : 0.0);
  }
  return x;
}

SlacknessReport check_slackness(const BidLog& log, const CampaignSpec& spec,
                                const DualSolution& dual, const std::vector<double>& assignment) {
  if (assignment.size() != log.size())
    throw DataError("check_slackness: assignment has " + std::to_string(assignment.size()) +
                    " entries for " + std::to_string(log.size()) + " opportunities");
  SlacknessReport report;
  report.records.reserve(log.size());
  const bool unbounded = dual.p + dual.q <= 0.0;
  for (std::size_t i = 0; i < log.size(); ++i) {
    const auto& o = log[i];
    SlacknessRecord rec;
    rec.id = o.id;
    rec.x = assignment[i];
    rec.wp = o.wp;
    rec.bid = unbounded ? std::numeric_limits<double>::infinity()
                        : optimal_bid(o, OptimalBidParams{dual.p, dual.q, spec.cpc_cap});
    const double reduced = o.value() - o.wp * dual.p - (o.wp - o.ctr * spec.cpc_cap) * dual.q;
    rec.r = std::max(0.0, reduced);
    rec.stationarity = rec.x * (reduced - rec.r);
    rec.complementarity = (rec.x - 1.0) * rec.r;
    report.max_violation = std::max(
        {report.max_violation, std::abs(rec.stationarity), std::abs(rec.complementarity)});
    report.records.push_back(rec);
  }
  return report;
}

}  // namespace mvbid
