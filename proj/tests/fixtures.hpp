#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mvbid/experiment.hpp"

namespace fixtures {

using namespace mvbid;

inline Opportunity opp(std::int64_t id, std::int32_t ts, double wp, double ctr, double cvr) {
  return {id, ts, wp, ctr, cvr};
}

/// opp1: wp=1, ctr=0.5, cvr=0.2; opp2: wp=2, ctr=0.1, cvr=0.1; B=1, C=4.
inline BidLog two_log() { return BidLog({opp(1, 0, 1.0, 0.5, 0.2), opp(2, 10, 2.0, 0.1, 0.1)}, "train"); }

inline CampaignSpec two_spec() {
  CampaignSpec s;
  s.budget = 1.0;
  s.cpc_cap = 4.0;
  return s;
}

struct Instance {
  BidLog log;
  CampaignSpec spec;
};

/// Small random allocation problem; B and C drawn so both constraints matter.
inline Instance random_instance(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Opportunity> opps;
  double total_wp = 0.0, total_ctr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ctr = 0.01 + 0.3 * u(rng);
    const double cvr = 0.01 + 0.5 * u(rng);
    const double wp = 0.1 + 2.0 * u(rng);
    opps.push_back(opp(static_cast<std::int64_t>(i + 1), static_cast<std::int32_t>(i), wp, ctr, cvr));
    total_wp += wp;
    total_ctr += ctr;
  }
  CampaignSpec spec;
  spec.budget = total_wp * (0.1 + 0.6 * u(rng));
  spec.cpc_cap = total_wp / total_ctr * (0.4 + 1.0 * u(rng));
  return {BidLog(std::move(opps), "train"), spec};
}

/// Minimum of the dual objective by enumeration: the minimum of a convex
/// piecewise-linear function on the quadrant sits at a vertex, i.e. at an
/// intersection of two lines from {hinge kinks, p = 0, q = 0}, or at the origin.
inline double vertex_min_dual(const BidLog& log, const CampaignSpec& spec) {
  struct Line {
    double a, b, c;  // a p + b q = c
  };
  std::vector<Line> lines{{1, 0, 0}, {0, 1, 0}};
  for (const auto& o : log) lines.push_back({o.wp, o.wp - o.ctr * spec.cpc_cap, o.value()});
  auto g = [&](double p, double q) {
    double s = spec.budget * p;
    for (const auto& o : log) s += std::max(0.0, o.value() - o.wp * p - (o.wp - o.ctr * spec.cpc_cap) * q);
    return s;
  };
  double best = g(0.0, 0.0);
  for (std::size_t i = 0; i < lines.size(); ++i)
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const auto& l1 = lines[i];
      const auto& l2 = lines[j];
      const double det = l1.a * l2.b - l1.b * l2.a;
      if (std::abs(det) < 1e-14) continue;
      const double p = (l1.c * l2.b - l1.b * l2.c) / det;
      const double q = (l1.a * l2.c - l1.c * l2.a) / det;
      if (p < -1e-12 || q < -1e-12) continue;
      best = std::min(best, g(std::max(p, 0.0), std::max(q, 0.0)));
    }
  return best;
}

/// Controllable feedback builder.
inline StepFeedback feedback(int t, double cost, double clicks, double cum_clicks) {
  StepFeedback fb;
  fb.t = t;
  fb.cost = cost;
  fb.clicks = clicks;
  fb.cum_clicks = cum_clicks;
  fb.cpc = cpc_of(cost, clicks);
  return fb;
}

/// Small batch for quick end-to-end checks.
inline BatchConfig small_batch(std::size_t campaigns = 3, std::size_t n = 4000) {
  BatchConfig cfg;
  cfg.n_campaigns = campaigns;
  cfg.n_min = cfg.n_max = n;
  return cfg;
}

}  // namespace fixtures
