#include "mvbid/kernels.hpp"

#include <omp.h>

namespace mvbid {

DualTerms DualTerms::from(const BidLog& log, const CampaignSpec& spec) {
  DualTerms t;
  t.budget = spec.budget;
  t.wp.reserve(log.size());
  t.cpc_slope.reserve(log.size());
  t.value.reserve(log.size());
  for (const auto& o : log) {
    t.wp.push_back(o.wp);
    t.cpc_slope.push_back(o.wp - o.ctr * spec.cpc_cap);
    t.value.push_back(o.value());
  }
  return t;
}

double hinge_sum_serial(const DualTerms& terms, double p, double q) {
  double s = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i)
    s += hinge(terms.value[i], terms.wp[i], terms.cpc_slope[i], p, q);
  return s;
}

double pairwise_sum(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  if (xs.size() == 1) return xs[0];
  if (xs.size() == 2) return xs[0] + xs[1];
  auto half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

double hinge_sum_parallel(const DualTerms& terms, double p, double q) {
  const std::size_t n = terms.size();
  const std::size_t chunks = (n + kReductionChunk - 1) / kReductionChunk;
  if (chunks <= 1) return hinge_sum_serial(terms, p, q);
  std::vector<double> partial(chunks, 0.0);
  const double* v = terms.value.data();
  const double* w = terms.wp.data();
  const double* sl = terms.cpc_slope.data();
#pragma omp parallel for schedule(static) if (chunks >= 8)
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t lo = c * kReductionChunk;
    const std::size_t hi = lo + kReductionChunk < n ? lo + kReductionChunk : n;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += hinge(v[i], w[i], sl[i], p, q);
    partial[c] = s;
  }
  return pairwise_sum(partial);
}

}  // namespace mvbid
