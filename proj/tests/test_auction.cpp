#include <doctest.h>

#include <map>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "mvbid/auction.hpp"

using namespace mvbid;
using fixtures::opp;

namespace {

/// Bids from a per-id table.
class TableStrategy final : public Strategy {
 public:
  explicit TableStrategy(std::map<std::int64_t, double> bids) : bids_(std::move(bids)) {}
  std::string_view name() const override { return "table"; }
  double bid(const Opportunity& o) const override { return bids_.at(o.id); }
  StepControl snapshot() const override { return {}; }

 private:
  std::map<std::int64_t, double> bids_;
};

/// bid = factor * wp * noise, fixed per id.
class ScaledStrategy final : public Strategy {
 public:
  ScaledStrategy(double factor, std::map<std::int64_t, double> noise)
      : factor_(factor), noise_(std::move(noise)) {}
  std::string_view name() const override { return "scaled"; }
  double bid(const Opportunity& o) const override { return factor_ * o.wp * noise_.at(o.id); }
  StepControl snapshot() const override { return {}; }

 private:
  double factor_;
  std::map<std::int64_t, double> noise_;
};

/// Records every feedback it sees.
class RecordingStrategy final : public Strategy {
 public:
  std::string_view name() const override { return "rec"; }
  double bid(const Opportunity&) const override { return 1e9; }
  void on_step(const StepFeedback& fb) override { seen.push_back(fb.t); }
  StepControl snapshot() const override { return {}; }
  std::vector<int> seen;
};

CampaignSpec spec_with_budget(double b) {
  CampaignSpec s;
  s.budget = b;
  s.cpc_cap = 100.0;
  return s;
}

}  // namespace

TEST_CASE("auction rule") {
  const auto o = opp(1, 0, 3.0, 0.1, 0.1);
  auto r = run_auction(o, 5.0, 100.0);
  CHECK(r.won);
  CHECK(r.price_paid == 3.0);
  r = run_auction(o, 3.0, 100.0);
  CHECK_FALSE(r.won);
  CHECK(r.price_paid == 0.0);
  r = run_auction(o, 5.0, 2.0);
  CHECK_FALSE(r.won);
  CHECK(r.price_paid == 0.0);
  CHECK(run_auction(o, 5.0, 3.0).won);
}

TEST_CASE("three-opportunity hand walk") {
  const BidLog log({opp(1, 0, 3.0, 0.1, 0.2), opp(2, 10, 2.0, 0.2, 0.3), opp(3, 20, 3.0, 0.3, 0.4)}, "");
  TableStrategy s({{1, 5.0}, {2, 1.0}, {3, 4.0}});
  const auto trace = simulate_day(log, spec_with_budget(10.0), s, {true});
  CHECK(trace.cost == 6.0);
  CHECK(trace.value == doctest::Approx(0.1 * 0.2 + 0.3 * 0.4));
  REQUIRE(trace.outcomes.size() == 3);
  CHECK(trace.outcomes[0].won);
  CHECK_FALSE(trace.outcomes[1].won);
  CHECK(trace.outcomes[2].won);
  CHECK(trace.termination == Termination::log_end);
  CHECK(trace.steps.size() == 24);
}

TEST_CASE("zero budget") {
  const BidLog log({opp(1, 0, 3.0, 0.1, 0.2), opp(2, 10, 2.0, 0.2, 0.3)}, "");
  TableStrategy winning({{1, 5.0}, {2, 5.0}});
  auto trace = simulate_day(log, spec_with_budget(0.0), winning);
  CHECK(trace.cost == 0.0);
  CHECK(trace.termination == Termination::budget_exhausted);
  CHECK(trace.steps.size() == 24);
  TableStrategy losing({{1, 1.0}, {2, 1.0}});
  trace = simulate_day(log, spec_with_budget(0.0), losing);
  CHECK(trace.termination == Termination::log_end);
}

TEST_CASE("run stops at the first unaffordable win") {
  const BidLog log({opp(1, 0, 3.0, 0.1, 0.2), opp(2, 10, 5.0, 0.2, 0.3), opp(3, 20, 1.0, 0.3, 0.4)}, "");
  TableStrategy s({{1, 9.0}, {2, 9.0}, {3, 9.0}});
  const auto trace = simulate_day(log, spec_with_budget(6.0), s);
  CHECK(trace.cost == 3.0);
  CHECK(trace.termination == Termination::budget_exhausted);
}

TEST_CASE("accumulated cpc") {
  const BidLog log({opp(1, 0, 1.0, 0.5, 0.2), opp(2, 4000, 2.0, 0.1, 0.1)}, "");
  TableStrategy s({{1, 9.0}, {2, 9.0}});
  const auto trace = simulate_day(log, spec_with_budget(100.0), s);
  CHECK(*accumulated_cpc(trace.steps) == doctest::Approx(5.0));
  CHECK(*trace.cpc == doctest::Approx(5.0));
  CHECK(*accumulated_cpc(std::span(trace.steps).first(1)) == doctest::Approx(2.0));

  const BidLog one({opp(1, 0, 2.0, 0.01, 0.2)}, "");
  TableStrategy s1({{1, 9.0}});
  CHECK(*simulate_day(one, spec_with_budget(100.0), s1).cpc == doctest::Approx(200.0));

  TableStrategy none({{1, 0.0}});
  const auto empty = simulate_day(one, spec_with_budget(100.0), none);
  CHECK_FALSE(empty.cpc.has_value());
  CHECK_FALSE(accumulated_cpc(empty.steps).has_value());
  CHECK_FALSE(cpc_of(0.0, 0.0).has_value());
}

TEST_CASE("simulation invariants on generated logs") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  const auto recipe = make_batch_recipes(fixtures::small_batch(1, 3000))[0];
  const auto log = generate_log(recipe.day);
  std::map<std::int64_t, double> noise;
  double total_wp = 0.0;
  for (const auto& o : log) {
    noise[o.id] = u(rng);
    total_wp += o.wp;
  }
  for (double budget : {0.05 * total_wp, 0.3 * total_wp, 10.0 * total_wp}) {
    const auto spec = spec_with_budget(budget);
    ScaledStrategy low(0.9, noise), high(1.1, noise);
    const auto a = simulate_day(log, spec, low, {true});
    const auto b = simulate_day(log, spec, high, {true});

    CHECK(a.cost <= budget);
    CHECK(b.cost <= budget);

    double value = 0.0, step_cost = 0.0;
    for (std::size_t i = 0; i < a.outcomes.size(); ++i)
      if (a.outcomes[i].won) value += log[i].value();
    for (const auto& rec : a.steps) step_cost += rec.feedback.cost;
    CHECK(a.value == doctest::Approx(value).epsilon(1e-12));
    CHECK(step_cost == doctest::Approx(a.cost).epsilon(1e-12));

    if (budget > total_wp) {
      // Unlimited budget: higher bids win a superset.
      for (std::size_t i = 0; i < a.outcomes.size(); ++i)
        if (a.outcomes[i].won) CHECK(b.outcomes[i].won);
    }
    ScaledStrategy again(0.9, noise);
    CHECK(simulate_day(log, spec, again, {true}) == a);
  }
}

TEST_CASE("feedback fires once per step boundary") {
  const BidLog log({opp(1, 0, 1.0, 0.5, 0.2), opp(2, 7300, 2.0, 0.1, 0.1)}, "");
  RecordingStrategy s;
  simulate_day(log, spec_with_budget(100.0), s);
  REQUIRE(s.seen.size() >= 23);
  for (std::size_t i = 0; i < s.seen.size(); ++i) CHECK(s.seen[i] == static_cast<int>(i));
}

TEST_CASE("trace jsonl has one record per step with nulls for undefined values") {
  const BidLog log({opp(1, 0, 1.0, 0.5, 0.2)}, "");
  TableStrategy s({{1, 9.0}});
  const auto trace = simulate_day(log, spec_with_budget(100.0), s);
  std::ostringstream out;
  write_trace_jsonl(out, trace);
  std::istringstream in(out.str());
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    if (lines == 2) CHECK(line.find("\"cpc\":null") != std::string::npos);
  }
  CHECK(lines == 24);
}
