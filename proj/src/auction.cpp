#include "mvbid/auction.hpp"

#include <ostream>

#include "mvbid/bid_log.hpp"

namespace mvbid {

AuctionOutcome run_auction(const Opportunity& opp, double bid, double remaining_budget) {
  AuctionOutcome out;
  out.opportunity_id = opp.id;
  out.bid = bid;
  out.won = bid > opp.wp && opp.wp <= remaining_budget;
  out.price_paid = out.won ? opp.wp : 0.0;
  return out;
}

std::optional<double> cpc_of(double cost, double clicks) {
  if (!(clicks > 0.0)) return std::nullopt;
  return cost / clicks;
}

std::string_view to_string(Termination t) {
  return t == Termination::budget_exhausted ? "budget_exhausted" : "log_end";
}

SimulationTrace simulate_day(const BidLog& log, const CampaignSpec& spec, Strategy& strategy,
                             const SimulationOptions& options) {
  SimulationTrace trace;
  trace.steps.reserve(static_cast<std::size_t>(spec.num_steps));
  if (options.record_outcomes) trace.outcomes.reserve(log.size());

  double remaining = spec.budget;
  bool stopped = false;
  std::size_t next = 0;
  const auto& opps = log.opportunities();

  for (int t = 0; t < spec.num_steps; ++t) {
    StepRecord rec;
    const StepControl in_effect = strategy.snapshot();
    StepFeedback& fb = rec.feedback;
    fb.t = t;
    while (next < opps.size() && spec.step_of(opps[next].timestamp) == t) {
      const Opportunity& o = opps[next++];
      if (stopped) continue;
      double bid = strategy.bid(o);
      if (!(bid > 0.0)) bid = 0.0;  // also maps NaN to 0
      AuctionOutcome out = run_auction(o, bid, remaining);
      ++fb.auctions;
      if (out.won) {
        remaining -= o.wp;
        ++fb.wins;
        fb.cost += o.wp;
        fb.clicks += o.ctr;
        fb.conversions += o.value();
      } else if (bid > o.wp) {
        stopped = true;
        trace.termination = Termination::budget_exhausted;
      }
      if (options.record_outcomes) trace.outcomes.push_back(out);
    }
    trace.cost += fb.cost;
    trace.clicks += fb.clicks;
    trace.value += fb.conversions;
    fb.cpc = cpc_of(fb.cost, fb.clicks);
    fb.cum_cost = trace.cost;
    fb.cum_clicks = trace.clicks;
    fb.cum_conversions = trace.value;
    fb.cum_cpc = cpc_of(trace.cost, trace.clicks);

    if (!stopped) strategy.on_step(fb);
    const StepControl after = strategy.snapshot();
    rec.control = in_effect;
    rec.control.u_p = after.u_p;
    rec.control.u_q = after.u_q;
    rec.control.u_p_mixed = after.u_p_mixed;
    rec.control.u_q_mixed = after.u_q_mixed;
    trace.steps.push_back(rec);
  }
  trace.cpc = cpc_of(trace.cost, trace.clicks);
  return trace;
}

std::optional<double> accumulated_cpc(std::span<const StepRecord> prefix) {
  if (prefix.empty()) return std::nullopt;
  const auto& last = prefix.back().feedback;
  return cpc_of(last.cum_cost, last.cum_clicks);
}

namespace {

void put(std::ostream& out, const char* key, const std::optional<double>& v) {
  out << ",\"" << key << "\":";
  if (v && std::isfinite(*v))
    out << format_real(*v);
  else
    out << "null";
}

}  // namespace

void write_trace_jsonl(std::ostream& out, const SimulationTrace& trace) {
  for (const auto& rec : trace.steps) {
    const auto& f = rec.feedback;
    const auto& c = rec.control;
    out << "{\"t\":" << f.t;
    put(out, "cost", f.cost);
    put(out, "cost_ref", c.cost_ref);
    put(out, "cum_cost", f.cum_cost);
    put(out, "cpc", f.cpc);
    put(out, "cum_cpc", f.cum_cpc);
    put(out, "clicks", f.clicks);
    put(out, "conversions", f.conversions);
    put(out, "p", c.p);
    put(out, "q", c.q);
    put(out, "b0", c.b0);
    put(out, "cap", c.cap);
    put(out, "u_p", c.u_p);
    put(out, "u_q", c.u_q);
    put(out, "u_p_mixed", c.u_p_mixed);
    put(out, "u_q_mixed", c.u_q_mixed);
    out << ",\"wins\":" << f.wins << ",\"auctions\":" << f.auctions << "}\n";
  }
}

}  // namespace mvbid
