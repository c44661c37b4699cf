#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <queue>
#include <string>
#include <vector>

#include "mpmd/errors.hpp"
#include "mpmd/instance.hpp"
#include "mpmd/matching.hpp"

namespace mpmd {

// Deterministic ordering of candidate pairs that become ready at the same
// instant. Any fixed rule is admissible; two are provided so analyses can be
// cross-checked under different tie handling.
enum class TieBreak { LowIdFirst, HighIdFirst };

inline const char* to_string(TieBreak t) {
  return t == TieBreak::LowIdFirst ? "low-id-first" : "high-id-first";
}

struct AlgorithmParams {
  double alpha = 0.5;  // budget growth rate, > 0
  double beta = 2.0;   // balance factor, > 1
  TieBreak tie_break = TieBreak::LowIdFirst;

  void validate() const {
    if (!(alpha > 0.0)) throw InputError("algorithm parameter alpha must be > 0");
    if (!(beta > 1.0)) throw InputError("algorithm parameter beta must be > 1");
  }
};

// Earliest time tau >= max(t_p, t_q) at which a pair at distance d satisfies
// both firing conditions:
//   sufficiency:  alpha * ((tau - t_p) + (tau - t_q)) >= d
//   balance:      tau - t_p <= beta * (tau - t_q)  (the older side binds)
// Both are monotone in tau, so the answer is the max of the three closed-form
// thresholds below.
inline double readiness_time(double t_p, double t_q, double d, const AlgorithmParams& params) {
  params.validate();
  if (t_p > t_q) std::swap(t_p, t_q);
  const double sufficiency = (d / params.alpha + t_p + t_q) / 2.0;
  const double balance = (params.beta * t_q - t_p) / (params.beta - 1.0);
  return std::max({t_q, sufficiency, balance});
}

struct RunResult {
  Matching matching;
  AlgorithmParams params;
};

// Runs the online algorithm over the instance as an exact event-driven
// simulation. Candidate pairs are keyed by readiness time and popped in
// (time, tie-break) order with lazy deletion of pairs whose endpoint was
// matched earlier. Arrivals at time t are injected before any pair event at
// t fires. Pair bookkeeping is O(m^2), the accepted desk-scale budget.
inline RunResult run_online(const Instance& inst, const AlgorithmParams& params) {
  params.validate();
  validate_instance(inst);
  const int n = inst.request_count();

  struct PairEvent {
    double tau;
    int a, b;  // a < b
  };
  const bool low_first = params.tie_break == TieBreak::LowIdFirst;
  auto later = [low_first](const PairEvent& x, const PairEvent& y) {
    if (x.tau != y.tau) return x.tau > y.tau;
    if (low_first) {
      if (x.a != y.a) return x.a > y.a;
      return x.b > y.b;
    }
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  };
  std::priority_queue<PairEvent, std::vector<PairEvent>, decltype(later)> queue(later);

  std::vector<char> matched(n, 0);
  std::vector<int> arrived;  // requests seen so far, in arrival order
  arrived.reserve(n);
  int next_arrival = 0;
  int open = n;

  RunResult result;
  result.params = params;
  result.matching.events.reserve(n / 2);

  while (open > 0) {
    const double next_pair_tau =
        queue.empty() ? std::numeric_limits<double>::infinity() : queue.top().tau;
    if (next_arrival < n && inst.requests[next_arrival].atime <= next_pair_tau) {
      const Request& r = inst.requests[next_arrival];
      for (int s : arrived) {
        if (matched[s]) continue;
        const double tau = readiness_time(inst.requests[s].atime, r.atime,
                                          inst.space.distance(inst.requests[s].point, r.point),
                                          params);
        queue.push({tau, std::min(s, r.id), std::max(s, r.id)});
      }
      arrived.push_back(r.id);
      ++next_arrival;
      continue;
    }
    if (queue.empty()) throw InternalError("event queue drained with requests still open");

    const PairEvent ev = queue.top();
    queue.pop();
    if (matched[ev.a] || matched[ev.b]) continue;

    MatchEvent e;
    e.i = ev.a;
    e.j = ev.b;
    e.match_time = ev.tau;
    e.connection = inst.space.distance(inst.requests[ev.a].point, inst.requests[ev.b].point);
    e.wait_i = ev.tau - inst.requests[ev.a].atime;
    e.wait_j = ev.tau - inst.requests[ev.b].atime;
    e.total = e.connection + e.wait_i + e.wait_j;
    e.seq = static_cast<int>(result.matching.events.size()) + 1;
    result.matching.events.push_back(e);
    matched[ev.a] = matched[ev.b] = 1;
    open -= 2;
  }
  return result;
}

// Trace CSV, one row per match event, budgets recomputed as alpha * wait.
inline void write_trace_csv(const RunResult& run, std::ostream& out) {
  out << "seq,i,j,match_time,dist,wait_i,wait_j,total,budget_i,budget_j\n";
  char buf[256];
  for (const MatchEvent& e : run.matching.events) {
    std::snprintf(buf, sizeof(buf),
                  "%d,%d,%d,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", e.seq, e.i, e.j,
                  e.match_time, e.connection, e.wait_i, e.wait_j, e.total,
                  run.params.alpha * e.wait_i, run.params.alpha * e.wait_j);
    out << buf;
  }
}

}  // namespace mpmd
