#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "mpmd/errors.hpp"
#include "mpmd/instance.hpp"
#include "mpmd/matching.hpp"

namespace mpmd {

// Cost of matching requests i and j at the later of the two arrivals:
// connection distance plus the earlier request's wait. This is itself a
// metric (sum of two metrics), and no optimal schedule can do better, since
// waiting past the later arrival only adds cost.
inline double space_time_cost(const Instance& inst, int i, int j) {
  return inst.space.distance(inst.requests[i].point, inst.requests[j].point) +
         std::abs(inst.requests[i].atime - inst.requests[j].atime);
}

inline constexpr int kDefaultDpCap = 22;   // requests; ~4M subset states
inline constexpr int kDpHardCeiling = 24;  // 2^24 states ~ 150 MB; beyond that the DP is off-limits
inline constexpr int kBruteForceCap = 10;  // requests; 9!! = 945 matchings

namespace detail {

// Builds a Matching from a pairing, matching each pair at the later arrival.
// Events are ordered by (match time, smaller id) and numbered 1..m.
inline Matching pairing_to_matching(const Instance& inst,
                                    std::vector<std::pair<int, int>> pairs) {
  Matching m;
  m.events.reserve(pairs.size());
  for (auto& [i, j] : pairs) {
    if (inst.requests[i].atime > inst.requests[j].atime) std::swap(i, j);
    MatchEvent e;
    e.i = i;
    e.j = j;
    e.match_time = inst.requests[j].atime;
    e.connection = inst.space.distance(inst.requests[i].point, inst.requests[j].point);
    e.wait_i = e.match_time - inst.requests[i].atime;
    e.wait_j = 0.0;
    e.total = e.connection + e.wait_i;
    m.events.push_back(e);
  }
  std::sort(m.events.begin(), m.events.end(), [](const MatchEvent& a, const MatchEvent& b) {
    if (a.match_time != b.match_time) return a.match_time < b.match_time;
    return std::min(a.i, a.j) < std::min(b.i, b.j);
  });
  for (std::size_t k = 0; k < m.events.size(); ++k) m.events[k].seq = static_cast<int>(k) + 1;
  return m;
}

}  // namespace detail

// Exact minimum-cost perfect matching under the space-time cost, by bitmask
// dynamic programming over request subsets: the lowest-index open request of
// each subset is paired with every candidate. Exponential; guarded by dp_cap.
inline Matching opt_matching(const Instance& inst, int dp_cap = kDefaultDpCap) {
  validate_instance(inst);
  const int n = inst.request_count();
  if (n > std::min(dp_cap, kDpHardCeiling))
    throw CapacityError("instance has " + std::to_string(n) +
                        " requests, above the exact-DP cap of " +
                        std::to_string(std::min(dp_cap, kDpHardCeiling)) +
                        "; use bounds mode (greedy upper bound) or the line solver");

  std::vector<double> cost(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cost[i * n + j] = space_time_cost(inst, i, j);

  const std::uint32_t full = (1u << n) - 1u;  // n <= 24, see the ceiling above
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dp(full + 1u, inf);
  std::vector<std::int8_t> choice(full + 1u, -1);
  dp[0] = 0.0;
  for (std::uint32_t mask = 3u; mask <= full; ++mask) {
    if (std::popcount(mask) % 2 != 0) continue;
    const int i = std::countr_zero(mask);
    const std::uint32_t rest = mask & (mask - 1u);  // mask without bit i
    for (std::uint32_t bits = rest; bits != 0; bits &= bits - 1u) {
      const int j = std::countr_zero(bits);
      const double c = dp[rest & ~(1u << j)] + cost[i * n + j];
      if (c < dp[mask]) {
        dp[mask] = c;
        choice[mask] = static_cast<std::int8_t>(j);
      }
    }
  }

  std::vector<std::pair<int, int>> pairs;
  std::uint32_t mask = full;
  while (mask != 0) {
    const int i = std::countr_zero(mask);
    const int j = choice[mask];
    pairs.emplace_back(i, j);
    mask &= ~(1u << i);
    mask &= ~(1u << j);
  }
  return detail::pairing_to_matching(inst, std::move(pairs));
}

// Independent oracle: enumerates all (2m-1)!! perfect matchings and returns a
// global minimizer. Only for tiny instances. enumerated, when given, receives
// the number of matchings visited.
inline Matching brute_force_matching(const Instance& inst, long* enumerated = nullptr) {
  validate_instance(inst);
  const int n = inst.request_count();
  if (n > kBruteForceCap)
    throw CapacityError("brute force enumerates (2m-1)!! matchings; " + std::to_string(n) +
                        " requests exceed the cap of " + std::to_string(kBruteForceCap));

  std::vector<double> cost(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cost[i * n + j] = space_time_cost(inst, i, j);

  std::vector<char> used(n, 0);
  std::vector<std::pair<int, int>> current, best;
  double best_cost = std::numeric_limits<double>::infinity();
  long count = 0;

  auto recurse = [&](auto&& self, double acc) -> void {
    int i = 0;
    while (i < n && used[i]) ++i;
    if (i == n) {
      ++count;
      if (acc < best_cost) {
        best_cost = acc;
        best = current;
      }
      return;
    }
    used[i] = 1;
    for (int j = i + 1; j < n; ++j) {
      if (used[j]) continue;
      used[j] = 1;
      current.emplace_back(i, j);
      self(self, acc + cost[i * n + j]);
      current.pop_back();
      used[j] = 0;
    }
    used[i] = 0;
  };
  recurse(recurse, 0.0);
  if (enumerated) *enumerated = count;
  return detail::pairing_to_matching(inst, std::move(best));
}

// Special case solver for simultaneous line instances: sorting by coordinate
// and pairing consecutively (1-2, 3-4, ...) is optimal on a line.
inline Matching line_opt_matching(const Instance& inst) {
  validate_instance(inst);
  if (inst.space.kind() != MetricKind::Line)
    throw InputError("line_opt_matching requires a line metric");
  const int n = inst.request_count();
  for (int i = 1; i < n; ++i)
    if (inst.requests[i].atime != inst.requests[0].atime)
      throw InputError("line_opt_matching requires simultaneous arrivals");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double xa = inst.space.line_coord(inst.requests[a].point);
    const double xb = inst.space.line_coord(inst.requests[b].point);
    if (xa != xb) return xa < xb;
    return a < b;
  });
  std::vector<std::pair<int, int>> pairs;
  for (int k = 0; k < n; k += 2) pairs.emplace_back(order[k], order[k + 1]);
  return detail::pairing_to_matching(inst, std::move(pairs));
}

// Greedy baseline: repeatedly match the globally cheapest remaining pair
// under the space-time cost; ties broken by (min id, max id).
inline Matching greedy_matching(const Instance& inst) {
  validate_instance(inst);
  const int n = inst.request_count();
  struct Cand {
    double cost;
    int a, b;
  };
  std::vector<Cand> cands;
  cands.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) cands.push_back({space_time_cost(inst, a, b), a, b});
  std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
    if (x.cost != y.cost) return x.cost < y.cost;
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  });
  std::vector<char> used(n, 0);
  std::vector<std::pair<int, int>> pairs;
  for (const Cand& c : cands) {
    if (used[c.a] || used[c.b]) continue;
    used[c.a] = used[c.b] = 1;
    pairs.emplace_back(c.a, c.b);
    if (2 * static_cast<int>(pairs.size()) == n) break;
  }
  return detail::pairing_to_matching(inst, std::move(pairs));
}

// Total cost of an arbitrary pairing evaluated under the space-time cost,
// e.g. the online algorithm's pair set stripped of its realized delays.
inline double pairing_space_time_cost(const Instance& inst, const Matching& m) {
  double s = 0.0;
  for (const MatchEvent& e : m.events) s += space_time_cost(inst, e.i, e.j);
  return s;
}

}  // namespace mpmd
