#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mpmd/errors.hpp"
#include "mpmd/instance.hpp"

namespace mpmd {

// A matched pair with its match time and cost breakdown. seq is the 1-based
// creation order within the matching.
struct MatchEvent {
  int i = 0, j = 0;
  double match_time = 0.0;
  double connection = 0.0;
  double wait_i = 0.0, wait_j = 0.0;
  double total = 0.0;
  int seq = 0;
};

struct Matching {
  std::vector<MatchEvent> events;

  double total_cost() const {
    double s = 0.0;
    for (const MatchEvent& e : events) s += e.total;
    return s;
  }
  double connection_cost() const {
    double s = 0.0;
    for (const MatchEvent& e : events) s += e.connection;
    return s;
  }
};

// mate[r] = request matched with r, or -1. Throws if a request is covered twice.
inline std::vector<int> mate_table(const Matching& m, int request_count) {
  std::vector<int> mate(request_count, -1);
  for (const MatchEvent& e : m.events) {
    if (e.i < 0 || e.i >= request_count || e.j < 0 || e.j >= request_count || e.i == e.j)
      throw InternalError("matching event with bad request ids (" + std::to_string(e.i) + "," +
                          std::to_string(e.j) + ")");
    if (mate[e.i] != -1 || mate[e.j] != -1)
      throw InternalError("request matched twice in event seq " + std::to_string(e.seq));
    mate[e.i] = e.j;
    mate[e.j] = e.i;
  }
  return mate;
}

// The set of matched pairs as sorted (min,max) id pairs; order-independent.
inline std::vector<std::pair<int, int>> normalized_pairs(const Matching& m) {
  std::vector<std::pair<int, int>> out;
  out.reserve(m.events.size());
  for (const MatchEvent& e : m.events) out.emplace_back(std::min(e.i, e.j), std::max(e.i, e.j));
  std::sort(out.begin(), out.end());
  return out;
}

// Checks the Matching invariants against its instance: perfect cover, waits
// consistent with arrival times, total = connection + waits, seq 1..m with
// nondecreasing match times.
inline void validate_matching(const Instance& inst, const Matching& m, double tol = 1e-9) {
  const int n = inst.request_count();
  if (static_cast<int>(m.events.size()) != n / 2)
    throw InternalError("matching has " + std::to_string(m.events.size()) + " events, expected " +
                        std::to_string(n / 2));
  std::vector<int> mate = mate_table(m, n);
  for (int r = 0; r < n; ++r)
    if (mate[r] == -1) throw InternalError("request " + std::to_string(r) + " left unmatched");

  double prev_time = 0.0;
  int expect_seq = 1;
  for (const MatchEvent& e : m.events) {
    if (e.seq != expect_seq++) throw InternalError("seq values must be 1..m in order");
    const double scale = std::max({1.0, std::abs(e.match_time), e.total});
    if (e.match_time + tol * scale < inst.requests[e.i].atime ||
        e.match_time + tol * scale < inst.requests[e.j].atime)
      throw InternalError("event seq " + std::to_string(e.seq) + " matches before arrival");
    if (e.wait_i < -tol * scale || e.wait_j < -tol * scale)
      throw InternalError("negative waiting time at seq " + std::to_string(e.seq));
    if (std::abs(e.wait_i - (e.match_time - inst.requests[e.i].atime)) > tol * scale ||
        std::abs(e.wait_j - (e.match_time - inst.requests[e.j].atime)) > tol * scale)
      throw InternalError("waiting times inconsistent with match time at seq " +
                          std::to_string(e.seq));
    if (std::abs(e.total - (e.connection + e.wait_i + e.wait_j)) > tol * scale)
      throw InternalError("total != connection + waits at seq " + std::to_string(e.seq));
    if (e.seq > 1 && e.match_time + tol * scale < prev_time)
      throw InternalError("match times decrease at seq " + std::to_string(e.seq));
    prev_time = e.match_time;
  }
}

inline nlohmann::ordered_json matching_to_json(const Matching& m) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const MatchEvent& e : m.events)
    j.push_back({{"i", e.i}, {"j", e.j}, {"time", e.match_time}, {"cost", e.total}});
  nlohmann::ordered_json out;
  out["edges"] = std::move(j);
  out["total"] = m.total_cost();
  return out;
}

}  // namespace mpmd
