#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mpmd/errors.hpp"
#include "mpmd/metric.hpp"

namespace mpmd {

// One request: a point of the metric space plus an arrival time. Several
// requests may share the same geometric point; the id tells them apart.
struct Request {
  int id = 0;
  int point = 0;
  double atime = 0.0;
};

struct InstanceMeta {
  std::string name;
  std::uint64_t seed = 0;
  std::string family;
};

struct Instance {
  MetricSpace space;
  std::vector<Request> requests;
  InstanceMeta meta;

  int request_count() const { return static_cast<int>(requests.size()); }
  int pairs() const { return request_count() / 2; }
};

// Throws InputError naming the offending record when an invariant is broken.
inline void validate_instance(const Instance& inst) {
  const int n = inst.request_count();
  if (n == 0 || n % 2 != 0)
    throw InputError("odd request count (" + std::to_string(n) + "); need 2m requests, m >= 1");
  for (int i = 0; i < n; ++i) {
    const Request& r = inst.requests[i];
    if (r.id != i)
      throw InputError("request ids must be 0.." + std::to_string(n - 1) +
                       " in order; found id " + std::to_string(r.id) + " at index " +
                       std::to_string(i));
    if (r.point < 0 || r.point >= inst.space.size())
      throw InputError("request " + std::to_string(i) + " references unknown point id " +
                       std::to_string(r.point));
    if (!(r.atime >= 0.0))
      throw InputError("request " + std::to_string(i) + " has negative arrival time");
    if (i > 0 && r.atime < inst.requests[i - 1].atime)
      throw InputError("arrival times must be nondecreasing; request " + std::to_string(i) +
                       " arrives before request " + std::to_string(i - 1));
  }
}

namespace detail {

// Portable uniform double in [0,1) from a fully-specified engine.
inline double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::vector<std::vector<double>> random_metric_matrix(int n, double extent, double jitter,
                                                             std::mt19937_64& rng) {
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double v = extent * u01(rng) + jitter * u01(rng);
      d[i][j] = d[j][i] = v;
    }
  // Shortest-path closure turns an arbitrary symmetric table into a metric.
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

}  // namespace detail

// 2m requests with uniform positions and arrival times uniform in
// [0, time_horizon], sorted. Deterministic per seed. For the matrix kind the
// distance table is a random symmetric table repaired into a metric by
// shortest-path closure. jitter adds a small seeded perturbation to positions
// so that pairwise distances become generically distinct.
inline Instance generate_uniform(int pairs, MetricKind kind, double extent, double time_horizon,
                                 std::uint64_t seed, int dim = 2, double jitter = 0.0) {
  if (pairs < 1) throw InputError("generate_uniform: need at least one pair");
  if (extent < 0.0 || time_horizon < 0.0 || jitter < 0.0)
    throw InputError("generate_uniform: extent, horizon and jitter must be non-negative");
  if (kind == MetricKind::Euclidean && dim < 1)
    throw InputError("generate_uniform: euclidean dimension must be >= 1");

  const int n = 2 * pairs;
  std::mt19937_64 rng(seed);
  Instance inst;
  switch (kind) {
    case MetricKind::Line: {
      std::vector<double> coords(n);
      for (double& c : coords) c = extent * detail::u01(rng) + jitter * detail::u01(rng);
      inst.space = MetricSpace::line(std::move(coords));
      break;
    }
    case MetricKind::Euclidean: {
      std::vector<std::vector<double>> coords(n, std::vector<double>(dim));
      for (auto& row : coords)
        for (double& c : row) c = extent * detail::u01(rng) + jitter * detail::u01(rng);
      inst.space = MetricSpace::euclidean(std::move(coords));
      break;
    }
    case MetricKind::Matrix:
      inst.space = MetricSpace::matrix(detail::random_metric_matrix(n, extent, jitter, rng));
      break;
  }

  std::vector<double> times(n);
  for (double& t : times) t = time_horizon * detail::u01(rng);
  std::sort(times.begin(), times.end());
  inst.requests.resize(n);
  for (int i = 0; i < n; ++i) inst.requests[i] = Request{i, i, times[i]};

  inst.meta = InstanceMeta{"uniform-" + std::string(to_string(kind)) + "-m" +
                               std::to_string(pairs) + "-s" + std::to_string(seed),
                           seed, "uniform"};
  validate_instance(inst);
  return inst;
}

// All requests arrive at the same time t0; points are line coordinates.
// jitter perturbs the coordinates (seeded) to break distance ties.
inline Instance generate_simultaneous(std::vector<double> points, double t0, double jitter = 0.0,
                                      std::uint64_t seed = 0) {
  if (points.empty() || points.size() % 2 != 0)
    throw InputError("generate_simultaneous: need an even, positive number of points");
  if (!(t0 >= 0.0)) throw InputError("generate_simultaneous: t0 must be non-negative");
  if (jitter > 0.0) {
    std::mt19937_64 rng(seed);
    for (double& p : points) p += jitter * detail::u01(rng);
  }
  const int n = static_cast<int>(points.size());
  Instance inst;
  inst.space = MetricSpace::line(std::move(points));
  inst.requests.resize(n);
  for (int i = 0; i < n; ++i) inst.requests[i] = Request{i, i, t0};
  inst.meta = InstanceMeta{"simultaneous-n" + std::to_string(n), seed, "simultaneous"};
  validate_instance(inst);
  return inst;
}

inline constexpr int kMaxAdversarialLevel = 10;  // 2^(k+1) requests

// Simultaneous line family on which greedy nearest-pair matching (and hence
// the online algorithm) pays a factor growing as (3/2)^k over the optimum.
// Level k doubles level k-1: a translated copy is appended after a gap sized
// at half the previous level's greedy cost, which makes greedy consume the
// middle pair and then span the whole block.
//
//   level 0:  {0, 1}
//   gap_k  =  3^(k-1) / 2
//   level k:  level k-1  ++  (level k-1 shifted by span_{k-1} + gap_k)
//
// Greedy pays exactly 3^k, the optimum pays 2^k, so the ratio is (3/2)^k with
// m = 2^k pairs. All coordinates are small multiples of 0.5, hence exact.
inline Instance generate_greedy_adversarial_line(int level, std::uint64_t seed = 0) {
  if (level < 1) throw InputError("adversarial line family: level must be >= 1");
  if (level > kMaxAdversarialLevel)
    throw InputError("adversarial line family: level " + std::to_string(level) +
                     " exceeds cap " + std::to_string(kMaxAdversarialLevel));
  std::vector<double> pts = {0.0, 1.0};
  double span = 1.0;
  double gap = 0.5;
  for (int k = 1; k <= level; ++k) {
    const double shift = span + gap;
    const std::size_t half = pts.size();
    for (std::size_t i = 0; i < half; ++i) pts.push_back(pts[i] + shift);
    span = 2.0 * span + gap;
    gap *= 3.0;
  }
  Instance inst = generate_simultaneous(std::move(pts), 0.0);
  inst.meta = InstanceMeta{"adversarial-line-k" + std::to_string(level), seed, "adversarial-line"};
  return inst;
}

// ---------------------------------------------------------------------------
// JSON file format
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json instance_to_json(const Instance& inst) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json metric;
  metric["kind"] = to_string(inst.space.kind());
  switch (inst.space.kind()) {
    case MetricKind::Line: metric["coords"] = inst.space.line_coords(); break;
    case MetricKind::Euclidean: metric["coords"] = inst.space.euclidean_coords(); break;
    case MetricKind::Matrix: metric["matrix"] = inst.space.matrix_entries(); break;
  }
  j["metric"] = metric;
  j["requests"] = nlohmann::ordered_json::array();
  for (const Request& r : inst.requests)
    j["requests"].push_back({{"id", r.id}, {"point", r.point}, {"time", r.atime}});
  j["meta"] = {{"name", inst.meta.name}, {"seed", inst.meta.seed}, {"family", inst.meta.family}};
  return j;
}

inline Instance instance_from_json(const nlohmann::ordered_json& j) {
  Instance inst;
  try {
    const auto& metric = j.at("metric");
    const std::string kind = metric.at("kind").get<std::string>();
    if (kind == "line") {
      inst.space = MetricSpace::line(metric.at("coords").get<std::vector<double>>());
    } else if (kind == "euclidean") {
      inst.space =
          MetricSpace::euclidean(metric.at("coords").get<std::vector<std::vector<double>>>());
    } else if (kind == "matrix") {
      inst.space =
          MetricSpace::matrix(metric.at("matrix").get<std::vector<std::vector<double>>>());
    } else {
      throw InputError("unknown metric kind \"" + kind + "\"");
    }
    for (const auto& rj : j.at("requests")) {
      Request r;
      r.id = rj.at("id").get<int>();
      r.point = rj.at("point").get<int>();
      r.atime = rj.at("time").get<double>();
      inst.requests.push_back(r);
    }
    if (j.contains("meta")) {
      const auto& meta = j.at("meta");
      inst.meta.name = meta.value("name", std::string{});
      inst.meta.seed = meta.value("seed", std::uint64_t{0});
      inst.meta.family = meta.value("family", std::string{});
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed instance JSON: ") + e.what());
  }
  validate_instance(inst);
  return inst;
}

inline void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open \"" + path + "\" for writing");
  out << instance_to_json(inst).dump(2) << '\n';
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open instance file \"" + path + "\"");
  nlohmann::ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("cannot parse \"" + path + "\": " + e.what());
  }
  return instance_from_json(j);
}

}  // namespace mpmd
