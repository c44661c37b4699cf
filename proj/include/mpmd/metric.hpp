#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mpmd/errors.hpp"

namespace mpmd {

enum class MetricKind { Line, Euclidean, Matrix };

inline const char* to_string(MetricKind k) {
  switch (k) {
    case MetricKind::Line: return "line";
    case MetricKind::Euclidean: return "euclidean";
    case MetricKind::Matrix: return "matrix";
  }
  return "?";
}

// A finite metric space over point ids 0..size()-1. Distances are doubles;
// zero distance between distinct points is allowed.
class MetricSpace {
 public:
  MetricSpace() = default;  // empty space; populate via the factories

  static MetricSpace line(std::vector<double> coords) {
    MetricSpace s;
    s.kind_ = MetricKind::Line;
    s.n_ = static_cast<int>(coords.size());
    s.line_coords_ = std::move(coords);
    return s;
  }

  static MetricSpace euclidean(std::vector<std::vector<double>> coords) {
    MetricSpace s;
    s.kind_ = MetricKind::Euclidean;
    s.n_ = static_cast<int>(coords.size());
    s.dim_ = coords.empty() ? 0 : static_cast<int>(coords.front().size());
    for (const auto& row : coords) {
      if (static_cast<int>(row.size()) != s.dim_)
        throw InputError("euclidean metric: inconsistent coordinate dimension");
    }
    s.euclid_coords_ = std::move(coords);
    return s;
  }

  static MetricSpace matrix(std::vector<std::vector<double>> dist) {
    MetricSpace s;
    s.kind_ = MetricKind::Matrix;
    s.n_ = static_cast<int>(dist.size());
    for (const auto& row : dist) {
      if (static_cast<int>(row.size()) != s.n_)
        throw InputError("matrix metric: matrix is not square");
    }
    s.matrix_ = std::move(dist);
    return s;
  }

  MetricKind kind() const { return kind_; }
  int size() const { return n_; }
  int dimension() const { return kind_ == MetricKind::Euclidean ? dim_ : 1; }

  double distance(int p, int q) const {
    check_id(p);
    check_id(q);
    switch (kind_) {
      case MetricKind::Line:
        return std::abs(line_coords_[p] - line_coords_[q]);
      case MetricKind::Euclidean: {
        double s2 = 0.0;
        const auto& a = euclid_coords_[p];
        const auto& b = euclid_coords_[q];
        for (int k = 0; k < dim_; ++k) {
          const double d = a[k] - b[k];
          s2 += d * d;
        }
        return std::sqrt(s2);
      }
      case MetricKind::Matrix:
        return matrix_[p][q];
    }
    return 0.0;
  }

  // Line coordinate of point p (line spaces only).
  double line_coord(int p) const {
    check_id(p);
    if (kind_ != MetricKind::Line) throw InputError("line_coord: not a line metric");
    return line_coords_[p];
  }

  const std::vector<double>& line_coords() const { return line_coords_; }
  const std::vector<std::vector<double>>& euclidean_coords() const { return euclid_coords_; }
  const std::vector<std::vector<double>>& matrix_entries() const { return matrix_; }

 private:
  void check_id(int p) const {
    if (p < 0 || p >= n_)
      throw InputError("unknown point id " + std::to_string(p) + " (space has " +
                       std::to_string(n_) + " points)");
  }

  MetricKind kind_ = MetricKind::Line;
  int n_ = 0;
  int dim_ = 0;
  std::vector<double> line_coords_;
  std::vector<std::vector<double>> euclid_coords_;
  std::vector<std::vector<double>> matrix_;
};

struct MetricViolation {
  enum class Kind { Diagonal, Negative, Asymmetry, Triangle };
  Kind kind;
  int p = -1, q = -1, r = -1;  // r only set for triangle violations
  double lhs = 0.0, rhs = 0.0;

  std::string describe() const {
    switch (kind) {
      case Kind::Diagonal:
        return "d(" + std::to_string(p) + "," + std::to_string(p) + ") != 0";
      case Kind::Negative:
        return "d(" + std::to_string(p) + "," + std::to_string(q) + ") < 0";
      case Kind::Asymmetry:
        return "d(" + std::to_string(p) + "," + std::to_string(q) + ") != d(" +
               std::to_string(q) + "," + std::to_string(p) + ")";
      case Kind::Triangle:
        return "d(" + std::to_string(p) + "," + std::to_string(r) + ") > d(" +
               std::to_string(p) + "," + std::to_string(q) + ") + d(" +
               std::to_string(q) + "," + std::to_string(r) + ")";
    }
    return "?";
  }
};

struct MetricValidationReport {
  std::vector<MetricViolation> violations;
  bool partial = false;  // true when the triple check was sampled, not exhaustive
  std::int64_t triples_checked = 0;

  bool ok() const { return violations.empty(); }
};

inline constexpr int kMetricValidationCap = 512;
inline constexpr double kMetricTolerance = 1e-9;

// Checks the metric axioms. Symmetry and the zero diagonal are always checked
// exhaustively; triangle triples are exhaustive up to size_cap points and
// sampled (report flagged partial) above it. A violation is recorded when the
// inequality fails by more than tol relative to the magnitudes involved.
inline MetricValidationReport validate_metric(const MetricSpace& space,
                                              double tol = kMetricTolerance,
                                              int size_cap = kMetricValidationCap) {
  MetricValidationReport report;
  const int n = space.size();
  auto slack_tol = [tol](double a, double b) {
    return tol * std::max({1.0, std::abs(a), std::abs(b)});
  };

  for (int p = 0; p < n; ++p) {
    if (std::abs(space.distance(p, p)) > slack_tol(space.distance(p, p), 0.0))
      report.violations.push_back({MetricViolation::Kind::Diagonal, p, p, -1,
                                   space.distance(p, p), 0.0});
  }
  for (int p = 0; p < n; ++p) {
    for (int q = p + 1; q < n; ++q) {
      const double dpq = space.distance(p, q);
      const double dqp = space.distance(q, p);
      if (dpq < -slack_tol(dpq, 0.0))
        report.violations.push_back({MetricViolation::Kind::Negative, p, q, -1, dpq, 0.0});
      if (std::abs(dpq - dqp) > slack_tol(dpq, dqp))
        report.violations.push_back({MetricViolation::Kind::Asymmetry, p, q, -1, dpq, dqp});
    }
  }

  // Canonical triples: direct pair ordered p < r, detour point q distinct.
  auto check_triple = [&](int p, int q, int r) {
    const double direct = space.distance(p, r);
    const double via = space.distance(p, q) + space.distance(q, r);
    ++report.triples_checked;
    if (direct > via + slack_tol(direct, via))
      report.violations.push_back({MetricViolation::Kind::Triangle, p, q, r, direct, via});
  };

  if (n <= size_cap) {
    for (int p = 0; p < n; ++p)
      for (int r = p + 1; r < n; ++r)
        for (int q = 0; q < n; ++q)
          if (q != p && q != r) check_triple(p, q, r);
  } else {
    report.partial = true;
    // Deterministic sampled sweep, bounded work regardless of n.
    std::uint64_t state = 0x9e3779b97f4a7c15ULL;
    auto next = [&state]() {
      state += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = state;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      return z ^ (z >> 31);
    };
    const std::int64_t budget = 200000;
    for (std::int64_t s = 0; s < budget; ++s) {
      const int p = static_cast<int>(next() % n);
      const int q = static_cast<int>(next() % n);
      const int r = static_cast<int>(next() % n);
      if (p < r && q != p && q != r) check_triple(p, q, r);
    }
  }
  return report;
}

}  // namespace mpmd
