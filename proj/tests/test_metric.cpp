#include <catch2/catch_amalgamated.hpp>

#include "mpmd/metric.hpp"
#include "oracles.hpp"

using namespace mpmd;

TEST_CASE("line metric distances") {
  const MetricSpace s = MetricSpace::line({0.0, 1.0});
  CHECK(s.distance(0, 1) == 1.0);
  CHECK(s.distance(1, 0) == 1.0);
  CHECK(s.distance(0, 0) == 0.0);
  CHECK(s.distance(1, 1) == 0.0);
}

TEST_CASE("euclidean distances") {
  const MetricSpace s = MetricSpace::euclidean({{0.0, 0.0}, {3.0, 4.0}});
  CHECK(s.distance(0, 1) == Catch::Approx(5.0));
  CHECK(s.distance(0, 0) == 0.0);
}

TEST_CASE("unknown point ids are rejected") {
  const MetricSpace s = MetricSpace::line({0.0, 1.0});
  CHECK_THROWS_AS(s.distance(0, 2), InputError);
  CHECK_THROWS_AS(s.distance(-1, 0), InputError);
}

TEST_CASE("matrix constructor wants a square table") {
  CHECK_THROWS_AS(MetricSpace::matrix({{0.0, 1.0}}), InputError);
  CHECK_THROWS_AS(MetricSpace::euclidean({{0.0, 0.0}, {1.0}}), InputError);
}

TEST_CASE("valid metrics produce empty reports") {
  CHECK(validate_metric(MetricSpace::line({0.0, 3.0, -2.5, 7.0})).ok());
  CHECK(validate_metric(MetricSpace::euclidean({{0, 0}, {1, 2}, {4, 1}})).ok());
  CHECK(validate_metric(MetricSpace::matrix({{0, 1}, {1, 0}})).ok());
  // Zero distance between distinct points is allowed.
  CHECK(validate_metric(MetricSpace::matrix({{0, 0}, {0, 0}})).ok());
}

TEST_CASE("triangle violation is reported once") {
  const MetricSpace s = MetricSpace::matrix({{0, 1, 10}, {1, 0, 1}, {10, 1, 0}});
  const auto report = validate_metric(s);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].kind == MetricViolation::Kind::Triangle);
  CHECK(report.violations[0].lhs == Catch::Approx(10.0));
  CHECK(report.violations[0].rhs == Catch::Approx(2.0));
  CHECK_FALSE(report.partial);
}

TEST_CASE("asymmetry and diagonal violations are reported") {
  const MetricSpace asym = MetricSpace::matrix({{0, 2}, {1, 0}});
  auto report = validate_metric(asym);
  REQUIRE_FALSE(report.ok());
  bool has_asym = false;
  for (const auto& v : report.violations)
    has_asym |= v.kind == MetricViolation::Kind::Asymmetry;
  CHECK(has_asym);

  const MetricSpace diag = MetricSpace::matrix({{0.5, 1}, {1, 0}});
  report = validate_metric(diag);
  REQUIRE_FALSE(report.ok());
  CHECK(report.violations[0].kind == MetricViolation::Kind::Diagonal);
}

TEST_CASE("negative entries are reported") {
  const auto report = validate_metric(MetricSpace::matrix({{0, -1}, {-1, 0}}));
  REQUIRE_FALSE(report.ok());
  bool has_neg = false;
  for (const auto& v : report.violations) has_neg |= v.kind == MetricViolation::Kind::Negative;
  CHECK(has_neg);
}

TEST_CASE("oversized spaces get a sampled, partial triple check") {
  std::vector<double> coords(600);
  for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = static_cast<double>(i);
  const auto report = validate_metric(MetricSpace::line(coords));
  CHECK(report.partial);
  CHECK(report.ok());
  CHECK(report.triples_checked > 0);
}

TEST_CASE("tolerance absorbs float roundoff in euclidean triangles") {
  std::mt19937_64 rng(7);
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < 40; ++i)
    pts.push_back({1e6 * testing::u01(rng), 1e6 * testing::u01(rng)});
  CHECK(validate_metric(MetricSpace::euclidean(pts)).ok());
}
