#include <catch2/catch_amalgamated.hpp>

#include <numeric>

#include "mpmd/analysis.hpp"
#include "mpmd/engine.hpp"
#include "mpmd/offline.hpp"
#include "oracles.hpp"

using namespace mpmd;

namespace {

Matching pairing(const Instance& inst, std::vector<std::pair<int, int>> pairs) {
  return detail::pairing_to_matching(inst, std::move(pairs));
}

}  // namespace

TEST_CASE("identical matchings decompose into m two-edge cycles, all edges final") {
  const Instance inst = generate_uniform(4, MetricKind::Euclidean, 10.0, 5.0, 11);
  const Matching m = opt_matching(inst);
  const Decomposition d = decompose(inst, m, m);
  CHECK(d.cycles.size() == 4);
  CHECK(d.joins.empty());
  CHECK(d.closures.size() == 4);
  for (char f : d.is_final) CHECK(f == 1);
  for (const AlternatingStructure& c : d.cycles) {
    CHECK(c.is_cycle);
    CHECK(c.nodes.size() == 2);
    CHECK(c.edges.size() == 2);
    CHECK(c.cost_alg_nf == 0.0);
  }
}

TEST_CASE("crossing pairings on four requests form a single 4-cycle") {
  const Instance inst = generate_simultaneous({0.0, 1.0, 2.0, 3.0}, 0.0);
  const Matching alg = pairing(inst, {{0, 1}, {2, 3}});
  const Matching opt = pairing(inst, {{0, 2}, {1, 3}});
  const Decomposition d = decompose(inst, alg, opt);
  REQUIRE(d.cycles.size() == 1);
  const AlternatingStructure& c = d.cycles[0];
  CHECK(c.nodes.size() == 4);
  CHECK(c.edges.size() == 4);
  REQUIRE(d.is_final.size() == 2);
  CHECK(d.is_final[0] == 0);  // first ALG edge joins the two OPT paths
  CHECK(d.is_final[1] == 1);  // second one closes the cycle
  CHECK(d.joins.size() == 1);
  CHECK(d.closures.size() == 1);
  // Edge labels strictly alternate around the cycle.
  for (std::size_t k = 0; k < c.edges.size(); ++k)
    CHECK(c.edges[k].from_alg != c.edges[(k + 1) % c.edges.size()].from_alg);
}

TEST_CASE("edge-count identities on random instances") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Instance inst = testing::random_instance(seed);
    const Matching alg = run_online(inst, AlgorithmParams{}).matching;
    const Matching opt = opt_matching(inst);
    const Decomposition d = decompose(inst, alg, opt);
    const int m = inst.pairs();
    const int finals = static_cast<int>(std::count(d.is_final.begin(), d.is_final.end(), 1));
    CHECK(finals == static_cast<int>(d.cycles.size()));
    CHECK(static_cast<int>(d.joins.size()) == m - static_cast<int>(d.cycles.size()));
    // Conservation: cycle sums reconstruct both totals.
    double opt_sum = 0.0, alg_sum = 0.0;
    for (const AlternatingStructure& c : d.cycles) {
      opt_sum += c.cost_opt;
      alg_sum += c.cost_alg();
      CHECK(c.cost() == Catch::Approx(c.cost_opt + c.cost_alg()));
    }
    CHECK(opt_sum == Catch::Approx(opt.total_cost()).margin(1e-9 * std::max(1.0, opt_sum)));
    CHECK(alg_sum == Catch::Approx(alg.total_cost()).margin(1e-9 * std::max(1.0, alg_sum)));
  }
}

TEST_CASE("decompose rejects mismatched inputs") {
  const Instance inst = generate_simultaneous({0.0, 1.0, 2.0, 3.0}, 0.0);
  Matching broken = pairing(inst, {{0, 1}, {2, 3}});
  broken.events.pop_back();
  CHECK_THROWS_AS(decompose(inst, broken, pairing(inst, {{0, 2}, {1, 3}})), InputError);
}

TEST_CASE("identical matchings build a forest of single leaves") {
  const Instance inst = generate_uniform(3, MetricKind::Line, 10.0, 2.0, 5);
  const Matching m = opt_matching(inst);
  const Forest f = build_forest(inst, m, m);
  CHECK(f.nodes.size() == 3);
  CHECK(f.roots.size() == 3);
  for (const ForestNode& node : f.nodes) {
    CHECK(node.leaf);
    CHECK(node.subtree_weight == node.weight);
    CHECK(node.leaf_count == 1);
  }
}

TEST_CASE("the 4-cycle example builds one root with two leaves") {
  const Instance inst = generate_simultaneous({0.0, 1.0, 2.0, 3.0}, 0.0);
  const Matching alg = pairing(inst, {{0, 1}, {2, 3}});
  const Matching opt = pairing(inst, {{0, 2}, {1, 3}});
  const Forest f = build_forest(inst, alg, opt);
  REQUIRE(f.roots.size() == 1);
  const ForestNode& root = f.nodes[f.roots[0]];
  CHECK_FALSE(root.leaf);
  CHECK(f.nodes[root.left].leaf);
  CHECK(f.nodes[root.right].leaf);
  CHECK(root.leaf_count == 2);
  // Root carries the non-final ALG edge (0,1) of cost 1; leaves the OPT costs 2+2.
  CHECK(root.weight == Catch::Approx(1.0));
  CHECK(root.subtree_weight == Catch::Approx(5.0));
  CHECK(root.leaf_weight == Catch::Approx(4.0));
}

TEST_CASE("forest shape identities on random instances") {
  for (std::uint64_t seed = 60; seed < 100; ++seed) {
    const Instance inst = testing::random_instance(seed);
    const Matching alg = run_online(inst, AlgorithmParams{}).matching;
    const Matching opt = opt_matching(inst);
    const Decomposition d = decompose(inst, alg, opt);
    const Forest f = build_forest(inst, alg, opt);

    int leaves = 0, internals = 0;
    for (const ForestNode& node : f.nodes) {
      if (node.leaf) {
        ++leaves;
        CHECK(node.left == -1);
        CHECK(node.right == -1);
      } else {
        ++internals;
        CHECK(node.left >= 0);
        CHECK(node.right >= 0);
        // Aggregates are consistent.
        CHECK(node.subtree_weight ==
              Catch::Approx(node.weight + f.nodes[node.left].subtree_weight +
                            f.nodes[node.right].subtree_weight));
        CHECK(node.leaf_count == f.nodes[node.left].leaf_count + f.nodes[node.right].leaf_count);
      }
    }
    CHECK(leaves == inst.pairs());
    CHECK(internals == static_cast<int>(d.joins.size()));
    REQUIRE(f.cycle_root.size() == d.cycles.size());

    // Tree weight = cycle cost minus its final edge; leaf stats match the
    // cycle's OPT edges.
    for (std::size_t cy = 0; cy < d.cycles.size(); ++cy) {
      const AlternatingStructure& c = d.cycles[cy];
      const ForestNode& root = f.nodes[f.cycle_root[cy]];
      const double scale = std::max(1.0, c.cost());
      CHECK(root.subtree_weight ==
            Catch::Approx(c.cost() - c.final_cost).margin(1e-9 * scale));
      CHECK(root.leaf_weight == Catch::Approx(c.cost_opt).margin(1e-9 * scale));
      CHECK(root.leaf_count == static_cast<int>(c.edges.size()) / 2);
    }
  }
}

TEST_CASE("prefix structures: paths start and end with OPT edges") {
  const Instance inst = testing::random_instance(7, 8);
  const Matching alg = run_online(inst, AlgorithmParams{}).matching;
  const Matching opt = opt_matching(inst);
  const int m = inst.pairs();
  for (int kappa = 0; kappa <= m; ++kappa) {
    const auto structures = structures_after(inst, alg, opt, kappa);
    int covered = 0;
    for (const AlternatingStructure& s : structures) {
      covered += static_cast<int>(s.nodes.size());
      if (s.is_cycle) {
        CHECK(s.edges.size() == s.nodes.size());
      } else {
        REQUIRE(s.edges.size() >= 1);
        CHECK(s.edges.size() % 2 == 1);  // alternating, OPT at both ends
        CHECK(s.edges.size() == s.nodes.size() - 1);
        CHECK_FALSE(s.edges.front().from_alg);
        CHECK_FALSE(s.edges.back().from_alg);
        CHECK(s.final_cost == 0.0);
      }
      for (std::size_t k = 0; k + 1 < s.edges.size(); ++k)
        CHECK(s.edges[k].from_alg != s.edges[k + 1].from_alg);
    }
    CHECK(covered == inst.request_count());
    if (kappa == m)
      for (const AlternatingStructure& s : structures) CHECK(s.is_cycle);
  }
  CHECK_THROWS_AS(structures_after(inst, alg, opt, m + 1), InputError);
}
