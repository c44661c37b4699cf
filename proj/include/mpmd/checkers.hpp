#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mpmd/analysis.hpp"
#include "mpmd/engine.hpp"
#include "mpmd/errors.hpp"
#include "mpmd/instance.hpp"
#include "mpmd/matching.hpp"
#include "mpmd/offline.hpp"

namespace mpmd {

// Constants of the competitive analysis as functions of (alpha, beta).
// At the reference parameters alpha=1/2, beta=2: xi=9, tree_coef=11,
// tree_exp=log2(5.5), final_coef=4.5.
struct AnalysisConstants {
  double alpha = 0.0;
  double beta = 0.0;
  double wait_coef = 0.0;   // max{1/a, b/(b-1)}: wait vs path cost
  double chain_coef = 0.0;  // (1+a)(b+1): edge cost vs smaller wait
  double xi = 0.0;          // chain_coef * wait_coef: node vs child subtree
  double tree_coef = 0.0;   // xi + 2
  double tree_exp = 0.0;    // log2(xi/2 + 1)
  double final_coef = 0.0;  // (1+a) max{1/a, (b+1)/(b-1)}: final edge vs rest of cycle

  static AnalysisConstants from(double alpha, double beta) {
    AlgorithmParams{alpha, beta}.validate();
    AnalysisConstants c;
    c.alpha = alpha;
    c.beta = beta;
    c.wait_coef = std::max(1.0 / alpha, beta / (beta - 1.0));
    c.chain_coef = (1.0 + alpha) * (beta + 1.0);
    c.xi = c.chain_coef * c.wait_coef;
    c.tree_coef = c.xi + 2.0;
    c.tree_exp = std::log2(c.xi / 2.0 + 1.0);
    c.final_coef = (1.0 + alpha) * std::max(1.0 / alpha, (beta + 1.0) / (beta - 1.0));
    return c;
  }

  static AnalysisConstants from(const AlgorithmParams& p) { return from(p.alpha, p.beta); }
};

inline constexpr double kCheckerTol = 1e-7;

// Outcome of one inequality family. Slack is rhs - lhs (how far from tight);
// a violation is lhs > rhs beyond the relative tolerance.
struct CheckResult {
  std::string name;
  long checked = 0;
  long violations = 0;
  long boundary = 0;  // near-tie samples (observation checker only)
  double min_slack = std::numeric_limits<double>::infinity();
  double min_rel_slack = std::numeric_limits<double>::infinity();
  std::vector<std::string> details;

  bool ok() const { return violations == 0; }

  void record(double lhs, double rhs, double tol, const std::string& what = {}) {
    ++checked;
    const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
    const double slack = rhs - lhs;
    min_slack = std::min(min_slack, slack);
    min_rel_slack = std::min(min_rel_slack, slack / scale);
    if (lhs > rhs + tol * scale) {
      ++violations;
      if (details.size() < 8)
        details.push_back(name + ": " + std::to_string(lhs) + " > " + std::to_string(rhs) +
                          (what.empty() ? "" : " (" + what + ")"));
    }
  }

  void record_eq(double lhs, double rhs, double tol, const std::string& what = {}) {
    record(lhs, rhs, tol, what);
    record(rhs, lhs, tol, what);
    --checked;  // count the pair as one check
  }
};

// ---------------------------------------------------------------------------
// Observation: a live pair is in exactly one of three states
// ---------------------------------------------------------------------------

// For each sampled time and each pair that has arrived and is still unmatched
// at it, exactly one holds: combined budgets do not cover the distance, or
// they do and one side's wait dominates the other's by the balance factor.
// Near-tie samples (any predicate within tol of its boundary) are counted as
// boundary, with the insufficient-budget case taking precedence.
inline CheckResult check_observation1(const Instance& inst, const AlgorithmParams& params,
                                      const RunResult& run,
                                      const std::vector<double>& sample_times,
                                      double tol = kCheckerTol) {
  CheckResult res;
  res.name = "observation1-trichotomy";
  const int n = inst.request_count();
  std::vector<double> matched_at(n, std::numeric_limits<double>::infinity());
  for (const MatchEvent& e : run.matching.events)
    matched_at[e.i] = matched_at[e.j] = e.match_time;

  for (double tau : sample_times) {
    for (int p = 0; p < n; ++p) {
      if (inst.requests[p].atime > tau || matched_at[p] < tau) continue;
      for (int q = p + 1; q < n; ++q) {
        if (inst.requests[q].atime > tau || matched_at[q] < tau) continue;
        const double wp = tau - inst.requests[p].atime;
        const double wq = tau - inst.requests[q].atime;
        const double d = inst.space.distance(inst.requests[p].point, inst.requests[q].point);
        const double surplus = params.alpha * (wp + wq) - d;
        const double scale = std::max({1.0, params.alpha * (wp + wq), d, wp, wq});
        const bool near_tie = std::abs(surplus) <= tol * scale ||
                              std::abs(wp - params.beta * wq) <= tol * scale ||
                              std::abs(wq - params.beta * wp) <= tol * scale;
        ++res.checked;
        if (near_tie) {
          ++res.boundary;
          continue;
        }
        const bool c1 = surplus < 0.0;
        const bool c2 = surplus > 0.0 && wp >= params.beta * wq;
        const bool c3 = surplus > 0.0 && wq >= params.beta * wp;
        if (static_cast<int>(c1) + static_cast<int>(c2) + static_cast<int>(c3) != 1) {
          ++res.violations;
          if (res.details.size() < 8)
            res.details.push_back("pair (" + std::to_string(p) + "," + std::to_string(q) +
                                  ") at t=" + std::to_string(tau) + ": cases " +
                                  std::to_string(c1) + std::to_string(c2) + std::to_string(c3));
        }
      }
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Space-time triangle inequality along alternating paths
// ---------------------------------------------------------------------------

// cost(P) >= dist(ends) + |atime difference of ends| for an alternating path:
// every edge costs at least its space-time length, and both components obey
// their own triangle inequality.
inline void check_path_triangle_into(const Instance& inst, int end_a, int end_b, double path_cost,
                                     CheckResult& res, double tol) {
  const double lhs = inst.space.distance(inst.requests[end_a].point, inst.requests[end_b].point) +
                     std::abs(inst.requests[end_a].atime - inst.requests[end_b].atime);
  res.record(lhs, path_cost, tol,
             "path ends (" + std::to_string(end_a) + "," + std::to_string(end_b) + ")");
}

inline CheckResult check_path_triangle(const Instance& inst, const AlternatingStructure& path,
                                       double tol = kCheckerTol) {
  if (path.is_cycle) throw InputError("check_path_triangle expects a path, got a cycle");
  CheckResult res;
  res.name = "path-space-time-triangle";
  check_path_triangle_into(inst, path.nodes.front(), path.nodes.back(), path.cost(), res, tol);
  return res;
}

// Every maximal path the replay ever produces: the m initial single-edge
// paths (equality), each joined path, and each path at the moment of closure.
inline CheckResult check_all_path_triangles(const Instance& inst, const Matching& opt,
                                            const Decomposition& decomp,
                                            double tol = kCheckerTol) {
  CheckResult res;
  res.name = "path-space-time-triangle";
  for (const MatchEvent& e : opt.events) check_path_triangle_into(inst, e.i, e.j, e.total, res, tol);
  for (const PathJoin& join : decomp.joins) {
    const double joined = join.path_cost_p + join.path_cost_q + join.edge_cost;
    check_path_triangle_into(inst, join.p_far, join.q_far, joined, res, tol);
  }
  for (const CycleClosure& cl : decomp.closures)
    check_path_triangle_into(inst, cl.p, cl.q, cl.path_cost, res, tol);
  return res;
}

// ---------------------------------------------------------------------------
// Per-edge wait bound and budget chain
// ---------------------------------------------------------------------------

struct Lemma1Verdict {
  CheckResult wait_bound;    // wait(endpoint) <= wait_coef * cost(its path)
  CheckResult budget_chain;  // edge cost <= chain_coef * min wait
  bool ok() const { return wait_bound.ok() && budget_chain.ok(); }
};

// For each non-final edge joining paths P (ending at p) and Q (ending at q)
// at time tau: wait(p) <= wait_coef * cost(P), symmetrically for q, and the
// edge cost is at most chain_coef times the smaller wait.
inline Lemma1Verdict check_lemma1(const Instance& inst, const Decomposition& decomp,
                                  const AnalysisConstants& c, double tol = kCheckerTol) {
  Lemma1Verdict v;
  v.wait_bound.name = "nonfinal-edge-wait-bound";
  v.budget_chain.name = "budget-chain";
  for (const PathJoin& join : decomp.joins) {
    const double wait_p = join.match_time - inst.requests[join.p].atime;
    const double wait_q = join.match_time - inst.requests[join.q].atime;
    v.wait_bound.record(wait_p, c.wait_coef * join.path_cost_p, tol,
                        "seq " + std::to_string(join.seq) + " endpoint " + std::to_string(join.p));
    v.wait_bound.record(wait_q, c.wait_coef * join.path_cost_q, tol,
                        "seq " + std::to_string(join.seq) + " endpoint " + std::to_string(join.q));
    v.budget_chain.record(join.edge_cost, c.chain_coef * std::min(wait_p, wait_q), tol,
                          "seq " + std::to_string(join.seq));
  }
  return v;
}

// ---------------------------------------------------------------------------
// Tree bounds
// ---------------------------------------------------------------------------

struct TreeBoundVerdict {
  CheckResult node_domination;  // (a) weight(w) <= xi * min child subtree weight
  CheckResult cycle_bound;      // (b) cost_ALG-NF(C) <= tree_coef * m^tree_exp * cost_OPT(C)
  CheckResult induction;        // (c) scaled ws(T_w) <= size(T_w)^log2(xi+2)
  bool ok() const { return node_domination.ok() && cycle_bound.ok() && induction.ok(); }
};

// (a) per internal node, (b) per closed cycle, (c) the scaled-weight
// induction invariant at every node of every tree. Zero-weight leaves (fully
// degenerate co-located cycles) force a zero-weight tree; that case asserts
// the subtree weight directly instead of scaling.
inline TreeBoundVerdict check_corollary1_and_lemma3(const Forest& forest,
                                                    const std::vector<AlternatingStructure>& cycles,
                                                    int m, const AnalysisConstants& c,
                                                    double tol = kCheckerTol) {
  TreeBoundVerdict v;
  v.node_domination.name = "internal-node-domination";
  v.cycle_bound.name = "cycle-nonfinal-vs-opt-bound";
  v.induction.name = "scaled-weight-induction";

  for (const ForestNode& node : forest.nodes) {
    if (node.leaf) continue;
    const double child_min = std::min(forest.nodes[node.left].subtree_weight,
                                      forest.nodes[node.right].subtree_weight);
    v.node_domination.record(node.weight, c.xi * child_min, tol,
                             "internal node seq " + std::to_string(node.alg_seq));
  }

  const double growth = c.tree_coef * std::pow(static_cast<double>(m), c.tree_exp);
  for (std::size_t cy = 0; cy < cycles.size(); ++cy)
    v.cycle_bound.record(cycles[cy].cost_alg_nf, growth * cycles[cy].cost_opt, tol,
                         "cycle " + std::to_string(cy));

  const double h = std::log2(c.xi + 2.0);
  std::vector<int> stack;
  for (int root : forest.roots) {
    const ForestNode& rt = forest.nodes[root];
    if (rt.leaf_weight <= 0.0) {
      // Degenerate tree: every weight must vanish with it.
      v.induction.record(rt.subtree_weight, 0.0, tol, "zero-weight tree");
      continue;
    }
    const double scale = rt.leaf_count / rt.leaf_weight;
    stack.push_back(root);
    while (!stack.empty()) {
      const ForestNode& node = forest.nodes[stack.back()];
      stack.pop_back();
      const double ws = node.subtree_weight * scale;
      const double size = node.leaf_weight * scale + node.leaf_count;
      v.induction.record(ws, std::pow(size, h), tol);
      if (!node.leaf) {
        stack.push_back(node.left);
        stack.push_back(node.right);
      }
    }
  }
  return v;
}

// Final edge of each cycle: cost <= final_coef * (rest of the cycle).
inline CheckResult check_lemma5(const Decomposition& decomp, const AnalysisConstants& c,
                                double tol = kCheckerTol) {
  CheckResult res;
  res.name = "final-edge-bound";
  for (const CycleClosure& cl : decomp.closures) {
    const AlternatingStructure& cyc = decomp.cycles[cl.cycle];
    res.record(cl.edge_cost, c.final_coef * (cyc.cost_alg_nf + cyc.cost_opt), tol,
               "cycle " + std::to_string(cl.cycle));
  }
  return res;
}

// Convexity inequality behind the tree-weight lemma: with f(a)=a^log2(xi+2),
// xi*min{f(x),f(y)} + f(x) + f(y) <= f(x+y). Includes the equality points
// x=0 and x=y.
inline CheckResult check_lemma6(long samples, std::uint64_t seed, double x_max = 1e3,
                                double xi_max = 20.0, double tol = 1e-9) {
  CheckResult res;
  res.name = "convex-tree-inequality";
  std::mt19937_64 rng(seed);
  auto eval = [&](double x, double y, double xi, bool equality) {
    const double e = std::log2(xi + 2.0);
    const double fx = std::pow(x, e);
    const double fy = std::pow(y, e);
    const double lhs = xi * std::min(fx, fy) + fx + fy;
    const double rhs = std::pow(x + y, e);
    res.record(lhs, rhs, tol);
    if (equality) res.record(rhs, lhs, tol);  // both directions: must be tight
  };
  eval(1.0, 1.0, 2.0, true);
  eval(0.0, 7.5, 3.0, true);
  for (long s = 0; s < samples; ++s) {
    const double x = x_max * detail::u01(rng);
    const double y = x_max * detail::u01(rng);
    const double xi = xi_max * detail::u01(rng);
    eval(x, y, xi, false);
    if (s % 16 == 0) eval(x, x, xi, true);
    if (s % 16 == 8) eval(0.0, y, xi, true);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Competitive report
// ---------------------------------------------------------------------------

struct CycleReport {
  int cycle = 0;
  int opt_edges = 0;
  int alg_edges = 0;
  double cost_opt = 0.0;
  double cost_alg_nf = 0.0;
  double final_cost = 0.0;
  double cost_alg = 0.0;
  double ratio = 1.0;          // cost_alg / cost_opt, 1 when both vanish
  double theorem_bound = 0.0;  // ((1+f)*tree_coef*m^tree_exp + f) * cost_opt
  double lemma3_rel_slack = 0.0;
  double lemma5_rel_slack = 0.0;
  std::string tightest;  // which of the two inequalities is closer to tight
};

struct CompetitiveReport {
  AnalysisConstants constants;
  int m = 0;
  double alg_total = 0.0;
  double opt_total = 0.0;
  double ratio = 1.0;
  std::string opt_solver;  // "dp" or "line"
  Matching alg;            // the online algorithm's matching
  Matching opt;            // the exact optimum used throughout
  std::vector<CycleReport> cycles;

  CheckResult observation1;
  CheckResult path_triangle;
  CheckResult lemma1_wait;
  CheckResult budget_chain;
  CheckResult node_domination;
  CheckResult cycle_bound;
  CheckResult induction;
  CheckResult final_edge;
  CheckResult composite;     // cost_ALG(C) <= (1+f)*nf + f*opt and theorem bound
  CheckResult conservation;  // cycle sums reconstruct the totals
  CheckResult optimality;    // opt_total <= alg_total

  std::vector<const CheckResult*> all_checks() const {
    return {&observation1, &path_triangle, &lemma1_wait, &budget_chain, &node_domination,
            &cycle_bound,  &induction,     &final_edge,  &composite,    &conservation,
            &optimality};
  }
  bool all_ok() const {
    for (const CheckResult* c : all_checks())
      if (!c->ok()) return false;
    return true;
  }
};

// Runs the full pipeline: online algorithm, exact optimum (line solver as a
// fallback for large simultaneous line instances), decomposition, forest, and
// every checker. Throws CapacityError when no exact optimum is available.
inline CompetitiveReport competitive_report(const Instance& inst, const AlgorithmParams& params,
                                            double tol = kCheckerTol,
                                            int dp_cap = kDefaultDpCap, int obs_samples = 64) {
  const RunResult run = run_online(inst, params);

  Matching opt;
  std::string solver = "dp";
  try {
    opt = opt_matching(inst, dp_cap);
  } catch (const CapacityError&) {
    bool simultaneous = inst.space.kind() == MetricKind::Line;
    for (int i = 1; simultaneous && i < inst.request_count(); ++i)
      simultaneous = inst.requests[i].atime == inst.requests[0].atime;
    if (!simultaneous) throw;
    opt = line_opt_matching(inst);
    solver = "line";
  }

  const Decomposition decomp = decompose(inst, run.matching, opt);
  const Forest forest = build_forest(inst, run.matching, opt);
  const AnalysisConstants c = AnalysisConstants::from(params);

  CompetitiveReport report;
  report.constants = c;
  report.m = inst.pairs();
  report.alg_total = run.matching.total_cost();
  report.opt_total = opt.total_cost();
  report.ratio = report.opt_total > 0.0 ? report.alg_total / report.opt_total : 1.0;
  report.opt_solver = solver;
  report.alg = run.matching;
  report.opt = opt;

  std::vector<double> sample_times;
  {
    std::mt19937_64 rng(0x0b5e27edULL);
    double t_lo = inst.requests.front().atime;
    double t_hi = t_lo;
    for (const MatchEvent& e : run.matching.events) t_hi = std::max(t_hi, e.match_time);
    for (int s = 0; s < obs_samples; ++s)
      sample_times.push_back(t_lo + (t_hi - t_lo) * detail::u01(rng));
  }
  report.observation1 = check_observation1(inst, params, run, sample_times, tol);
  report.path_triangle = check_all_path_triangles(inst, opt, decomp, tol);
  const Lemma1Verdict l1 = check_lemma1(inst, decomp, c, tol);
  report.lemma1_wait = l1.wait_bound;
  report.budget_chain = l1.budget_chain;
  const TreeBoundVerdict tb =
      check_corollary1_and_lemma3(forest, decomp.cycles, report.m, c, tol);
  report.node_domination = tb.node_domination;
  report.cycle_bound = tb.cycle_bound;
  report.induction = tb.induction;
  report.final_edge = check_lemma5(decomp, c, tol);

  report.composite.name = "composite-cycle-bound";
  report.conservation.name = "cost-conservation";
  report.optimality.name = "opt-optimality";

  const double growth = c.tree_coef * std::pow(static_cast<double>(report.m), c.tree_exp);
  double sum_opt = 0.0, sum_alg = 0.0;
  for (std::size_t cy = 0; cy < decomp.cycles.size(); ++cy) {
    const AlternatingStructure& cyc = decomp.cycles[cy];
    CycleReport cr;
    cr.cycle = static_cast<int>(cy);
    for (const AlternatingEdge& e : cyc.edges) (e.from_alg ? cr.alg_edges : cr.opt_edges)++;
    cr.cost_opt = cyc.cost_opt;
    cr.cost_alg_nf = cyc.cost_alg_nf;
    cr.final_cost = cyc.final_cost;
    cr.cost_alg = cyc.cost_alg();
    cr.ratio = cr.cost_opt > 0.0 ? cr.cost_alg / cr.cost_opt : 1.0;
    cr.theorem_bound = ((1.0 + c.final_coef) * growth + c.final_coef) * cr.cost_opt;

    const double lemma3_rhs = growth * cr.cost_opt;
    const double lemma5_rhs = c.final_coef * (cr.cost_alg_nf + cr.cost_opt);
    auto rel_slack = [](double lhs, double rhs) {
      return (rhs - lhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
    };
    cr.lemma3_rel_slack = rel_slack(cr.cost_alg_nf, lemma3_rhs);
    cr.lemma5_rel_slack = rel_slack(cr.final_cost, lemma5_rhs);
    cr.tightest = cr.lemma3_rel_slack <= cr.lemma5_rel_slack ? "lemma3" : "lemma5";

    report.composite.record(cr.cost_alg,
                            (1.0 + c.final_coef) * cr.cost_alg_nf + c.final_coef * cr.cost_opt,
                            tol, "cycle " + std::to_string(cy));
    report.composite.record(cr.cost_alg, cr.theorem_bound, tol,
                            "cycle " + std::to_string(cy) + " theorem bound");

    double edge_sum = 0.0;
    for (const AlternatingEdge& e : cyc.edges) edge_sum += e.cost;
    report.conservation.record_eq(cyc.cost_opt + cyc.cost_alg(), edge_sum, tol,
                                  "cycle " + std::to_string(cy) + " edge sum");
    report.conservation.record_eq(decomp.closures[cy].path_cost,
                                  cyc.cost_alg_nf + cyc.cost_opt, tol,
                                  "cycle " + std::to_string(cy) + " tree weight");
    sum_opt += cyc.cost_opt;
    sum_alg += cyc.cost_alg();
    report.cycles.push_back(std::move(cr));
  }
  report.conservation.record_eq(sum_opt, report.opt_total, tol, "sum of cycle OPT costs");
  report.conservation.record_eq(sum_alg, report.alg_total, tol, "sum of cycle ALG costs");
  report.optimality.record(report.opt_total, report.alg_total, tol);

  return report;
}

inline nlohmann::ordered_json check_to_json(const CheckResult& c) {
  nlohmann::ordered_json j;
  j["name"] = c.name;
  j["checked"] = c.checked;
  j["violations"] = c.violations;
  if (c.boundary > 0) j["boundary_samples"] = c.boundary;
  if (std::isfinite(c.min_slack)) {  // predicate-style checks track no slack
    j["min_slack"] = c.min_slack;
    j["min_rel_slack"] = c.min_rel_slack;
  }
  if (!c.details.empty()) j["details"] = c.details;
  return j;
}

inline nlohmann::ordered_json report_to_json(const CompetitiveReport& r) {
  nlohmann::ordered_json j;
  j["m"] = r.m;
  j["params"] = {{"alpha", r.constants.alpha}, {"beta", r.constants.beta}};
  j["constants"] = {{"xi", r.constants.xi},
                    {"tree_coef", r.constants.tree_coef},
                    {"tree_exp", r.constants.tree_exp},
                    {"final_coef", r.constants.final_coef},
                    {"wait_coef", r.constants.wait_coef},
                    {"chain_coef", r.constants.chain_coef}};
  j["totals"] = {{"alg", r.alg_total},
                 {"opt", r.opt_total},
                 {"ratio", r.ratio},
                 {"opt_solver", r.opt_solver}};
  j["cycles"] = nlohmann::ordered_json::array();
  for (const CycleReport& c : r.cycles)
    j["cycles"].push_back({{"id", c.cycle},
                           {"opt_edges", c.opt_edges},
                           {"alg_edges", c.alg_edges},
                           {"cost_opt", c.cost_opt},
                           {"cost_alg_nf", c.cost_alg_nf},
                           {"final_cost", c.final_cost},
                           {"cost_alg", c.cost_alg},
                           {"ratio", c.ratio},
                           {"theorem_bound", c.theorem_bound},
                           {"lemma3_rel_slack", c.lemma3_rel_slack},
                           {"lemma5_rel_slack", c.lemma5_rel_slack},
                           {"tightest", c.tightest}});
  j["checks"] = nlohmann::ordered_json::array();
  for (const CheckResult* c : r.all_checks()) j["checks"].push_back(check_to_json(*c));
  j["ok"] = r.all_ok();
  return j;
}

}  // namespace mpmd
