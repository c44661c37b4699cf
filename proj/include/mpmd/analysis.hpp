#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "mpmd/errors.hpp"
#include "mpmd/instance.hpp"
#include "mpmd/matching.hpp"

namespace mpmd {

// ---------------------------------------------------------------------------
// Alternating structures
//
// Overlaying the online matching on the offline one yields paths and cycles
// whose edges alternate between the two. Replaying the online edges in
// creation order, each edge either joins two maximal alternating paths
// (non-final) or closes one into a cycle (final). Everything downstream of
// the competitive analysis reads off this replay.
// ---------------------------------------------------------------------------

struct AlternatingEdge {
  int a = 0, b = 0;
  bool from_alg = false;
  double cost = 0.0;
  int alg_seq = 0;  // creation order for ALG edges, 0 for OPT edges
};

struct AlternatingStructure {
  bool is_cycle = false;
  std::vector<int> nodes;               // request ids in traversal order
  std::vector<AlternatingEdge> edges;   // edge k connects nodes[k], nodes[k+1] (wrapping if cycle)
  double cost_opt = 0.0;
  double cost_alg_nf = 0.0;             // non-final ALG edges
  double final_cost = 0.0;              // the closing edge; 0 for paths

  double cost_alg() const { return cost_alg_nf + final_cost; }
  double cost() const { return cost_opt + cost_alg(); }
};

// One record per non-final ALG edge: the two paths it joined, captured at the
// moment of the join (used by the per-edge lemma checks).
struct PathJoin {
  int seq = 0;
  int p = 0, q = 0;          // edge endpoints
  int p_far = 0, q_far = 0;  // far endpoints of the joined paths
  double path_cost_p = 0.0;  // cost of the path ending at p
  double path_cost_q = 0.0;
  double edge_cost = 0.0;
  double match_time = 0.0;
};

// One record per final ALG edge.
struct CycleClosure {
  int seq = 0;
  int p = 0, q = 0;
  double path_cost = 0.0;  // cost of the path it closed = cycle cost minus this edge
  double edge_cost = 0.0;
  double match_time = 0.0;
  int cycle = 0;  // index into Decomposition::cycles
};

struct Decomposition {
  int request_count = 0;
  std::vector<AlternatingStructure> cycles;  // in closure order
  std::vector<char> is_final;                // per ALG edge, indexed seq-1
  std::vector<PathJoin> joins;
  std::vector<CycleClosure> closures;
};

// Forest mirror of the replay: one leaf per OPT edge, one internal node per
// non-final ALG edge; closing edges add no node. Trees are full binary.
struct ForestNode {
  bool leaf = true;
  double weight = 0.0;
  int left = -1, right = -1, parent = -1;
  int edge_a = 0, edge_b = 0;
  int alg_seq = 0;  // 0 for leaves
  double subtree_weight = 0.0;  // weight of the tree rooted here
  double leaf_weight = 0.0;     // total weight of its leaves
  int leaf_count = 0;
};

struct Forest {
  std::vector<ForestNode> nodes;
  std::vector<int> roots;       // all surviving trees, in creation order
  std::vector<int> cycle_root;  // cycle index -> root node id (closed trees)
};

namespace detail {

inline void check_decompose_inputs(const Instance& inst, const Matching& alg,
                                   const Matching& opt) {
  try {
    validate_matching(inst, alg);
    validate_matching(inst, opt);
  } catch (const InternalError& e) {
    throw InputError(std::string("decompose needs two perfect matchings over the instance: ") +
                     e.what());
  }
}

// Shared replay: walks ALG edges in seq order over the fixed OPT edges,
// maintaining live paths as (endpoint, endpoint, cost) triples plus the
// forest. Stops after max_steps ALG edges (pass m for the full run).
struct Replay {
  const Instance& inst;
  const Matching& alg;
  const Matching& opt;

  std::vector<int> opt_mate, alg_mate;
  std::vector<int> opt_event_of, alg_event_of;  // request -> event index

  struct LivePath {
    int end1 = -1, end2 = -1;
    double cost = 0.0;
    int tree = -1;
  };
  std::vector<LivePath> paths;
  std::vector<int> path_of;  // request -> live path id, -1 when interior or closed

  Decomposition decomp;
  Forest forest;
  std::vector<char> root_alive;

  Replay(const Instance& i, const Matching& a, const Matching& o, int max_steps)
      : inst(i), alg(a), opt(o) {
    const int n = inst.request_count();
    decomp.request_count = n;
    opt_mate.assign(n, -1);
    alg_mate.assign(n, -1);
    opt_event_of.assign(n, -1);
    alg_event_of.assign(n, -1);
    path_of.assign(n, -1);
    paths.reserve(n / 2);
    forest.nodes.reserve(n - 1);

    for (std::size_t k = 0; k < opt.events.size(); ++k) {
      const MatchEvent& e = opt.events[k];
      opt_mate[e.i] = e.j;
      opt_mate[e.j] = e.i;
      opt_event_of[e.i] = opt_event_of[e.j] = static_cast<int>(k);
      const int pid = static_cast<int>(paths.size());
      const int leaf = new_leaf(e);
      paths.push_back({e.i, e.j, e.total, leaf});
      path_of[e.i] = path_of[e.j] = pid;
    }

    const int steps = std::min<int>(max_steps, static_cast<int>(alg.events.size()));
    for (int k = 0; k < steps; ++k) step(alg.events[k]);

    for (std::size_t r = 0; r < forest.nodes.size(); ++r)
      if (forest.nodes[r].parent == -1) forest.roots.push_back(static_cast<int>(r));
  }

  int new_leaf(const MatchEvent& e) {
    ForestNode node;
    node.leaf = true;
    node.weight = node.subtree_weight = node.leaf_weight = e.total;
    node.leaf_count = 1;
    node.edge_a = e.i;
    node.edge_b = e.j;
    forest.nodes.push_back(node);
    return static_cast<int>(forest.nodes.size()) - 1;
  }

  void step(const MatchEvent& e) {
    alg_mate[e.i] = e.j;
    alg_mate[e.j] = e.i;
    alg_event_of[e.i] = alg_event_of[e.j] = e.seq - 1;
    const int pid = path_of[e.i];
    const int qid = path_of[e.j];
    if (pid == -1 || qid == -1)
      throw InternalError("ALG edge seq " + std::to_string(e.seq) +
                          " touches a request that is not a live path endpoint");

    if (pid == qid) {  // closes the path into a cycle
      decomp.is_final.push_back(1);
      CycleClosure cl;
      cl.seq = e.seq;
      cl.p = e.i;
      cl.q = e.j;
      cl.path_cost = paths[pid].cost;
      cl.edge_cost = e.total;
      cl.match_time = e.match_time;
      cl.cycle = static_cast<int>(decomp.cycles.size());
      decomp.closures.push_back(cl);
      forest.cycle_root.push_back(paths[pid].tree);
      decomp.cycles.push_back(walk_cycle(e));
      path_of[e.i] = path_of[e.j] = -1;
      return;
    }

    decomp.is_final.push_back(0);
    PathJoin join;
    join.seq = e.seq;
    join.p = e.i;
    join.q = e.j;
    join.p_far = other_end(pid, e.i);
    join.q_far = other_end(qid, e.j);
    join.path_cost_p = paths[pid].cost;
    join.path_cost_q = paths[qid].cost;
    join.edge_cost = e.total;
    join.match_time = e.match_time;
    decomp.joins.push_back(join);

    ForestNode node;
    node.leaf = false;
    node.weight = e.total;
    node.left = paths[pid].tree;
    node.right = paths[qid].tree;
    node.edge_a = e.i;
    node.edge_b = e.j;
    node.alg_seq = e.seq;
    const ForestNode& l = forest.nodes[node.left];
    const ForestNode& r = forest.nodes[node.right];
    node.subtree_weight = node.weight + l.subtree_weight + r.subtree_weight;
    node.leaf_weight = l.leaf_weight + r.leaf_weight;
    node.leaf_count = l.leaf_count + r.leaf_count;
    forest.nodes.push_back(node);
    const int internal = static_cast<int>(forest.nodes.size()) - 1;
    forest.nodes[node.left].parent = internal;
    forest.nodes[node.right].parent = internal;

    paths[pid].cost += paths[qid].cost + e.total;
    paths[pid].tree = internal;
    const int far_q = join.q_far;
    paths[pid].end1 = join.p_far;
    paths[pid].end2 = far_q;
    path_of[e.i] = path_of[e.j] = -1;
    path_of[join.p_far] = pid;
    path_of[far_q] = pid;
  }

  int other_end(int pid, int endpoint) const {
    const LivePath& p = paths[pid];
    if (p.end1 == endpoint) return p.end2;
    if (p.end2 == endpoint) return p.end1;
    throw InternalError("request " + std::to_string(endpoint) +
                        " is not an endpoint of its own path");
  }

  AlternatingEdge make_edge(int a, int b, bool from_alg) const {
    AlternatingEdge edge;
    edge.a = a;
    edge.b = b;
    edge.from_alg = from_alg;
    if (from_alg) {
      const MatchEvent& e = alg.events[alg_event_of[a]];
      edge.cost = e.total;
      edge.alg_seq = e.seq;
    } else {
      edge.cost = opt.events[opt_event_of[a]].total;
    }
    return edge;
  }

  // Traverses the freshly closed cycle: OPT edge, ALG edge, alternating.
  AlternatingStructure walk_cycle(const MatchEvent& closing) const {
    AlternatingStructure s;
    s.is_cycle = true;
    s.final_cost = closing.total;
    int r = closing.i;
    do {
      s.nodes.push_back(r);
      const int via_opt = opt_mate[r];
      s.edges.push_back(make_edge(r, via_opt, false));
      s.cost_opt += s.edges.back().cost;
      s.nodes.push_back(via_opt);
      const int via_alg = alg_mate[via_opt];
      s.edges.push_back(make_edge(via_opt, via_alg, true));
      if (s.edges.back().alg_seq != closing.seq) s.cost_alg_nf += s.edges.back().cost;
      r = via_alg;
    } while (r != closing.i);
    return s;
  }

  // Traverses a live path from one endpoint; starts and ends with OPT edges.
  AlternatingStructure walk_path(int pid) const {
    AlternatingStructure s;
    int r = paths[pid].end1;
    s.nodes.push_back(r);
    while (true) {
      const int via_opt = opt_mate[r];
      s.edges.push_back(make_edge(r, via_opt, false));
      s.cost_opt += s.edges.back().cost;
      s.nodes.push_back(via_opt);
      if (alg_mate[via_opt] == -1) break;
      const int via_alg = alg_mate[via_opt];
      s.edges.push_back(make_edge(via_opt, via_alg, true));
      s.cost_alg_nf += s.edges.back().cost;
      s.nodes.push_back(via_alg);
      r = via_alg;
    }
    return s;
  }
};

}  // namespace detail

// Full replay of the ALG edges over the OPT edges: final/non-final labels,
// per-join path snapshots, and the resulting alternating cycles.
inline Decomposition decompose(const Instance& inst, const Matching& alg, const Matching& opt) {
  detail::check_decompose_inputs(inst, alg, opt);
  detail::Replay replay(inst, alg, opt, static_cast<int>(alg.events.size()));
  return std::move(replay.decomp);
}

// The structures present after the first kappa ALG edges: the kappa-step
// maximal alternating paths plus any cycles already closed.
inline std::vector<AlternatingStructure> structures_after(const Instance& inst,
                                                          const Matching& alg,
                                                          const Matching& opt, int kappa) {
  detail::check_decompose_inputs(inst, alg, opt);
  if (kappa < 0 || kappa > static_cast<int>(alg.events.size()))
    throw InputError("structures_after: kappa out of range");
  detail::Replay replay(inst, alg, opt, kappa);
  std::vector<AlternatingStructure> out = std::move(replay.decomp.cycles);
  std::vector<char> emitted(replay.paths.size(), 0);
  for (int r = 0; r < inst.request_count(); ++r) {
    const int pid = replay.path_of[r];
    if (pid == -1 || emitted[pid]) continue;
    emitted[pid] = 1;
    out.push_back(replay.walk_path(pid));
  }
  return out;
}

// The forest built alongside the replay. Leaves carry OPT edge costs,
// internal nodes carry non-final ALG edge costs; subtree aggregates are
// precomputed. cycle_root maps each closed cycle to its tree.
inline Forest build_forest(const Instance& inst, const Matching& alg, const Matching& opt) {
  detail::check_decompose_inputs(inst, alg, opt);
  detail::Replay replay(inst, alg, opt, static_cast<int>(alg.events.size()));
  return std::move(replay.forest);
}

}  // namespace mpmd
