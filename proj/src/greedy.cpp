#include <numeric>

#include "stp/solver.hpp"

namespace stp {

GreedyResult greedy_solve(const Instance& inst, std::vector<int> order,
                          const SolverConfig& single_tree)
{
  const int M = inst.num_comms();
  if (order.empty()) {
    order.resize(M);
    std::iota(order.begin(), order.end(), 1);
  }
  GreedyResult out{Solution::empty(M), std::nullopt, 0};
  out.solution.source = "greedy";

  std::vector<char> edge_used(inst.num_edges(), 0), node_used(inst.num_nodes(), 0);
  std::vector<char> routed(M + 1, 0);

  for (int mu : order) {
    // Nodes closed to this tree: unrouted terminals of others, and for V-DStP every node
    // of a routed tree.
    std::vector<char> closed = node_used;
    for (int nu = 1; nu <= M; ++nu)
      if (nu != mu && !routed[nu])
        for (int t : inst.terminals(nu)) closed[t] = 1;

    Instance sub(inst.num_nodes(), 1);
    for (int e = 0; e < inst.num_edges(); ++e) {
      const Edge& ed = inst.edge(e);
      if (edge_used[e] || closed[ed.u] || closed[ed.v]) continue;
      sub.add_edge(ed.u, ed.v, ed.weight);
    }
    for (int t : inst.terminals(mu)) sub.add_terminal(1, t);
    sub.set_root(1, inst.root(mu));
    for (int i = 0; i < inst.num_nodes(); ++i)
      if (!inst.is_terminal(i, mu) && inst.prize(i, mu) > 0.0) sub.set_prize(i, 1, inst.prize(i, mu));
    sub.validate();

    SolverConfig cfg = single_tree;
    cfg.heuristics.order.clear();
    Solution tree;
    try {
      tree = solve(sub, cfg).best;
    } catch (const infeasible_error&) {
      break;
    }
    if (!tree.feasible) break;

    // Node ids are shared with the sub-instance; only edge ids differ.
    for (const TreeEdge& te : tree.trees[0]) {
      out.solution.trees[mu - 1].push_back(te);
      edge_used[inst.find_edge(te.child, te.parent)] = 1;
      if (single_tree.variant == Variant::VertexDisjoint) {
        node_used[te.child] = 1;
        node_used[te.parent] = 1;
      }
    }
    if (single_tree.variant == Variant::VertexDisjoint) node_used[inst.root(mu)] = 1;
    routed[mu] = 1;
    ++out.packed;
  }

  out.solution.rebuild_nodes(inst);
  if (out.packed == M) {
    score(out.solution, inst, single_tree.variant);
    out.energy = out.solution.energy;
  } else {
    out.solution.feasible = false;
    out.solution.energy.reset();
  }
  return out;
}

}  // namespace stp
