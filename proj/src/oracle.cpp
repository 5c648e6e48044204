#include "stp/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>

namespace stp {

namespace {

bool structural(const LocalNodeView& v, Variant variant, const std::vector<int>& cfg)
{
  const int n = v.degree();
  const int M = v.space.num_comms();
  const int r = v.root_of;
  int touched = 0;
  std::vector<int> depths;
  for (int mu = 1; mu <= M; ++mu) {
    depths.clear();
    for (int k = 0; k < n; ++k)
      if (v.space.comm(cfg[k]) == mu) depths.push_back(v.space.depth(cfg[k]));
    if (r == mu) {
      for (int e : depths)
        if (e != 1) return false;
      ++touched;
      continue;
    }
    if (depths.empty()) continue;
    ++touched;
    if (variant == Variant::VertexDisjoint && r != 0) return false;
    const auto neg = std::count_if(depths.begin(), depths.end(), [](int e) { return e < 0; });
    if (neg != 1) return false;
    const int delta = -*std::find_if(depths.begin(), depths.end(), [](int e) { return e < 0; });
    bool branching = true;
    for (int e : depths)
      if (e > 0 && e != delta + 1) branching = false;
    const bool flat = v.flat && v.prizes(mu - 1) == 0.0 && depths.size() == 2
                      && std::count(depths.begin(), depths.end(), delta) == 1;
    if (!branching && !flat) return false;
  }
  return variant == Variant::EdgeDisjoint || touched <= 1;
}

// Delta-sum form. In edge mode the state of slot k is projected on mu first
// (d~ = d if mu_k = mu, else 0), which is what makes the product over mu meaningful.
double psi_single(const LocalNodeView& v, const std::vector<int>& cfg, int mu, bool edge_mode)
{
  const int n = v.degree();
  const int D = v.space.max_depth();
  auto unused = [&](int k) -> double {
    return edge_mode ? (v.space.comm(cfg[k]) != mu) : (cfg[k] == 0);
  };
  auto is = [&](int k, int x) -> double {
    return v.space.comm(cfg[k]) == mu && v.space.depth(cfg[k]) == x;
  };

  double b = 1.0;
  for (int k = 0; k < n; ++k) b *= unused(k);
  for (int d = 1; d <= D; ++d)
    for (int j = 0; j < n; ++j) {
      double term = is(j, -d);
      for (int k = 0; k < n; ++k)
        if (k != j) term *= is(k, d + 1) + unused(k);
      b += term;
    }
  double f = 0.0;
  if (v.flat && v.prizes(mu - 1) == 0.0)
    for (int d = 1; d <= D; ++d)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          if (l == k) continue;
          double term = is(k, -d) * is(l, d);
          for (int m = 0; m < n; ++m)
            if (m != k && m != l) term *= unused(m);
          f += term;
        }
  return b + f;
}

double psi_root(const LocalNodeView& v, const std::vector<int>& cfg, int mu, bool edge_mode)
{
  double p = 1.0;
  for (int k = 0; k < v.degree(); ++k) {
    const bool child = v.space.comm(cfg[k]) == mu && v.space.depth(cfg[k]) == 1;
    const bool unused = edge_mode ? v.space.comm(cfg[k]) != mu : cfg[k] == 0;
    p *= static_cast<double>(child) + static_cast<double>(unused);
  }
  return p;
}

bool literal(const LocalNodeView& v, Variant variant, const std::vector<int>& cfg)
{
  const int M = v.space.num_comms();
  const int r = v.root_of;
  if (variant == Variant::VertexDisjoint) {
    if (r != 0) return psi_root(v, cfg, r, false) > 0.0;
    double psi = 0.0;
    for (int mu = 1; mu <= M; ++mu) psi += psi_single(v, cfg, mu, false);
    return psi > 0.0;
  }
  double psi = 1.0;
  for (int mu = 1; mu <= M; ++mu)
    psi *= mu == r ? psi_root(v, cfg, mu, true) : psi_single(v, cfg, mu, true);
  return psi > 0.0;
}

void check_budget(const LocalNodeView& v, int slots, const OracleLimits& limits)
{
  if (v.degree() > limits.max_local_degree)
    throw capacity_error("oracle view degree exceeds the limit");
  double count = std::pow(static_cast<double>(v.space.size()), slots);
  if (count > static_cast<double>(limits.max_states))
    throw capacity_error("oracle enumeration exceeds the state budget");
}

// Visits every configuration with slot `fixed` (if >= 0) held at `fixed_state`.
void enumerate(const LocalNodeView& v, int fixed, int fixed_state,
               const std::function<void(const std::vector<int>&)>& visit)
{
  const int n = v.degree();
  const int S = v.space.size();
  std::vector<int> cfg(n, 0);
  if (fixed >= 0) cfg[fixed] = fixed_state;
  for (;;) {
    visit(cfg);
    int k = 0;
    for (; k < n; ++k) {
      if (k == fixed) continue;
      if (++cfg[k] < S) break;
      cfg[k] = 0;
    }
    if (k == n) return;
  }
}

}  // namespace

bool local_feasible(const LocalNodeView& view, Variant variant, const std::vector<int>& config,
                    PsiFilter filter)
{
  return filter == PsiFilter::Structural ? structural(view, variant, config)
                                         : literal(view, variant, config);
}

double local_prize_term(const LocalNodeView& v, const std::vector<int>& cfg)
{
  double c = 0.0;
  for (int mu = 1; mu <= v.space.num_comms(); ++mu) {
    if (mu == v.root_of) continue;
    bool present = false;
    for (int k = 0; k < v.degree(); ++k) present = present || v.space.comm(cfg[k]) == mu;
    if (!present) c += v.prizes(mu - 1);
  }
  return -c;
}

namespace {

// Incoming message plus the parent edge, which the node pays itself.
double slot_value(const LocalNodeView& view, int k, int s)
{
  const double h = view.incoming(s, k);
  return view.space.depth(s) < 0 ? h - view.weights(k) : h;
}

}  // namespace

double local_update_oracle(const LocalNodeView& view, Variant variant, int target, int state,
                           const OracleLimits& limits, PsiFilter filter)
{
  check_budget(view, view.degree() - 1, limits);
  double best = neg_inf;
  // h_ij(d, mu) fixes d_ij = d, so slot j of i's own factor holds d_ji = -d.
  enumerate(view, target, view.space.reversed(state), [&](const std::vector<int>& cfg) {
    if (!local_feasible(view, variant, cfg, filter)) return;
    double value = local_prize_term(view, cfg);
    for (int k = 0; k < view.degree(); ++k)
      if (k != target) value += slot_value(view, k, cfg[k]);
    best = std::max(best, value);
  });
  if (best != neg_inf && view.space.depth(state) > 0) best -= view.weights(target);
  return best;
}

Eigen::ArrayXXd local_update_oracle_all(const LocalNodeView& view, Variant variant,
                                        const OracleLimits& limits, PsiFilter filter)
{
  check_budget(view, view.degree(), limits);
  const int n = view.degree();
  Eigen::ArrayXXd out = Eigen::ArrayXXd::Constant(view.space.size(), n, neg_inf);
  enumerate(view, -1, 0, [&](const std::vector<int>& cfg) {
    if (!local_feasible(view, variant, cfg, filter)) return;
    const double prize = local_prize_term(view, cfg);
    for (int j = 0; j < n; ++j) {
      double value = prize;
      for (int k = 0; k < n; ++k)
        if (k != j) value += slot_value(view, k, cfg[k]);
      const int s = view.space.reversed(cfg[j]);
      if (view.space.depth(s) > 0) value -= view.weights(j);
      out(s, j) = std::max(out(s, j), value);
    }
  });
  return out;
}

namespace {

struct Tree {
  double cost;
  std::uint64_t edges;
  std::uint64_t nodes;
};

// Every tree containing the root of mu and all its terminals whose leaves are all
// terminals, the root, or nodes with a positive prize for mu.
std::vector<Tree> enumerate_trees(const Instance& inst, int mu, const OracleLimits& limits)
{
  const int N = inst.num_nodes();
  const int root = inst.root(mu);
  std::uint64_t need = 0;
  for (int t : inst.terminals(mu)) need |= 1ULL << t;
  double excluded_all = 0.0;
  for (int i = 0; i < N; ++i)
    if (!inst.is_terminal(i, mu)) excluded_all += inst.prize(i, mu);

  std::vector<Tree> out;
  std::vector<int> frontier;  // candidate edges, each leaving the current tree
  std::uint64_t in_nodes = 1ULL << root, in_edges = 0;
  int size = 0;

  auto keep = [&]() {
    if ((in_nodes & need) != need) return;
    std::vector<int> deg(N, 0);
    for (std::uint64_t m = in_edges; m; m &= m - 1) {
      const Edge& e = inst.edge(std::countr_zero(m));
      ++deg[e.u];
      ++deg[e.v];
    }
    double cost = excluded_all;
    for (std::uint64_t m = in_nodes; m; m &= m - 1) {
      const int i = std::countr_zero(m);
      if (deg[i] == 1 && i != root && !inst.is_terminal(i, mu) && inst.prize(i, mu) <= 0.0) return;
      if (!inst.is_terminal(i, mu)) cost -= inst.prize(i, mu);
    }
    for (std::uint64_t m = in_edges; m; m &= m - 1) cost += inst.edge(std::countr_zero(m)).weight;
    if (static_cast<std::int64_t>(out.size()) >= limits.max_states)
      throw capacity_error("oracle tree enumeration exceeds the budget");
    out.push_back({cost, in_edges, in_nodes});
  };

  for (const auto& inc : inst.incident(root)) frontier.push_back(inc.edge);

  std::function<void(std::size_t)> grow = [&](std::size_t pos) {
    // Skip frontier edges that now close a cycle.
    while (pos < frontier.size()) {
      const Edge& e = inst.edge(frontier[pos]);
      const bool both = ((in_nodes >> e.u) & 1) && ((in_nodes >> e.v) & 1);
      if (!both) break;
      ++pos;
    }
    if (pos == frontier.size()) {
      keep();
      return;
    }
    // Branch 1: leave frontier[pos] out for good.
    grow(pos + 1);
    // Branch 2: take it.
    if (size >= limits.max_edges_per_tree) return;
    const int eid = frontier[pos];
    const Edge& e = inst.edge(eid);
    const int fresh = ((in_nodes >> e.u) & 1) ? e.v : e.u;
    const std::size_t mark = frontier.size();
    in_nodes |= 1ULL << fresh;
    in_edges |= 1ULL << eid;
    ++size;
    for (const auto& inc : inst.incident(fresh))
      if (!((in_nodes >> inc.neighbor) & 1)) frontier.push_back(inc.edge);
    grow(pos + 1);
    frontier.resize(mark);
    --size;
    in_edges &= ~(1ULL << eid);
    in_nodes &= ~(1ULL << fresh);
  };
  grow(0);

  std::sort(out.begin(), out.end(), [](const Tree& a, const Tree& b) {
    return a.cost != b.cost ? a.cost < b.cost : a.edges < b.edges;
  });
  return out;
}

}  // namespace

ExactResult exact_pack(const Instance& inst, Variant variant, const OracleLimits& limits)
{
  if (inst.num_edges() > std::min(limits.max_total_edges, 64) || inst.num_nodes() > 64)
    throw capacity_error("instance too large for the exact oracle");
  const int M = inst.num_comms();
  std::vector<std::vector<Tree>> trees(M);
  std::vector<double> cheapest_rest(M + 1, 0.0);
  for (int mu = 1; mu <= M; ++mu) trees[mu - 1] = enumerate_trees(inst, mu, limits);
  for (int mu = M; mu >= 1; --mu)
    cheapest_rest[mu - 1] = cheapest_rest[mu]
                            + (trees[mu - 1].empty() ? INFINITY : trees[mu - 1].front().cost);

  double best = INFINITY;
  std::vector<int> pick(M, -1), best_pick;
  std::function<void(int, double, std::uint64_t, std::uint64_t)> search =
      [&](int m, double cost, std::uint64_t used_edges, std::uint64_t used_nodes) {
        if (m == M) {
          if (cost < best) {
            best = cost;
            best_pick = pick;
          }
          return;
        }
        for (std::size_t t = 0; t < trees[m].size(); ++t) {
          const Tree& tr = trees[m][t];
          if (cost + tr.cost + cheapest_rest[m + 1] >= best) break;
          if (tr.edges & used_edges) continue;
          if (variant == Variant::VertexDisjoint && (tr.nodes & used_nodes)) continue;
          pick[m] = static_cast<int>(t);
          search(m + 1, cost + tr.cost, used_edges | tr.edges, used_nodes | tr.nodes);
        }
      };
  search(0, 0.0, 0, 0);

  ExactResult res;
  res.solution = Solution::empty(M);
  res.solution.source = "exact";
  if (best_pick.empty()) return res;
  for (int mu = 1; mu <= M; ++mu) {
    const Tree& tr = trees[mu - 1][best_pick[mu - 1]];
    for (std::uint64_t m = tr.edges; m; m &= m - 1) {
      const Edge& e = inst.edge(std::countr_zero(m));
      res.solution.trees[mu - 1].push_back({e.u, e.v, 0});
    }
  }
  res.solution.rebuild_nodes(inst);
  relabel_by_bfs(res.solution, inst);
  score(res.solution, inst, variant);
  res.energy = res.solution.energy;
  return res;
}

}  // namespace stp
