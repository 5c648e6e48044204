#include "stp/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>
#include <tuple>

#include "stp/kernels.hpp"

namespace stp {

std::string to_string(HeuristicScheme s) { return s == HeuristicScheme::SPT ? "spt" : "mst"; }

HeuristicScheme parse_scheme(const std::string& s)
{
  if (s == "spt") return HeuristicScheme::SPT;
  if (s == "mst") return HeuristicScheme::MST;
  throw std::invalid_argument("unknown heuristic scheme '" + s + "'");
}

WorkingGraph WorkingGraph::full(const Instance& inst)
{
  return {std::vector<char>(inst.num_edges(), 1), std::vector<char>(inst.num_nodes(), 1)};
}

Eigen::ArrayXd spt_reweight(const CavityField& field, int mu)
{
  const StateSpace& sp = field.space;
  Eigen::ArrayXd w(field.num_edges());
  for (int e = 0; e < field.num_edges(); ++e) {
    double best = neg_inf;
    for (int d = -sp.max_depth(); d <= sp.max_depth(); ++d)
      if (d != 0) best = std::max(best, field.values(sp.index(d, mu), e));
    w(e) = best == neg_inf ? INFINITY : std::abs(best);
  }
  return w;
}

std::vector<char> mst_penalized_nodes(const Instance& inst, const MessageTable& messages, int mu)
{
  const int D = messages.space.max_depth();
  std::vector<char> out(inst.num_nodes(), 0);
  for (int i = 0; i < inst.num_nodes(); ++i) {
    if (inst.root(mu) == i) continue;
    const LocalNodeView v = make_view(inst, messages, i, false);
    const int n = v.degree();
    double idle = -inst.prize(i, mu);
    for (int k = 0; k < n; ++k) idle += v.z(k);
    double active = neg_inf;
    for (int d = 1; d <= D; ++d) {
      // One neighbor is the parent (its message at -d), the others are children or idle.
      double none = 0.0, one = neg_inf;
      for (int k = 0; k < n; ++k) {
        const double base = std::max(v.a(k, d + 1, mu), v.z(k));
        one = std::max(one + base, none + v.a(k, -d, mu));
        none += base;
      }
      active = std::max(active, one);
    }
    out[i] = active < idle;
  }
  return out;
}

std::vector<int> prune_tree(const Instance& inst, std::vector<int> edges, int mu, PruneMode mode)
{
  const int root = inst.root(mu);
  std::vector<int> deg(inst.num_nodes(), 0);
  std::vector<std::vector<int>> at(inst.num_nodes());
  for (int e : edges) {
    ++deg[inst.edge(e).u];
    ++deg[inst.edge(e).v];
    at[inst.edge(e).u].push_back(e);
    at[inst.edge(e).v].push_back(e);
  }
  std::vector<char> gone(inst.num_edges(), 0);
  auto removable = [&](int i, int e) {
    if (i == root || deg[i] != 1 || inst.is_terminal(i, mu)) return false;
    if (mode == PruneMode::TerminalLeaves) return true;
    return inst.edge(e).weight > inst.prize(i, mu);
  };
  auto live_edge = [&](int i) {
    for (int e : at[i])
      if (!gone[e]) return e;
    return -1;
  };
  std::queue<int> q;
  for (int i = 0; i < inst.num_nodes(); ++i)
    if (deg[i] == 1) q.push(i);
  while (!q.empty()) {
    const int i = q.front();
    q.pop();
    const int e = live_edge(i);
    if (e < 0 || !removable(i, e)) continue;
    gone[e] = 1;
    const int other = inst.edge(e).u == i ? inst.edge(e).v : inst.edge(e).u;
    --deg[i];
    if (--deg[other] == 1) q.push(other);
  }
  edges.erase(std::remove_if(edges.begin(), edges.end(), [&](int e) { return gone[e]; }), edges.end());
  std::sort(edges.begin(), edges.end());
  return edges;
}

namespace {

std::optional<std::vector<int>> shortest_path_tree(const Instance& inst, const WorkingGraph& g,
                                                   int mu, const Eigen::ArrayXd& aux)
{
  const int N = inst.num_nodes();
  const int root = inst.root(mu);
  using Key = std::tuple<double, double, int>;  // auxiliary length, true length, node
  std::vector<double> dist(N, INFINITY), real(N, INFINITY);
  std::vector<int> via(N, -1);
  std::vector<char> done(N, 0);
  std::priority_queue<Key, std::vector<Key>, std::greater<>> pq;
  dist[root] = real[root] = 0.0;
  pq.emplace(0.0, 0.0, root);
  while (!pq.empty()) {
    const auto [d, r, x] = pq.top();
    pq.pop();
    if (done[x]) continue;
    done[x] = 1;
    for (const auto& inc : inst.incident(x)) {
      if (!g.usable(inst, inc.edge) || !std::isfinite(aux(inc.edge))) continue;
      const int y = inc.neighbor;
      const double nd = d + aux(inc.edge), nr = r + inst.edge(inc.edge).weight;
      if (std::tie(nd, nr) < std::tie(dist[y], real[y])) {
        dist[y] = nd;
        real[y] = nr;
        via[y] = inc.edge;
        pq.emplace(nd, nr, y);
      }
    }
  }
  std::set<int> edges;
  for (int t : inst.terminals(mu)) {
    if (!done[t]) return std::nullopt;
    for (int x = t; x != root;) {
      const int e = via[x];
      if (!edges.insert(e).second) break;
      x = inst.edge(e).u == x ? inst.edge(e).v : inst.edge(e).u;
    }
  }
  return std::vector<int>(edges.begin(), edges.end());
}

std::optional<std::vector<int>> spanning_tree(const Instance& inst, const WorkingGraph& g, int mu,
                                              const Eigen::ArrayXd& aux)
{
  const int root = inst.root(mu);
  using Key = std::tuple<double, int, int>;  // cost, edge id, far node
  std::vector<char> in(inst.num_nodes(), 0);
  std::priority_queue<Key, std::vector<Key>, std::greater<>> pq;
  std::vector<int> edges;
  auto add = [&](int x) {
    in[x] = 1;
    for (const auto& inc : inst.incident(x))
      if (!in[inc.neighbor] && g.usable(inst, inc.edge) && std::isfinite(aux(inc.edge)))
        pq.emplace(aux(inc.edge), inc.edge, inc.neighbor);
  };
  add(root);
  while (!pq.empty()) {
    const auto [c, e, y] = pq.top();
    pq.pop();
    if (in[y]) continue;
    edges.push_back(e);
    add(y);
  }
  for (int t : inst.terminals(mu))
    if (!in[t]) return std::nullopt;
  return edges;
}

}  // namespace

std::optional<std::vector<int>> heuristic_tree(const Instance& inst, const WorkingGraph& graph,
                                               int mu, HeuristicScheme scheme,
                                               const Eigen::ArrayXd& aux, PruneMode prune)
{
  if (!graph.node_alive[inst.root(mu)]) return std::nullopt;
  auto tree = scheme == HeuristicScheme::SPT ? shortest_path_tree(inst, graph, mu, aux)
                                             : spanning_tree(inst, graph, mu, aux);
  if (!tree) return tree;
  return prune_tree(inst, std::move(*tree), mu, prune);
}

Eigen::ArrayXd auxiliary_weights(const Instance& inst, HeuristicScheme scheme,
                                 const CavityField& field, const MessageTable& messages, int mu,
                                 double penalty)
{
  if (scheme == HeuristicScheme::SPT) return spt_reweight(field, mu);
  if (penalty <= 0.0) {
    penalty = 1.0;
    for (const auto& e : inst.edges()) penalty += e.weight;
  }
  const auto bad = mst_penalized_nodes(inst, messages, mu);
  Eigen::ArrayXd w(inst.num_edges());
  for (int e = 0; e < inst.num_edges(); ++e)
    w(e) = inst.edge(e).weight + penalty * (bad[inst.edge(e).u] + bad[inst.edge(e).v]);
  return w;
}

Solution run_heuristic_round(const Instance& inst, Variant variant, HeuristicScheme scheme,
                             const CavityField& field, const MessageTable& messages,
                             const HeuristicConfig& config, Rng& rng, int iteration)
{
  const int M = inst.num_comms();
  std::vector<int> order = config.order;
  if (order.empty()) {
    order.resize(M);
    std::iota(order.begin(), order.end(), 1);
    portable_shuffle(order.begin(), order.end(), rng);
  }
  Solution sol = Solution::empty(M);
  sol.source = to_string(scheme);
  sol.iteration = iteration;

  WorkingGraph graph = WorkingGraph::full(inst);
  for (int mu : order) {
    WorkingGraph g = graph;
    if (variant == Variant::VertexDisjoint)
      for (int nu = 1; nu <= M; ++nu)
        if (nu != mu)
          for (int t : inst.terminals(nu)) g.node_alive[t] = 0;
    const Eigen::ArrayXd aux = auxiliary_weights(inst, scheme, field, messages, mu, config.penalty);
    const auto tree = heuristic_tree(inst, g, mu, scheme, aux, config.prune);
    if (!tree) {
      sol.rebuild_nodes(inst);
      sol.feasible = false;
      sol.energy.reset();
      return sol;
    }
    for (int e : *tree) {
      sol.trees[mu - 1].push_back({inst.edge(e).u, inst.edge(e).v, 0});
      graph.edge_alive[e] = 0;
      if (variant == Variant::VertexDisjoint) {
        graph.node_alive[inst.edge(e).u] = 0;
        graph.node_alive[inst.edge(e).v] = 0;
      }
    }
    if (variant == Variant::VertexDisjoint) graph.node_alive[inst.root(mu)] = 0;
  }
  relabel_by_bfs(sol, inst);
  sol.rebuild_nodes(inst);
  score(sol, inst, variant);
  return sol;
}

}  // namespace stp
