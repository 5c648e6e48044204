#include "stp/solution.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

#include "stp/format.hpp"

namespace stp {

namespace {

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x)
  {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b)
  {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

std::string node_name(int i) { return std::to_string(i + 1); }

}  // namespace

Solution Solution::empty(int num_comms)
{
  Solution s;
  s.trees.assign(num_comms, {});
  s.nodes.assign(num_comms, {});
  return s;
}

void Solution::rebuild_nodes(const Instance& inst)
{
  nodes.assign(trees.size(), {});
  for (std::size_t m = 0; m < trees.size(); ++m) {
    auto& v = nodes[m];
    for (const auto& te : trees[m]) {
      v.push_back(te.child);
      v.push_back(te.parent);
    }
    v.push_back(inst.root(static_cast<int>(m) + 1));
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
}

ValidationReport validate(const Solution& sol, const Instance& inst, const ValidationOptions& opt)
{
  ValidationReport rep;
  auto fail = [&](const std::string& msg) { rep.violations.push_back(msg); };
  const int M = inst.num_comms();
  const int N = inst.num_nodes();
  if (sol.num_comms() != M || static_cast<int>(sol.nodes.size()) != M) {
    fail("solution has " + std::to_string(sol.num_comms()) + " trees for " + std::to_string(M)
         + " communications");
    return rep;
  }

  std::vector<int> edge_owner(inst.num_edges(), 0);
  std::vector<int> node_owner(N, 0);
  for (int mu = 1; mu <= M; ++mu) {
    const std::string tag = "comm " + std::to_string(mu) + ": ";
    const auto& tree = sol.trees[mu - 1];
    const auto& nodes = sol.nodes[mu - 1];
    std::vector<char> in_tree(N, 0);
    bool nodes_ok = true;
    for (int i : nodes) {
      if (i < 0 || i >= N) {
        fail(tag + "node id out of range");
        nodes_ok = false;
        continue;
      }
      in_tree[i] = 1;
    }
    if (!nodes_ok) continue;

    DisjointSets ds(N);
    std::set<int> seen_edges;
    bool acyclic = true;
    bool edges_ok = true;
    for (const auto& te : tree) {
      if (te.child < 0 || te.child >= N || te.parent < 0 || te.parent >= N) {
        fail(tag + "tree edge endpoint out of range");
        edges_ok = false;
        continue;
      }
      const int e = inst.find_edge(te.child, te.parent);
      const std::string where = "(" + node_name(te.child) + "," + node_name(te.parent) + ")";
      if (e < 0) {
        fail(tag + "edge " + where + " is not in the graph");
        edges_ok = false;
        continue;
      }
      if (!seen_edges.insert(e).second) {
        fail(tag + "edge " + where + " listed twice");
        continue;
      }
      if (!in_tree[te.child] || !in_tree[te.parent]) fail(tag + "edge " + where + " leaves the node set");
      if (edge_owner[e] != 0) {
        if (opt.variant == Variant::EdgeDisjoint)
          fail(tag + "edge " + where + " also used by comm " + std::to_string(edge_owner[e]));
      } else {
        edge_owner[e] = mu;
      }
      if (!ds.unite(te.child, te.parent)) acyclic = false;
    }
    if (!edges_ok) continue;
    if (!acyclic) fail(tag + "edges contain a cycle");

    const int root = inst.root(mu);
    if (!in_tree[root]) fail(tag + "root " + node_name(root) + " missing");
    for (int t : inst.terminals(mu))
      if (!in_tree[t]) fail(tag + "terminal " + node_name(t) + " not covered");
    for (int i : nodes)
      if (ds.find(i) != ds.find(root)) {
        fail(tag + "node " + node_name(i) + " not connected to the root");
        break;
      }

    for (int i : nodes) {
      if (node_owner[i] != 0 && opt.variant == Variant::VertexDisjoint)
        fail(tag + "node " + node_name(i) + " also used by comm " + std::to_string(node_owner[i]));
      if (node_owner[i] == 0) node_owner[i] = mu;
    }

    if (!opt.check_depth) continue;
    std::vector<int> label(N, -1), parent_count(N, 0), child_count(N, 0);
    label[root] = 0;
    for (const auto& te : tree) {
      ++parent_count[te.child];
      ++child_count[te.parent];
      label[te.child] = te.depth;
    }
    for (int i : nodes) {
      const int want = i == root ? 0 : 1;
      if (parent_count[i] != want)
        fail(tag + "node " + node_name(i) + " has " + std::to_string(parent_count[i]) + " parents");
    }
    for (const auto& te : tree) {
      const std::string where = "(" + node_name(te.child) + "," + node_name(te.parent) + ")";
      if (te.depth < 1 || (opt.max_depth > 0 && te.depth > opt.max_depth)) {
        fail(tag + "depth label " + std::to_string(te.depth) + " on " + where + " out of range");
        continue;
      }
      const int up = label[te.parent];
      if (te.depth == up + 1) continue;
      const bool flat_ok = opt.formalism == Formalism::Flat && te.depth == up && te.parent != root
                           && inst.prize(te.parent, mu) == 0.0 && child_count[te.parent] == 1;
      if (!flat_ok)
        fail(tag + "depth label " + std::to_string(te.depth) + " on " + where
             + " inconsistent with parent label " + std::to_string(up));
    }
  }
  return rep;
}

Solution decode(const std::vector<int>& decisions, const StateSpace& space, const Instance& inst,
                int* dropped)
{
  const int M = inst.num_comms();
  Solution sol = Solution::empty(M);
  for (int e = 0; e < inst.num_edges(); ++e) {
    const int s = decisions[e];
    if (s == 0) continue;
    const int d = space.depth(s), mu = space.comm(s);
    const Edge& ed = inst.edge(e);
    if (d > 0) sol.trees[mu - 1].push_back({ed.u, ed.v, d});
    else sol.trees[mu - 1].push_back({ed.v, ed.u, -d});
  }
  int removed = 0;
  for (int mu = 1; mu <= M; ++mu) {
    auto& tree = sol.trees[mu - 1];
    if (tree.empty()) continue;
    DisjointSets ds(inst.num_nodes());
    for (const auto& te : tree) ds.unite(te.child, te.parent);
    std::vector<char> anchored(inst.num_nodes(), 0);
    anchored[ds.find(inst.root(mu))] = 1;
    for (int t : inst.terminals(mu)) anchored[ds.find(t)] = 1;
    std::set<int> dropped_roots;
    std::vector<TreeEdge> kept;
    for (const auto& te : tree) {
      if (anchored[ds.find(te.child)]) kept.push_back(te);
      else dropped_roots.insert(ds.find(te.child));
    }
    removed += static_cast<int>(dropped_roots.size());
    tree = std::move(kept);
  }
  sol.rebuild_nodes(inst);
  if (dropped) *dropped = removed;
  return sol;
}

std::optional<double> energy(const Solution& sol, const Instance& inst, Variant variant)
{
  ValidationOptions opt;
  opt.variant = variant;
  if (!validate(sol, inst, opt).ok()) return std::nullopt;
  double h = 0.0;
  for (int mu = 1; mu <= inst.num_comms(); ++mu) {
    const auto& nodes = sol.nodes[mu - 1];
    for (int i = 0; i < inst.num_nodes(); ++i) {
      const double c = inst.prize(i, mu);
      if (c == 0.0 || std::binary_search(nodes.begin(), nodes.end(), i)) continue;
      if (is_terminal_prize(c)) return std::nullopt;
      h += c;
    }
    std::vector<int> ids;
    for (const auto& te : sol.trees[mu - 1]) ids.push_back(inst.find_edge(te.child, te.parent));
    std::sort(ids.begin(), ids.end());
    for (int e : ids) h += inst.edge(e).weight;
  }
  return h;
}

double gap(double e_x, double e_y)
{
  if (!(e_y > 0.0)) throw std::domain_error("gap needs a positive reference energy");
  return (e_x - e_y) / e_y;
}

void relabel_by_bfs(Solution& sol, const Instance& inst, Formalism formalism)
{
  for (int mu = 1; mu <= sol.num_comms(); ++mu) {
    auto& tree = sol.trees[mu - 1];
    std::vector<std::vector<int>> adj(inst.num_nodes());
    for (std::size_t k = 0; k < tree.size(); ++k) {
      adj[tree[k].child].push_back(static_cast<int>(k));
      adj[tree[k].parent].push_back(static_cast<int>(k));
    }
    std::vector<int> dist(inst.num_nodes(), -1);
    std::queue<int> q;
    const int root = inst.root(mu);
    dist[root] = 0;
    q.push(root);
    while (!q.empty()) {
      const int x = q.front();
      q.pop();
      for (int k : adj[x]) {
        TreeEdge& te = tree[k];
        const int y = te.child == x ? te.parent : te.child;
        if (dist[y] >= 0) continue;
        // x has one parent, so a single child means degree 2.
        const bool pass = formalism == Formalism::Flat && x != root
                          && inst.prize(x, mu) == 0.0 && adj[x].size() == 2;
        dist[y] = pass ? dist[x] : dist[x] + 1;
        te = {y, x, dist[y]};
        q.push(y);
      }
    }
  }
}

void score(Solution& sol, const Instance& inst, Variant variant)
{
  sol.energy = energy(sol, inst, variant);
  sol.feasible = sol.energy.has_value();
}

std::string serialize_solution(const Solution& sol)
{
  std::ostringstream out;
  for (int mu = 1; mu <= sol.num_comms(); ++mu) {
    out << "comm " << mu << "\n";
    for (const auto& te : sol.trees[mu - 1])
      out << "tree_edge " << mu << " " << te.child + 1 << " " << te.parent + 1 << " " << te.depth
          << "\n";
  }
  out << "energy " << (sol.energy ? format_real(*sol.energy) : std::string("INFEASIBLE")) << "\n";
  if (sol.iteration >= 0) out << "source " << sol.source << " " << sol.iteration << "\n";
  return out.str();
}

Solution parse_solution(const std::string& text, const Instance& inst)
{
  Solution sol = Solution::empty(inst.num_comms());
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    auto comm_ok = [&](int mu) {
      if (mu < 1 || mu > inst.num_comms()) throw parse_error(number, "communication out of range");
    };
    if (key == "comm") {
      int mu = 0;
      if (!(ls >> mu)) throw parse_error(number, "expected 'comm mu'");
      comm_ok(mu);
    } else if (key == "tree_edge") {
      int mu = 0, u = 0, v = 0, d = 0;
      if (!(ls >> mu >> u >> v >> d)) throw parse_error(number, "expected 'tree_edge mu u v d'");
      comm_ok(mu);
      if (u < 1 || v < 1 || u > inst.num_nodes() || v > inst.num_nodes())
        throw parse_error(number, "node id out of range");
      sol.trees[mu - 1].push_back({u - 1, v - 1, d});
    } else if (key == "energy") {
      std::string tok;
      double h = 0.0;
      if (!(ls >> tok)) throw parse_error(number, "expected 'energy H'");
      if (tok == "INFEASIBLE") sol.energy.reset();
      else if (parse_real(tok, h)) sol.energy = h;
      else throw parse_error(number, "bad energy value");
    } else if (key == "source") {
      if (!(ls >> sol.source >> sol.iteration)) throw parse_error(number, "expected 'source scheme iteration'");
    } else {
      throw parse_error(number, "unknown key '" + key + "'");
    }
  }
  sol.rebuild_nodes(inst);
  sol.feasible = sol.energy.has_value();
  return sol;
}

void write_solution_file(const Solution& sol, const std::string& path)
{
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << serialize_solution(sol);
}

Solution read_solution_file(const std::string& path, const Instance& inst)
{
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_solution(buf.str(), inst);
}

}  // namespace stp
