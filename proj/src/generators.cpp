#include "stp/generators.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>
#include <utility>

#include "stp/rng.hpp"

namespace stp {

namespace {

void check_terminal_budget(int num_nodes, int num_comms, int per_comm)
{
  if (num_comms < 1 || per_comm < 1) throw std::invalid_argument("need M >= 1 and T >= 1");
  if (static_cast<long long>(num_comms) * per_comm > num_nodes)
    throw capacity_error("M * T exceeds the number of nodes");
}

// Partial Fisher-Yates over node ids; communication mu gets draws (mu-1)T .. muT-1.
void draw_terminals(Instance& inst, int per_comm, Rng& rng)
{
  const int N = inst.num_nodes();
  std::vector<int> ids(N);
  std::iota(ids.begin(), ids.end(), 0);
  const int total = inst.num_comms() * per_comm;
  for (int k = 0; k < total; ++k) {
    const int pick = k + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(N - k)));
    std::swap(ids[k], ids[pick]);
    inst.add_terminal(k / per_comm + 1, ids[k]);
  }
}

}  // namespace

Instance gen_complete(int num_nodes, int num_comms, int terminals_per_comm, Weighting weighting,
                      std::uint64_t seed)
{
  check_terminal_budget(num_nodes, num_comms, terminals_per_comm);
  Rng rng(seed);
  Instance inst(num_nodes, num_comms);
  std::vector<double> x(num_nodes, 1.0);
  if (weighting == Weighting::Correlated)
    for (auto& xi : x) xi = uniform_open01(rng);
  for (int u = 0; u < num_nodes; ++u)
    for (int v = u + 1; v < num_nodes; ++v) {
      const double y = uniform_open01(rng);
      inst.add_edge(u, v, weighting == Weighting::Correlated ? x[u] * x[v] * y : y);
    }
  draw_terminals(inst, terminals_per_comm, rng);
  inst.validate();
  return inst;
}

Instance gen_regular(int num_nodes, int degree, int num_comms, int terminals_per_comm,
                     std::uint64_t seed, int max_attempts)
{
  if (degree < 1 || degree >= num_nodes) throw std::invalid_argument("need 1 <= degree < N");
  if ((static_cast<long long>(num_nodes) * degree) % 2 != 0)
    throw std::invalid_argument("N * degree must be even");
  check_terminal_budget(num_nodes, num_comms, terminals_per_comm);
  Rng rng(seed);

  std::vector<int> points(static_cast<std::size_t>(num_nodes) * degree);
  std::set<std::pair<int, int>> edges;
  bool ok = false;
  for (int attempt = 0; attempt < max_attempts && !ok; ++attempt) {
    for (std::size_t p = 0; p < points.size(); ++p) points[p] = static_cast<int>(p) / degree;
    portable_shuffle(points.begin(), points.end(), rng);
    edges.clear();
    ok = true;
    for (std::size_t p = 0; p < points.size(); p += 2) {
      const int a = std::min(points[p], points[p + 1]);
      const int b = std::max(points[p], points[p + 1]);
      if (a == b || !edges.emplace(a, b).second) {
        ok = false;
        break;
      }
    }
  }
  if (!ok) throw generation_error("pairing model exceeded its rejection budget");

  Instance inst(num_nodes, num_comms);
  for (const auto& [u, v] : edges) inst.add_edge(u, v, uniform_open01(rng));
  draw_terminals(inst, terminals_per_comm, rng);
  inst.validate();
  return inst;
}

Instance gen_grid(int nx, int ny, int nz, LayerType layers, int num_comms,
                  const GridTerminals& terminals, std::uint64_t seed, bool unit_weights)
{
  if (nx < 2 || ny < 2 || nz < 1) throw std::invalid_argument("need nx, ny >= 2 and nz >= 1");
  Rng rng(seed);
  const int N = nx * ny * nz;
  Instance inst(N, num_comms);
  std::vector<std::pair<int, int>> edges;
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) {
        const int id = grid_node(nx, ny, x, y, z);
        const bool x_ok = layers == LayerType::MultiCrossed || z % 2 == 0;
        const bool y_ok = layers == LayerType::MultiCrossed || z % 2 == 1;
        if (x_ok && x + 1 < nx) edges.emplace_back(id, grid_node(nx, ny, x + 1, y, z));
        if (y_ok && y + 1 < ny) edges.emplace_back(id, grid_node(nx, ny, x, y + 1, z));
        if (z + 1 < nz) edges.emplace_back(id, grid_node(nx, ny, x, y, z + 1));
      }
  std::sort(edges.begin(), edges.end());
  for (const auto& [u, v] : edges) inst.add_edge(u, v, unit_weights ? 1.0 : uniform_open01(rng));

  if (!terminals.coords.empty()) {
    if (static_cast<int>(terminals.coords.size()) != num_comms)
      throw validation_error("explicit terminals must list every communication");
    for (int mu = 1; mu <= num_comms; ++mu)
      for (const auto& p : terminals.coords[mu - 1]) {
        if (p[0] < 0 || p[0] >= nx || p[1] < 0 || p[1] >= ny || p[2] < 0 || p[2] >= nz)
          throw validation_error("terminal coordinate out of range");
        inst.add_terminal(mu, grid_node(nx, ny, p[0], p[1], p[2]));
      }
  } else {
    check_terminal_budget(N, num_comms, terminals.per_comm);
    draw_terminals(inst, terminals.per_comm, rng);
  }
  inst.set_grid({nx, ny, nz, layers});
  inst.validate();
  return inst;
}

}  // namespace stp
