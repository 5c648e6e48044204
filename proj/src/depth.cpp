#include "stp/depth.hpp"

#include <algorithm>
#include <queue>

namespace stp {

std::vector<int> hop_distances(const Instance& inst, int source)
{
  std::vector<int> dist(inst.num_nodes(), -1);
  std::queue<int> q;
  dist[source] = 0;
  q.push(source);
  while (!q.empty()) {
    const int x = q.front();
    q.pop();
    for (const auto& inc : inst.incident(x))
      if (dist[inc.neighbor] < 0) {
        dist[inc.neighbor] = dist[x] + 1;
        q.push(inc.neighbor);
      }
  }
  return dist;
}

DepthChoice choose_depth(const Instance& inst, Formalism formalism)
{
  DepthChoice out;
  for (int mu = 1; mu <= inst.num_comms(); ++mu) {
    const auto dist = hop_distances(inst, inst.root(mu));
    int ecc = 0;
    for (int t : inst.terminals(mu)) {
      if (dist[t] < 0)
        throw infeasible_error("terminal " + std::to_string(t + 1) + " of communication "
                               + std::to_string(mu) + " cannot reach its root");
      ecc = std::max(ecc, dist[t]);
    }
    const int d = formalism == Formalism::Flat ? static_cast<int>(inst.terminals(mu).size()) : ecc;
    out.per_comm.push_back(d);
    out.global = std::max(out.global, d);
  }
  return out;
}

}  // namespace stp
