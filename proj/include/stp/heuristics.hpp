#ifndef STP_HEURISTICS_HPP
#define STP_HEURISTICS_HPP

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "stp/messages.hpp"
#include "stp/rng.hpp"
#include "stp/solution.hpp"

namespace stp {

enum class HeuristicScheme { SPT, MST };
enum class PruneMode { TerminalLeaves, PrizeThreshold };

std::string to_string(HeuristicScheme s);
HeuristicScheme parse_scheme(const std::string& s);

struct HeuristicConfig {
  std::vector<HeuristicScheme> schemes{HeuristicScheme::SPT, HeuristicScheme::MST};
  std::vector<int> order;  // communication order; empty draws a fresh one per round
  double penalty = 0.0;    // node penalty C; 0 means 1 + total edge weight
  PruneMode prune = PruneMode::TerminalLeaves;
  int every = 1;           // run every `every` sweeps; 0 disables
};

/// Edges and nodes still available to the next tree.
struct WorkingGraph {
  std::vector<char> edge_alive;
  std::vector<char> node_alive;
  static WorkingGraph full(const Instance& inst);
  bool usable(const Instance& inst, int e) const
  {
    return edge_alive[e] && node_alive[inst.edge(e).u] && node_alive[inst.edge(e).v];
  }
};

/// w_e = |max_{d != 0} H_e(d, mu)|; +inf when every mu-state is forbidden.
Eigen::ArrayXd spt_reweight(const CavityField& field, int mu);

/// Nodes whose best participating field max_{d>0} h_i(d, mu) is below the idle field
/// h_i(0, mu), computed from the messages entering each node.
std::vector<char> mst_penalized_nodes(const Instance& inst, const MessageTable& messages, int mu);

/// Removes non-root leaves until none qualifies: non-terminal leaves (TerminalLeaves) or
/// leaves whose edge costs more than their prize (PrizeThreshold).
std::vector<int> prune_tree(const Instance& inst, std::vector<int> edges, int mu, PruneMode mode);

/// Tree for mu on the working graph under auxiliary costs `aux` (+inf cuts an edge).
/// SPT: shortest paths from the root to the terminals. MST: spanning tree of the root's
/// component. Both pruned. Empty optional when a terminal cannot be reached.
std::optional<std::vector<int>> heuristic_tree(const Instance& inst, const WorkingGraph& graph,
                                               int mu, HeuristicScheme scheme,
                                               const Eigen::ArrayXd& aux, PruneMode prune);

/// Auxiliary costs for `scheme`: SPT uses spt_reweight, MST adds C per penalized endpoint.
Eigen::ArrayXd auxiliary_weights(const Instance& inst, HeuristicScheme scheme,
                                 const CavityField& field, const MessageTable& messages, int mu,
                                 double penalty);

/// One sequential round over all communications with erasure between trees.
/// Returns a scored Solution; feasible is false when some communication fails.
Solution run_heuristic_round(const Instance& inst, Variant variant, HeuristicScheme scheme,
                             const CavityField& field, const MessageTable& messages,
                             const HeuristicConfig& config, Rng& rng, int iteration = -1);

}  // namespace stp

#endif  // STP_HEURISTICS_HPP
