#ifndef STP_DEPTH_HPP
#define STP_DEPTH_HPP

#include <vector>

#include "stp/core.hpp"
#include "stp/instance.hpp"

namespace stp {

struct DepthChoice {
  std::vector<int> per_comm;  // D_mu at mu - 1
  int global = 1;             // max over mu, at least 1
};

/// Flat: D_mu = |T_mu|. Branching: D_mu = largest hop distance from r_mu to a terminal
/// of mu. Throws infeasible_error when a terminal cannot reach its root.
DepthChoice choose_depth(const Instance& inst, Formalism formalism);

/// Unweighted hop distances from `source`; -1 for unreachable nodes.
std::vector<int> hop_distances(const Instance& inst, int source);

}  // namespace stp

#endif  // STP_DEPTH_HPP
