#ifndef STP_KERNELS_HPP
#define STP_KERNELS_HPP

#include <cstdint>

#include <Eigen/Core>

#include "stp/core.hpp"
#include "stp/instance.hpp"
#include "stp/messages.hpp"
#include "stp/state_space.hpp"

namespace stp {

/// Everything a node update reads. Column k of `incoming` is h_{k->i}, indexed by the
/// state of d_ki, so a child k of i at depth x appears at (x, mu) and the parent at
/// (-depth(i), mu).
///
/// Every edge is paid by its child end: h_{k->i} already carries w_ki on its child states,
/// and i pays w_ik itself when k is its parent. a() folds that second charge in, so the
/// kernels never touch weights except for the target edge.
struct LocalNodeView {
  StateSpace space;
  Eigen::ArrayXXd incoming;  // states x degree
  Eigen::ArrayXd weights;    // w_ik per neighbor slot
  Eigen::ArrayXd prizes;     // c_i^mu at mu - 1; terminal_prize for terminals
  int root_of = 0;           // communication rooted here, or 0
  bool flat = false;

  int degree() const { return static_cast<int>(incoming.cols()); }
  // Value of slot k in state (d, mu), including w_ik when k is the parent (d < 0).
  double a(int k, int d, int mu) const
  {
    const int s = space.index_or_none(d, mu);
    if (s < 0) return neg_inf;
    return d < 0 ? incoming(s, k) - weights(k) : incoming(s, k);
  }
  double z(int k) const { return incoming(0, k); }
};

/// View of `node` inside the table; slot order follows inst.incident(node). Messages,
/// weights and prizes are rounded to multiples of 2^-36 so kernel sums are exact.
LocalNodeView make_view(const Instance& inst, const MessageTable& table, int node, bool flat);

struct KernelLimits {
  int max_degree = 12;                        // subset tables hold 2^degree entries
  std::int64_t max_depth_vectors = 1 << 22;   // (D+1)^M cap of the matching kernel
};

// All-target kernels. Column j of the result is h_{i->j} before normalization; rows
// follow the canonical state order. Entries may be neg_inf, columns may be all neg_inf.
Eigen::ArrayXXd vdstp_messages(const LocalNodeView& view);
Eigen::ArrayXXd neighocc_messages(const LocalNodeView& view, const KernelLimits& limits = {});
Eigen::ArrayXXd matching_messages(const LocalNodeView& view, const KernelLimits& limits = {});
// Same values as matching_messages, obtained by one max_weight_matching call per
// (target, depth vector, clamp). Slow; used as a cross-check.
Eigen::ArrayXXd matching_messages_reference(const LocalNodeView& view,
                                            const KernelLimits& limits = {});

Eigen::ArrayXXd node_messages(KernelKind kind, const LocalNodeView& view,
                              const KernelLimits& limits = {});

// Single-target forms with a normalized result. Throw contradiction_error when every
// state of h_{i->j} is forbidden.
Eigen::ArrayXd update_node_vdstp(const LocalNodeView& view, int target);
Eigen::ArrayXd update_node_edstp_neighocc(const LocalNodeView& view, int target,
                                          const KernelLimits& limits = {});
Eigen::ArrayXd update_node_edstp_matching(const LocalNodeView& view, int target,
                                          const KernelLimits& limits = {});

}  // namespace stp

#endif  // STP_KERNELS_HPP
