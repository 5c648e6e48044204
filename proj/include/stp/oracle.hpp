#ifndef STP_ORACLE_HPP
#define STP_ORACLE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "stp/kernels.hpp"
#include "stp/solution.hpp"

namespace stp {

struct OracleLimits {
  int max_edges_per_tree = 64;
  int max_total_edges = 64;
  int max_local_degree = 6;
  std::int64_t max_states = 50'000'000;  // local configurations or stored trees
};

enum class PsiFilter { Structural, Literal };

/// Local compatibility of a full neighborhood configuration (one state per slot, read
/// as d_ki). Structural classifies the configuration by tree role; Literal evaluates the
/// delta-sum form of the constraint and tests it for positivity. Both include the root
/// rule (all edges of the rooted communication are children at depth 1).
bool local_feasible(const LocalNodeView& view, Variant variant, const std::vector<int>& config,
                    PsiFilter filter = PsiFilter::Structural);

/// -(sum of prizes of the communications the node does not take part in).
double local_prize_term(const LocalNodeView& view, const std::vector<int>& config);

/// Exact h_{i->j}(state) before normalization, by enumerating every configuration of
/// the other neighbors.
double local_update_oracle(const LocalNodeView& view, Variant variant, int target, int state,
                           const OracleLimits& limits = {}, PsiFilter filter = PsiFilter::Structural);

/// All targets and states from one enumeration of full configurations.
Eigen::ArrayXXd local_update_oracle_all(const LocalNodeView& view, Variant variant,
                                        const OracleLimits& limits = {},
                                        PsiFilter filter = PsiFilter::Structural);

struct ExactResult {
  std::optional<double> energy;  // empty: no packing exists
  Solution solution;
};

/// Minimum-energy packing by enumerating every tree per communication and searching
/// disjoint combinations with branch and bound.
ExactResult exact_pack(const Instance& inst, Variant variant, const OracleLimits& limits = {});

}  // namespace stp

#endif  // STP_ORACLE_HPP
