#ifndef STP_SOLUTION_HPP
#define STP_SOLUTION_HPP

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "stp/core.hpp"
#include "stp/instance.hpp"
#include "stp/state_space.hpp"

namespace stp {

// One oriented tree edge; `depth` is the label of the child end.
struct TreeEdge {
  int child = 0;
  int parent = 0;
  int depth = 0;
  bool operator==(const TreeEdge&) const = default;
};

/// Per-communication trees. trees[mu - 1] holds E_mu, nodes[mu - 1] holds V_mu (sorted).
struct Solution {
  std::vector<std::vector<TreeEdge>> trees;
  std::vector<std::vector<int>> nodes;
  bool feasible = false;
  std::optional<double> energy;  // empty means INFEASIBLE
  std::string source = "ms";
  int iteration = -1;

  static Solution empty(int num_comms);
  int num_comms() const { return static_cast<int>(trees.size()); }
  // Recomputes nodes from the edges plus each root.
  void rebuild_nodes(const Instance& inst);
};

struct ValidationOptions {
  Variant variant = Variant::EdgeDisjoint;
  bool check_depth = false;
  Formalism formalism = Formalism::Branching;
  int max_depth = 0;  // 0 = unbounded
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate(const Solution& sol, const Instance& inst, const ValidationOptions& opt);

/// Per-edge decisions (state index, u -> v orientation) to trees. Components that touch
/// no terminal of their communication and not its root are dropped; the count of
/// dropped components is stored in `dropped` when given.
Solution decode(const std::vector<int>& decisions, const StateSpace& space, const Instance& inst,
                int* dropped = nullptr);

/// Sum over mu of excluded prizes plus used edge weights, or empty when `sol` is not a
/// structurally valid packing for `variant`.
std::optional<double> energy(const Solution& sol, const Instance& inst, Variant variant);

/// (e_x - e_y) / e_y. Throws std::domain_error when e_y <= 0.
double gap(double e_x, double e_y);

/// Reorients every tree away from its root and recomputes the smallest consistent depth
/// labels: hop distance, except that under Flat a zero-prize non-root node with a single
/// child passes its own label down.
void relabel_by_bfs(Solution& sol, const Instance& inst,
                    Formalism formalism = Formalism::Branching);

/// Validates structurally, fills feasible and energy.
void score(Solution& sol, const Instance& inst, Variant variant);

std::string serialize_solution(const Solution& sol);
Solution parse_solution(const std::string& text, const Instance& inst);
void write_solution_file(const Solution& sol, const std::string& path);
Solution read_solution_file(const std::string& path, const Instance& inst);

}  // namespace stp

#endif  // STP_SOLUTION_HPP
