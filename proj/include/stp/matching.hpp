#ifndef STP_MATCHING_HPP
#define STP_MATCHING_HPP

#include <vector>

#include <Eigen/Core>

namespace stp {

/// Rectangular assignment between rows (neighbors) and columns (communications).
/// Value of an assignment = sum of matched weights + row_unmatched of free rows
/// + col_unmatched of free columns. A must-match column may not stay free.
struct MatchingProblem {
  Eigen::ArrayXXd weights;       // rows x cols; neg_inf forbids the pair
  Eigen::ArrayXd row_unmatched;  // neg_inf forbids leaving the row free
  Eigen::ArrayXd col_unmatched;
  std::vector<bool> must_match;

  static MatchingProblem sized(int rows, int cols);
  int rows() const { return static_cast<int>(weights.rows()); }
  int cols() const { return static_cast<int>(weights.cols()); }
};

struct MatchingResult {
  bool feasible = false;
  double value = 0.0;            // neg_inf when infeasible
  std::vector<int> row_to_col;   // -1 for a free row
};

/// Optimal assignment by the Hungarian method on the (rows + cols) square completion.
/// With `lexicographic`, ties are broken toward the assignment whose row_to_col is
/// smallest row by row (free counts as larger than any column).
MatchingResult max_weight_matching(const MatchingProblem& problem, bool lexicographic = true);

/// Value of a given assignment (neg_inf if it breaks a constraint).
double assignment_value(const MatchingProblem& problem, const std::vector<int>& row_to_col);

}  // namespace stp

#endif  // STP_MATCHING_HPP
