#include "stp/matching.hpp"

#include <cmath>
#include <limits>

#include "stp/core.hpp"

namespace stp {

MatchingProblem MatchingProblem::sized(int rows, int cols)
{
  MatchingProblem p;
  p.weights = Eigen::ArrayXXd::Constant(rows, cols, neg_inf);
  p.row_unmatched = Eigen::ArrayXd::Zero(rows);
  p.col_unmatched = Eigen::ArrayXd::Zero(cols);
  p.must_match.assign(cols, false);
  return p;
}

double assignment_value(const MatchingProblem& p, const std::vector<int>& row_to_col)
{
  std::vector<bool> taken(p.cols(), false);
  double value = 0.0;
  for (int k = 0; k < p.rows(); ++k) {
    const int c = row_to_col[k];
    if (c < 0) {
      value += p.row_unmatched(k);
    } else {
      if (taken[c]) return neg_inf;
      taken[c] = true;
      value += p.weights(k, c);
    }
  }
  for (int c = 0; c < p.cols(); ++c)
    if (!taken[c]) value += p.must_match[c] ? neg_inf : p.col_unmatched(c);
  return value;
}

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// Min-cost perfect assignment on an n x n matrix with +inf marking forbidden cells.
// Returns false when every perfect assignment uses a forbidden cell.
bool hungarian(const std::vector<std::vector<double>>& cost, std::vector<int>& row_of_col)
{
  const int n = static_cast<int>(cost.size());
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = -1;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      if (j1 < 0 || delta == inf) return false;
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  row_of_col.assign(n, -1);
  for (int j = 1; j <= n; ++j) row_of_col[j - 1] = p[j] - 1;
  return true;
}

MatchingResult solve_once(const MatchingProblem& pr)
{
  const int n = pr.rows(), m = pr.cols(), size = n + m;
  // Real rows 0..n-1, dummy rows n..n+m-1 (one per column: "column stays free").
  // Real columns 0..m-1, dummy columns m..m+n-1 (one per row: "row stays free").
  std::vector<std::vector<double>> cost(size, std::vector<double>(size, inf));
  for (int k = 0; k < n; ++k) {
    for (int c = 0; c < m; ++c) cost[k][c] = -pr.weights(k, c);
    cost[k][m + k] = -pr.row_unmatched(k);
  }
  for (int c = 0; c < m; ++c) {
    if (!pr.must_match[c]) cost[n + c][c] = -pr.col_unmatched(c);
    for (int k = 0; k < n; ++k) cost[n + c][m + k] = 0.0;
  }
  MatchingResult res;
  std::vector<int> row_of_col;
  if (!hungarian(cost, row_of_col)) {
    res.value = neg_inf;
    return res;
  }
  res.row_to_col.assign(n, -1);
  for (int c = 0; c < m; ++c)
    if (row_of_col[c] < n) res.row_to_col[row_of_col[c]] = c;
  res.value = assignment_value(pr, res.row_to_col);
  res.feasible = res.value != neg_inf;
  return res;
}

}  // namespace

MatchingResult max_weight_matching(const MatchingProblem& problem, bool lexicographic)
{
  MatchingResult best = solve_once(problem);
  if (!lexicographic || !best.feasible) return best;

  const double tol = 1e-10 * (1.0 + std::abs(best.value));
  MatchingProblem work = problem;
  for (int k = 0; k < work.rows(); ++k) {
    for (int option = 0; option <= work.cols(); ++option) {
      const bool free_row = option == work.cols();
      if (!free_row && work.weights(k, option) == neg_inf) continue;
      if (free_row && work.row_unmatched(k) == neg_inf) continue;
      MatchingProblem trial = work;
      for (int c = 0; c < trial.cols(); ++c)
        if (c != option) trial.weights(k, c) = neg_inf;
      if (!free_row) trial.row_unmatched(k) = neg_inf;
      const MatchingResult r = solve_once(trial);
      if (r.feasible && r.value >= best.value - tol) {
        work = trial;
        break;
      }
    }
  }
  MatchingResult fixed = solve_once(work);
  fixed.value = assignment_value(problem, fixed.row_to_col);
  return fixed;
}

}  // namespace stp
