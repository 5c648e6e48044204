#ifndef STP_TESTS_SUPPORT_HPP
#define STP_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <tuple>
#include <vector>

#include <Eigen/Core>

#include "stp/core.hpp"
#include "stp/instance.hpp"
#include "stp/kernels.hpp"
#include "stp/rng.hpp"

namespace stp::testing {

struct ViewShape {
  int degree = 3;
  int depth = 2;
  int comms = 2;
  bool flat = false;
  int root_of = 0;         // 0 or a communication rooted at the node
  bool terminal = false;   // make the node a terminal of a random communication
  bool prizes = false;     // random finite prizes on some communications
};

// Messages in [-5, 0] with each column shifted to max 0, weights in (0, 1).
inline LocalNodeView random_view(Rng& rng, const ViewShape& shape)
{
  LocalNodeView v;
  v.space = StateSpace(shape.depth, shape.comms);
  const int n = shape.degree;
  v.incoming.resize(v.space.size(), n);
  for (int k = 0; k < n; ++k) {
    for (int s = 0; s < v.space.size(); ++s) v.incoming(s, k) = -5.0 * uniform_open01(rng);
    v.incoming.col(k) -= v.incoming.col(k).maxCoeff();
  }
  v.weights.resize(n);
  for (int k = 0; k < n; ++k) v.weights(k) = uniform_open01(rng);
  v.prizes = Eigen::ArrayXd::Zero(shape.comms);
  if (shape.prizes)
    for (int m = 0; m < shape.comms; ++m)
      if (uniform_below(rng, 2)) v.prizes(m) = uniform_open01(rng);
  v.root_of = shape.root_of;
  if (shape.root_of != 0) v.prizes(shape.root_of - 1) = terminal_prize;
  else if (shape.terminal) v.prizes(static_cast<int>(uniform_below(rng, shape.comms))) = terminal_prize;
  v.flat = shape.flat;
  return v;
}

// Random shape within |di| <= max_degree, D <= max_depth, M <= max_comms.
inline ViewShape random_shape(Rng& rng, int max_degree, int max_depth, int max_comms,
                              bool allow_flat)
{
  ViewShape s;
  s.degree = 1 + static_cast<int>(uniform_below(rng, max_degree));
  s.depth = 1 + static_cast<int>(uniform_below(rng, max_depth));
  s.comms = 1 + static_cast<int>(uniform_below(rng, max_comms));
  s.flat = allow_flat && uniform_below(rng, 2) == 1;
  s.root_of = uniform_below(rng, 3) == 0 ? 1 + static_cast<int>(uniform_below(rng, s.comms)) : 0;
  s.terminal = uniform_below(rng, 3) == 0;
  s.prizes = uniform_below(rng, 2) == 1;
  return s;
}

// Largest entrywise difference; matching neg_inf entries count as equal, a neg_inf
// facing a finite value counts as infinite.
inline double max_diff(const Eigen::ArrayXXd& a, const Eigen::ArrayXXd& b)
{
  if (a.rows() != b.rows() || a.cols() != b.cols()) return INFINITY;
  double m = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double x = a(i, j), y = b(i, j);
      if (x == neg_inf || y == neg_inf) {
        if (x != y) return INFINITY;
        continue;
      }
      m = std::max(m, std::abs(x - y));
    }
  return m;
}

// Instance from 1-based edge triples and per-communication terminal lists (root first).
inline Instance make_instance(int nodes, std::initializer_list<std::tuple<int, int, double>> edges,
                              const std::vector<std::vector<int>>& terminals)
{
  Instance inst(nodes, static_cast<int>(terminals.size()));
  for (const auto& [u, v, w] : edges) inst.add_edge(u - 1, v - 1, w);
  for (std::size_t m = 0; m < terminals.size(); ++m)
    for (int t : terminals[m]) inst.add_terminal(static_cast<int>(m) + 1, t - 1);
  inst.validate();
  return inst;
}

// Path 1 - 2 - ... - n with unit weights.
inline Instance make_path(int n, const std::vector<std::vector<int>>& terminals)
{
  Instance inst(n, static_cast<int>(terminals.size()));
  for (int i = 0; i + 1 < n; ++i) inst.add_edge(i, i + 1, 1.0);
  for (std::size_t m = 0; m < terminals.size(); ++m)
    for (int t : terminals[m]) inst.add_terminal(static_cast<int>(m) + 1, t - 1);
  inst.validate();
  return inst;
}

}  // namespace stp::testing

#endif  // STP_TESTS_SUPPORT_HPP
