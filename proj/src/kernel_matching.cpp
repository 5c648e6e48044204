#include <algorithm>
#include <bit>
#include <vector>

#include "stp/kernels.hpp"
#include "stp/matching.hpp"

namespace stp {

namespace {

// Depth vectors s over the non-root communications, visited in lexicographic order.
class DepthVectors {
public:
  DepthVectors(const LocalNodeView& v, const KernelLimits& limits)
  : D_(v.space.max_depth())
  {
    if (v.flat) throw unsupported_error("the matching kernel supports the branching formalism only");
    for (int mu = 1; mu <= v.space.num_comms(); ++mu)
      if (mu != v.root_of) comms_.push_back(mu);
    std::int64_t count = 1;
    for (std::size_t c = 0; c < comms_.size(); ++c) {
      count *= D_ + 1;
      if (count > limits.max_depth_vectors)
        throw capacity_error("depth-vector enumeration exceeds the matching-kernel cap");
    }
    s_.assign(v.space.num_comms() + 1, 0);
  }

  // s[mu] for every communication; the root communication stays 0.
  const std::vector<int>& s() const { return s_; }
  const std::vector<int>& comms() const { return comms_; }

  bool next()
  {
    for (int c = static_cast<int>(comms_.size()) - 1; c >= 0; --c) {
      if (++s_[comms_[c]] <= D_) return true;
      s_[comms_[c]] = 0;
    }
    return false;
  }

private:
  int D_;
  std::vector<int> comms_;
  std::vector<int> s_;
};

// Contribution of i's own prizes for the communications it skips.
double skipped_prizes(const LocalNodeView& v, const std::vector<int>& s, const std::vector<int>& comms)
{
  double c = 0.0;
  for (int mu : comms)
    if (s[mu] == 0) c += v.prizes(mu - 1);
  return -c;
}

// Best non-parent state of neighbor k under s: unused, or child in an active tree.
double child_or_unused(const LocalNodeView& v, int k, const std::vector<int>& s,
                       const std::vector<int>& active)
{
  double b = v.z(k);
  for (int mu : active) b = std::max(b, v.a(k, s[mu] + 1, mu));
  if (v.root_of != 0) b = std::max(b, v.a(k, 1, v.root_of));
  return b;
}

}  // namespace

Eigen::ArrayXXd matching_messages(const LocalNodeView& v, const KernelLimits& limits)
{
  const int n = v.degree();
  const int r = v.root_of;
  DepthVectors sv(v, limits);
  Eigen::ArrayXXd out = Eigen::ArrayXXd::Constant(v.space.size(), n, neg_inf);

  std::vector<int> active;
  std::vector<double> base(n), match;
  std::vector<double> pre, suf;
  do {
    const auto& s = sv.s();
    const double constant = skipped_prizes(v, s, sv.comms());
    if (constant == neg_inf) continue;
    active.clear();
    for (int mu : sv.comms())
      if (s[mu] > 0) active.push_back(mu);
    const int a = static_cast<int>(active.size());
    const unsigned size = 1u << a, all = size - 1;

    match.assign(static_cast<std::size_t>(n) * a, neg_inf);
    for (int k = 0; k < n; ++k) {
      base[k] = child_or_unused(v, k, s, active);
      for (int c = 0; c < a; ++c) match[k * a + c] = v.a(k, -s[active[c]], active[c]);
    }

    // pre[(k, mask)]: rows < k placed, columns in mask matched. suf likewise for rows >= k.
    pre.assign(static_cast<std::size_t>(n + 1) * size, neg_inf);
    suf.assign(static_cast<std::size_t>(n + 1) * size, neg_inf);
    pre[0] = 0.0;
    suf[static_cast<std::size_t>(n) * size] = 0.0;
    auto step = [&](const double* from, double* to, int k) {
      for (unsigned mask = 0; mask < size; ++mask) {
        double best = from[mask] + base[k];
        for (unsigned rest = mask; rest != 0; rest &= rest - 1) {
          const int c = std::countr_zero(rest);
          best = std::max(best, from[mask ^ (1u << c)] + match[k * a + c]);
        }
        to[mask] = best;
      }
    };
    for (int k = 0; k < n; ++k) step(&pre[k * size], &pre[(k + 1) * size], k);
    for (int k = n - 1; k >= 0; --k) step(&suf[(k + 1) * size], &suf[k * size], k);

    for (int j = 0; j < n; ++j) {
      const double* left = &pre[j * size];
      const double* right = &suf[(j + 1) * size];
      auto joined = [&](unsigned mask) {
        double best = left[mask] + right[0];
        for (unsigned A = mask; A != 0; A = (A - 1) & mask)
          best = std::max(best, left[mask ^ A] + right[A]);
        return constant + best;
      };
      const double everything = joined(all);
      out(0, j) = std::max(out(0, j), everything);
      for (int c = 0; c < a; ++c) {
        const int mu = active[c];
        const int up = v.space.index(s[mu], mu);
        out(up, j) = std::max(out(up, j), joined(all & ~(1u << c)) - v.weights(j));
        if (s[mu] < v.space.max_depth()) {
          const int down = v.space.index(-(s[mu] + 1), mu);
          out(down, j) = std::max(out(down, j), everything);
        }
      }
      if (r != 0) {
        const int down = v.space.index(-1, r);
        out(down, j) = std::max(out(down, j), everything);
      }
    }
  } while (sv.next());
  return out;
}

Eigen::ArrayXXd matching_messages_reference(const LocalNodeView& v, const KernelLimits& limits)
{
  const int n = v.degree();
  const int r = v.root_of;
  DepthVectors sv(v, limits);
  Eigen::ArrayXXd out = Eigen::ArrayXXd::Constant(v.space.size(), n, neg_inf);
  const auto& comms = sv.comms();
  const int m = static_cast<int>(comms.size());

  do {
    const auto& s = sv.s();
    std::vector<int> active;
    for (int mu : comms)
      if (s[mu] > 0) active.push_back(mu);
    for (int j = 0; j < n; ++j) {
      // Rows: neighbors other than j. Columns: non-root communications.
      MatchingProblem base = MatchingProblem::sized(n - 1, m);
      for (int k = 0, row = 0; k < n; ++k) {
        if (k == j) continue;
        base.row_unmatched(row) = child_or_unused(v, k, s, active);
        for (int c = 0; c < m; ++c)
          if (s[comms[c]] > 0) base.weights(row, c) = v.a(k, -s[comms[c]], comms[c]);
        ++row;
      }
      for (int c = 0; c < m; ++c) {
        base.must_match[c] = s[comms[c]] > 0;
        base.col_unmatched(c) = -v.prizes(comms[c] - 1);
      }
      const double everything = max_weight_matching(base, false).value;
      out(0, j) = std::max(out(0, j), everything);
      if (r != 0) out(v.space.index(-1, r), j) = std::max(out(v.space.index(-1, r), j), everything);
      for (int c = 0; c < m; ++c) {
        const int mu = comms[c];
        if (s[mu] == 0) continue;
        // j is the parent in mu: its column is taken and leaves the problem.
        MatchingProblem clamped = base;
        clamped.weights.col(c).setConstant(neg_inf);
        clamped.must_match[c] = false;
        clamped.col_unmatched(c) = 0.0;
        const int up = v.space.index(s[mu], mu);
        out(up, j) = std::max(out(up, j), max_weight_matching(clamped, false).value - v.weights(j));
        if (s[mu] < v.space.max_depth()) {
          const int down = v.space.index(-(s[mu] + 1), mu);
          out(down, j) = std::max(out(down, j), everything);
        }
      }
    }
  } while (sv.next());
  return out;
}

}  // namespace stp
