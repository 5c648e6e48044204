#ifndef STP_STATE_SPACE_HPP
#define STP_STATE_SPACE_HPP

#include <vector>

namespace stp {

/// Edge states (d, mu) with d in [-D, D], mu in [0, M] and d == 0 iff mu == 0.
///
/// Index 0 is (0,0). Then for mu = 1..M in turn: d = -D..-1 followed by d = 1..D.
/// Every argmax in the library breaks ties toward the lowest index.
class StateSpace {
public:
  StateSpace() = default;
  StateSpace(int max_depth, int num_comms);

  int max_depth() const { return depth_bound_; }
  int num_comms() const { return num_comms_; }
  int size() const { return 1 + 2 * depth_bound_ * num_comms_; }

  // Requires 1 <= |d| <= D and 1 <= mu <= M, or d == mu == 0.
  int index(int d, int mu) const
  {
    if (mu == 0) return 0;
    return 1 + (mu - 1) * 2 * depth_bound_ + (d < 0 ? d + depth_bound_ : d + depth_bound_ - 1);
  }
  // Same as index() but returns -1 for out-of-range depths.
  int index_or_none(int d, int mu) const
  {
    if (d == 0 || mu < 1 || mu > num_comms_ || d < -depth_bound_ || d > depth_bound_) return -1;
    return index(d, mu);
  }

  int depth(int s) const { return depth_[s]; }
  int comm(int s) const { return comm_[s]; }
  // (d, mu) -> (-d, mu)
  int reversed(int s) const { return reversed_[s]; }

  bool operator==(const StateSpace& o) const
  {
    return depth_bound_ == o.depth_bound_ && num_comms_ == o.num_comms_;
  }

private:
  int depth_bound_ = 0;
  int num_comms_ = 0;
  std::vector<int> depth_, comm_, reversed_;
};

inline StateSpace::StateSpace(int max_depth, int num_comms)
: depth_bound_(max_depth), num_comms_(num_comms)
{
  const int n = size();
  depth_.assign(n, 0);
  comm_.assign(n, 0);
  reversed_.assign(n, 0);
  for (int mu = 1; mu <= num_comms; ++mu)
    for (int d = -max_depth; d <= max_depth; ++d) {
      if (d == 0) continue;
      const int s = index(d, mu);
      depth_[s] = d;
      comm_[s] = mu;
      reversed_[s] = index(-d, mu);
    }
}

}  // namespace stp

#endif  // STP_STATE_SPACE_HPP
