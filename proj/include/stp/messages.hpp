#ifndef STP_MESSAGES_HPP
#define STP_MESSAGES_HPP

#include <cstdint>
#include <iosfwd>

#include <Eigen/Core>

#include "stp/instance.hpp"
#include "stp/state_space.hpp"

namespace stp {

// Directed edge ids: 2e runs u -> v of edge e (u < v), 2e + 1 runs v -> u.
inline int directed_id(int e, bool from_lower) { return 2 * e + (from_lower ? 0 : 1); }
inline int undirected_id(int de) { return de / 2; }
inline bool from_lower(int de) { return de % 2 == 0; }

/// Max-Sum messages h_ij(d, mu), one column per directed edge, one row per state.
/// The state (d, mu) of column i -> j is the value of d_ij: d > 0 means j is the parent
/// of i and d is the depth of i.
struct MessageTable {
  StateSpace space;
  Eigen::ArrayXXd values;

  int num_directed() const { return static_cast<int>(values.cols()); }
  auto col(int de) { return values.col(de); }
  auto col(int de) const { return values.col(de); }
};

/// Cavity fields, one column per undirected edge, oriented u -> v (u < v).
struct CavityField {
  StateSpace space;
  Eigen::ArrayXXd values;

  int num_edges() const { return static_cast<int>(values.cols()); }
  auto col(int e) const { return values.col(e); }
};

/// Zero messages plus iid noise in [0, noise_eps], normalized.
MessageTable init_messages(const Instance& inst, const StateSpace& space, std::uint64_t seed,
                           double noise_eps);

/// Shifts finite entries so that their maximum is exactly 0. Returns false and leaves
/// `v` untouched when every entry is neg_inf.
bool normalize_in_place(Eigen::Ref<Eigen::ArrayXd> v);

/// Throwing form of normalize_in_place (contradiction_error).
Eigen::ArrayXd normalize(const Eigen::ArrayXd& v);

/// v(s) -> v(reversed(s)).
Eigen::ArrayXd reverse_states(const Eigen::Ref<const Eigen::ArrayXd>& v, const StateSpace& space);

/// H_ij(d, mu) = h_ij(d, mu) + h_ji(-d, mu) - C' with max H = 0.
Eigen::ArrayXd cavity_field(const Eigen::Ref<const Eigen::ArrayXd>& h_ij,
                            const Eigen::Ref<const Eigen::ArrayXd>& h_ji, const StateSpace& space);

/// normalize(h_bar + t * gamma0 * H_prev), with H_prev given in the orientation of h_bar.
/// The addition is skipped entirely when t * gamma0 == 0.
Eigen::ArrayXd apply_reinforcement(const Eigen::Ref<const Eigen::ArrayXd>& h_bar,
                                   const Eigen::Ref<const Eigen::ArrayXd>& H_prev, int t,
                                   double gamma0);

/// Field column of edge e seen from `from` (reversed when `from` is the upper endpoint).
Eigen::ArrayXd oriented_field(const CavityField& field, const Instance& inst, int e, int from);

/// Dump: header `messages D M`, then `msg i j v_0 ... v_{S-1}` per directed edge
/// (1-based node ids, canonical state order, shortest round-trip decimals).
void write_message_dump(std::ostream& out, const MessageTable& table, const Instance& inst);
MessageTable read_message_dump(std::istream& in, const Instance& inst);

}  // namespace stp

#endif  // STP_MESSAGES_HPP
