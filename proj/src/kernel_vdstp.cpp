#include <algorithm>
#include <cmath>

#include "stp/kernels.hpp"

namespace stp {

namespace {

// Kernel inputs are rounded to multiples of 2^-36. Sums and differences of such values stay
// exact while their magnitude is below 2^17, so every kernel returns the same bits
// whatever order it adds terms in. Infinities pass through unchanged.
double on_grid(double x)
{
  if (!std::isfinite(x)) return x;
  return std::ldexp(std::nearbyint(std::ldexp(x, 36)), -36);
}

}  // namespace

LocalNodeView make_view(const Instance& inst, const MessageTable& table, int node, bool flat)
{
  const auto& inc = inst.incident(node);
  const int n = static_cast<int>(inc.size());
  LocalNodeView view;
  view.space = table.space;
  view.incoming.resize(table.space.size(), n);
  view.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    // message k -> node
    const int de = directed_id(inc[k].edge, inst.edge(inc[k].edge).u == inc[k].neighbor);
    view.incoming.col(k) = table.values.col(de).unaryExpr(&on_grid);
    view.weights(k) = on_grid(inst.edge(inc[k].edge).weight);
  }
  view.prizes.resize(inst.num_comms());
  for (int mu = 1; mu <= inst.num_comms(); ++mu) view.prizes(mu - 1) = on_grid(inst.prize(node, mu));
  view.root_of = inst.root_comm(node);
  view.flat = flat;
  return view;
}

namespace {

// Sum of prizes over communications other than `skip` (0 skips nothing).
double prize_sum(const LocalNodeView& v, int skip)
{
  double s = 0.0;
  for (int mu = 1; mu <= v.space.num_comms(); ++mu)
    if (mu != skip) s += v.prizes(mu - 1);
  return s;
}

// The helpers below return, for every slot j at once, a max-plus sum over the other
// slots. Each uses a prefix and a suffix pass and joins them around j, so nothing is ever
// subtracted and neg_inf entries stay exact.
using Vec = Eigen::ArrayXd;

// Sum of base over k != j.
Vec all_base(const Vec& base)
{
  const Eigen::Index n = base.size();
  Vec pre(n + 1), suf(n + 1), out(n);
  pre(0) = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) pre(k + 1) = pre(k) + base(k);
  suf(n) = 0.0;
  for (Eigen::Index k = n - 1; k >= 0; --k) suf(k) = suf(k + 1) + base(k);
  for (Eigen::Index j = 0; j < n; ++j) out(j) = pre(j) + suf(j + 1);
  return out;
}

// Exactly one k != j takes role, the others take base.
Vec one_role(const Vec& base, const Vec& role)
{
  const Eigen::Index n = base.size();
  Vec p0(n + 1), p1(n + 1), s0(n + 1), s1(n + 1), out(n);
  p0(0) = 0.0;
  p1(0) = neg_inf;
  for (Eigen::Index k = 0; k < n; ++k) {
    p1(k + 1) = std::max(p1(k) + base(k), p0(k) + role(k));
    p0(k + 1) = p0(k) + base(k);
  }
  s0(n) = 0.0;
  s1(n) = neg_inf;
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    s1(k) = std::max(s1(k + 1) + base(k), s0(k + 1) + role(k));
    s0(k) = s0(k + 1) + base(k);
  }
  for (Eigen::Index j = 0; j < n; ++j) out(j) = std::max(p1(j) + s0(j + 1), p0(j) + s1(j + 1));
  return out;
}

// Two distinct k != j take r1 and r2, the others take base.
Vec two_roles(const Vec& base, const Vec& r1, const Vec& r2)
{
  const Eigen::Index n = base.size();
  // Columns: neither role placed, r1 only, r2 only, both.
  Eigen::ArrayXXd p(n + 1, 4), s(n + 1, 4);
  Vec out(n);
  p.row(0) << 0.0, neg_inf, neg_inf, neg_inf;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double b = base(k);
    p(k + 1, 3) = std::max({p(k, 3) + b, p(k, 1) + r2(k), p(k, 2) + r1(k)});
    p(k + 1, 1) = std::max(p(k, 1) + b, p(k, 0) + r1(k));
    p(k + 1, 2) = std::max(p(k, 2) + b, p(k, 0) + r2(k));
    p(k + 1, 0) = p(k, 0) + b;
  }
  s.row(n) << 0.0, neg_inf, neg_inf, neg_inf;
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    const double b = base(k);
    s(k, 3) = std::max({s(k + 1, 3) + b, s(k + 1, 1) + r2(k), s(k + 1, 2) + r1(k)});
    s(k, 1) = std::max(s(k + 1, 1) + b, s(k + 1, 0) + r1(k));
    s(k, 2) = std::max(s(k + 1, 2) + b, s(k + 1, 0) + r2(k));
    s(k, 0) = s(k + 1, 0) + b;
  }
  for (Eigen::Index j = 0; j < n; ++j)
    out(j) = std::max({p(j, 3) + s(j + 1, 0), p(j, 1) + s(j + 1, 2), p(j, 2) + s(j + 1, 1),
                       p(j, 0) + s(j + 1, 3)});
  return out;
}

}  // namespace

Eigen::ArrayXXd vdstp_messages(const LocalNodeView& v)
{
  const int n = v.degree();
  const int D = v.space.max_depth();
  const int M = v.space.num_comms();
  const int r = v.root_of;
  Eigen::ArrayXXd out = Eigen::ArrayXXd::Constant(v.space.size(), n, neg_inf);
  if (n == 0) return out;

  Eigen::ArrayXd except(M + 1);
  except(0) = prize_sum(v, 0);
  for (int mu = 1; mu <= M; ++mu) except(mu) = prize_sum(v, mu);

  // Slot values as dense columns: a.col(s) holds a(k, d, mu) of state s for every k.
  Eigen::ArrayXXd a = v.incoming.transpose();
  for (int s = 1; s < v.space.size(); ++s)
    if (v.space.depth(s) < 0) a.col(s) -= v.weights;
  const Vec z = a.col(0);
  const Vec none = Vec::Constant(n, neg_inf);
  auto at = [&](int d, int mu) -> Vec {
    const int s = v.space.index_or_none(d, mu);
    return s < 0 ? none : Vec(a.col(s));
  };
  auto flat_ok = [&](int mu) { return v.flat && r == 0 && v.prizes(mu - 1) == 0.0; };

  // (0,0): j is not used by i.
  Vec idle = Vec::Constant(n, neg_inf);
  if (r != 0) {
    idle = -except(r) + all_base(z.max(at(1, r)));
  } else {
    idle = -except(0) + all_base(z);
    for (int mu = 1; mu <= M; ++mu)
      for (int d = 1; d <= D; ++d) {
        const Vec parent = at(-d, mu);
        idle = idle.max(-except(mu) + one_role(z.max(at(d + 1, mu)), parent));
        if (flat_ok(mu)) idle = idle.max(-except(mu) + two_roles(z, parent, at(d, mu)));
      }
  }
  out.row(0) = idle.transpose();

  for (int mu = 1; mu <= M; ++mu) {
    if (r != 0 && r != mu) continue;
    for (int d = 1; d <= D; ++d) {
      // d_ij = d: j is the parent, i sits at depth d.
      if (r == 0) {
        Vec val = -except(mu) + all_base(z.max(at(d + 1, mu)));
        if (flat_ok(mu)) val = val.max(-except(mu) + one_role(z, at(d, mu)));
        out.row(v.space.index(d, mu)) = (val - v.weights).transpose();
      }
      // d_ij = -d: j is a child at depth d.
      Vec val = Vec::Constant(n, neg_inf);
      if (r == mu) {
        if (d == 1) val = -except(mu) + all_base(z.max(at(1, mu)));
      } else {
        if (d >= 2) val = -except(mu) + one_role(z.max(at(d, mu)), at(-(d - 1), mu));
        if (flat_ok(mu)) val = val.max(-except(mu) + one_role(z, at(-d, mu)));
      }
      out.row(v.space.index(-d, mu)) = val.transpose();
    }
  }
  return out;
}

namespace {

Eigen::ArrayXd normalized_column(const Eigen::ArrayXXd& all, int target)
{
  Eigen::ArrayXd col = all.col(target);
  if (!normalize_in_place(col))
    throw contradiction_error("every state of the outgoing message is forbidden");
  return col;
}

}  // namespace

Eigen::ArrayXXd node_messages(KernelKind kind, const LocalNodeView& view, const KernelLimits& limits)
{
  switch (kind) {
    case KernelKind::VDStP: return vdstp_messages(view);
    case KernelKind::NeighOcc: return neighocc_messages(view, limits);
    case KernelKind::Matching: return matching_messages(view, limits);
  }
  return {};
}

Eigen::ArrayXd update_node_vdstp(const LocalNodeView& view, int target)
{
  return normalized_column(vdstp_messages(view), target);
}

Eigen::ArrayXd update_node_edstp_neighocc(const LocalNodeView& view, int target,
                                          const KernelLimits& limits)
{
  return normalized_column(neighocc_messages(view, limits), target);
}

Eigen::ArrayXd update_node_edstp_matching(const LocalNodeView& view, int target,
                                          const KernelLimits& limits)
{
  return normalized_column(matching_messages(view, limits), target);
}

}  // namespace stp
