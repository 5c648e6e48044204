#include <algorithm>
#include <bit>
#include <vector>

#include "stp/kernels.hpp"

namespace stp {

namespace {

using Table = std::vector<double>;  // indexed by neighbor subset mask

// (f * g)(T) = max over S subset of T of f(T \ S) + g(S).
void maxplus_convolve(const Table& f, const Table& g, Table& out)
{
  const unsigned size = static_cast<unsigned>(f.size());
  out.assign(size, neg_inf);
  for (unsigned T = 0; T < size; ++T) {
    double best = f[T] + g[0];
    for (unsigned S = T; S != 0; S = (S - 1) & T) best = std::max(best, f[T ^ S] + g[S]);
    out[T] = best;
  }
}

// max over S subset of O of f(O \ S) + g(S), at a single mask.
double convolve_at(const Table& f, const Table& g, unsigned O)
{
  double best = f[O] + g[0];
  for (unsigned S = O; S != 0; S = (S - 1) & O) best = std::max(best, f[O ^ S] + g[S]);
  return best;
}

// Per-communication subset tables of one node.
struct CommTables {
  Table g;                    // best configuration whose mu-edges are exactly S
  std::vector<Table> plain;   // plain[x](S) = sum over S of a_k(x, mu), x = 1..D
  std::vector<Table> parent;  // parent[d](S): one member is the parent at -d, others children at d+1
};

}  // namespace

Eigen::ArrayXXd neighocc_messages(const LocalNodeView& v, const KernelLimits& limits)
{
  const int n = v.degree();
  if (n > limits.max_degree)
    throw capacity_error("node degree " + std::to_string(n) + " exceeds the occupation-kernel cap "
                         + std::to_string(limits.max_degree));
  const int D = v.space.max_depth();
  const int M = v.space.num_comms();
  const int r = v.root_of;
  const unsigned size = 1u << n;
  const unsigned full = size - 1;
  Eigen::ArrayXXd out = Eigen::ArrayXXd::Constant(v.space.size(), n, neg_inf);

  // Lowest-bit recursion for modular tables.
  auto modular = [&](auto value, Table& t) {
    t.assign(size, 0.0);
    for (unsigned S = 1; S < size; ++S) {
      const int k = std::countr_zero(S);
      t[S] = t[S & (S - 1)] + value(k);
    }
  };

  Table unused;
  modular([&](int k) { return v.z(k); }, unused);

  std::vector<CommTables> comm(M + 1);
  for (int mu = 1; mu <= M; ++mu) {
    CommTables& c = comm[mu];
    c.plain.resize(D + 2);
    for (int x = 1; x <= D + 1; ++x) modular([&](int k) { return v.a(k, x, mu); }, c.plain[x]);
    if (r == mu) {
      c.g = c.plain[1];
      continue;
    }
    c.parent.resize(D + 1);
    c.g.assign(size, neg_inf);
    c.g[0] = -v.prizes(mu - 1);
    for (int d = 1; d <= D; ++d) {
      Table& pa = c.parent[d];
      const Table& kids = c.plain[d + 1];
      pa.assign(size, neg_inf);
      for (unsigned S = 1; S < size; ++S) {
        const int k = std::countr_zero(S);
        const unsigned rest = S & (S - 1);
        pa[S] = std::max(pa[rest] + v.a(k, d + 1, mu), kids[rest] + v.a(k, -d, mu));
        c.g[S] = std::max(c.g[S], pa[S]);
      }
    }
    if (v.flat && v.prizes(mu - 1) == 0.0)
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
          if (p == q) continue;
          const unsigned S = (1u << p) | (1u << q);
          for (int d = 1; d <= D; ++d)
            c.g[S] = std::max(c.g[S], v.a(p, -d, mu) + v.a(q, d, mu));
        }
  }

  // Communication 0 is "edge unused". prefix[q] combines 0..q, suffix[q] combines q..M.
  std::vector<Table> prefix(M + 1), suffix(M + 2);
  prefix[0] = unused;
  for (int q = 1; q < M; ++q) maxplus_convolve(prefix[q - 1], comm[q].g, prefix[q]);
  suffix[M] = comm[M].g;
  for (int q = M - 1; q >= 2; --q) maxplus_convolve(comm[q].g, suffix[q + 1], suffix[q]);

  Table others;  // everything but mu
  for (int mu = 1; mu <= M; ++mu) {
    if (mu == M) others = prefix[M - 1];
    else maxplus_convolve(prefix[mu - 1], suffix[mu + 1], others);
    const CommTables& c = comm[mu];
    const bool flat = v.flat && r != mu && v.prizes(mu - 1) == 0.0;

    for (int j = 0; j < n; ++j) {
      const unsigned O = full & ~(1u << j);
      if (mu == M) out(0, j) = convolve_at(others, c.g, O);

      auto single = [&](int d) {  // exactly one other mu-neighbor, at state d
        double best = neg_inf;
        for (int l = 0; l < n; ++l)
          if (l != j) best = std::max(best, others[O & ~(1u << l)] + v.a(l, d, mu));
        return best;
      };

      for (int d = 1; d <= D; ++d) {
        if (r == mu) {
          if (d == 1) out(v.space.index(-1, mu), j) = convolve_at(others, c.plain[1], O);
          continue;
        }
        // j is the parent, i at depth d.
        double up = convolve_at(others, c.plain[d + 1], O);
        if (flat) up = std::max(up, single(d));
        out(v.space.index(d, mu), j) = up - v.weights(j);
        // j is a child at depth d.
        double down = d >= 2 ? convolve_at(others, c.parent[d - 1], O) : neg_inf;
        if (flat) down = std::max(down, single(-d));
        out(v.space.index(-d, mu), j) = down;
      }
    }
  }
  return out;
}

}  // namespace stp
