#include <doctest.h>

#include <functional>

#include "stp/generators.hpp"
#include "stp/kernels.hpp"
#include "stp/matching.hpp"
#include "stp/oracle.hpp"
#include "stp/rng.hpp"
#include "support.hpp"

using namespace stp;
using stp::testing::max_diff;
using stp::testing::random_view;
using stp::testing::ViewShape;

namespace {

// Exhaustive optimum over every injective partial row -> column map.
double brute_matching(const MatchingProblem& p)
{
  const int R = p.rows(), C = p.cols();
  std::vector<char> used(C, 0);
  double best = neg_inf;
  std::function<void(int, double)> rec = [&](int r, double acc) {
    if (r == R) {
      double v = acc;
      for (int c = 0; c < C; ++c) {
        if (used[c]) continue;
        if (p.must_match[c]) return;
        v += p.col_unmatched(c);
      }
      best = std::max(best, v);
      return;
    }
    rec(r + 1, acc + p.row_unmatched(r));
    for (int c = 0; c < C; ++c) {
      if (used[c] || p.weights(r, c) == neg_inf) continue;
      used[c] = 1;
      rec(r + 1, acc + p.weights(r, c));
      used[c] = 0;
    }
  };
  rec(0, 0.0);
  return best;
}

}  // namespace

TEST_SUITE("kernel-vdstp") {

TEST_CASE("zero messages give the bare edge cost on parent states")
{
  LocalNodeView v;
  v.space = StateSpace(2, 1);
  v.incoming = Eigen::ArrayXXd::Zero(v.space.size(), 3);
  v.weights = Eigen::ArrayXd(3);
  v.weights << 0.3, 0.5, 0.7;
  v.prizes = Eigen::ArrayXd::Zero(1);
  const auto out = vdstp_messages(v);
  for (int j = 0; j < 3; ++j) CHECK(out(v.space.index(1, 1), j) == doctest::Approx(-v.weights(j)));
}

TEST_CASE("a degree-1 terminal cannot leave its only edge unused")
{
  LocalNodeView v;
  v.space = StateSpace(2, 1);
  v.incoming = Eigen::ArrayXXd::Zero(v.space.size(), 1);
  v.weights = Eigen::ArrayXd::Constant(1, 1.0);
  v.prizes = Eigen::ArrayXd::Constant(1, terminal_prize);
  const auto h = update_node_vdstp(v, 0);
  CHECK(h(0) == neg_inf);
  CHECK(h.maxCoeff() == 0.0);
}

TEST_CASE("matches the enumeration oracle")
{
  Rng rng(21);
  for (int rep = 0; rep < 60; ++rep) {
    ViewShape shape;
    shape.degree = 3;
    shape.depth = 2;
    shape.comms = 2;
    shape.flat = rep % 2 == 1;
    shape.terminal = rep % 3 == 0;
    shape.root_of = rep % 7 == 0 ? 1 : 0;
    shape.prizes = rep % 4 == 0;
    const auto v = random_view(rng, shape);
    CHECK(max_diff(vdstp_messages(v), local_update_oracle_all(v, Variant::VertexDisjoint)) <= 1e-9);
  }
}

TEST_CASE("shift covariance")
{
  Rng rng(3);
  ViewShape shape;
  shape.degree = 4;
  shape.flat = true;
  auto v = random_view(rng, shape);
  const auto before = vdstp_messages(v);
  v.incoming.col(2) += 1.25;
  const auto after = vdstp_messages(v);
  for (int j = 0; j < 4; ++j) {
    Eigen::ArrayXXd expect = before.col(j);
    if (j != 2) expect += 1.25;
    CHECK(max_diff(after.col(j), expect) <= 1e-12);
  }
}

TEST_CASE("flat terms vanish without the flat formalism")
{
  Rng rng(8);
  ViewShape shape;
  shape.degree = 3;
  auto v = random_view(rng, shape);
  const auto branching = vdstp_messages(v);
  v.flat = true;
  const auto flat = vdstp_messages(v);
  // Flat adds options, never removes them.
  for (Eigen::Index i = 0; i < flat.rows(); ++i)
    for (Eigen::Index j = 0; j < flat.cols(); ++j) CHECK(flat(i, j) >= branching(i, j));
}

}  // TEST_SUITE

TEST_SUITE("kernel-edstp") {

TEST_CASE("occupation kernel equals the vertex kernel when M = 1")
{
  Rng rng(5);
  for (int rep = 0; rep < 40; ++rep) {
    ViewShape shape;
    shape.degree = 1 + rep % 5;
    shape.depth = 1 + rep % 3;
    shape.comms = 1;
    shape.flat = rep % 2 == 0;
    shape.root_of = rep % 6 == 0 ? 1 : 0;
    shape.terminal = rep % 3 == 0;
    shape.prizes = true;
    const auto v = random_view(rng, shape);
    CHECK(max_diff(neighocc_messages(v), vdstp_messages(v)) <= 1e-9);
  }
}

TEST_CASE("empty assignment is the best reply to zero messages")
{
  LocalNodeView v;
  v.space = StateSpace(2, 2);
  v.incoming = Eigen::ArrayXXd::Zero(v.space.size(), 3);
  v.weights = Eigen::ArrayXd::Constant(3, 0.4);
  v.prizes = Eigen::ArrayXd::Zero(2);
  for (const auto& out : {neighocc_messages(v), matching_messages(v)})
    for (int j = 0; j < 3; ++j) {
      CHECK(out(0, j) == 0.0);
      CHECK(out.col(j).maxCoeff() == 0.0);
    }
}

TEST_CASE("occupation kernel matches the oracle")
{
  Rng rng(12);
  for (int rep = 0; rep < 60; ++rep) {
    ViewShape shape;
    shape.degree = 3;
    shape.depth = 2;
    shape.comms = 2;
    shape.flat = rep % 2 == 1;
    shape.terminal = rep % 3 == 0;
    shape.root_of = rep % 5 == 0 ? 2 : 0;
    shape.prizes = rep % 4 == 0;
    const auto v = random_view(rng, shape);
    CHECK(max_diff(neighocc_messages(v), local_update_oracle_all(v, Variant::EdgeDisjoint)) <= 1e-9);
  }
}

TEST_CASE("matching kernel matches the oracle on degree 5")
{
  Rng rng(13);
  OracleLimits lim;
  for (int rep = 0; rep < 10; ++rep) {
    ViewShape shape;
    shape.degree = 5;
    shape.depth = 2;
    shape.comms = 2;
    shape.terminal = rep % 3 == 0;
    shape.root_of = rep % 4 == 0 ? 1 : 0;
    shape.prizes = rep % 2 == 0;
    const auto v = random_view(rng, shape);
    CHECK(max_diff(matching_messages(v), local_update_oracle_all(v, Variant::EdgeDisjoint, lim)) <= 1e-9);
  }
}

TEST_CASE("matching and occupation kernels agree")
{
  Rng rng(14);
  for (int rep = 0; rep < 200; ++rep) {
    const auto shape = stp::testing::random_shape(rng, 6, 3, 3, false);
    const auto v = random_view(rng, shape);
    const auto m = matching_messages(v);
    CHECK(max_diff(m, neighocc_messages(v)) <= 1e-9);
    if (rep % 10 == 0) CHECK(max_diff(m, matching_messages_reference(v)) <= 1e-9);
  }
}

TEST_CASE("matching and occupation kernels agree bit for bit on solver views")
{
  const auto inst = gen_regular(30, 5, 3, 3, 6);
  const StateSpace s(4, 3);
  const auto table = init_messages(inst, s, 2, 3.0);
  for (int i = 0; i < inst.num_nodes(); ++i) {
    const auto v = make_view(inst, table, i, false);
    const auto m = matching_messages(v);
    const auto n = neighocc_messages(v);
    CHECK(((m == n) || (m == neg_inf && n == neg_inf)).all());
  }
}

TEST_CASE("matching idle branch with one communication")
{
  LocalNodeView v;
  v.space = StateSpace(2, 1);
  v.incoming = Eigen::ArrayXXd::Zero(v.space.size(), 2);
  v.incoming.row(0).setConstant(-0.5);
  v.weights = Eigen::ArrayXd::Constant(2, 1.0);
  v.prizes = Eigen::ArrayXd::Constant(1, 0.8);
  // Idle for target 0: -c + h_1(0,0), or a child/parent pair through neighbor 1.
  const auto m = matching_messages(v);
  CHECK(m(0, 0) == neighocc_messages(v)(0, 0));
  CHECK(m(0, 0) >= -0.8 - 0.5);
  v.prizes(0) = terminal_prize;
  CHECK(matching_messages(v)(0, 0) == neighocc_messages(v)(0, 0));
}

TEST_CASE("errors")
{
  Rng rng(1);
  ViewShape shape;
  shape.degree = 3;
  auto v = random_view(rng, shape);
  v.flat = true;
  CHECK_THROWS_AS(matching_messages(v), unsupported_error);
  v.flat = false;
  KernelLimits tight;
  tight.max_degree = 2;
  tight.max_depth_vectors = 4;
  CHECK_THROWS_AS(neighocc_messages(v, tight), capacity_error);
  CHECK_THROWS_AS(matching_messages(v, tight), capacity_error);
}

}  // TEST_SUITE

TEST_SUITE("matching") {

TEST_CASE("diagonal dominance")
{
  auto p = MatchingProblem::sized(2, 2);
  p.weights << 0, -1, -1, 0;
  p.must_match = {true, true};
  const auto r = max_weight_matching(p);
  CHECK(r.feasible);
  CHECK(r.value == 0.0);
  CHECK(r.row_to_col == std::vector<int>{0, 1});
}

TEST_CASE("forced single entry")
{
  auto p = MatchingProblem::sized(1, 1);
  p.weights << -5;
  p.must_match = {true};
  const auto r = max_weight_matching(p);
  CHECK(r.value == -5.0);
  CHECK(r.row_to_col == std::vector<int>{0});
}

TEST_CASE("unsatisfiable must-match column")
{
  auto p = MatchingProblem::sized(2, 1);
  p.must_match = {true};
  const auto r = max_weight_matching(p);
  CHECK_FALSE(r.feasible);
  CHECK(r.value == neg_inf);
}

TEST_CASE("random problems equal exhaustive search")
{
  Rng rng(77);
  for (int rep = 0; rep < 300; ++rep) {
    const int R = 1 + static_cast<int>(uniform_below(rng, 5));
    const int C = 1 + static_cast<int>(uniform_below(rng, 4));
    auto p = MatchingProblem::sized(R, C);
    for (int r = 0; r < R; ++r)
      for (int c = 0; c < C; ++c)
        p.weights(r, c) = uniform_below(rng, 6) == 0 ? neg_inf : -3.0 * uniform_open01(rng);
    for (int r = 0; r < R; ++r)
      p.row_unmatched(r) = uniform_below(rng, 5) == 0 ? neg_inf : -2.0 * uniform_open01(rng);
    for (int c = 0; c < C; ++c) {
      p.col_unmatched(c) = -2.0 * uniform_open01(rng);
      p.must_match[c] = uniform_below(rng, 2) == 1;
    }
    const double expect = brute_matching(p);
    const auto got = max_weight_matching(p);
    if (expect == neg_inf) {
      CHECK_FALSE(got.feasible);
    } else {
      REQUIRE(got.feasible);
      CHECK(got.value == doctest::Approx(expect).epsilon(1e-12));
      CHECK(assignment_value(p, got.row_to_col) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

}  // TEST_SUITE

TEST_SUITE("oracle") {

TEST_CASE("degree-1 view by hand")
{
  LocalNodeView v;
  v.space = StateSpace(2, 1);
  v.incoming = Eigen::ArrayXXd::Zero(v.space.size(), 1);
  v.weights = Eigen::ArrayXd::Constant(1, 0.5);
  v.prizes = Eigen::ArrayXd::Constant(1, 2.0);
  const auto& s = v.space;
  // Unused: the prize is lost. Leaf child of the target: pays its own edge.
  CHECK(local_update_oracle(v, Variant::VertexDisjoint, 0, 0) == -2.0);
  CHECK(local_update_oracle(v, Variant::VertexDisjoint, 0, s.index(1, 1)) == -0.5);
  CHECK(local_update_oracle(v, Variant::VertexDisjoint, 0, s.index(2, 1)) == -0.5);
  // The target as a child requires a parent elsewhere: impossible with degree 1.
  CHECK(local_update_oracle(v, Variant::VertexDisjoint, 0, s.index(-1, 1)) == neg_inf);
  CHECK(local_update_oracle(v, Variant::VertexDisjoint, 0, s.index(-2, 1)) == neg_inf);
}

TEST_CASE("variants coincide for a single communication")
{
  Rng rng(31);
  for (int rep = 0; rep < 40; ++rep) {
    auto shape = stp::testing::random_shape(rng, 4, 3, 1, true);
    const auto v = random_view(rng, shape);
    CHECK(max_diff(local_update_oracle_all(v, Variant::VertexDisjoint),
                   local_update_oracle_all(v, Variant::EdgeDisjoint)) == 0.0);
  }
}

TEST_CASE("structural and literal constraint filters agree")
{
  Rng rng(32);
  for (int rep = 0; rep < 60; ++rep) {
    const auto shape = stp::testing::random_shape(rng, 3, 2, 3, true);
    const auto v = random_view(rng, shape);
    for (auto variant : {Variant::VertexDisjoint, Variant::EdgeDisjoint})
      CHECK(max_diff(local_update_oracle_all(v, variant),
                     local_update_oracle_all(v, variant, {}, PsiFilter::Literal)) == 0.0);
  }
}

TEST_CASE("single-target and all-target forms agree")
{
  Rng rng(33);
  const auto v = random_view(rng, ViewShape{});
  const auto all = local_update_oracle_all(v, Variant::EdgeDisjoint);
  for (int j = 0; j < v.degree(); ++j)
    for (int s = 0; s < v.space.size(); ++s)
      CHECK(local_update_oracle(v, Variant::EdgeDisjoint, j, s) == all(s, j));
}

TEST_CASE("exact packing on small graphs")
{
  using stp::testing::make_instance;
  const auto tri = make_instance(3, {{1, 2, 1.0}, {2, 3, 2.0}, {1, 3, 3.0}}, {{1, 2}});
  const auto r = exact_pack(tri, Variant::EdgeDisjoint);
  REQUIRE(r.energy.has_value());
  CHECK(*r.energy == 1.0);

  // K4 with pairs {1,2} and {3,4}: vertex-disjoint pairings are the two direct edges only.
  const auto k4 = make_instance(4,
                                {{1, 2, 1.0}, {1, 3, 0.2}, {1, 4, 0.3}, {2, 3, 0.4}, {2, 4, 0.1}, {3, 4, 2.0}},
                                {{1, 2}, {3, 4}});
  const auto rv = exact_pack(k4, Variant::VertexDisjoint);
  REQUIRE(rv.energy.has_value());
  CHECK(*rv.energy == doctest::Approx(3.0));
  // Edge-disjoint: 1-2 direct (1.0) plus 3-1-4 or 3-2-4 (0.5) beats 1-4-2 plus 3-4 (2.4).
  const auto re = exact_pack(k4, Variant::EdgeDisjoint);
  REQUIRE(re.energy.has_value());
  CHECK(*re.energy == doctest::Approx(1.5));

  // Two communications needing the single bridge 2-3.
  const auto bridge = make_instance(4, {{1, 2, 1.0}, {2, 3, 1.0}, {3, 4, 1.0}}, {{1, 4}, {2, 3}});
  CHECK_FALSE(exact_pack(bridge, Variant::EdgeDisjoint).energy.has_value());
}

}  // TEST_SUITE
