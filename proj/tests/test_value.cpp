#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "test_util.hpp"
#include "value.hpp"

using namespace costcomm;
using testutil::status_of;

TEST_CASE("belief keys quantize within half a quantum") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 100; ++trial) {
    const BeliefPair pair{Belief{testutil::random_dist(rng, 3)},
                          Belief{testutil::random_dist(rng, 4)}};
    const BeliefKey key = quantize(pair);
    CHECK(key.n1 == 3);
    CHECK(key.n2 == 4);
    const BeliefPair back = dequantize(key);
    for (int x = 0; x < 3; ++x)
      CHECK(std::abs(back.b1[x] - pair.b1[x]) <= 0.5 / kQuantFactor);
    for (int x = 0; x < 4; ++x)
      CHECK(std::abs(back.b2[x] - pair.b2[x]) <= 0.5 / kQuantFactor);
  }

  const BeliefPair exact{Belief{{0.25, 0.75}}, Belief{{0.5, 0.5}}};
  const BeliefKey key = quantize(exact);
  CHECK(key.q[0] == 250000000);
  CHECK(key.q[1] == 750000000);
  CHECK(key.q[2] == 500000000);
  CHECK(key.q[3] == 500000000);

  // Beliefs closer than the quantum key identically.
  BeliefPair nudged = exact;
  nudged.b1.w[0] += 2e-10;
  CHECK(quantize(nudged) == key);
}

TEST_CASE("belief keys reject state spaces beyond the exact-memo capacity") {
  const BeliefPair big{Belief{std::vector<double>(5, 0.2)},
                       Belief{std::vector<double>(4, 0.25)}};
  CHECK(status_of([&] { quantize(big); }) == Status::CapExceeded);
  const BeliefPair fits{Belief{std::vector<double>(4, 0.25)},
                        Belief{std::vector<double>(4, 0.25)}};
  CHECK(quantize(fits).n1 == 4);
}

TEST_CASE("memo keys hash and compare componentwise") {
  const BeliefPair a{Belief{{0.25, 0.75}}, Belief{{0.5, 0.5}}};
  const MemoKey k1{quantize(a), ConstraintState{1, 0}};
  const MemoKey k2{quantize(a), ConstraintState{1, 0}};
  const MemoKey k3{quantize(a), ConstraintState{2, 0}};
  CHECK(k1 == k2);
  CHECK(MemoKeyHash{}(k1) == MemoKeyHash{}(k2));
  CHECK(k1 != k3);
  CHECK(MemoKeyHash{}(k1) != MemoKeyHash{}(k3));
}

TEST_CASE("two-state grids enumerate the segment in lexicographic order") {
  const AgentGrid g(2, 5);
  REQUIRE(g.count() == 5);
  for (int r = 0; r < 5; ++r) {
    CHECK(g.node(r)[0] == doctest::Approx(r / 4.0));
    CHECK(g.node(r)[1] == doctest::Approx(1.0 - r / 4.0));
  }
  CHECK(g.delta_rank(0) == 4);
  CHECK(g.delta_rank(1) == 0);
  CHECK(g.node(g.delta_rank(0)).w == std::vector<double>{1.0, 0.0});
}

TEST_CASE("three-state grids rank their own nodes consistently") {
  const AgentGrid g(3, 4);  // compositions of 3 into 3 parts
  REQUIRE(g.count() == 10);
  std::set<int> seen;
  for (int r = 0; r < g.count(); ++r) {
    const Belief& node = g.node(r);
    std::vector<int> comp(3);
    for (int i = 0; i < 3; ++i)
      comp[i] = static_cast<int>(std::lround(node[i] * g.steps()));
    CHECK(g.rank(comp) == r);
    seen.insert(r);
  }
  CHECK(seen.size() == 10);
  for (int x = 0; x < 3; ++x)
    CHECK(g.node(g.delta_rank(x))[x] == doctest::Approx(1.0));
}

TEST_CASE("stencils are convex combinations that reproduce the query point") {
  std::mt19937_64 rng(67);
  for (int n = 2; n <= 4; ++n) {
    const AgentGrid g(n, 7);
    for (int trial = 0; trial < 200; ++trial) {
      const Belief pi{testutil::random_dist(rng, n)};
      std::vector<StencilEntry> st;
      g.stencil(pi, st);
      REQUIRE(!st.empty());
      CHECK(static_cast<int>(st.size()) <= n);

      double wsum = 0.0;
      std::vector<double> recon(n, 0.0);
      for (const auto& e : st) {
        CHECK(e.weight >= 0.0);
        CHECK(e.node >= 0);
        CHECK(e.node < g.count());
        wsum += e.weight;
        for (int x = 0; x < n; ++x) recon[x] += e.weight * g.node(e.node)[x];
      }
      CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
      for (int x = 0; x < n; ++x)
        CHECK(recon[x] == doctest::Approx(pi[x]).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("stencil at a grid node is that node alone") {
  // Steps of 1/4 keep every node coordinate exactly representable, so the
  // query lands on the vertex with no float dust.
  for (int n = 2; n <= 4; ++n) {
    const AgentGrid g(n, 5);
    for (int r = 0; r < g.count(); ++r) {
      std::vector<StencilEntry> st;
      g.stencil(g.node(r), st);
      REQUIRE(st.size() == 1);
      CHECK(st[0].node == r);
      CHECK(st[0].weight == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(g.nearest(g.node(r)) == r);
    }
  }
}

TEST_CASE("stencil appends without clearing") {
  const AgentGrid g(2, 5);
  std::vector<StencilEntry> st;
  g.stencil(g.node(2), st);
  g.stencil(g.node(3), st);
  REQUIRE(st.size() == 2);
  CHECK(st[0].node == 2);
  CHECK(st[1].node == 3);
}

TEST_CASE("pair interpolation reproduces separable linear functions") {
  const AgentGrid g1(2, 9);
  const AgentGrid g2(3, 9);
  GridTables t;
  t.g1 = g1;
  t.g2 = g2;
  t.layers = 1;

  // f(p1, p2) = 2 p1[0] + 3 p2[1] - p2[2] is linear per agent, so the tensor
  // stencil evaluates it exactly.
  std::vector<double> table(g1.count() * g2.count());
  for (int r1 = 0; r1 < g1.count(); ++r1)
    for (int r2 = 0; r2 < g2.count(); ++r2)
      table[r1 * g2.count() + r2] =
          2.0 * g1.node(r1)[0] + 3.0 * g2.node(r2)[1] - g2.node(r2)[2];

  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 200; ++trial) {
    const BeliefPair pair{Belief{testutil::random_dist(rng, 2)},
                          Belief{testutil::random_dist(rng, 3)}};
    const double expect = 2.0 * pair.b1[0] + 3.0 * pair.b2[1] - pair.b2[2];
    CHECK(t.interpolate(table, pair) == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("grids need at least two nodes per axis") {
  CHECK(status_of([] { AgentGrid(2, 1); }) == Status::InvalidArgument);
}
