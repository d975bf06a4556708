#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "immunet/heuristics.hpp"

using namespace immunet;

TEST(Tanh, RuleCases) {
  const TanhHeuristic h(1.0);
  EXPECT_EQ(h(5, 1), 0.0);
  EXPECT_EQ(h(2, 7), 1.0);
  EXPECT_EQ(h(1, 2), 1.0);
  EXPECT_EQ(h(0, 5), 0.0);
  EXPECT_EQ(h(5, 0), 0.0);
  EXPECT_EQ(h(1, 1), 0.0);  // b = 1 wins over a <= 2 <= b
  EXPECT_NEAR(TanhHeuristic(0.7)(3, 3), std::tanh(2.0), 1e-15);
  EXPECT_NEAR(TanhHeuristic(0.7)(3, 3), 0.96402758, 1e-8);
  EXPECT_NEAR(h(4, 2), std::tanh(0.5), 1e-15);
  EXPECT_NEAR(h(4, 2), 0.46211716, 1e-8);
  EXPECT_THROW(TanhHeuristic(-0.1), InvalidParameter);
}

TEST(Tanh, RangeAndMonotonicity) {
  for (double alpha : {0.0, 0.1, 0.4, 0.7, 1.0, 2.0}) {
    const TanhHeuristic h(alpha);
    for (Degree a = 0; a <= 80; ++a)
      for (Degree b = 0; b <= 80; ++b) {
        const double v = h(a, b);
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, 1.0);
        if (a >= 3 && b >= 2) {
          EXPECT_GE(v, h(a, b - 1)) << a << "," << b;
        }
        if (b >= 2 && a >= 2) {
          EXPECT_LE(v, h(a - 1, b)) << a << "," << b;
        }
      }
  }
  for (Degree a = 3; a <= 60; ++a)
    for (Degree b = 2; b <= 60; ++b) {
      double prev = 2.0;
      for (double alpha : {0.0, 0.1, 0.4, 0.7, 1.0, 1.5}) {
        const double v = TanhHeuristic(alpha)(a, b);
        if (a == 3)
          EXPECT_EQ(v, TanhHeuristic(0.0)(a, b));
        else
          EXPECT_LE(v, prev);
        prev = v;
      }
    }
}

TEST(Stubs, ConstantAndSwapped) {
  EXPECT_EQ(ConstantHeuristic{1.0}(7, 1), 1.0);
  const auto s = swapped(TanhHeuristic(1.0));
  EXPECT_EQ(s(2, 5), TanhHeuristic(1.0)(5, 2));
  static_assert(Heuristic<TanhHeuristic>);
  static_assert(Heuristic<SwappedHeuristic<ConstantHeuristic>>);
}

namespace {

Multigraph star(NodeId leaves) {
  std::vector<Edge> e;
  for (NodeId v = 1; v <= leaves; ++v) e.push_back({0, v});
  return Multigraph(leaves + 1, e);
}

}  // namespace

TEST(RandomImmunization, Cardinality) {
  Rng rng(1);
  Multigraph g(10, {});
  EXPECT_TRUE(random_immunization(g, 0.0, rng).empty());
  EXPECT_EQ(random_immunization(g, 1.0, rng).size(), 10u);
  auto half = random_immunization(g, 0.5, rng);
  EXPECT_EQ(std::set<NodeId>(half.begin(), half.end()).size(), 5u);
  EXPECT_THROW(random_immunization(g, 1.5, rng), InvalidParameter);
}

TEST(DegreeThreshold, Examples) {
  auto g = star(4);
  EXPECT_TRUE(degree_threshold_immunization(g, 4).empty());
  EXPECT_EQ(degree_threshold_immunization(g, 0).size(), 5u);
  EXPECT_EQ(degree_threshold_immunization(g, 1), std::vector<NodeId>{0});
}

TEST(Acquaintance, Examples) {
  Rng rng(2);
  auto g = star(4);
  EXPECT_TRUE(acquaintance_immunization(g, 0.0, 1.0, rng).empty());
  // Every node sampled with full neighborhoods: leaves name the center,
  // the center names every leaf.
  auto all = acquaintance_immunization(g, 1.0, 1.0, rng);
  EXPECT_EQ(all.size(), 5u);
  Multigraph lonely(3, {{1, 2}});
  std::size_t hits = 0;
  for (int rep = 0; rep < 50; ++rep) {
    auto picked = acquaintance_immunization(lonely, 1.0 / 3.0, 1.0, rng);
    for (NodeId u : picked) EXPECT_NE(u, 0u);
    hits += picked.size();
  }
  EXPECT_GT(hits, 0u);
  // Half of a 4-leaf center's neighbors, rounded up.
  for (int rep = 0; rep < 20; ++rep) {
    Rng r(static_cast<std::uint64_t>(rep));
    auto picked = acquaintance_immunization(g, 1.0, 0.5, r);
    EXPECT_GE(picked.size(), 2u);
  }
}
