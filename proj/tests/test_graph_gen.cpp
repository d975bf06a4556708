#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <sstream>

#include "immunet/graph_gen.hpp"

using namespace immunet;

namespace {

std::vector<Degree> sorted_degrees(const Multigraph& g) {
  std::vector<Degree> d(g.degrees().begin(), g.degrees().end());
  std::sort(d.begin(), d.end());
  return d;
}

}  // namespace

TEST(DegreeSequence, PointMassTwo) {
  Rng rng(1);
  auto seq = sample_degree_sequence(DegreePmf::point_mass(2), 5, rng);
  EXPECT_EQ(seq.degrees, std::vector<Degree>(5, 2));
}

TEST(DegreeSequence, ForcedOddSumIsPathological) {
  Rng rng(1);
  EXPECT_THROW(sample_degree_sequence(DegreePmf::point_mass(1), 3, rng), PathologicalDistribution);
}

TEST(DegreeSequence, EvenSumAndRejectsTinyN) {
  Rng rng(5);
  auto pmf = power_law_pmf(2.5, 100);
  for (int rep = 0; rep < 20; ++rep) EXPECT_EQ(sample_degree_sequence(pmf, 1000, rng).stub_count() % 2, 0u);
  EXPECT_THROW(sample_degree_sequence(pmf, 1, rng), InvalidParameter);
}

TEST(ConfigurationModel, ForcedGraphs) {
  Rng rng(3);
  auto g = configuration_model({{1, 1}}, rng);
  ASSERT_EQ(g.edge_count(), 1u);
  EXPECT_EQ(std::minmax(g.edge(0).u, g.edge(0).v), std::minmax(NodeId{0}, NodeId{1}));

  auto loop = configuration_model({{2}}, rng);
  ASSERT_EQ(loop.edge_count(), 1u);
  EXPECT_TRUE(loop.edge(0).is_loop());
  EXPECT_EQ(loop.degree(0), 2u);
  EXPECT_TRUE(loop.incident(0).empty());

  EXPECT_THROW(configuration_model({{1, 2}}, rng), InvariantViolation);
}

TEST(ConfigurationModel, ConservesDegrees) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    auto g = configuration_model({{3, 3, 3, 3}}, rng);
    EXPECT_EQ(g.edge_count(), 6u);
    for (NodeId u = 0; u < 4; ++u) EXPECT_EQ(g.degree(u), 3u);
  }
  Rng rng(11);
  auto pmf = power_law_pmf(2.2, 500);
  for (int rep = 0; rep < 10; ++rep) {
    auto seq = sample_degree_sequence(pmf, 2000, rng);
    auto g = configuration_model(seq, rng);
    std::uint64_t total = 0;
    for (Degree d : g.degrees()) total += d;
    EXPECT_EQ(total, 2 * g.edge_count());
    for (NodeId u = 0; u < g.node_count(); ++u) EXPECT_EQ(g.degree(u), seq.degrees[u]);
    std::size_t incidences = 0;
    for (NodeId u = 0; u < g.node_count(); ++u) incidences += g.incident(u).size();
    std::size_t loops = 0;
    for (const Edge& e : g.edges()) loops += e.is_loop();
    EXPECT_EQ(incidences, 2 * (g.edge_count() - loops));
  }
}

TEST(ConfigurationModel, PerfectMatchingsAreUniform) {
  // Four single stubs admit three matchings: {01,23}, {02,13}, {03,12}.
  std::map<NodeId, int> partner_of_zero;
  const int N = 100000;
  for (int s = 0; s < N; ++s) {
    Rng rng(static_cast<std::uint64_t>(s));
    auto g = configuration_model({{1, 1, 1, 1}}, rng);
    for (const Edge& e : g.edges()) {
      if (e.u == 0) ++partner_of_zero[e.v];
      if (e.v == 0) ++partner_of_zero[e.u];
    }
  }
  ASSERT_EQ(partner_of_zero.size(), 3u);
  const double p = 1.0 / 3.0, se = std::sqrt(p * (1 - p) / N);
  for (auto [v, c] : partner_of_zero) EXPECT_NEAR(static_cast<double>(c) / N, p, 3 * se) << "partner " << v;
}

TEST(EdgeList, WriteReadKeepsMultiEdgesAndLoops) {
  Multigraph g(3, {{0, 1}, {0, 1}, {2, 2}});
  std::stringstream ss;
  write_edge_list(ss, g);
  EXPECT_EQ(ss.str(), "3 3\n0 1\n0 1\n2 2\n");
  auto back = read_edge_list(ss);
  EXPECT_EQ(back.edge_count(), 3u);
  EXPECT_EQ(sorted_degrees(back), sorted_degrees(g));
  std::istringstream bad("2 1\n0 5\n");
  EXPECT_THROW(read_edge_list(bad), InvalidParameter);
  std::istringstream short_list("2 2\n0 1\n");
  EXPECT_THROW(read_edge_list(short_list), InvalidParameter);
}
