// Copyright 2026 The lda2net Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>

#include "lda2net/metrics.hpp"
#include "oracles.hpp"

using namespace lda2net;
using oracle::Arc;

TEST(Degrees, Basics) {
  auto net = oracle::network(3, {{0, 1, 0.4}});
  auto d = weighted_degrees(net);
  EXPECT_EQ(d.out[0], 0.4);
  EXPECT_EQ(d.in[1], 0.4);
  EXPECT_EQ(d.total[2], 0.0);
  EXPECT_EQ(d.in[2], 0.0);
}

TEST(Degrees, FourEdgeToy) {
  auto net = oracle::network(3, {{0, 1, 0.1}, {1, 2, 0.2}, {2, 0, 0.3}, {0, 2, 0.4}});
  auto d = weighted_degrees(net);
  EXPECT_DOUBLE_EQ(d.out[0], 0.5);
  EXPECT_DOUBLE_EQ(d.in[0], 0.3);
  EXPECT_DOUBLE_EQ(d.in[2], 0.6);
  EXPECT_DOUBLE_EQ(d.total[1], 0.3);
}

TEST(Betweenness, DirectedPath) {
  auto net = oracle::network(3, {{0, 1, 1.0}, {1, 2, 1.0}});
  auto b = betweenness(net);
  EXPECT_EQ(b.nodes, (std::vector<double>{0.0, 1.0, 0.0}));
  EXPECT_EQ(b.edges, (std::vector<double>{2.0, 2.0}));
}

TEST(Betweenness, HeavierEdgeIsShorter) {
  // 0->2 directly (w 0.1, length 10) or via 1 (w 1 each, length 2)
  auto net = oracle::network(3, {{0, 1, 1.0}, {0, 2, 0.1}, {1, 2, 1.0}});
  auto b = betweenness(net);
  EXPECT_EQ(b.nodes[1], 1.0);
  EXPECT_EQ(b.edges[1], 0.0);
  auto hops = betweenness(net, PathLength::unweighted);
  EXPECT_EQ(hops.nodes[1], 0.0);
}

TEST(Betweenness, SplitAmongTies) {
  // two equal routes 0->1->3 and 0->2->3
  auto net = oracle::network(4, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 3, 1.0}, {2, 3, 1.0}});
  auto b = betweenness(net);
  EXPECT_DOUBLE_EQ(b.nodes[1], 0.5);
  EXPECT_DOUBLE_EQ(b.nodes[2], 0.5);
  EXPECT_DOUBLE_EQ(b.edges[0], 1.5);
}

TEST(Betweenness, RejectsNonPositiveWeights) {
  EXPECT_THROW(betweenness(oracle::network(2, {{0, 1, 0.0}})), DataError);
  EXPECT_THROW(parse_path_length("cosine"), UsageError);
  EXPECT_EQ(parse_path_length("-log w"), PathLength::neg_log_weight);
}

TEST(BetweennessProperty, MatchesEnumeration) {
  std::mt19937_64 g(31);
  for (int trial = 0; trial < 60; ++trial) {
    auto net = oracle::random_digraph(g, 7, 0.35, {1.0, 2.0, 4.0});
    auto b = betweenness(net);
    auto ref = oracle::enumerate_betweenness(net);
    for (std::size_t i = 0; i < net.nodes.size(); ++i) EXPECT_NEAR(b.nodes[i], ref.nodes[i], 1e-9);
    for (std::size_t e = 0; e < net.edges.size(); ++e)
      EXPECT_NEAR(b.edges[e], (ref.edges[{net.edges[e].source, net.edges[e].target}]), 1e-9);
  }
  // -log w and hop counts
  for (int trial = 0; trial < 30; ++trial) {
    auto net = oracle::random_digraph(g, 7, 0.4, {0.1, 0.3, 0.5});
    auto nl = betweenness(net, PathLength::neg_log_weight);
    auto ref = oracle::enumerate_betweenness(net, [](double w) { return -std::log(w); });
    for (std::size_t i = 0; i < net.nodes.size(); ++i) EXPECT_NEAR(nl.nodes[i], ref.nodes[i], 1e-9);
    auto hop = betweenness(net, PathLength::unweighted);
    auto href = oracle::enumerate_betweenness(net, [](double) { return 1.0; });
    for (std::size_t i = 0; i < net.nodes.size(); ++i) EXPECT_NEAR(hop.nodes[i], href.nodes[i], 1e-9);
  }
}

TEST(BetweennessProperty, ThreadCountDoesNotChangeBits) {
  std::mt19937_64 g(32);
  auto net = oracle::random_digraph(g, 90, 0.08, {0.5, 1.0, 3.0});
  while (net.nodes.size() < 70) net = oracle::random_digraph(g, 90, 0.08, {0.5, 1.0, 3.0});
  auto a = betweenness(net, PathLength::inverse_weight, 1);
  auto b = betweenness(net, PathLength::inverse_weight, 4);
  EXPECT_EQ(a.nodes, b.nodes);
  EXPECT_EQ(a.edges, b.edges);
}

TEST(PageRank, Cycle) {
  auto pr = pagerank(oracle::network(4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 0, 1}}));
  for (double v : pr) EXPECT_NEAR(v, 0.25, 1e-12);
}

TEST(PageRank, StarHub) {
  auto pr = pagerank(oracle::network(5, {{1, 0, 1}, {2, 0, 1}, {3, 0, 1}, {4, 0, 1}}));
  for (std::size_t i = 1; i < 5; ++i) EXPECT_GT(pr[0], pr[i]);
}

TEST(PageRank, ThreeNodeHandIteration) {
  // P = [[0, 2/3, 1/3], [0, 0, 1], [1, 0, 0]], d = 0.85
  auto pr = pagerank(oracle::network(3, {{0, 1, 2.0}, {0, 2, 1.0}, {1, 2, 1.0}, {2, 0, 1.0}}));
  double x[3] = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  for (int it = 0; it < 500; ++it) {
    const double a = 0.05 + 0.85 * x[2];
    const double b = 0.05 + 0.85 * (2.0 / 3.0) * x[0];
    const double c = 0.05 + 0.85 * (x[0] / 3.0 + x[1]);
    x[0] = a, x[1] = b, x[2] = c;
  }
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(pr[i], x[i], 1e-8);
  // closed form of the same system
  Eigen::Matrix3d A;
  A << 1, 0, -0.85, -0.85 * 2.0 / 3.0, 1, 0, -0.85 / 3.0, -0.85, 1;
  Eigen::Vector3d sol = A.colPivHouseholderQr().solve(Eigen::Vector3d::Constant(0.05));
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(pr[i], sol(i), 1e-9);
}

TEST(PageRank, DanglingAndErrors) {
  auto pr = pagerank(oracle::network(3, {{0, 1, 1}}));
  EXPECT_NEAR(pr[0] + pr[1] + pr[2], 1.0, 1e-12);
  EXPECT_NEAR(pr[0], pr[2], 1e-12);
  PageRankOptions opt;
  opt.max_iterations = 1;
  EXPECT_THROW(pagerank(oracle::network(3, {{0, 1, 1}, {1, 2, 1}}), opt), DataError);
  opt = {};
  opt.damping = 1.0;
  EXPECT_THROW(pagerank(oracle::network(2, {{0, 1, 1}}), opt), UsageError);
}

TEST(PageRankProperty, SumsToOneAndScaleInvariant) {
  std::mt19937_64 g(33);
  for (int trial = 0; trial < 50; ++trial) {
    auto net = oracle::random_digraph(g, 12, 0.3, {0.1, 0.5, 2.0});
    auto pr = pagerank(net);
    EXPECT_NEAR(std::accumulate(pr.begin(), pr.end(), 0.0), 1.0, 1e-6);
    auto scaled = net;
    for (auto& e : scaled.edges) e.weight *= 8.0;
    auto ps = pagerank(scaled);
    for (std::size_t i = 0; i < pr.size(); ++i) EXPECT_NEAR(pr[i], ps[i], 1e-12);
    EXPECT_EQ(std::max_element(pr.begin(), pr.end()) - pr.begin(), std::max_element(ps.begin(), ps.end()) - ps.begin());
  }
}

TEST(Barrat, TriangleAndStar) {
  auto tri = barrat_clustering(oracle::network(3, {{0, 1, 1}, {1, 2, 1}, {2, 0, 1}}));
  for (double c : tri.local) EXPECT_DOUBLE_EQ(c, 1.0);
  EXPECT_DOUBLE_EQ(tri.global, 1.0);
  auto star = barrat_clustering(oracle::network(5, {{0, 1, 1}, {0, 2, 1}, {3, 0, 1}, {4, 0, 1}}));
  EXPECT_EQ(star.global, 0.0);
}

TEST(Barrat, WeightedFourNodeHand) {
  // undirected weights w01 = 1 (two directed halves), w02 = 2, w12 = 3, w23 = 4
  auto cc = barrat_clustering(oracle::network(4, {{0, 1, 0.5}, {1, 0, 0.5}, {2, 0, 2}, {1, 2, 3}, {3, 2, 4}}));
  EXPECT_NEAR(cc.local[0], 1.0, 1e-12);
  EXPECT_NEAR(cc.local[1], 1.0, 1e-12);
  EXPECT_NEAR(cc.local[2], 5.0 / 18.0, 1e-12);
  EXPECT_EQ(cc.local[3], 0.0);
  EXPECT_NEAR(cc.global, 41.0 / 72.0, 1e-12);
}

TEST(BarratProperty, FormulaAndUnweightedReduction) {
  std::mt19937_64 g(34);
  for (int trial = 0; trial < 100; ++trial) {
    auto net = oracle::random_digraph(g, 9, 0.4, {0.2, 1.0, 3.0});
    auto cc = barrat_clustering(net);
    auto ref = oracle::barrat(oracle::undirected(net));
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(cc.local[i], ref[i], 1e-12);
    // all weights equal: the plain local clustering coefficient
    auto flat = net;
    for (auto& e : flat.edges) e.weight = 1.0;
    // symmetrized weights may be 1 or 2; unify to one weight per unordered pair
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    std::vector<lda2net::Edge> single;
    for (const auto& e : flat.edges)
      if (seen.insert({std::min(e.source, e.target), std::max(e.source, e.target)}).second) single.push_back(e);
    flat.edges = single;
    const auto A = oracle::undirected(flat);
    double mean = 0.0;
    for (std::size_t i = 0; i < A.size(); ++i) {
      std::vector<std::size_t> nb;
      for (std::size_t j = 0; j < A.size(); ++j)
        if (A[i][j] > 0) nb.push_back(j);
      if (nb.size() < 2) continue;
      double links = 0;
      for (std::size_t a = 0; a < nb.size(); ++a)
        for (std::size_t b = a + 1; b < nb.size(); ++b) links += A[nb[a]][nb[b]] > 0;
      mean += links / (nb.size() * (nb.size() - 1) / 2.0);
    }
    mean /= static_cast<double>(A.size());
    EXPECT_NEAR(barrat_clustering(flat).global, mean, 1e-12);
  }
}

TEST(Jsd, Cases) {
  std::vector<double> p{0.5, 0.5}, q{0.9, 0.1};
  EXPECT_EQ(jensen_shannon(p, p), 0.0);
  EXPECT_EQ(jensen_shannon(std::vector<double>{1, 0}, std::vector<double>{0, 1}), 1.0);
  EXPECT_NEAR(jensen_shannon(p, q), 0.1467931024360521, 1e-15);
  EXPECT_NEAR(jensen_shannon(p, q), oracle::jsd(p, q), 1e-15);
  EXPECT_THROW(jensen_shannon(std::vector<double>{0.5, 0.6}, p), DataError);
  EXPECT_THROW(jensen_shannon(std::vector<double>{-0.5, 1.5}, p), DataError);
  EXPECT_THROW(jensen_shannon(std::vector<double>{1.0}, p), DataError);
}

TEST(Jsd, Generalized) {
  std::vector<std::vector<double>> d{{0.2, 0.3, 0.5}, {0.6, 0.2, 0.2}, {0.1, 0.1, 0.8}};
  std::vector<double> w{0.2, 0.3, 0.5};
  std::vector<double> mix(3, 0.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) mix[j] += w[i] * d[i][j];
  const double want =
      oracle::entropy2(mix) - (0.2 * oracle::entropy2(d[0]) + 0.3 * oracle::entropy2(d[1]) + 0.5 * oracle::entropy2(d[2]));
  EXPECT_NEAR(jensen_shannon_generalized(d, w), want, 1e-15);
  EXPECT_EQ(jensen_shannon_generalized({d[0], d[0], d[0]}, std::vector<double>{0.3, 0.3, 0.4}), 0.0);
  EXPECT_THROW(jensen_shannon_generalized(d, std::vector<double>{0.5, 0.5, 0.5}), DataError);
  EXPECT_THROW(jensen_shannon_generalized(d, std::vector<double>{0.5, 0.5, 0.0}), DataError);
}

TEST(JsdProperty, RandomPairs) {
  std::mt19937_64 g(35);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + g() % 12;
    auto p = oracle::random_simplex(g, n, 0.3), q = oracle::random_simplex(g, n, 0.3);
    const double a = jensen_shannon(p, q);
    EXPECT_EQ(a, jensen_shannon(q, p));
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 1.0);
    EXPECT_NEAR(a, oracle::jsd(p, q), 1e-12);
    EXPECT_NEAR(jensen_shannon_generalized({p, q}, std::vector<double>{0.5, 0.5}), a, 1e-12);
  }
}

TEST(TopicSummary, Propensity) {
  DenseMatrix Q(3, 2, 0.5);
  auto [m, v] = topic_propensity(Q, 1);
  EXPECT_DOUBLE_EQ(m, 0.5);
  EXPECT_EQ(v, 0.0);
  DenseMatrix P(3, 2, 0.0);
  P(0, 0) = 1.0;
  P(1, 1) = 1.0;
  P(2, 1) = 1.0;
  auto [m1, v1] = topic_propensity(P, 1);
  EXPECT_DOUBLE_EQ(m1, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(v1, 2.0 / 9.0);
  EXPECT_THROW(topic_propensity(P, 3), DataError);
}

TEST(TopicSummary, Assembles) {
  auto net = oracle::network(3, {{0, 1, 1}, {1, 2, 1}, {2, 0, 1}});
  DenseMatrix Q(2, 1, 1.0);
  std::vector<double> c{0.5, 0.5}, p{0.9, 0.1};
  auto s = topic_summary(1, Q, net, c, p, 0.25);
  EXPECT_EQ(s.topic_id, 1);
  EXPECT_EQ(s.mean, 1.0);
  EXPECT_EQ(s.variance, 0.0);
  EXPECT_NEAR(s.jsd, 0.1467931024360521, 1e-15);
  EXPECT_EQ(s.barrat_cc, 1.0);
  EXPECT_EQ(s.modularity, 0.25);
}

TEST(Correlation, HandValues) {
  std::vector<double> x{1, 2, 3, 4, 5}, y{2, 4, 5, 4, 5};
  EXPECT_NEAR(*correlation(x, y, CorrelationMethod::pearson), 6.0 / std::sqrt(60.0), 1e-15);
  EXPECT_NEAR(*correlation(x, y, CorrelationMethod::spearman), 7.0 / std::sqrt(90.0), 1e-15);
  EXPECT_DOUBLE_EQ(*correlation(y, y, CorrelationMethod::pearson), 1.0);
  EXPECT_DOUBLE_EQ(*correlation(y, average_ranks(y), CorrelationMethod::spearman), 1.0);
  EXPECT_FALSE(correlation(x, std::vector<double>(5, 2.0), CorrelationMethod::pearson).has_value());
  EXPECT_EQ(average_ranks(y), (std::vector<double>{1, 2.5, 4.5, 2.5, 4.5}));
}

TEST(Correlation, MatrixTopNAndAverage) {
  MetricTable t{{"a", "b", "c"}, {{1, 2, 3, 4}, {4, 3, 2, 1}, {5, 5, 5, 5}}, {0.1, 0.4, 0.3, 0.2}};
  auto m = correlation_matrix(t, CorrelationMethod::pearson);
  EXPECT_DOUBLE_EQ(*m.at(0, 1), -1.0);
  EXPECT_FALSE(m.at(0, 2).has_value());
  // top 3 by probability: rows 1, 2, 3
  auto top = correlation_matrix(t, CorrelationMethod::spearman, 3);
  EXPECT_DOUBLE_EQ(*top.at(0, 0), 1.0);
  EXPECT_THROW(correlation_matrix(t, CorrelationMethod::spearman, 2), DataError);
  auto avg = average_correlations({m, m});
  EXPECT_EQ(avg.at(0, 1), m.at(0, 1));
  EXPECT_FALSE(avg.at(2, 2).has_value());
  auto csv = correlations_to_csv(m);
  EXPECT_NE(csv.find("NA"), std::string::npos);
  EXPECT_EQ(correlations_from_csv(csv), m);
}

TEST(MetricsProperty, DegreesReSum) {
  std::mt19937_64 g(36);
  for (int trial = 0; trial < 50; ++trial) {
    auto net = oracle::random_digraph(g, 15, 0.3, {0.1, 0.7, 1.5});
    auto d = weighted_degrees(net);
    for (std::size_t i = 0; i < net.nodes.size(); ++i) {
      double in = 0, out = 0;
      for (const auto& e : net.edges) {
        if (e.source == i) out += e.weight;
        if (e.target == i) in += e.weight;
      }
      EXPECT_NEAR(d.in[i], in, 1e-12);
      EXPECT_NEAR(d.out[i], out, 1e-12);
      EXPECT_NEAR(d.total[i], in + out, 1e-12);
    }
    auto nm = compute_node_metrics(net);
    for (std::size_t i = 0; i < nm.nodes.size(); ++i) {
      EXPECT_TRUE(std::isfinite(nm.betweenness[i]) && nm.betweenness[i] >= 0.0);
      EXPECT_TRUE(std::isfinite(nm.pagerank[i]) && nm.pagerank[i] >= 0.0);
    }
  }
}
