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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "lda2net/dense.hpp"
#include "lda2net/error.hpp"
#include "lda2net/io.hpp"
#include "lda2net/network.hpp"
#include "lda2net/parallel.hpp"

namespace lda2net {

struct DegreeTable {
  std::vector<double> in, out, total;  // parallel to net.nodes
};

inline DegreeTable weighted_degrees(const TopicNetwork& net) {
  DegreeTable d;
  d.in.assign(net.nodes.size(), 0.0);
  d.out.assign(net.nodes.size(), 0.0);
  const auto adj = build_adjacency(net);
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    d.out[adj.edge_source[e]] += net.edges[e].weight;
    d.in[adj.edge_target[e]] += net.edges[e].weight;
  }
  d.total.resize(net.nodes.size());
  for (std::size_t i = 0; i < d.total.size(); ++i) d.total[i] = d.in[i] + d.out[i];
  return d;
}

// How an edge weight becomes a path length for shortest paths.
enum class PathLength { inverse_weight, neg_log_weight, unweighted };

inline PathLength parse_path_length(std::string_view s) {
  if (s == "1/w" || s == "inverse") return PathLength::inverse_weight;
  if (s == "-log w" || s == "-logw" || s == "neglog") return PathLength::neg_log_weight;
  if (s == "unweighted" || s == "hops") return PathLength::unweighted;
  throw UsageError("unknown path length '" + std::string(s) + "' (expected 1/w, -log w or unweighted)");
}

inline double edge_length(double weight, PathLength mode) {
  switch (mode) {
    case PathLength::inverse_weight: return 1.0 / weight;
    case PathLength::neg_log_weight: return -std::log(weight);
    case PathLength::unweighted: return 1.0;
  }
  return 1.0;
}

struct BetweennessScores {
  std::vector<double> nodes;  // parallel to net.nodes
  std::vector<double> edges;  // parallel to net.edges
};

// Brandes accumulation over directed shortest paths. Every ordered pair
// (s, t) contributes 1, split evenly over its shortest paths. Path lengths
// within a relative 1e-12 are treated as ties. Sources are processed in
// fixed-size blocks reduced in order, so results do not depend on `threads`.
inline BetweennessScores betweenness(const TopicNetwork& net, PathLength mode = PathLength::inverse_weight,
                                     unsigned threads = 1) {
  const auto adj = build_adjacency(net);
  const std::size_t n = adj.n, m = net.edges.size();
  for (const auto& e : net.edges)
    detail::require(e.weight > 0.0, "betweenness needs strictly positive edge weights");
  std::vector<double> length(m);
  for (std::size_t e = 0; e < m; ++e) length[e] = edge_length(net.edges[e].weight, mode);

  constexpr std::size_t kBlock = 32;
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<BetweennessScores> partial(blocks);
  parallel_for(blocks, threads, [&](std::size_t blk) {
    auto& acc = partial[blk];
    acc.nodes.assign(n, 0.0);
    acc.edges.assign(m, 0.0);
    std::vector<double> dist(n), sigma(n), delta(n);
    std::vector<std::vector<std::uint32_t>> pred_edges(n);
    std::vector<char> settled(n);
    std::vector<std::uint32_t> order;
    using Item = std::pair<double, std::uint32_t>;
    for (std::size_t s = blk * kBlock; s < std::min(n, (blk + 1) * kBlock); ++s) {
      std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
      std::fill(sigma.begin(), sigma.end(), 0.0);
      std::fill(delta.begin(), delta.end(), 0.0);
      std::fill(settled.begin(), settled.end(), 0);
      for (auto& p : pred_edges) p.clear();
      order.clear();
      dist[s] = 0.0;
      sigma[s] = 1.0;
      std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
      heap.push({0.0, static_cast<std::uint32_t>(s)});
      while (!heap.empty()) {
        auto [d, v] = heap.top();
        heap.pop();
        if (settled[v]) continue;
        settled[v] = 1;
        order.push_back(v);
        for (const auto& arc : adj.out_arcs(v)) {
          const auto w = arc.node;
          if (w == v || settled[w]) continue;
          const double nd = d + length[arc.edge];
          const double tol = 1e-12 * std::max(1.0, std::abs(nd));
          if (nd < dist[w] - tol) {
            dist[w] = nd;
            sigma[w] = sigma[v];
            pred_edges[w].assign(1, arc.edge);
            heap.push({nd, w});
          } else if (std::abs(nd - dist[w]) <= tol) {
            sigma[w] += sigma[v];
            pred_edges[w].push_back(arc.edge);
          }
        }
      }
      for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const auto w = *it;
        for (auto e : pred_edges[w]) {
          const auto v = adj.edge_source[e];
          const double c = sigma[v] / sigma[w] * (1.0 + delta[w]);
          acc.edges[e] += c;
          delta[v] += c;
        }
        if (w != s) acc.nodes[w] += delta[w];
      }
    }
  });
  BetweennessScores out{std::vector<double>(n, 0.0), std::vector<double>(m, 0.0)};
  for (const auto& p : partial) {
    for (std::size_t i = 0; i < n; ++i) out.nodes[i] += p.nodes[i];
    for (std::size_t e = 0; e < m; ++e) out.edges[e] += p.edges[e];
  }
  return out;
}

inline std::vector<double> node_betweenness(const TopicNetwork& net, PathLength mode = PathLength::inverse_weight) {
  return betweenness(net, mode).nodes;
}

inline std::vector<double> edge_betweenness(const TopicNetwork& net, PathLength mode = PathLength::inverse_weight) {
  return betweenness(net, mode).edges;
}

struct PageRankOptions {
  double damping = 0.85;
  double tolerance = 1e-10;
  std::size_t max_iterations = 10000;
};

// Weighted PageRank by power iteration; dangling mass is spread uniformly.
inline std::vector<double> pagerank(const TopicNetwork& net, const PageRankOptions& opt = {}) {
  detail::require_arg(opt.damping > 0.0 && opt.damping < 1.0, "damping must be in (0, 1)");
  const auto adj = build_adjacency(net);
  const std::size_t n = adj.n;
  if (n == 0) return {};
  std::vector<double> out_weight(n, 0.0);
  for (std::size_t e = 0; e < net.edges.size(); ++e) out_weight[adj.edge_source[e]] += net.edges[e].weight;
  const double nd = static_cast<double>(n);
  std::vector<double> x(n, 1.0 / nd), next(n);
  for (std::size_t it = 0; it < opt.max_iterations; ++it) {
    double dangling = 0.0;
    for (std::size_t v = 0; v < n; ++v)
      if (out_weight[v] == 0.0) dangling += x[v];
    const double base = (1.0 - opt.damping) / nd + opt.damping * dangling / nd;
    for (std::size_t v = 0; v < n; ++v) {
      double s = 0.0;
      for (const auto& arc : adj.in_arcs(v)) s += x[arc.node] * arc.weight / out_weight[arc.node];
      next[v] = base + opt.damping * s;
    }
    double change = 0.0;
    for (std::size_t v = 0; v < n; ++v) change = std::max(change, std::abs(next[v] - x[v]));
    x.swap(next);
    if (change < opt.tolerance) {
      const double total = std::accumulate(x.begin(), x.end(), 0.0);
      for (double& v : x) v /= total;
      return x;
    }
  }
  throw DataError("PageRank did not converge after " + std::to_string(opt.max_iterations) + " iterations");
}

struct ClusteringCoefficients {
  std::vector<double> local;  // parallel to net.nodes
  double global = 0.0;        // mean of local over all nodes
};

// Barrat weighted clustering on the symmetrised graph (w_ij + w_ji per
// unordered pair, self-loops ignored). Nodes with fewer than two neighbours
// score 0.
inline ClusteringCoefficients barrat_clustering(const TopicNetwork& net) {
  const auto adj = build_adjacency(net);
  const std::size_t n = adj.n;
  std::vector<std::unordered_map<std::uint32_t, double>> sym(n);
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    const auto s = adj.edge_source[e], t = adj.edge_target[e];
    if (s == t) continue;
    sym[s][t] += net.edges[e].weight;
    sym[t][s] += net.edges[e].weight;
  }
  ClusteringCoefficients cc;
  cc.local.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& nbrs = sym[i];
    const double k = static_cast<double>(nbrs.size());
    if (nbrs.size() < 2) continue;
    double strength = 0.0;
    for (const auto& [j, w] : nbrs) strength += w;
    double acc = 0.0;
    for (const auto& [j, wij] : nbrs) {
      for (const auto& [h, wjh] : sym[j]) {
        if (h == i) continue;
        auto it = nbrs.find(h);
        if (it != nbrs.end()) acc += (wij + it->second) / 2.0;
      }
    }
    cc.local[i] = acc / (strength * (k - 1.0));
  }
  if (n > 0) cc.global = std::accumulate(cc.local.begin(), cc.local.end(), 0.0) / static_cast<double>(n);
  return cc;
}

namespace detail {

inline void check_distribution(std::span<const double> p, const char* name) {
  double s = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw DataError(std::string(name) + " has a negative or NaN entry");
    s += v;
  }
  if (std::abs(s - 1.0) > 1e-9) throw DataError(std::string(name) + " does not sum to 1 (sum " + io::format_double(s) + ")");
}

inline double xlog2_ratio(double x, double y) { return x > 0.0 ? x * std::log2(x / y) : 0.0; }

inline double entropy2(std::span<const double> p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log2(v);
  return h;
}

}  // namespace detail

// Jensen-Shannon divergence in bits: KL terms of both inputs against their
// midpoint, so the result lies in [0, 1].
inline double jensen_shannon(std::span<const double> P, std::span<const double> Q) {
  detail::require(P.size() == Q.size(), "distributions have different support sizes");
  detail::check_distribution(P, "P");
  detail::check_distribution(Q, "Q");
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    const double m = (P[i] + Q[i]) / 2.0;
    a += detail::xlog2_ratio(P[i], m);
    b += detail::xlog2_ratio(Q[i], m);
  }
  return std::clamp(0.5 * (a + b), 0.0, 1.0);
}

// Entropy form: H(sum_i pi_i P_i) - sum_i pi_i H(P_i), in bits.
inline double jensen_shannon_generalized(const std::vector<std::vector<double>>& dists,
                                         std::span<const double> weights) {
  detail::require(!dists.empty() && dists.size() == weights.size(), "need one weight per distribution");
  double wsum = 0.0;
  for (double w : weights) {
    detail::require(w > 0.0, "mixture weights must be positive");
    wsum += w;
  }
  detail::require(std::abs(wsum - 1.0) <= 1e-9, "mixture weights must sum to 1");
  const std::size_t n = dists.front().size();
  std::vector<double> mix(n, 0.0);
  double weighted_entropy = 0.0;
  for (std::size_t i = 0; i < dists.size(); ++i) {
    detail::require(dists[i].size() == n, "distributions have different support sizes");
    detail::check_distribution(dists[i], "distribution");
    for (std::size_t j = 0; j < n; ++j) mix[j] += weights[i] * dists[i][j];
    weighted_entropy += weights[i] * detail::entropy2(dists[i]);
  }
  return std::max(0.0, detail::entropy2(mix) - weighted_entropy);
}

struct TopicSummary {
  int topic_id = 0;
  double mean = 0.0;
  double variance = 0.0;
  double jsd = 0.0;
  double barrat_cc = 0.0;
  double modularity = 0.0;
  bool operator==(const TopicSummary&) const = default;
};

// Mean and population variance of a topic's document proportions.
inline std::pair<double, double> topic_propensity(const DenseMatrix& Q, int topic) {
  detail::require(topic >= 1 && static_cast<std::size_t>(topic) <= Q.cols(), "topic index out of range");
  const auto col = Q.column(static_cast<std::size_t>(topic - 1));
  detail::require(!col.empty(), "Q has no documents");
  const double n = static_cast<double>(col.size());
  const double mean = std::accumulate(col.begin(), col.end(), 0.0) / n;
  double var = 0.0;
  for (double v : col) var += (v - mean) * (v - mean);
  return {mean, var / n};
}

inline TopicSummary topic_summary(int topic, const DenseMatrix& Q, const TopicNetwork& net,
                                  std::span<const double> counts_dist, std::span<const double> probs_dist,
                                  double modularity) {
  TopicSummary s;
  s.topic_id = topic;
  std::tie(s.mean, s.variance) = topic_propensity(Q, topic);
  s.jsd = jensen_shannon(counts_dist, probs_dist);
  s.barrat_cc = barrat_clustering(net).global;
  s.modularity = modularity;
  return s;
}

inline std::string summaries_to_csv(const std::vector<TopicSummary>& rows) {
  std::string out = "topic_id,mean,variance,jsd,barrat_cc,modularity\n";
  for (const auto& s : rows) {
    out += std::to_string(s.topic_id) + ',' + io::format_double(s.mean) + ',' + io::format_double(s.variance) + ',' +
           io::format_double(s.jsd) + ',' + io::format_double(s.barrat_cc) + ',' + io::format_double(s.modularity) +
           '\n';
  }
  return out;
}

inline std::vector<TopicSummary> summaries_from_csv(std::string_view text) {
  auto rows = io::parse_csv(text, "topic summary");
  detail::require(!rows.empty() && rows[0].fields.size() == 6, "topic summary CSV needs a 6-column header");
  std::vector<TopicSummary> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    const std::string where = "topic summary:" + std::to_string(rows[r].line);
    detail::require(f.size() == 6, where + ": expected 6 fields");
    out.push_back({io::parse_int<int>(f[0], where), io::parse_double(f[1], where), io::parse_double(f[2], where),
                   io::parse_double(f[3], where), io::parse_double(f[4], where), io::parse_double(f[5], where)});
  }
  return out;
}

// JSON array of objects, one per topic, keyed by topic_id.
inline std::string summaries_to_json(const std::vector<TopicSummary>& rows) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& s : rows) {
    j.push_back({{"topic_id", s.topic_id},
                 {"mean", s.mean},
                 {"variance", s.variance},
                 {"jsd", s.jsd},
                 {"barrat_cc", s.barrat_cc},
                 {"modularity", s.modularity}});
  }
  return j.dump(2) + "\n";
}

struct NodeMetrics {
  std::vector<WordId> nodes;
  std::vector<double> lda_probability;
  std::vector<double> degree, degree_in, degree_out;
  std::vector<double> betweenness;
  std::vector<double> pagerank;
  bool operator==(const NodeMetrics&) const = default;
};

inline NodeMetrics compute_node_metrics(const TopicNetwork& net, PathLength mode = PathLength::inverse_weight,
                                        const PageRankOptions& pr = {}, unsigned threads = 1) {
  NodeMetrics m;
  m.nodes = net.nodes;
  m.lda_probability = net.node_weight;
  auto deg = weighted_degrees(net);
  m.degree = std::move(deg.total);
  m.degree_in = std::move(deg.in);
  m.degree_out = std::move(deg.out);
  m.betweenness = betweenness(net, mode, threads).nodes;
  m.pagerank = pagerank(net, pr);
  return m;
}

inline std::string node_metrics_to_csv(const NodeMetrics& m, const Vocabulary& vocab) {
  std::string out = "word,lda_prob,degree,in,out,betweenness,pagerank\n";
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    out += io::csv_line(std::vector<std::string>{
        vocab.word(m.nodes[i]), io::format_double(m.lda_probability[i]), io::format_double(m.degree[i]),
        io::format_double(m.degree_in[i]), io::format_double(m.degree_out[i]), io::format_double(m.betweenness[i]),
        io::format_double(m.pagerank[i])});
  }
  return out;
}

inline NodeMetrics node_metrics_from_csv(std::string_view text, const Vocabulary& vocab) {
  auto rows = io::parse_csv(text, "node metrics");
  detail::require(!rows.empty() && rows[0].fields.size() == 7, "node metrics CSV needs a 7-column header");
  NodeMetrics m;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    const std::string where = "node metrics:" + std::to_string(rows[r].line);
    detail::require(f.size() == 7, where + ": expected 7 fields");
    auto w = vocab.find(f[0]);
    detail::require(w.has_value(), where + ": word not in vocabulary");
    m.nodes.push_back(*w);
    m.lda_probability.push_back(io::parse_double(f[1], where));
    m.degree.push_back(io::parse_double(f[2], where));
    m.degree_in.push_back(io::parse_double(f[3], where));
    m.degree_out.push_back(io::parse_double(f[4], where));
    m.betweenness.push_back(io::parse_double(f[5], where));
    m.pagerank.push_back(io::parse_double(f[6], where));
  }
  return m;
}

enum class CorrelationMethod { pearson, spearman };

// Average ranks (1-based), ties share the mean of their positions.
inline std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = rank;
    i = j + 1;
  }
  return r;
}

// Undefined (nullopt) when either input has zero variance.
inline std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  detail::require(x.size() == y.size(), "correlation inputs differ in length");
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) return std::nullopt;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

inline std::optional<double> correlation(std::span<const double> x, std::span<const double> y,
                                         CorrelationMethod method) {
  if (method == CorrelationMethod::pearson) return pearson(x, y);
  auto rx = average_ranks(x), ry = average_ranks(y);
  return pearson(rx, ry);
}

// Named per-word metric columns for one topic; `lda_probability` decides
// the top-n restriction.
struct MetricTable {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
  std::vector<double> lda_probability;

  static MetricTable from_node_metrics(const NodeMetrics& m) {
    return {{"lda_prob", "degree", "in", "out", "betweenness", "pagerank"},
            {m.lda_probability, m.degree, m.degree_in, m.degree_out, m.betweenness, m.pagerank},
            m.lda_probability};
  }
};

struct CorrelationMatrix {
  std::vector<std::string> names;
  std::vector<std::optional<double>> values;  // row-major names x names

  std::optional<double> at(std::size_t i, std::size_t j) const { return values[i * names.size() + j]; }
  bool operator==(const CorrelationMatrix&) const = default;
};

inline CorrelationMatrix correlation_matrix(const MetricTable& t, CorrelationMethod method,
                                            std::optional<std::size_t> top_n = std::nullopt) {
  detail::require(t.names.size() >= 2 && t.names.size() == t.columns.size(), "need at least two metrics");
  const std::size_t n = t.lda_probability.size();
  for (const auto& c : t.columns) detail::require(c.size() == n, "metric columns differ in length");
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  if (top_n && *top_n < n) {
    std::stable_sort(rows.begin(), rows.end(),
                     [&](std::size_t a, std::size_t b) { return t.lda_probability[a] > t.lda_probability[b]; });
    rows.resize(*top_n);
  }
  detail::require(rows.size() >= 3, "need at least three observations for a correlation");
  std::vector<std::vector<double>> cols(t.columns.size());
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (auto r : rows) cols[c].push_back(t.columns[c][r]);
  CorrelationMatrix out{t.names, std::vector<std::optional<double>>(cols.size() * cols.size())};
  for (std::size_t i = 0; i < cols.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out.values[i * cols.size() + j] = correlation(cols[i], cols[j], method);
  return out;
}

// Entry-wise mean over per-topic matrices, skipping undefined entries.
inline CorrelationMatrix average_correlations(const std::vector<CorrelationMatrix>& per_topic) {
  detail::require(!per_topic.empty(), "no correlation matrices to average");
  CorrelationMatrix out{per_topic.front().names, {}};
  const std::size_t n = out.names.size() * out.names.size();
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    std::size_t c = 0;
    for (const auto& m : per_topic)
      if (m.values[i]) {
        s += *m.values[i];
        ++c;
      }
    if (c > 0) out.values[i] = s / static_cast<double>(c);
  }
  return out;
}

inline std::vector<CorrelationMatrix> metric_correlations(const std::vector<MetricTable>& tables,
                                                          CorrelationMethod method,
                                                          std::optional<std::size_t> top_n = std::nullopt) {
  std::vector<CorrelationMatrix> out;
  for (const auto& t : tables) out.push_back(correlation_matrix(t, method, top_n));
  return out;
}

inline std::string correlations_to_csv(const CorrelationMatrix& m) {
  std::vector<std::string> header{"metric"};
  header.insert(header.end(), m.names.begin(), m.names.end());
  std::string out = io::csv_line(header);
  for (std::size_t i = 0; i < m.names.size(); ++i) {
    std::vector<std::string> row{m.names[i]};
    for (std::size_t j = 0; j < m.names.size(); ++j) {
      auto v = m.at(i, j);
      row.push_back(v ? io::format_double(*v) : "NA");
    }
    out += io::csv_line(row);
  }
  return out;
}

inline CorrelationMatrix correlations_from_csv(std::string_view text) {
  auto rows = io::parse_csv(text, "correlations");
  detail::require(!rows.empty() && rows[0].fields.size() >= 2, "correlation CSV needs a header");
  CorrelationMatrix m;
  m.names.assign(rows[0].fields.begin() + 1, rows[0].fields.end());
  detail::require(rows.size() == m.names.size() + 1, "correlation CSV is not square");
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    const std::string where = "correlations:" + std::to_string(rows[r].line);
    detail::require(f.size() == m.names.size() + 1 && f[0] == m.names[r - 1], where + ": row does not match header");
    for (std::size_t j = 1; j < f.size(); ++j)
      m.values.push_back(f[j] == "NA" ? std::nullopt : std::optional<double>(io::parse_double(f[j], where)));
  }
  return m;
}

}  // namespace lda2net
