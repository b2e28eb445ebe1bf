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

// Per-topic directed weighted word networks. An edge i -> j exists only for
// an observed bigram (i, j); its weight is the bigram's counts-weight for the
// topic times the two LDA word probabilities, normalised over the topic.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <spdlog/spdlog.h>

#include "lda2net/dense.hpp"
#include "lda2net/error.hpp"
#include "lda2net/io.hpp"
#include "lda2net/matrices.hpp"
#include "lda2net/parallel.hpp"

namespace lda2net {

struct Edge {
  WordId source = 0;
  WordId target = 0;
  double weight = 0.0;         // normalized LDA2Net weight
  double counts_weight = 0.0;  // C[b, k]
  double probs_weight = 0.0;   // M[k, i] * M[k, j]
  bool operator==(const Edge&) const = default;
};

struct TopicNetwork {
  int topic_id = 0;  // 1-based
  std::shared_ptr<const Vocabulary> vocab;
  std::vector<WordId> nodes;        // ascending vocabulary indices
  std::vector<double> node_weight;  // LDA probability, parallel to nodes
  std::vector<Edge> edges;          // ordered by (source, target)
  bool normalized = false;

  std::size_t node_count() const { return nodes.size(); }
  std::size_t edge_count() const { return edges.size(); }

  std::optional<std::size_t> local_index(WordId w) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), w);
    if (it == nodes.end() || *it != w) return std::nullopt;
    return static_cast<std::size_t>(it - nodes.begin());
  }

  const std::string& word(WordId w) const { return vocab->word(w); }

  double total_weight() const {
    double s = 0.0;
    for (const auto& e : edges) s += e.weight;
    return s;
  }

  bool operator==(const TopicNetwork& o) const {
    return topic_id == o.topic_id && nodes == o.nodes && node_weight == o.node_weight && edges == o.edges &&
           normalized == o.normalized;
  }
};

// Compact adjacency over local node indices (positions in net.nodes).
struct Adjacency {
  struct Arc {
    std::uint32_t node;  // neighbour (target for out-arcs, source for in-arcs)
    std::uint32_t edge;  // index into net.edges
    double weight;
  };
  std::size_t n = 0;
  std::vector<std::size_t> out_offset, in_offset;
  std::vector<Arc> out, in;
  std::vector<std::uint32_t> edge_source, edge_target;  // local endpoints per edge

  std::span<const Arc> out_arcs(std::size_t v) const { return {out.data() + out_offset[v], out_offset[v + 1] - out_offset[v]}; }
  std::span<const Arc> in_arcs(std::size_t v) const { return {in.data() + in_offset[v], in_offset[v + 1] - in_offset[v]}; }
};

inline Adjacency build_adjacency(const TopicNetwork& net) {
  Adjacency a;
  a.n = net.nodes.size();
  a.out_offset.assign(a.n + 1, 0);
  a.in_offset.assign(a.n + 1, 0);
  a.edge_source.resize(net.edges.size());
  a.edge_target.resize(net.edges.size());
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    auto s = net.local_index(net.edges[e].source), t = net.local_index(net.edges[e].target);
    if (!s || !t) throw DataError("edge endpoint is not a node of the network");
    a.edge_source[e] = static_cast<std::uint32_t>(*s);
    a.edge_target[e] = static_cast<std::uint32_t>(*t);
    ++a.out_offset[*s + 1];
    ++a.in_offset[*t + 1];
  }
  for (std::size_t v = 0; v < a.n; ++v) {
    a.out_offset[v + 1] += a.out_offset[v];
    a.in_offset[v + 1] += a.in_offset[v];
  }
  a.out.resize(net.edges.size());
  a.in.resize(net.edges.size());
  auto out_fill = a.out_offset, in_fill = a.in_offset;
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    const auto s = a.edge_source[e], t = a.edge_target[e];
    a.out[out_fill[s]++] = {t, static_cast<std::uint32_t>(e), net.edges[e].weight};
    a.in[in_fill[t]++] = {s, static_cast<std::uint32_t>(e), net.edges[e].weight};
  }
  return a;
}

// C = S * Q, bigrams x topics.
struct TopicCountsMatrix {
  DenseMatrix values;

  std::size_t bigrams() const { return values.rows(); }
  std::size_t topics() const { return values.cols(); }
  double operator()(std::size_t b, std::size_t k) const { return values(b, k); }

  // Column k normalised to a distribution over bigrams (topic is 1-based).
  std::vector<double> distribution(int topic) const {
    const std::size_t k = static_cast<std::size_t>(topic - 1);
    detail::require(topic >= 1 && k < topics(), "topic index out of range");
    std::vector<double> p = values.column(k);
    double total = 0.0;
    for (double v : p) total += v;
    detail::require(total > 0.0, "topic " + std::to_string(topic) + " has no counts-weight mass");
    for (double& v : p) v /= total;
    return p;
  }
};

inline TopicCountsMatrix compute_counts_weights(const SparseCountMatrix& S, const DenseMatrix& Q, unsigned threads = 1) {
  if (S.cols() != Q.rows()) {
    throw DataError("S has " + std::to_string(S.cols()) + " document columns but Q has " + std::to_string(Q.rows()) +
                    " rows");
  }
  const std::size_t K = Q.cols();
  TopicCountsMatrix C{DenseMatrix(S.rows(), K)};
  const auto offsets = S.row_offsets();
  const auto entries = S.entries();
  constexpr std::size_t kBlock = 4096;
  const std::size_t blocks = (S.rows() + kBlock - 1) / kBlock;
  parallel_for(blocks, threads, [&](std::size_t blk) {
    const std::size_t end_row = std::min(S.rows(), (blk + 1) * kBlock);
    for (std::size_t b = blk * kBlock; b < end_row; ++b) {
      auto out = C.values.row(b);
      for (std::size_t e = offsets[b]; e < offsets[b + 1]; ++e) {
        const double count = entries[e].count;
        const auto q = Q.row(entries[e].col);
        for (std::size_t k = 0; k < K; ++k) out[k] += count * q[k];
      }
    }
  });
  return C;
}

inline TopicNetwork build_topic_network(int topic, const TopicCountsMatrix& C, const DenseMatrix& M,
                                        const BigramVocabulary& bigrams, std::shared_ptr<const Vocabulary> vocab) {
  const std::size_t K = M.rows();
  detail::require(topic >= 1 && static_cast<std::size_t>(topic) <= K,
                  "topic " + std::to_string(topic) + " outside [1, " + std::to_string(K) + "]");
  detail::require(C.bigrams() == bigrams.size() && C.topics() == K, "C does not match the bigram vocabulary or K");
  detail::require(vocab && vocab->size() == M.cols(), "vocabulary does not match M");
  const std::size_t k = static_cast<std::size_t>(topic - 1);

  TopicNetwork net;
  net.topic_id = topic;
  net.vocab = std::move(vocab);
  net.nodes.resize(M.cols());
  net.node_weight.resize(M.cols());
  for (std::size_t i = 0; i < M.cols(); ++i) {
    net.nodes[i] = static_cast<WordId>(i);
    net.node_weight[i] = M(k, i);
  }
  double total = 0.0;
  net.edges.reserve(bigrams.size());
  for (std::size_t b = 0; b < bigrams.size(); ++b) {
    const auto& bg = bigrams[static_cast<BigramId>(b)];
    const double counts = C(b, k);
    const double probs = M(k, bg.first) * M(k, bg.second);
    const double raw = counts * probs;
    if (raw == 0.0) continue;
    net.edges.push_back({bg.first, bg.second, raw, counts, probs});
    total += raw;
  }
  if (total <= 0.0) throw DataError("topic " + std::to_string(topic) + " has no positive edge weight");
  for (auto& e : net.edges) e.weight /= total;
  net.normalized = true;
  return net;
}

// Product of LDA word probabilities per observed bigram, normalized to a
// distribution over the bigram vocabulary.
inline std::vector<double> compute_probs_weights(int topic, const DenseMatrix& M, const BigramVocabulary& bigrams) {
  detail::require(topic >= 1 && static_cast<std::size_t>(topic) <= M.rows(), "topic index out of range");
  const std::size_t k = static_cast<std::size_t>(topic - 1);
  std::vector<double> p(bigrams.size());
  double total = 0.0;
  for (std::size_t b = 0; b < bigrams.size(); ++b) {
    const auto& bg = bigrams[static_cast<BigramId>(b)];
    p[b] = M(k, bg.first) * M(k, bg.second);
    total += p[b];
  }
  detail::require(total > 0.0, "topic " + std::to_string(topic) + " gives zero probability to every bigram");
  for (double& v : p) v /= total;
  return p;
}

inline std::vector<TopicNetwork> build_all_networks(const TopicCountsMatrix& C, const DenseMatrix& M,
                                                    const BigramVocabulary& bigrams,
                                                    const std::shared_ptr<const Vocabulary>& vocab,
                                                    unsigned threads = 1) {
  std::vector<TopicNetwork> nets(M.rows());
  parallel_for(M.rows(), threads, [&](std::size_t k) {
    nets[k] = build_topic_network(static_cast<int>(k + 1), C, M, bigrams, vocab);
  });
  return nets;
}

namespace detail {

// Number of items kept by a top-fraction cut: ceil(fraction * n), at least 1.
inline std::size_t keep_count(double fraction, std::size_t n) {
  if (n == 0) return 0;
  const double raw = std::ceil(fraction * static_cast<double>(n) - 1e-9);
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(raw, 1.0)), 1, n);
}

inline bool heavier(const Edge& a, const Edge& b) {
  if (a.weight != b.weight) return a.weight > b.weight;
  if (a.source != b.source) return a.source < b.source;
  return a.target < b.target;
}

}  // namespace detail

struct FilterOptions {
  double node_fraction = 1.0;
  double edge_fraction = 1.0;
  // Remove nodes left without incident edges. Only applied when the cut
  // actually removed something, so (1, 1) is the identity.
  bool drop_isolated = true;
};

// Keeps the heaviest node_fraction of nodes (by LDA probability, ties by word
// index), then the heaviest edge_fraction of the edges among them. Weights
// are not renormalised.
inline TopicNetwork filter_network(const TopicNetwork& net, const FilterOptions& opt) {
  detail::require_arg(opt.node_fraction > 0.0 && opt.node_fraction <= 1.0, "node percentile must be in (0, 1]");
  detail::require_arg(opt.edge_fraction > 0.0 && opt.edge_fraction <= 1.0, "edge percentile must be in (0, 1]");
  std::vector<std::size_t> order(net.nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (net.node_weight[a] != net.node_weight[b]) return net.node_weight[a] > net.node_weight[b];
    return net.nodes[a] < net.nodes[b];
  });
  order.resize(detail::keep_count(opt.node_fraction, order.size()));
  std::vector<WordId> kept_nodes;
  for (auto i : order) kept_nodes.push_back(net.nodes[i]);
  std::sort(kept_nodes.begin(), kept_nodes.end());
  auto is_kept = [&](WordId w) { return std::binary_search(kept_nodes.begin(), kept_nodes.end(), w); };

  std::vector<Edge> candidates;
  for (const auto& e : net.edges)
    if (is_kept(e.source) && is_kept(e.target)) candidates.push_back(e);
  std::sort(candidates.begin(), candidates.end(), detail::heavier);
  candidates.resize(detail::keep_count(opt.edge_fraction, candidates.size()));
  const bool removed_something = kept_nodes.size() < net.nodes.size() || candidates.size() < net.edges.size();
  std::sort(candidates.begin(), candidates.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.source, a.target) < std::tie(b.source, b.target);
  });

  TopicNetwork out;
  out.topic_id = net.topic_id;
  out.vocab = net.vocab;
  out.normalized = net.normalized && !removed_something;
  out.edges = std::move(candidates);
  if (out.edges.empty()) spdlog::warn("topic {}: filtering removed every edge", net.topic_id);
  std::vector<char> touched;
  if (opt.drop_isolated && removed_something) {
    touched.assign(kept_nodes.size(), 0);
    auto pos = [&](WordId w) { return std::lower_bound(kept_nodes.begin(), kept_nodes.end(), w) - kept_nodes.begin(); };
    for (const auto& e : out.edges) touched[pos(e.source)] = touched[pos(e.target)] = 1;
  }
  for (std::size_t i = 0; i < kept_nodes.size(); ++i) {
    if (!touched.empty() && !touched[i]) continue;
    out.nodes.push_back(kept_nodes[i]);
    out.node_weight.push_back(net.node_weight[*net.local_index(kept_nodes[i])]);
  }
  return out;
}

inline std::vector<Edge> top_edges(const TopicNetwork& net, std::size_t n) {
  detail::require_arg(n >= 1, "top_edges needs n >= 1");
  std::vector<Edge> e = net.edges;
  const std::size_t keep = std::min(n, e.size());
  std::partial_sort(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(keep), e.end(), detail::heavier);
  e.resize(keep);
  return e;
}

// Induced subgraph on a node subset; weights are kept as they are.
inline TopicNetwork induced_subnetwork(const TopicNetwork& net, std::vector<WordId> keep) {
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  TopicNetwork out;
  out.topic_id = net.topic_id;
  out.vocab = net.vocab;
  for (auto w : keep) {
    auto i = net.local_index(w);
    detail::require(i.has_value(), "node is not part of the network");
    out.nodes.push_back(w);
    out.node_weight.push_back(net.node_weight[*i]);
  }
  auto in = [&](WordId w) { return std::binary_search(keep.begin(), keep.end(), w); };
  for (const auto& e : net.edges)
    if (in(e.source) && in(e.target)) out.edges.push_back(e);
  out.normalized = net.normalized && out.edges.size() == net.edges.size();
  return out;
}

namespace graphml {

inline std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

inline std::string write(const TopicNetwork& net) {
  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
    << "  <key id=\"topic_id\" for=\"graph\" attr.name=\"topic_id\" attr.type=\"int\"/>\n"
    << "  <key id=\"normalized\" for=\"graph\" attr.name=\"normalized\" attr.type=\"boolean\"/>\n"
    << "  <key id=\"word\" for=\"node\" attr.name=\"word\" attr.type=\"string\"/>\n"
    << "  <key id=\"lda_probability\" for=\"node\" attr.name=\"lda_probability\" attr.type=\"double\"/>\n"
    << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
    << "  <key id=\"counts_weight\" for=\"edge\" attr.name=\"counts_weight\" attr.type=\"double\"/>\n"
    << "  <key id=\"probs_weight\" for=\"edge\" attr.name=\"probs_weight\" attr.type=\"double\"/>\n"
    << "  <graph id=\"topic_" << net.topic_id << "\" edgedefault=\"directed\">\n"
    << "    <data key=\"topic_id\">" << net.topic_id << "</data>\n"
    << "    <data key=\"normalized\">" << (net.normalized ? "true" : "false") << "</data>\n";
  for (std::size_t i = 0; i < net.nodes.size(); ++i) {
    o << "    <node id=\"n" << net.nodes[i] << "\"><data key=\"word\">" << escape(net.word(net.nodes[i]))
      << "</data><data key=\"lda_probability\">" << io::format_double(net.node_weight[i]) << "</data></node>\n";
  }
  for (const auto& e : net.edges) {
    o << "    <edge source=\"n" << e.source << "\" target=\"n" << e.target << "\"><data key=\"weight\">"
      << io::format_double(e.weight) << "</data><data key=\"counts_weight\">" << io::format_double(e.counts_weight)
      << "</data><data key=\"probs_weight\">" << io::format_double(e.probs_weight) << "</data></edge>\n";
  }
  o << "  </graph>\n</graphml>\n";
  return o.str();
}

inline WordId parse_node_id(const std::string& id) {
  if (id.size() < 2 || id[0] != 'n') throw DataError("GraphML node id '" + id + "' is not of the form n<index>");
  return io::parse_int<WordId>(std::string_view(id).substr(1), "GraphML node id");
}

inline TopicNetwork read(std::string_view text, std::shared_ptr<const Vocabulary> vocab) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw DataError(std::string("malformed GraphML: ") + e.what());
  }
  const auto& graph = tree.get_child("graphml.graph");
  TopicNetwork net;
  net.vocab = std::move(vocab);
  auto data_value = [](const pt::ptree& node, const std::string& key) -> std::optional<std::string> {
    for (const auto& [tag, child] : node) {
      if (tag == "data" && child.get<std::string>("<xmlattr>.key", "") == key) return child.get_value<std::string>();
    }
    return std::nullopt;
  };
  if (auto v = data_value(graph, "topic_id")) net.topic_id = io::parse_int<int>(*v, "topic_id");
  if (auto v = data_value(graph, "normalized")) net.normalized = *v == "true";
  for (const auto& [tag, child] : graph) {
    if (tag == "node") {
      const WordId w = parse_node_id(child.get<std::string>("<xmlattr>.id"));
      auto word = data_value(child, "word");
      if (net.vocab) {
        if (w >= net.vocab->size()) throw DataError("GraphML node index beyond the vocabulary");
        if (word && *word != net.vocab->word(w)) {
          throw DataError("GraphML node n" + std::to_string(w) + " is '" + *word + "' but the vocabulary says '" +
                          net.vocab->word(w) + "'");
        }
      }
      auto p = data_value(child, "lda_probability");
      net.nodes.push_back(w);
      net.node_weight.push_back(p ? io::parse_double(*p, "lda_probability") : 0.0);
    } else if (tag == "edge") {
      Edge e;
      e.source = parse_node_id(child.get<std::string>("<xmlattr>.source"));
      e.target = parse_node_id(child.get<std::string>("<xmlattr>.target"));
      auto num = [&](const char* key) {
        auto v = data_value(child, key);
        return v ? io::parse_double(*v, key) : 0.0;
      };
      e.weight = num("weight");
      e.counts_weight = num("counts_weight");
      e.probs_weight = num("probs_weight");
      net.edges.push_back(e);
    }
  }
  for (std::size_t i = 1; i < net.nodes.size(); ++i)
    detail::require(net.nodes[i - 1] < net.nodes[i], "GraphML nodes must be in ascending index order");
  for (const auto& e : net.edges)
    detail::require(net.local_index(e.source) && net.local_index(e.target), "GraphML edge references an unknown node");
  return net;
}

}  // namespace graphml

// Edge list CSV: source,target,weight,counts_weight,probs_weight (words).
inline std::string edges_to_csv(const TopicNetwork& net, std::span<const Edge> edges) {
  std::string out = "source,target,weight,counts_weight,probs_weight\n";
  for (const auto& e : edges) {
    out += io::csv_line(std::vector<std::string>{net.word(e.source), net.word(e.target), io::format_double(e.weight),
                                                 io::format_double(e.counts_weight), io::format_double(e.probs_weight)});
  }
  return out;
}

inline std::string edges_to_csv(const TopicNetwork& net) { return edges_to_csv(net, net.edges); }

inline std::vector<Edge> edges_from_csv(std::string_view text, const Vocabulary& vocab) {
  auto rows = io::parse_csv(text, "edges");
  detail::require(!rows.empty() && rows[0].fields.size() == 5, "edge CSV needs a 5-column header");
  std::vector<Edge> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    const std::string where = "edges:" + std::to_string(rows[r].line);
    detail::require(f.size() == 5, where + ": expected 5 fields");
    auto s = vocab.find(f[0]), t = vocab.find(f[1]);
    detail::require(s && t, where + ": word not in vocabulary");
    out.push_back({*s, *t, io::parse_double(f[2], where), io::parse_double(f[3], where), io::parse_double(f[4], where)});
  }
  return out;
}

}  // namespace lda2net
