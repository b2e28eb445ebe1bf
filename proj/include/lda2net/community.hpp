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
#include <map>
#include <numeric>
#include <queue>
#include <string>
#include <tuple>
#include <vector>

#include "lda2net/error.hpp"
#include "lda2net/io.hpp"
#include "lda2net/network.hpp"
#include "lda2net/parallel.hpp"

namespace lda2net {

// Undirected view of a topic network: A = W + W^T over local indices.
// Self-loops appear on the diagonal with weight 2 w_ii.
struct SymmetricGraph {
  std::size_t n = 0;
  std::vector<std::map<std::uint32_t, double>> nbrs;
  std::vector<double> strength;
  double two_m = 0.0;
};

inline SymmetricGraph symmetrize(const TopicNetwork& net) {
  const auto adj = build_adjacency(net);
  SymmetricGraph g;
  g.n = adj.n;
  g.nbrs.resize(g.n);
  g.strength.assign(g.n, 0.0);
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    const auto s = adj.edge_source[e], t = adj.edge_target[e];
    const double w = net.edges[e].weight;
    g.nbrs[s][t] += w;
    g.nbrs[t][s] += w;
  }
  for (std::size_t i = 0; i < g.n; ++i) {
    for (const auto& [j, w] : g.nbrs[i]) g.strength[i] += w;
    g.two_m += g.strength[i];
  }
  return g;
}

// Q = (1/2m) sum_ij [A_ij - s_i s_j / 2m] delta(c_i, c_j) on the
// symmetrised graph. `assignment` is parallel to net.nodes.
inline double modularity(const TopicNetwork& net, const std::vector<int>& assignment) {
  detail::require(assignment.size() == net.nodes.size(), "assignment does not cover every node");
  const auto g = symmetrize(net);
  if (g.two_m == 0.0) return 0.0;
  std::map<int, double> internal, total;
  for (std::size_t i = 0; i < g.n; ++i) {
    total[assignment[i]] += g.strength[i];
    for (const auto& [j, w] : g.nbrs[i])
      if (assignment[j] == assignment[i]) internal[assignment[i]] += w;
  }
  double q = 0.0;
  for (const auto& [c, tot] : total) q += internal[c] / g.two_m - (tot / g.two_m) * (tot / g.two_m);
  return q;
}

struct Merge {
  int first = 0;   // dendrogram ids: leaves 0..n-1, merged clusters n, n+1, ...
  int second = 0;
  double height = 0.0;  // delta sigma of the merge
  bool operator==(const Merge&) const = default;
};

struct CommunityPartition {
  int topic_id = 0;
  std::vector<WordId> nodes;    // parallel to assignment
  std::vector<int> assignment;  // community ids 1..m, ordered by size descending
  std::vector<std::size_t> sizes;  // sizes[c - 1]
  double modularity = 0.0;
  std::vector<Merge> dendrogram;
  std::size_t cut = 0;  // number of dendrogram merges applied

  std::size_t community_count() const { return sizes.size(); }

  std::vector<WordId> members(int community) const {
    std::vector<WordId> out;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (assignment[i] == community) out.push_back(nodes[i]);
    return out;
  }
};

namespace detail {

// Relabel raw cluster ids to 1..m by size descending, then smallest member.
inline void canonical_communities(const std::vector<int>& raw, CommunityPartition& p) {
  std::map<int, std::pair<std::size_t, std::size_t>> info;  // raw -> (size, first index)
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto [it, fresh] = info.try_emplace(raw[i], 0, i);
    ++it->second.first;
  }
  std::vector<std::pair<int, std::pair<std::size_t, std::size_t>>> order(info.begin(), info.end());
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.second.first != b.second.first) return a.second.first > b.second.first;
    return a.second.second < b.second.second;
  });
  std::map<int, int> relabel;
  p.sizes.clear();
  for (std::size_t c = 0; c < order.size(); ++c) {
    relabel[order[c].first] = static_cast<int>(c + 1);
    p.sizes.push_back(order[c].second.first);
  }
  p.assignment.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) p.assignment[i] = relabel[raw[i]];
}

}  // namespace detail

// Pons-Latapy walktrap on the symmetrised graph. Each vertex gets a loop
// weighted by its mean incident weight for the walk only. Adjacent
// communities are merged by smallest delta sigma (ties: smaller ids). The
// dendrogram is cut at its first modularity maximum.
// TODO: probability vectors are dense (n^2 memory); large networks want
// sparse vectors with a truncation threshold.
inline CommunityPartition walktrap(const TopicNetwork& net, int steps = 4, unsigned threads = 1) {
  detail::require_arg(steps >= 1, "walktrap steps must be at least 1");
  detail::require(!net.nodes.empty(), "walktrap on an empty network");
  const auto g = symmetrize(net);
  const std::size_t n = g.n;

  std::vector<double> degree(n, 0.0), loop(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t k = 0;
    for (const auto& [j, w] : g.nbrs[i])
      if (j != i) ++k;
    if (g.strength[i] > 0.0) loop[i] = g.strength[i] / static_cast<double>(std::max<std::size_t>(k, 1));
    degree[i] = g.strength[i] + loop[i];
  }

  std::vector<std::vector<double>> prob(n);
  parallel_for(n, threads, [&](std::size_t s) {
    if (degree[s] == 0.0) return;
    std::vector<double> x(n, 0.0), y(n);
    x[s] = 1.0;
    for (int t = 0; t < steps; ++t) {
      std::fill(y.begin(), y.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        if (x[i] == 0.0) continue;
        const double f = x[i] / degree[i];
        y[i] += f * loop[i];
        for (const auto& [j, w] : g.nbrs[i]) y[j] += f * w;
      }
      x.swap(y);
    }
    prob[s] = std::move(x);
  });

  struct Community {
    std::size_t size = 0;
    std::vector<double> p;
    std::map<int, double> links;  // neighbour community -> total A weight between
    double internal = 0.0, total = 0.0;
    bool alive = false;
  };
  std::vector<Community> comm(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& c = comm[i];
    c.size = 1;
    c.p = prob[i];
    c.alive = true;
    c.total = g.strength[i];
    for (const auto& [j, w] : g.nbrs[i]) {
      if (j == i) c.internal += w;
      else c.links[static_cast<int>(j)] += w;
    }
  }

  auto delta_sigma = [&](const Community& a, const Community& b) {
    double r2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (degree[k] == 0.0) continue;
      const double d = a.p[k] - b.p[k];
      r2 += d * d / degree[k];
    }
    const double sa = static_cast<double>(a.size), sb = static_cast<double>(b.size);
    return sa * sb / (sa + sb) * r2 / static_cast<double>(n);
  };

  using Candidate = std::tuple<double, int, int>;  // (delta sigma, lower id, higher id)
  std::priority_queue<Candidate, std::vector<Candidate>, std::greater<Candidate>> heap;
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& [j, w] : comm[i].links)
      if (static_cast<std::size_t>(j) > i) heap.push({delta_sigma(comm[i], comm[j]), static_cast<int>(i), j});

  double q = 0.0;
  if (g.two_m > 0.0)
    for (const auto& c : comm) q += c.internal / g.two_m - (c.total / g.two_m) * (c.total / g.two_m);
  double best_q = q;
  std::size_t best_cut = 0;

  CommunityPartition part;
  part.topic_id = net.topic_id;
  part.nodes = net.nodes;
  while (!heap.empty()) {
    auto [ds, a, b] = heap.top();
    heap.pop();
    if (!comm[a].alive || !comm[b].alive) continue;
    const int id = static_cast<int>(comm.size());
    comm.emplace_back();
    auto& A = comm[a];
    auto& B = comm[b];
    Community merged;
    merged.alive = true;
    merged.size = A.size + B.size;
    merged.p.resize(n);
    const double fa = static_cast<double>(A.size) / static_cast<double>(merged.size);
    const double fb = static_cast<double>(B.size) / static_cast<double>(merged.size);
    for (std::size_t k = 0; k < n; ++k) merged.p[k] = fa * A.p[k] + fb * B.p[k];
    const double between = A.links.at(b);
    merged.internal = A.internal + B.internal + 2.0 * between;
    merged.total = A.total + B.total;
    for (const auto* src : {&A, &B})
      for (const auto& [c, w] : src->links)
        if (c != a && c != b) merged.links[c] += w;
    q += 2.0 * between / g.two_m - 2.0 * (A.total / g.two_m) * (B.total / g.two_m);
    A.alive = B.alive = false;
    A.p = {};
    B.p = {};
    A.links.clear();
    B.links.clear();
    for (const auto& [c, w] : merged.links) {
      auto& other = comm[c].links;
      other.erase(a);
      other.erase(b);
      other[id] = w;
    }
    comm[id] = std::move(merged);
    for (const auto& [c, w] : comm[id].links) heap.push({delta_sigma(comm[c], comm[id]), c, id});
    part.dendrogram.push_back({a, b, ds});
    if (q > best_q + 1e-12) {
      best_q = q;
      best_cut = part.dendrogram.size();
    }
  }

  std::vector<int> parent(comm.size());
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t s = 0; s < best_cut; ++s) {
    const int id = static_cast<int>(n + s);
    parent[part.dendrogram[s].first] = id;
    parent[part.dendrogram[s].second] = id;
  }
  std::vector<int> raw(n);
  for (std::size_t i = 0; i < n; ++i) {
    int r = static_cast<int>(i);
    while (parent[r] != r) r = parent[r];
    raw[i] = r;
  }
  part.cut = best_cut;
  detail::canonical_communities(raw, part);
  part.modularity = modularity(net, part.assignment);
  return part;
}

// Partition from an explicit assignment (any integer labels).
inline CommunityPartition make_partition(const TopicNetwork& net, const std::vector<int>& labels) {
  detail::require(labels.size() == net.nodes.size(), "assignment does not cover every node");
  CommunityPartition p;
  p.topic_id = net.topic_id;
  p.nodes = net.nodes;
  detail::canonical_communities(labels, p);
  p.modularity = modularity(net, p.assignment);
  return p;
}

inline TopicNetwork subtopic_network(const TopicNetwork& net, const CommunityPartition& part, int community) {
  if (community < 1 || static_cast<std::size_t>(community) > part.sizes.size())
    throw DataError("unknown community id " + std::to_string(community));
  return induced_subnetwork(net, part.members(community));
}

inline std::string partition_to_csv(const CommunityPartition& p, const Vocabulary& vocab) {
  std::string out = "word,community\n";
  for (std::size_t i = 0; i < p.nodes.size(); ++i)
    out += io::csv_line(std::vector<std::string>{vocab.word(p.nodes[i]), std::to_string(p.assignment[i])});
  return out;
}

inline CommunityPartition partition_from_csv(std::string_view text, const TopicNetwork& net) {
  auto rows = io::parse_csv(text, "partition");
  detail::require(!rows.empty() && rows[0].fields.size() == 2, "partition CSV needs a word,community header");
  std::vector<int> labels(net.nodes.size(), 0);
  std::vector<char> seen(net.nodes.size(), 0);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    const std::string where = "partition:" + std::to_string(rows[r].line);
    detail::require(f.size() == 2, where + ": expected 2 fields");
    auto w = net.vocab->find(f[0]);
    detail::require(w.has_value(), where + ": word not in vocabulary");
    auto li = net.local_index(*w);
    detail::require(li.has_value(), where + ": word is not a node of the network");
    detail::require(!seen[*li], where + ": word listed twice");
    seen[*li] = 1;
    labels[*li] = io::parse_int<int>(f[1], where);
  }
  for (char s : seen) detail::require(s != 0, "partition does not cover every node");
  return make_partition(net, labels);
}

struct ModularityReport {
  struct Row {
    int topic_id;
    double modularity;
    std::size_t communities;
    std::size_t largest;
    bool operator==(const Row&) const = default;
  };
  std::vector<Row> rows;
  double bin_low = -0.5, bin_width = 0.1;
  std::vector<std::size_t> histogram;  // bins over [-0.5, 1]
};

inline ModularityReport modularity_report(const std::vector<CommunityPartition>& parts) {
  ModularityReport r;
  r.histogram.assign(15, 0);
  for (const auto& p : parts) {
    r.rows.push_back({p.topic_id, p.modularity, p.community_count(), p.sizes.empty() ? 0 : p.sizes.front()});
    auto bin = static_cast<long>(std::floor((p.modularity - r.bin_low) / r.bin_width));
    bin = std::clamp<long>(bin, 0, static_cast<long>(r.histogram.size()) - 1);
    ++r.histogram[static_cast<std::size_t>(bin)];
  }
  return r;
}

inline std::string modularity_table_csv(const ModularityReport& r) {
  std::string out = "topic_id,modularity,communities,largest_community\n";
  for (const auto& row : r.rows)
    out += std::to_string(row.topic_id) + ',' + io::format_double(row.modularity) + ',' +
           std::to_string(row.communities) + ',' + std::to_string(row.largest) + '\n';
  return out;
}

inline std::vector<ModularityReport::Row> modularity_table_from_csv(std::string_view text) {
  auto rows = io::parse_csv(text, "modularity");
  detail::require(!rows.empty() && rows[0].fields.size() == 4, "modularity CSV needs a 4-column header");
  std::vector<ModularityReport::Row> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    const std::string where = "modularity:" + std::to_string(rows[r].line);
    detail::require(f.size() == 4, where + ": expected 4 fields");
    out.push_back({io::parse_int<int>(f[0], where), io::parse_double(f[1], where),
                   io::parse_int<std::size_t>(f[2], where), io::parse_int<std::size_t>(f[3], where)});
  }
  return out;
}

inline std::string modularity_histogram_csv(const ModularityReport& r) {
  std::string out = "bin_low,bin_high,count\n";
  for (std::size_t b = 0; b < r.histogram.size(); ++b) {
    const double lo = r.bin_low + r.bin_width * static_cast<double>(b);
    out += io::format_double(std::round(lo * 10.0) / 10.0) + ',' +
           io::format_double(std::round((lo + r.bin_width) * 10.0) / 10.0) + ',' + std::to_string(r.histogram[b]) +
           '\n';
  }
  return out;
}

}  // namespace lda2net
