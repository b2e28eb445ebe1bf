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


// Brute-force reference implementations and random fixtures shared by the
// unit suites and the acceptance binary. Nothing here calls the library
// routine it is compared against.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "lda2net/dense.hpp"
#include "lda2net/matrices.hpp"
#include "lda2net/network.hpp"

namespace oracle {

using lda2net::DenseMatrix;
using lda2net::TopicNetwork;

inline std::shared_ptr<const lda2net::Vocabulary> words(std::size_t n, const std::string& prefix = "w") {
  std::vector<std::string> w;
  for (std::size_t i = 0; i < n; ++i) w.push_back(prefix + std::to_string(i));
  return std::make_shared<const lda2net::Vocabulary>(std::move(w));
}

struct Arc {
  std::uint32_t s, t;
  double w;
};

// Network over nodes 0..n-1 with the given arcs (weights taken as-is, not
// normalized). Node weights are uniform.
inline TopicNetwork network(std::size_t n, const std::vector<Arc>& arcs, int topic = 1) {
  TopicNetwork net;
  net.topic_id = topic;
  net.vocab = words(n);
  for (std::size_t i = 0; i < n; ++i) {
    net.nodes.push_back(static_cast<lda2net::WordId>(i));
    net.node_weight.push_back(1.0 / static_cast<double>(n));
  }
  for (const auto& a : arcs) net.edges.push_back({a.s, a.t, a.w, 0.0, 0.0});
  std::sort(net.edges.begin(), net.edges.end(),
            [](const auto& a, const auto& b) { return std::tie(a.source, a.target) < std::tie(b.source, b.target); });
  return net;
}

inline TopicNetwork random_digraph(std::mt19937_64& g, std::size_t max_nodes, double density,
                                   const std::vector<double>& weight_choices) {
  std::uniform_int_distribution<std::size_t> nd(2, max_nodes);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> wd(0, weight_choices.size() - 1);
  const std::size_t n = nd(g);
  std::vector<Arc> arcs;
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = 0; j < n; ++j)
      if (i != j && u(g) < density) arcs.push_back({i, j, weight_choices[wd(g)]});
  return network(n, arcs);
}

// ---- bigram weights ----------------------------------------------------------

struct ToyCorpus {
  std::size_t n_docs = 0, n_words = 0, K = 0;
  std::shared_ptr<const lda2net::Vocabulary> vocab;
  lda2net::BigramVocabulary bigrams;
  lda2net::SparseCountMatrix S;
  DenseMatrix Q, M;
};

inline std::vector<double> random_simplex(std::mt19937_64& g, std::size_t n, double zero_rate = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(n);
  double s = 0.0;
  for (auto& v : p) {
    v = u(g) < zero_rate ? 0.0 : -std::log(1.0 - u(g));
    s += v;
  }
  if (s == 0.0) {
    p[0] = 1.0;
    return p;
  }
  for (auto& v : p) v /= s;
  return p;
}

// Random corpus with <= max_docs documents and <= max_bigrams bigrams.
inline ToyCorpus random_corpus(std::mt19937_64& g, std::size_t max_docs = 50, std::size_t max_bigrams = 200,
                               std::size_t max_k = 5) {
  ToyCorpus c;
  c.n_docs = std::uniform_int_distribution<std::size_t>(1, max_docs)(g);
  c.n_words = std::uniform_int_distribution<std::size_t>(2, 20)(g);
  c.K = std::uniform_int_distribution<std::size_t>(1, max_k)(g);
  c.vocab = words(c.n_words);
  const std::size_t nb = std::uniform_int_distribution<std::size_t>(1, std::min(max_bigrams, c.n_words * c.n_words))(g);
  std::set<lda2net::Bigram> pairs;
  std::uniform_int_distribution<std::uint32_t> wd(0, static_cast<std::uint32_t>(c.n_words - 1));
  while (pairs.size() < nb) pairs.insert({wd(g), wd(g)});
  c.bigrams = lda2net::BigramVocabulary(std::vector<lda2net::Bigram>(pairs.begin(), pairs.end()));
  std::vector<lda2net::Triplet> t;
  std::uniform_int_distribution<std::uint32_t> count(1, 6), dd(0, static_cast<std::uint32_t>(c.n_docs - 1));
  for (std::uint32_t b = 0; b < nb; ++b) {
    const auto occurrences = std::uniform_int_distribution<int>(1, 4)(g);
    for (int o = 0; o < occurrences; ++o) t.push_back({b, dd(g), count(g)});
  }
  c.S = lda2net::SparseCountMatrix::from_triplets(nb, c.n_docs, t);
  c.Q = DenseMatrix(c.n_docs, c.K);
  for (std::size_t d = 0; d < c.n_docs; ++d) {
    auto p = random_simplex(g, c.K, 0.3);
    for (std::size_t k = 0; k < c.K; ++k) c.Q(d, k) = p[k];
  }
  c.M = DenseMatrix(c.K, c.n_words);
  for (std::size_t k = 0; k < c.K; ++k) {
    auto p = random_simplex(g, c.n_words, 0.1);
    for (std::size_t i = 0; i < c.n_words; ++i) c.M(k, i) = p[i];
  }
  return c;
}

// C[b,k] = sum_d S[b,d] Q[d,k], by explicit loops over b, d, k.
inline DenseMatrix counts_weights(const ToyCorpus& c) {
  DenseMatrix C(c.bigrams.size(), c.K);
  for (std::size_t b = 0; b < c.bigrams.size(); ++b)
    for (std::size_t d = 0; d < c.n_docs; ++d)
      for (std::size_t k = 0; k < c.K; ++k) C(b, k) += static_cast<double>(c.S.at(b, d)) * c.Q(d, k);
  return C;
}

// Dense normalized A^k over all word pairs, zero off the bigram set.
inline std::vector<std::vector<double>> adjacency(const ToyCorpus& c, const DenseMatrix& C, std::size_t k) {
  std::vector<std::vector<double>> A(c.n_words, std::vector<double>(c.n_words, 0.0));
  double total = 0.0;
  for (std::uint32_t i = 0; i < c.n_words; ++i)
    for (std::uint32_t j = 0; j < c.n_words; ++j) {
      auto b = c.bigrams.find({i, j});
      if (!b) continue;
      A[i][j] = C(*b, k) * c.M(k, i) * c.M(k, j);
      total += A[i][j];
    }
  if (total > 0.0)
    for (auto& row : A)
      for (auto& v : row) v /= total;
  return A;
}

// ---- shortest paths ----------------------------------------------------------

struct PathBetweenness {
  std::vector<double> nodes;
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> edges;
};

// For every ordered pair (s, t), lists every simple path, keeps those of
// minimal length (sum of 1/w, ties within 1e-9 relative) and splits one unit
// of dependency evenly among them.
inline PathBetweenness enumerate_betweenness(const TopicNetwork& net, std::function<double(double)> length = {}) {
  if (!length) length = [](double w) { return 1.0 / w; };
  const std::size_t n = net.nodes.size();
  std::vector<std::vector<std::pair<std::uint32_t, double>>> out(n);
  for (const auto& e : net.edges) out[e.source].push_back({e.target, length(e.weight)});
  PathBetweenness r;
  r.nodes.assign(n, 0.0);
  for (const auto& e : net.edges) r.edges[{e.source, e.target}] = 0.0;
  for (std::uint32_t s = 0; s < n; ++s) {
    // all simple paths from s, grouped by endpoint
    std::vector<std::vector<std::pair<double, std::vector<std::uint32_t>>>> paths(n);
    std::vector<std::uint32_t> stack{s};
    std::vector<char> on(n, 0);
    on[s] = 1;
    std::function<void(std::uint32_t, double)> dfs = [&](std::uint32_t v, double len) {
      for (const auto& [w, l] : out[v]) {
        if (on[w]) continue;
        on[w] = 1;
        stack.push_back(w);
        paths[w].push_back({len + l, stack});
        dfs(w, len + l);
        stack.pop_back();
        on[w] = 0;
      }
    };
    dfs(s, 0.0);
    for (std::uint32_t t = 0; t < n; ++t) {
      if (t == s || paths[t].empty()) continue;
      double best = paths[t].front().first;
      for (const auto& p : paths[t]) best = std::min(best, p.first);
      std::vector<const std::vector<std::uint32_t>*> shortest;
      for (const auto& p : paths[t])
        if (p.first <= best * (1.0 + 1e-9)) shortest.push_back(&p.second);
      const double share = 1.0 / static_cast<double>(shortest.size());
      for (const auto* p : shortest) {
        for (std::size_t i = 1; i + 1 < p->size(); ++i) r.nodes[(*p)[i]] += share;
        for (std::size_t i = 0; i + 1 < p->size(); ++i) r.edges[{(*p)[i], (*p)[i + 1]}] += share;
      }
    }
  }
  return r;
}

// ---- modularity ----------------------------------------------------------------

// Symmetrized dense weights W + W^T (loops dropped).
inline std::vector<std::vector<double>> undirected(const TopicNetwork& net) {
  const std::size_t n = net.nodes.size();
  std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
  for (const auto& e : net.edges) {
    if (e.source == e.target) continue;
    A[e.source][e.target] += e.weight;
    A[e.target][e.source] += e.weight;
  }
  return A;
}

inline double modularity(const std::vector<std::vector<double>>& A, const std::vector<int>& c) {
  const std::size_t n = A.size();
  std::vector<double> s(n, 0.0);
  double two_m = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s[i] += A[i][j];
  for (double v : s) two_m += v;
  if (two_m == 0.0) return 0.0;
  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (c[i] == c[j]) q += A[i][j] - s[i] * s[j] / two_m;
  return q / two_m;
}

struct BestPartition {
  double modularity = -1.0;
  std::vector<int> assignment;
};

// Exhaustive search over every set partition (restricted growth strings).
inline BestPartition best_partition(const std::vector<std::vector<double>>& A) {
  const std::size_t n = A.size();
  BestPartition best;
  std::vector<int> a(n, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int max_label) {
    if (i == n) {
      const double q = modularity(A, a);
      if (q > best.modularity + 1e-15) best = {q, a};
      return;
    }
    for (int l = 0; l <= max_label + 1; ++l) {
      a[i] = l;
      rec(i + 1, std::max(max_label, l));
    }
  };
  if (n == 0) return {0.0, {}};
  a[0] = 0;
  rec(1, 0);
  return best;
}

// Same partition up to relabelling.
inline bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::map<int, int> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto [x, fx] = ab.try_emplace(a[i], b[i]);
    auto [y, fy] = ba.try_emplace(b[i], a[i]);
    if (x->second != b[i] || y->second != a[i]) return false;
  }
  return true;
}

// ---- divergences ----------------------------------------------------------------

inline double kl2(const std::vector<double>& p, const std::vector<double>& q) {
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) d += p[i] * std::log2(p[i] / q[i]);
  return d;
}

inline double jsd(const std::vector<double>& p, const std::vector<double>& q) {
  std::vector<double> m(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) m[i] = 0.5 * (p[i] + q[i]);
  return 0.5 * kl2(p, m) + 0.5 * kl2(q, m);
}

inline double entropy2(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log2(v);
  return h;
}

// ---- Barrat -----------------------------------------------------------------------

// Local coefficient straight from the formula on a dense symmetric matrix.
inline std::vector<double> barrat(const std::vector<std::vector<double>>& W) {
  const std::size_t n = W.size();
  std::vector<double> c(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    double k = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i && W[i][j] > 0.0) {
        s += W[i][j];
        k += 1.0;
      }
    if (k < 2.0) continue;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t h = 0; h < n; ++h) {
        if (j == i || h == i || j == h) continue;
        if (W[i][j] > 0.0 && W[i][h] > 0.0 && W[j][h] > 0.0) acc += (W[i][j] + W[i][h]) / 2.0;
      }
    c[i] = acc / (s * (k - 1.0));
  }
  return c;
}

}  // namespace oracle
