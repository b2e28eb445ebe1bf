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
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "lda2net/community.hpp"
#include "lda2net/corpus.hpp"
#include "lda2net/error.hpp"
#include "lda2net/io.hpp"
#include "lda2net/matrices.hpp"
#include "lda2net/metrics.hpp"
#include "lda2net/network.hpp"
#include "lda2net/random.hpp"

namespace lda2net {

struct WalkConfig {
  std::size_t length = 2;
  std::size_t n_samples = 1000;
  std::uint64_t seed = 1;
  bool filter_observed = false;
  bool no_revisit = false;

  void validate() const {
    detail::require_arg(length >= 2, "label length must be at least 2");
    detail::require_arg(n_samples >= 1, "need at least one sampled walk");
  }
};

struct LabelCandidate {
  std::vector<WordId> ngram;
  std::vector<std::string> words;
  std::size_t frequency = 0;
  std::optional<bool> observed_in_corpus;  // known only when an n-gram set was supplied
  bool operator==(const LabelCandidate&) const = default;
};

struct LabelResult {
  std::vector<LabelCandidate> candidates;
  std::size_t attempted = 0;
  std::size_t completed = 0;
};

// Observed n-grams of a fixed length, built from document segments with the
// same adjacency rule as bigrams (an out-of-vocabulary token breaks a run).
struct NgramSet {
  std::size_t length = 0;
  std::set<std::vector<WordId>> grams;
  bool contains(const std::vector<WordId>& g) const { return grams.count(g) > 0; }
};

inline NgramSet build_ngram_set(const std::vector<TokenizedDocument>& docs, const Vocabulary& vocab,
                                std::size_t length) {
  detail::require_arg(length >= 1, "n-gram length must be positive");
  NgramSet out;
  out.length = length;
  std::vector<WordId> run;
  for (const auto& d : docs) {
    for (const auto& seg : d.segments) {
      run.clear();
      for (const auto& tok : seg) {
        auto w = vocab.find(tok);
        if (!w) {
          run.clear();
          continue;
        }
        run.push_back(*w);
        if (run.size() >= length) out.grams.emplace(run.end() - static_cast<std::ptrdiff_t>(length), run.end());
      }
    }
  }
  return out;
}

// Precomputed sampling tables for one (sub)network.
class WalkSampler {
 public:
  WalkSampler(const TopicNetwork& net, std::vector<double> edge_btw) : net_(net), adj_(build_adjacency(net)), btw_(std::move(edge_btw)) {
    detail::require(btw_.size() == net.edges.size(), "edge betweenness does not match the network");
    start_cum_.resize(adj_.n);
    double acc = 0.0;
    for (std::size_t v = 0; v < adj_.n; ++v) {
      for (const auto& arc : adj_.out_arcs(v)) acc += arc.weight;
      start_cum_[v] = acc;
    }
  }

  const Adjacency& adjacency() const { return adj_; }

  // Start node drawn with probability weighted out-degree / total.
  template <class URBG>
  std::size_t sample_start(URBG& g) const {
    if (start_cum_.empty() || !(start_cum_.back() > 0.0))
      throw DataError("topic " + std::to_string(net_.topic_id) + ": no node has outgoing edges, no walks possible");
    return sample_cumulative(g, start_cum_);
  }

  // Next node drawn by out-edge betweenness, by edge weight when every
  // out-edge has zero betweenness; nullopt halts the walk.
  template <class URBG>
  std::optional<std::size_t> step(std::size_t current, URBG& g, const std::vector<char>* visited = nullptr) const {
    const auto arcs = adj_.out_arcs(current);
    std::vector<double> cum;
    std::vector<std::size_t> target;
    auto fill = [&](bool by_btw) {
      cum.clear();
      target.clear();
      double acc = 0.0;
      for (const auto& arc : arcs) {
        if (visited && (*visited)[arc.node]) continue;
        acc += by_btw ? btw_[arc.edge] : arc.weight;
        cum.push_back(acc);
        target.push_back(arc.node);
      }
      return acc;
    };
    if (fill(true) > 0.0) return target[sample_cumulative(g, cum)];
    if (fill(false) > 0.0) return target[sample_cumulative(g, cum)];
    return std::nullopt;
  }

  // Transition probabilities out of `current` (parallel to its out-arcs).
  std::vector<double> step_probabilities(std::size_t current) const {
    const auto arcs = adj_.out_arcs(current);
    std::vector<double> p;
    double total = 0.0;
    for (const auto& arc : arcs) total += btw_[arc.edge];
    const bool by_btw = total > 0.0;
    if (!by_btw)
      for (const auto& arc : arcs) total += arc.weight;
    for (const auto& arc : arcs) p.push_back(total > 0.0 ? (by_btw ? btw_[arc.edge] : arc.weight) / total : 0.0);
    return p;
  }

  std::vector<double> start_probabilities() const {
    std::vector<double> p(start_cum_.size());
    const double total = start_cum_.empty() ? 0.0 : start_cum_.back();
    for (std::size_t v = 0; v < p.size(); ++v) p[v] = ((v ? start_cum_[v] - start_cum_[v - 1] : start_cum_[v])) / total;
    return p;
  }

  // One walk of `length` nodes, or nullopt if it halted early.
  template <class URBG>
  std::optional<std::vector<std::size_t>> walk(std::size_t length, URBG& g, bool no_revisit) const {
    std::vector<std::size_t> path{sample_start(g)};
    std::vector<char> visited;
    if (no_revisit) {
      visited.assign(adj_.n, 0);
      visited[path[0]] = 1;
    }
    while (path.size() < length) {
      auto next = step(path.back(), g, no_revisit ? &visited : nullptr);
      if (!next) return std::nullopt;
      path.push_back(*next);
      if (no_revisit) visited[*next] = 1;
    }
    return path;
  }

 private:
  const TopicNetwork& net_;
  Adjacency adj_;
  std::vector<double> btw_;
  std::vector<double> start_cum_;
};

inline std::size_t sample_start_node(const TopicNetwork& net, Engine& g) {
  WalkSampler s(net, std::vector<double>(net.edges.size(), 0.0));
  return s.sample_start(g);
}

// Walk i uses its own engine seeded from (seed, i). Candidates are ranked by
// frequency, ties by the word sequence.
inline LabelResult generate_labels(const TopicNetwork& net, const WalkConfig& config, const std::vector<double>& edge_btw,
                                   const NgramSet* corpus_ngrams = nullptr) {
  config.validate();
  if (corpus_ngrams && corpus_ngrams->length != config.length)
    throw UsageError("n-gram set length does not match the walk length");
  if (config.filter_observed && config.length >= 3 && !corpus_ngrams)
    throw UsageError("filter_observed needs the corpus n-gram set");
  WalkSampler sampler(net, edge_btw);
  std::map<std::vector<WordId>, std::size_t> tally;
  LabelResult out;
  out.attempted = config.n_samples;
  for (std::size_t i = 0; i < config.n_samples; ++i) {
    Engine g(derive_seed(config.seed, i));
    auto path = sampler.walk(config.length, g, config.no_revisit);
    if (!path) continue;
    ++out.completed;
    std::vector<WordId> gram;
    for (auto v : *path) gram.push_back(net.nodes[v]);
    ++tally[gram];
  }
  if (out.completed == 0)
    throw DataError("topic " + std::to_string(net.topic_id) + ": no walk reached length " +
                    std::to_string(config.length) + "; try a shorter label length");
  for (auto& [gram, freq] : tally) {
    LabelCandidate c;
    c.ngram = gram;
    for (auto w : gram) c.words.push_back(net.word(w));
    c.frequency = freq;
    if (corpus_ngrams) c.observed_in_corpus = config.length == 2 ? true : corpus_ngrams->contains(gram);
    out.candidates.push_back(std::move(c));
  }
  std::sort(out.candidates.begin(), out.candidates.end(), [](const LabelCandidate& a, const LabelCandidate& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.words < b.words;
  });
  if (config.filter_observed && config.length >= 3) {
    std::erase_if(out.candidates, [](const LabelCandidate& c) { return !c.observed_in_corpus.value_or(false); });
  }
  return out;
}

inline LabelResult generate_labels(const TopicNetwork& net, const WalkConfig& config,
                                   const NgramSet* corpus_ngrams = nullptr,
                                   PathLength mode = PathLength::inverse_weight) {
  return generate_labels(net, config, edge_betweenness(net, mode), corpus_ngrams);
}

struct TopicLabel {
  int community = 0;
  LabelResult result;
  std::optional<LabelCandidate> top() const {
    if (result.candidates.empty()) return std::nullopt;
    return result.candidates.front();
  }
};

// Labels from the largest community; falls through to the next-largest
// when no walk completes there.
inline TopicLabel topic_label(const TopicNetwork& net, const CommunityPartition& part, const WalkConfig& config,
                              const NgramSet* corpus_ngrams = nullptr, PathLength mode = PathLength::inverse_weight) {
  detail::require(part.community_count() > 0, "partition has no communities");
  for (int c = 1; c <= static_cast<int>(part.community_count()); ++c) {
    const auto sub = subtopic_network(net, part, c);
    try {
      auto res = generate_labels(sub, config, corpus_ngrams, mode);
      if (res.candidates.empty()) {
        spdlog::warn("topic {}: community {} has no observed label candidates, trying the next", net.topic_id, c);
        continue;
      }
      return {c, std::move(res)};
    } catch (const DataError& e) {
      spdlog::warn("topic {}: community {} yields no label ({}), trying the next", net.topic_id, c, e.what());
    }
  }
  throw DataError("topic " + std::to_string(net.topic_id) + ": no community yields a label of length " +
                  std::to_string(config.length));
}

struct LabelRow {
  int topic = 0;
  int community = 0;
  std::size_t rank = 0;
  LabelCandidate candidate;
  bool operator==(const LabelRow&) const = default;
};

inline std::string labels_to_csv(const std::vector<LabelRow>& rows) {
  std::string out = "topic,community,rank,ngram,frequency,observed\n";
  for (const auto& r : rows) {
    std::string gram;
    for (std::size_t i = 0; i < r.candidate.words.size(); ++i) gram += (i ? " " : "") + r.candidate.words[i];
    const auto& obs = r.candidate.observed_in_corpus;
    out += io::csv_line(std::vector<std::string>{std::to_string(r.topic), std::to_string(r.community),
                                                 std::to_string(r.rank), gram, std::to_string(r.candidate.frequency),
                                                 obs ? (*obs ? "true" : "false") : "NA"});
  }
  return out;
}

inline std::vector<LabelRow> labels_from_csv(std::string_view text, const Vocabulary& vocab) {
  auto rows = io::parse_csv(text, "labels");
  detail::require(!rows.empty() && rows[0].fields.size() == 6, "labels CSV needs a 6-column header");
  std::vector<LabelRow> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    const std::string where = "labels:" + std::to_string(rows[r].line);
    detail::require(f.size() == 6, where + ": expected 6 fields");
    LabelRow row{io::parse_int<int>(f[0], where), io::parse_int<int>(f[1], where),
                 io::parse_int<std::size_t>(f[2], where), {}};
    for (const auto& w : io::split(f[3], ' ')) {
      auto id = vocab.find(w);
      detail::require(id.has_value(), where + ": word '" + w + "' not in vocabulary");
      row.candidate.ngram.push_back(*id);
      row.candidate.words.push_back(w);
    }
    row.candidate.frequency = io::parse_int<std::size_t>(f[4], where);
    if (f[5] == "true") row.candidate.observed_in_corpus = true;
    else if (f[5] == "false") row.candidate.observed_in_corpus = false;
    else detail::require(f[5] == "NA", where + ": observed must be true, false or NA");
    out.push_back(std::move(row));
  }
  return out;
}

// Table-style text: one line per row, words joined by arrows.
inline std::string render_label_table(const std::vector<LabelRow>& rows) {
  std::string out;
  for (const auto& r : rows) {
    std::string gram;
    for (std::size_t i = 0; i < r.candidate.words.size(); ++i) gram += (i ? " → " : "") + r.candidate.words[i];
    out += "topic " + std::to_string(r.topic) + "  community " + std::to_string(r.community) + "  #" +
           std::to_string(r.rank) + "  " + gram + "  (" + std::to_string(r.candidate.frequency) + ")\n";
  }
  return out;
}

}  // namespace lda2net
