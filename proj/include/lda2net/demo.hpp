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

// Synthetic corpus with planted themes, for demos and recovery tests.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "lda2net/corpus.hpp"
#include "lda2net/io.hpp"
#include "lda2net/random.hpp"

namespace lda2net::demo {

struct PlantedConfig {
  std::size_t documents = 500;
  std::size_t fragments_per_document = 14;
  double chain_rate = 0.1;        // chance a fragment carries the theme's chain
  double secondary_rate = 0.15;   // chance a content word comes from another theme
  double shared_rate = 0.08;      // chance a content word is a shared word
  double stopword_rate = 0.4;
  std::uint64_t seed = 7;
};

struct PlantedCorpus {
  std::vector<RawDocument> documents;
  std::vector<std::vector<std::string>> themes;  // theme vocabularies (chain words included)
  std::vector<std::vector<std::string>> chains;  // one planted word chain per theme
  std::vector<int> dominant;                      // dominant theme per document
};

inline const std::vector<std::vector<std::string>>& theme_words() {
  static const std::vector<std::vector<std::string>> w{
      {"ocean", "tide", "salinity", "plankton", "current", "shoreline", "marine", "fishery", "estuary", "lagoon",
       "sediment", "whale", "algae", "trench", "kelp", "mangrove", "seabed", "harbor", "plume", "dune"},
      {"neural", "training", "compiler", "kernel", "cache", "processor", "tensor", "dataset", "latency", "bandwidth",
       "memory", "benchmark", "runtime", "parser", "algorithm", "thread", "scheduler", "pipeline", "vector", "sparse"},
      {"inflation", "interest", "market", "wage", "credit", "bond", "tariff", "deficit", "budget", "pension",
       "equity", "labour", "export", "currency", "lending", "austerity", "recession", "treasury", "monetary", "fiscal"}};
  return w;
}

inline const std::vector<std::vector<std::string>>& theme_chains() {
  static const std::vector<std::vector<std::string>> c{
      {"coral", "reef", "bleaching"}, {"gradient", "descent", "optimizer"}, {"central", "bank", "policy"}};
  return c;
}

inline const std::vector<std::string>& shared_words() {
  static const std::vector<std::string> s{"study", "results", "analysis", "evidence", "report", "data"};
  return s;
}

inline const std::vector<std::string>& filler_stopwords() {
  static const std::vector<std::string> s{"the", "of", "and", "in", "with", "for", "on", "is", "a"};
  return s;
}

inline PlantedCorpus planted_corpus(const PlantedConfig& cfg = {}) {
  const auto& words = theme_words();
  const auto& chains = theme_chains();
  const std::size_t T = words.size();
  PlantedCorpus out;
  out.chains = chains;
  for (std::size_t t = 0; t < T; ++t) {
    auto v = words[t];
    v.insert(v.end(), chains[t].begin(), chains[t].end());
    out.themes.push_back(std::move(v));
  }
  Engine g(cfg.seed);
  auto pick = [&](const std::vector<std::string>& from) -> const std::string& { return from[uniform_index(g, from.size())]; };
  for (std::size_t d = 0; d < cfg.documents; ++d) {
    const std::size_t t = d % T;
    std::string text;
    for (std::size_t f = 0; f < cfg.fragments_per_document; ++f) {
      if (f > 0) text += uniform01(g) < 0.5 ? ", " : ". ";
      if (uniform01(g) < cfg.chain_rate) {
        // the chain sits inside a fragment, between ordinary theme words
        text += pick(out.themes[t]) + " ";
        for (std::size_t i = 0; i < chains[t].size(); ++i) text += (i ? " " : "") + chains[t][i];
        text += " " + pick(out.themes[t]);
        continue;
      }
      const std::size_t n = 1 + uniform_index(g, 3);
      for (std::size_t i = 0; i < n; ++i) {
        if (i > 0 || uniform01(g) < 0.5) {
          if (uniform01(g) < cfg.stopword_rate) text += (text.empty() || text.back() == ' ' ? "" : " ") + pick(filler_stopwords()) + " ";
        }
        if (!text.empty() && text.back() != ' ') text += ' ';
        const double u = uniform01(g);
        if (u < cfg.shared_rate) text += pick(shared_words());
        else if (u < cfg.shared_rate + cfg.secondary_rate) text += pick(out.themes[(t + 1 + uniform_index(g, T - 1)) % T]);
        else text += pick(out.themes[t]);
      }
    }
    text += '.';
    const int day = 1 + static_cast<int>(d % 28), month = 1 + static_cast<int>((d / 28) % 12);
    char date[16];
    std::snprintf(date, sizeof date, "2021-%02d-%02d", month, day);
    out.documents.push_back({"doc" + std::to_string(d + 1), std::move(text), date});
    out.dominant.push_back(static_cast<int>(t));
  }
  return out;
}

inline std::string corpus_to_csv(const std::vector<RawDocument>& docs) {
  std::string out = "id,text,date\n";
  for (const auto& d : docs) out += io::csv_line(std::vector<std::string>{d.id, d.text, d.date});
  return out;
}

}  // namespace lda2net::demo
