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

// Word and bigram vocabularies plus the sparse count matrices U
// (documents x words) and S (bigrams x documents).

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lda2net/corpus.hpp"
#include "lda2net/error.hpp"
#include "lda2net/io.hpp"

namespace lda2net {

using WordId = std::uint32_t;

class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> words) : words_(std::move(words)) {
    index_.reserve(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (!index_.emplace(words_[i], static_cast<WordId>(i)).second) {
        throw DataError("duplicate vocabulary entry '" + words_[i] + "'");
      }
    }
  }

  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }
  const std::string& word(WordId i) const { return words_.at(i); }
  const std::vector<std::string>& words() const { return words_; }

  std::optional<WordId> find(const std::string& w) const {
    auto it = index_.find(w);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool operator==(const Vocabulary& o) const { return words_ == o.words_; }

  std::string serialize() const {
    std::string out;
    for (const auto& w : words_) {
      out += w;
      out.push_back('\n');
    }
    return out;
  }

  static Vocabulary parse(std::string_view text, const std::string& source = "vocabulary") {
    std::vector<std::string> words;
    auto lines = io::split(text, '\n');
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (lines[i].empty()) throw DataError(source + ":" + std::to_string(i + 1) + ": empty vocabulary entry");
      words.push_back(std::move(lines[i]));
    }
    return Vocabulary(std::move(words));
  }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, WordId> index_;
};

using BigramId = std::uint32_t;

// An ordered word pair: (first, second) and (second, first) are distinct.
struct Bigram {
  WordId first = 0;
  WordId second = 0;
  auto operator<=>(const Bigram&) const = default;
};

inline std::uint64_t bigram_key(Bigram b) { return (std::uint64_t{b.first} << 32) | b.second; }

class BigramVocabulary {
 public:
  BigramVocabulary() = default;
  explicit BigramVocabulary(std::vector<Bigram> bigrams) : bigrams_(std::move(bigrams)) {
    index_.reserve(bigrams_.size());
    for (std::size_t i = 0; i < bigrams_.size(); ++i) {
      if (!index_.emplace(bigram_key(bigrams_[i]), static_cast<BigramId>(i)).second) {
        throw DataError("duplicate bigram entry");
      }
    }
  }

  std::size_t size() const { return bigrams_.size(); }
  const Bigram& operator[](BigramId b) const { return bigrams_[b]; }
  const std::vector<Bigram>& bigrams() const { return bigrams_; }

  std::optional<BigramId> find(Bigram b) const {
    auto it = index_.find(bigram_key(b));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool operator==(const BigramVocabulary& o) const { return bigrams_ == o.bigrams_; }

  // One tab-separated word pair per line; line number = bigram index.
  std::string serialize(const Vocabulary& vocab) const {
    std::string out;
    for (const auto& b : bigrams_) {
      out += vocab.word(b.first);
      out.push_back('\t');
      out += vocab.word(b.second);
      out.push_back('\n');
    }
    return out;
  }

  static BigramVocabulary parse(std::string_view text, const Vocabulary& vocab,
                                const std::string& source = "bigrams") {
    std::vector<Bigram> out;
    auto lines = io::split(text, '\n');
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    for (std::size_t i = 0; i < lines.size(); ++i) {
      auto parts = io::split(lines[i], '\t');
      const std::string where = source + ":" + std::to_string(i + 1);
      if (parts.size() != 2) throw DataError(where + ": expected 'word<TAB>word'");
      auto a = vocab.find(parts[0]);
      auto b = vocab.find(parts[1]);
      if (!a || !b) throw DataError(where + ": bigram word not in vocabulary");
      out.push_back({*a, *b});
    }
    return BigramVocabulary(std::move(out));
  }

 private:
  std::vector<Bigram> bigrams_;
  std::unordered_map<std::uint64_t, BigramId> index_;
};

struct Triplet {
  std::uint32_t row = 0;
  std::uint32_t col = 0;
  std::uint32_t count = 0;
  bool operator==(const Triplet&) const = default;
};

// Integer count matrix in sorted triplet form. Entries are unique per
// (row, col), strictly positive, and ordered by (row, col).
class SparseCountMatrix {
 public:
  SparseCountMatrix() = default;
  SparseCountMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

  // Sums duplicates, drops zeros, sorts.
  static SparseCountMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> t) {
    for (const auto& e : t) {
      if (e.row >= rows || e.col >= cols) throw DataError("matrix entry index out of range");
    }
    std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
      return std::tie(a.row, a.col) < std::tie(b.row, b.col);
    });
    SparseCountMatrix m(rows, cols);
    for (const auto& e : t) {
      if (e.count == 0) continue;
      if (!m.entries_.empty() && m.entries_.back().row == e.row && m.entries_.back().col == e.col) {
        m.entries_.back().count += e.count;
      } else {
        m.entries_.push_back(e);
      }
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return entries_.size(); }
  std::span<const Triplet> entries() const { return entries_; }
  bool operator==(const SparseCountMatrix&) const = default;

  std::uint64_t total() const {
    std::uint64_t s = 0;
    for (const auto& e : entries_) s += e.count;
    return s;
  }

  std::vector<std::uint64_t> row_sums() const {
    std::vector<std::uint64_t> s(rows_, 0);
    for (const auto& e : entries_) s[e.row] += e.count;
    return s;
  }

  std::vector<std::uint64_t> col_sums() const {
    std::vector<std::uint64_t> s(cols_, 0);
    for (const auto& e : entries_) s[e.col] += e.count;
    return s;
  }

  // First entry of each row (size rows+1), valid because entries are sorted.
  std::vector<std::size_t> row_offsets() const {
    std::vector<std::size_t> off(rows_ + 1, 0);
    for (const auto& e : entries_) ++off[e.row + 1];
    for (std::size_t r = 0; r < rows_; ++r) off[r + 1] += off[r];
    return off;
  }

  // Entry indices ordered by (col, row): the column-major view.
  std::vector<std::size_t> column_major_order() const {
    std::vector<std::size_t> idx(entries_.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return entries_[a].col < entries_[b].col; });
    return idx;
  }

  std::uint32_t at(std::size_t r, std::size_t c) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair{r, c},
                               [](const Triplet& e, const std::pair<std::size_t, std::size_t>& k) {
                                 return std::pair<std::size_t, std::size_t>{e.row, e.col} < k;
                               });
    if (it != entries_.end() && it->row == r && it->col == c) return it->count;
    return 0;
  }

  // Matrix Market coordinate format, integer field, 1-based indices.
  std::string to_matrix_market() const {
    std::string out = "%%MatrixMarket matrix coordinate integer general\n";
    out += std::to_string(rows_) + ' ' + std::to_string(cols_) + ' ' + std::to_string(entries_.size()) + '\n';
    for (const auto& e : entries_) {
      out += std::to_string(e.row + 1) + ' ' + std::to_string(e.col + 1) + ' ' + std::to_string(e.count) + '\n';
    }
    return out;
  }

  static SparseCountMatrix from_matrix_market(std::string_view text, const std::string& source = "matrix") {
    auto lines = io::split(text, '\n');
    std::size_t i = 0;
    if (lines.empty() || lines[0].rfind("%%MatrixMarket", 0) != 0) {
      throw DataError(source + ": missing %%MatrixMarket banner");
    }
    if (lines[0].find("coordinate") == std::string::npos || lines[0].find("integer") == std::string::npos) {
      throw DataError(source + ": expected a coordinate integer matrix");
    }
    ++i;
    while (i < lines.size() && (lines[i].empty() || lines[i][0] == '%')) ++i;
    if (i >= lines.size()) throw DataError(source + ": missing size line");
    auto size = io::split(io::trim(lines[i]), ' ');
    if (size.size() != 3) throw DataError(source + ":" + std::to_string(i + 1) + ": bad size line");
    const auto rows = io::parse_int<std::size_t>(size[0], source);
    const auto cols = io::parse_int<std::size_t>(size[1], source);
    const auto nnz = io::parse_int<std::size_t>(size[2], source);
    ++i;
    std::vector<Triplet> t;
    t.reserve(nnz);
    for (; i < lines.size(); ++i) {
      auto line = io::trim(lines[i]);
      if (line.empty() || line[0] == '%') continue;
      auto f = io::split(line, ' ');
      const std::string where = source + ":" + std::to_string(i + 1);
      if (f.size() != 3) throw DataError(where + ": expected 'row col value'");
      auto r = io::parse_int<std::size_t>(f[0], where);
      auto c = io::parse_int<std::size_t>(f[1], where);
      auto v = io::parse_int<std::uint32_t>(f[2], where);
      if (r < 1 || r > rows || c < 1 || c > cols) throw DataError(where + ": index out of range");
      if (v == 0) throw DataError(where + ": zero count stored explicitly");
      t.push_back({static_cast<std::uint32_t>(r - 1), static_cast<std::uint32_t>(c - 1), v});
    }
    if (t.size() != nnz) throw DataError(source + ": entry count does not match header");
    auto m = from_triplets(rows, cols, t);
    if (m.nnz() != nnz) throw DataError(source + ": duplicate entries");
    return m;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Triplet> entries_;
};

// Words whose corpus frequency is at least `per_million_threshold` per
// million tokens, ordered by descending frequency, ties lexicographic.
inline Vocabulary build_vocabulary(const std::vector<TokenizedDocument>& docs, double per_million_threshold = 1.0,
                                   FrequencyDenominator denominator = FrequencyDenominator::emitted_tokens) {
  detail::require(!docs.empty(), "cannot build a vocabulary from an empty corpus");
  const auto freqs = count_frequencies(docs, denominator);
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (const auto& [w, c] : freqs.counts)
    if (freqs.is_common(c, per_million_threshold)) kept.emplace_back(w, c);
  if (kept.empty()) {
    throw DataError("vocabulary is empty after applying the per-million threshold " +
                    io::format_double(per_million_threshold) + "; lower the threshold");
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> words;
  words.reserve(kept.size());
  for (auto& [w, c] : kept) words.push_back(std::move(w));
  return Vocabulary(std::move(words));
}

inline SparseCountMatrix build_doc_word_matrix(const std::vector<TokenizedDocument>& docs, const Vocabulary& vocab) {
  std::vector<Triplet> t;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    std::map<WordId, std::uint32_t> row;
    for (const auto& seg : docs[d].segments)
      for (const auto& tok : seg)
        if (auto id = vocab.find(tok)) ++row[*id];
    for (auto [w, c] : row) t.push_back({static_cast<std::uint32_t>(d), w, c});
  }
  return SparseCountMatrix::from_triplets(docs.size(), vocab.size(), std::move(t));
}

// Adjacent in-vocabulary pairs within each segment, aggregated per document
// and ordered by (first, second). An out-of-vocabulary token breaks adjacency.
inline std::vector<std::pair<Bigram, std::uint32_t>> extract_bigrams(const TokenizedDocument& doc,
                                                                     const Vocabulary& vocab) {
  std::map<Bigram, std::uint32_t> counts;
  for (const auto& seg : doc.segments) {
    std::optional<WordId> prev;
    for (const auto& tok : seg) {
      auto cur = vocab.find(tok);
      if (prev && cur) ++counts[Bigram{*prev, *cur}];
      prev = cur;
    }
  }
  return {counts.begin(), counts.end()};
}

struct BigramMatrices {
  BigramVocabulary bigrams;
  SparseCountMatrix S;  // bigrams x documents
};

inline BigramMatrices build_bigram_doc_matrix(const std::vector<TokenizedDocument>& docs, const Vocabulary& vocab) {
  std::vector<std::vector<std::pair<Bigram, std::uint32_t>>> per_doc(docs.size());
  std::vector<Bigram> all;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    per_doc[d] = extract_bigrams(docs[d], vocab);
    for (const auto& [b, c] : per_doc[d]) all.push_back(b);
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  BigramVocabulary bv(std::move(all));
  std::vector<Triplet> t;
  for (std::size_t d = 0; d < docs.size(); ++d)
    for (const auto& [b, c] : per_doc[d]) t.push_back({*bv.find(b), static_cast<std::uint32_t>(d), c});
  auto S = SparseCountMatrix::from_triplets(bv.size(), docs.size(), std::move(t));
  return {std::move(bv), std::move(S)};
}

}  // namespace lda2net
