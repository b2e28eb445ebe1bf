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

// Corpus ingestion and preprocessing: loading raw abstracts, date filtering,
// tokenization into punctuation-delimited segments and the "common words"
// document filter.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>
#include <spdlog/spdlog.h>
#include <unicode/normalizer2.h>
#include <unicode/locid.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "lda2net/error.hpp"
#include "lda2net/io.hpp"

namespace lda2net {

struct RawDocument {
  std::string id;
  std::string text;
  std::string date;  // raw value, empty when absent
};

struct TokenizedDocument {
  std::string id;
  std::vector<std::vector<std::string>> segments;
  // Word tokens seen before stopword/length/number removal.
  std::size_t raw_token_count = 0;

  std::size_t token_count() const {
    std::size_t n = 0;
    for (const auto& s : segments) n += s.size();
    return n;
  }
  bool operator==(const TokenizedDocument&) const = default;
};

enum class CorpusFormat { csv, jsonl, automatic };

inline CorpusFormat parse_corpus_format(std::string_view s) {
  if (s == "csv") return CorpusFormat::csv;
  if (s == "jsonl" || s == "json-lines" || s == "ndjson") return CorpusFormat::jsonl;
  if (s == "auto" || s.empty()) return CorpusFormat::automatic;
  throw UsageError("unknown corpus format '" + std::string(s) + "' (expected csv, jsonl or auto)");
}

struct CorpusLoad {
  std::vector<RawDocument> documents;
  std::size_t skipped_empty = 0;
};

namespace detail {

inline bool blank(std::string_view s) { return io::trim(s).empty(); }

inline void add_document(CorpusLoad& out, std::unordered_set<std::string>& seen, RawDocument doc,
                         const std::string& where) {
  if (doc.id.empty()) throw DataError(where + ": missing document id");
  if (!seen.insert(doc.id).second) throw DataError(where + ": duplicate document id '" + doc.id + "'");
  if (blank(doc.text)) {
    ++out.skipped_empty;
    return;
  }
  out.documents.push_back(std::move(doc));
}

}  // namespace detail

inline CorpusLoad parse_corpus(std::string_view text, CorpusFormat format, const std::string& source = "corpus") {
  if (format == CorpusFormat::automatic) {
    auto first = io::trim(text.substr(0, text.find('\n')));
    format = (!first.empty() && first.front() == '{') ? CorpusFormat::jsonl : CorpusFormat::csv;
  }
  CorpusLoad out;
  std::unordered_set<std::string> seen;
  if (format == CorpusFormat::jsonl) {
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      ++line_no;
      auto line = io::trim(text.substr(start, end - start));
      start = end + 1;
      if (!line.empty()) {
        const std::string where = source + ":" + std::to_string(line_no);
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
          throw DataError(where + ": malformed JSON row: " + e.what());
        }
        if (!j.is_object() || !j.contains("id") || !j.contains("text")) {
          throw DataError(where + ": row must be an object with 'id' and 'text'");
        }
        RawDocument doc;
        const auto& id = j["id"];
        if (id.is_string()) doc.id = id.get<std::string>();
        else if (id.is_number_integer()) doc.id = std::to_string(id.get<long long>());
        else throw DataError(where + ": 'id' must be a string or integer");
        if (!j["text"].is_string()) throw DataError(where + ": 'text' must be a string");
        doc.text = j["text"].get<std::string>();
        if (j.contains("date") && !j["date"].is_null()) {
          if (!j["date"].is_string()) throw DataError(where + ": 'date' must be a string");
          doc.date = j["date"].get<std::string>();
        }
        detail::add_document(out, seen, std::move(doc), where);
      }
      if (end == text.size()) break;
    }
    return out;
  }

  auto rows = io::parse_csv(text, source);
  if (rows.empty()) throw DataError(source + ": empty corpus file");
  const auto& header = rows.front().fields;
  std::optional<std::size_t> id_col, text_col, date_col;
  for (std::size_t i = 0; i < header.size(); ++i) {
    auto name = io::trim(header[i]);
    if (name == "id") id_col = i;
    else if (name == "text") text_col = i;
    else if (name == "date") date_col = i;
  }
  if (!id_col || !text_col) throw DataError(source + ":1: header must contain 'id' and 'text' columns");
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = source + ":" + std::to_string(row.line);
    if (row.fields.size() != header.size()) {
      throw DataError(where + ": malformed row: expected " + std::to_string(header.size()) + " fields, got " +
                      std::to_string(row.fields.size()));
    }
    RawDocument doc{std::string(io::trim(row.fields[*id_col])), row.fields[*text_col],
                    date_col ? std::string(io::trim(row.fields[*date_col])) : std::string{}};
    detail::add_document(out, seen, std::move(doc), where);
  }
  return out;
}

inline CorpusLoad load_corpus(const std::filesystem::path& path, CorpusFormat format = CorpusFormat::automatic) {
  if (format == CorpusFormat::automatic) {
    auto ext = path.extension().string();
    if (ext == ".jsonl" || ext == ".ndjson") format = CorpusFormat::jsonl;
    else if (ext == ".csv") format = CorpusFormat::csv;
  }
  return parse_corpus(io::read_file(path), format, path.string());
}

// Accepts YYYY-MM-DD, optionally followed by a time part ("T..." or " ...").
inline std::optional<std::chrono::year_month_day> parse_date(std::string_view s) {
  s = io::trim(s);
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  if (s.size() > 10 && s[10] != 'T' && s[10] != ' ') return std::nullopt;
  try {
    int y = io::parse_int<int>(s.substr(0, 4));
    unsigned m = io::parse_int<unsigned>(s.substr(5, 2));
    unsigned d = io::parse_int<unsigned>(s.substr(8, 2));
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) return std::nullopt;
    return ymd;
  } catch (const DataError&) {
    return std::nullopt;
  }
}

enum class UndatedPolicy { keep, drop };

struct DateFilterResult {
  std::vector<RawDocument> documents;
  std::size_t dropped_before_cutoff = 0;
  std::size_t dropped_undated = 0;
  std::vector<std::string> unparseable_ids;
};

// Keeps documents dated strictly after the cutoff.
inline DateFilterResult filter_by_date(const std::vector<RawDocument>& docs, std::chrono::year_month_day cutoff,
                                       UndatedPolicy undated = UndatedPolicy::drop) {
  detail::require_arg(cutoff.ok(), "invalid cutoff date");
  DateFilterResult out;
  const auto cutoff_days = std::chrono::sys_days{cutoff};
  for (const auto& doc : docs) {
    if (detail::blank(doc.date)) {
      if (undated == UndatedPolicy::keep) out.documents.push_back(doc);
      else ++out.dropped_undated;
      continue;
    }
    auto date = parse_date(doc.date);
    if (!date) {
      spdlog::warn("document '{}': unparseable date '{}', dropped", doc.id, doc.date);
      out.unparseable_ids.push_back(doc.id);
      continue;
    }
    if (std::chrono::sys_days{*date} > cutoff_days) out.documents.push_back(doc);
    else ++out.dropped_before_cutoff;
  }
  return out;
}

class StopwordList {
 public:
  StopwordList() = default;
  explicit StopwordList(const std::vector<std::string>& words) {
    for (const auto& w : words) add(w);
  }

  static StopwordList from_text(std::string_view text) {
    StopwordList list;
    for (const auto& line : io::split(text, '\n')) {
      auto w = io::trim(line);
      if (!w.empty() && w.front() != '#') list.add(std::string(w));
    }
    return list;
  }

  static StopwordList from_file(const std::filesystem::path& path) {
    auto list = from_text(io::read_file(path));
    if (list.empty()) throw DataError("stopword list " + path.string() + " is empty");
    return list;
  }

  void add(const std::string& w) { words_.insert(fold(w)); }
  bool contains(const std::string& token) const { return words_.count(fold(token)) > 0; }
  bool empty() const { return words_.empty(); }
  std::size_t size() const { return words_.size(); }

  static std::string fold(const std::string& s) {
    auto u = icu::UnicodeString::fromUTF8(s);
    u.foldCase();
    std::string out;
    u.toUTF8String(out);
    return out;
  }

 private:
  std::unordered_set<std::string> words_;
};

inline std::vector<std::string> default_header_patterns() {
  return {
      // "BACKGROUND:", "KEY RESULTS:" anywhere in the text
      R"(\b[A-Z]{3,}(?:[ \t]+[A-Z]{3,})*[ \t]*:)",
      // a run of two or more uppercase words opening the abstract
      R"(^[ \t]*[A-Z]{2,}(?:[ \t]+[A-Z]{2,})+\b)",
  };
}

struct PreprocessOptions {
  std::size_t min_token_length = 3;
  bool keep_acronyms = true;
  bool strip_numbers = true;
  std::vector<std::string> header_strip_patterns = default_header_patterns();
  // Terms kept whole even though they contain break punctuation, e.g. "SARS-CoV-2".
  std::vector<std::string> break_exceptions;
};

namespace detail {

inline bool is_apostrophe(UChar32 c) { return c == 0x27 || c == 0x2019 || c == 0x02BC; }

inline bool is_quote(UChar32 c) {
  return c == 0x22 || c == 0x60 || c == 0x2018 || c == 0x201C || c == 0x201D || c == 0x201E || c == 0xAB ||
         c == 0xBB || c == 0x2039 || c == 0x203A;
}

inline bool is_word_char(UChar32 c) { return u_isalnum(c) || u_hasBinaryProperty(c, UCHAR_ALPHABETIC); }

inline bool is_acronym(const icu::UnicodeString& token) {
  int32_t letters = 0;
  for (int32_t i = 0; i < token.length();) {
    UChar32 c = token.char32At(i);
    i += U16_LENGTH(c);
    if (u_hasBinaryProperty(c, UCHAR_ALPHABETIC)) {
      if (!u_hasBinaryProperty(c, UCHAR_UPPERCASE)) return false;
      ++letters;
    }
  }
  return letters > 0 && token.countChar32() >= 2;
}

inline bool is_number(const icu::UnicodeString& token) {
  for (int32_t i = 0; i < token.length();) {
    UChar32 c = token.char32At(i);
    i += U16_LENGTH(c);
    if (!u_isdigit(c) && c != '.' && c != ',' && c != '%') return false;
  }
  return true;
}

inline bool is_roman_numeral(const icu::UnicodeString& token) {
  if (token.isEmpty()) return false;
  for (int32_t i = 0; i < token.length(); ++i) {
    switch (token.charAt(i)) {
      case 'i': case 'v': case 'x': case 'I': case 'V': case 'X': break;
      default: return false;
    }
  }
  return true;
}

inline icu::UnicodeString nfc(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
  auto src = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  auto out = norm->normalize(src, status);
  if (U_FAILURE(status)) throw DataError("unicode normalization failed");
  return out;
}

inline std::string utf8(const icu::UnicodeString& s) {
  std::string out;
  s.toUTF8String(out);
  return out;
}


inline std::vector<std::regex> compile_patterns(const std::vector<std::string>& patterns) {
  std::vector<std::regex> out;
  out.reserve(patterns.size());
  for (const auto& p : patterns) {
    try {
      out.emplace_back(p, std::regex::ECMAScript);
    } catch (const std::regex_error& e) {
      throw UsageError("invalid header strip pattern '" + p + "': " + e.what());
    }
  }
  return out;
}

}  // namespace detail

// Deterministic tokenizer. Break punctuation (anything that is not a letter,
// digit, whitespace, apostrophe or quotation mark) closes the current
// segment; removed material (headers, numbers, stopwords, short tokens) does
// not.
class Tokenizer {
 public:
  Tokenizer(StopwordList stopwords, PreprocessOptions options)
      : stopwords_(std::move(stopwords)),
        options_(std::move(options)),
        patterns_(detail::compile_patterns(options_.header_strip_patterns)) {
    for (const auto& term : options_.break_exceptions) {
      auto u = detail::nfc(term);
      u.foldCase();
      if (!u.isEmpty()) exceptions_.push_back(u);
    }
  }

  const PreprocessOptions& options() const { return options_; }

  TokenizedDocument operator()(const RawDocument& doc) const {
    TokenizedDocument out;
    out.id = doc.id;

    std::string text = detail::utf8(detail::nfc(doc.text));
    for (const auto& re : patterns_) text = std::regex_replace(text, re, " ");
    const icu::UnicodeString u = icu::UnicodeString::fromUTF8(text);

    std::vector<UChar32> cps;
    cps.reserve(static_cast<std::size_t>(u.length()));
    for (int32_t i = 0; i < u.length();) {
      UChar32 c = u.char32At(i);
      cps.push_back(c);
      i += U16_LENGTH(c);
    }
    const std::vector<std::size_t> protected_end = protected_spans(cps);

    std::vector<std::string> segment;
    bool segment_has_words = false;
    auto close_segment = [&] {
      if (segment_has_words) out.segments.push_back(std::move(segment));
      segment.clear();
      segment_has_words = false;
    };

    const std::size_t n = cps.size();
    std::size_t i = 0;
    while (i < n) {
      if (protected_end[i] > i) {
        icu::UnicodeString tok;
        for (std::size_t k = i; k < protected_end[i]; ++k) tok.append(cps[k]);
        i = protected_end[i];
        segment_has_words = true;
        emit(tok, segment, out.raw_token_count);
        continue;
      }
      const UChar32 c = cps[i];
      if (detail::is_word_char(c)) {
        icu::UnicodeString tok;
        std::size_t j = i;
        while (j < n) {
          const UChar32 cj = cps[j];
          if (detail::is_word_char(cj)) {
            tok.append(cj);
            ++j;
          } else if (detail::is_apostrophe(cj) && j + 1 < n && detail::is_word_char(cps[j + 1]) && j > i) {
            tok.append(cj);
            ++j;
          } else if (options_.strip_numbers && (cj == '.' || cj == ',') && j > i && u_isdigit(cps[j - 1]) &&
                     j + 1 < n && u_isdigit(cps[j + 1]) && all_digits(tok)) {
            // decimal or thousands separator inside a number
            tok.append(cj);
            ++j;
          } else if (options_.strip_numbers && cj == '%' && all_digits(tok)) {
            tok.append(cj);
            ++j;
          } else {
            break;
          }
        }
        i = j;
        segment_has_words = true;
        emit(tok, segment, out.raw_token_count);
        continue;
      }
      if (!u_isUWhiteSpace(c) && !detail::is_quote(c) && !detail::is_apostrophe(c)) close_segment();
      ++i;
    }
    close_segment();
    return out;
  }

 private:
  static bool all_digits(const icu::UnicodeString& tok) {
    return !tok.isEmpty() && detail::is_number(tok);
  }

  void emit(const icu::UnicodeString& tok, std::vector<std::string>& segment, std::size_t& raw_count) const {
    ++raw_count;
    if (options_.strip_numbers && (detail::is_number(tok) || detail::is_roman_numeral(tok))) return;
    const std::string raw = detail::utf8(tok);
    if (stopwords_.contains(raw)) return;
    if (options_.keep_acronyms && detail::is_acronym(tok)) {
      segment.push_back(raw);
      return;
    }
    if (static_cast<std::size_t>(tok.countChar32()) < options_.min_token_length) return;
    icu::UnicodeString lower(tok);
    lower.toLower(icu::Locale::getRoot());
    segment.push_back(detail::utf8(lower));
  }

  // protected_end[i] > i marks an exception term starting at i.
  std::vector<std::size_t> protected_spans(const std::vector<UChar32>& cps) const {
    std::vector<std::size_t> end(cps.size(), 0);
    if (exceptions_.empty()) return end;
    for (std::size_t i = 0; i < cps.size(); ++i) {
      if (i > 0 && detail::is_word_char(cps[i - 1])) continue;
      for (const auto& term : exceptions_) {
        icu::UnicodeString candidate;
        std::size_t j = i;
        while (j < cps.size() && candidate.length() < term.length()) candidate.append(cps[j++]);
        candidate.foldCase();
        if (candidate != term) continue;
        if (j < cps.size() && detail::is_word_char(cps[j])) continue;
        end[i] = std::max(end[i], j);
      }
    }
    return end;
  }

  StopwordList stopwords_;
  PreprocessOptions options_;
  std::vector<std::regex> patterns_;
  std::vector<icu::UnicodeString> exceptions_;
};

inline TokenizedDocument tokenize(const RawDocument& doc, const StopwordList& stopwords,
                                  const PreprocessOptions& options = {}) {
  return Tokenizer(stopwords, options)(doc);
}

enum class FrequencyDenominator { emitted_tokens, raw_tokens };

struct WordFrequencies {
  std::unordered_map<std::string, std::uint64_t> counts;
  std::uint64_t total = 0;  // denominator for the per-million rule

  // True when `count` meets the "at least `rate` per million tokens" rule.
  bool is_common(std::uint64_t count, double per_million) const {
    return static_cast<double>(count) * 1e6 >= per_million * static_cast<double>(total);
  }
  bool is_common(const std::string& word, double per_million) const {
    auto it = counts.find(word);
    return it != counts.end() && is_common(it->second, per_million);
  }
};

inline WordFrequencies count_frequencies(const std::vector<TokenizedDocument>& docs,
                                         FrequencyDenominator denominator = FrequencyDenominator::emitted_tokens) {
  WordFrequencies f;
  std::uint64_t emitted = 0, raw = 0;
  for (const auto& d : docs) {
    raw += d.raw_token_count;
    for (const auto& seg : d.segments)
      for (const auto& t : seg) {
        ++f.counts[t];
        ++emitted;
      }
  }
  f.total = denominator == FrequencyDenominator::emitted_tokens ? emitted : raw;
  return f;
}

// Drops documents with fewer than `min_common_words` tokens whose corpus
// frequency meets the per-million threshold.
inline std::vector<TokenizedDocument> filter_documents(const std::vector<TokenizedDocument>& docs,
                                                       const WordFrequencies& freqs,
                                                       std::size_t min_common_words = 10,
                                                       double per_million_threshold = 1.0) {
  std::vector<TokenizedDocument> out;
  for (const auto& d : docs) {
    std::size_t common = 0;
    for (const auto& seg : d.segments)
      for (const auto& t : seg)
        if (freqs.is_common(t, per_million_threshold)) ++common;
    if (common >= min_common_words) out.push_back(d);
  }
  return out;
}

// Tokenized corpus interchange: one JSON object per line,
// {"id": ..., "raw_tokens": n, "segments": [[...], ...]}.
inline std::string serialize_tokenized(const std::vector<TokenizedDocument>& docs) {
  std::string out;
  for (const auto& d : docs) {
    nlohmann::json j;
    j["id"] = d.id;
    j["raw_tokens"] = d.raw_token_count;
    j["segments"] = d.segments;
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

inline std::vector<TokenizedDocument> parse_tokenized(std::string_view text, const std::string& source = "tokens") {
  std::vector<TokenizedDocument> docs;
  std::size_t line_no = 0;
  for (const auto& line : io::split(text, '\n')) {
    ++line_no;
    if (io::trim(line).empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      TokenizedDocument d;
      d.id = j.at("id").get<std::string>();
      d.raw_token_count = j.value("raw_tokens", std::size_t{0});
      d.segments = j.at("segments").get<std::vector<std::vector<std::string>>>();
      docs.push_back(std::move(d));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return docs;
}

}  // namespace lda2net
