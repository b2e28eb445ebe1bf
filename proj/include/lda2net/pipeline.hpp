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

// Stage orchestration over a working directory of artifact files, with a
// manifest of checksums for every stage's inputs and outputs.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "lda2net/cluster.hpp"
#include "lda2net/community.hpp"
#include "lda2net/corpus.hpp"
#include "lda2net/error.hpp"
#include "lda2net/io.hpp"
#include "lda2net/labeling.hpp"
#include "lda2net/lda.hpp"
#include "lda2net/matrices.hpp"
#include "lda2net/metrics.hpp"
#include "lda2net/network.hpp"
#include "lda2net/parallel.hpp"
#include "lda2net/random.hpp"

#ifndef LDA2NET_VERSION
#define LDA2NET_VERSION "0.0.0"
#endif

namespace lda2net::pipeline {

namespace fs = std::filesystem;

struct ConfigKey {
  const char* name;
  const char* default_value;  // nullptr: unset by default
  bool repeatable;
  const char* help;
};

inline const std::vector<ConfigKey>& config_schema() {
  static const std::vector<ConfigKey> keys{
      {"corpus", nullptr, false, "input corpus (.csv or .jsonl)"},
      {"corpus_format", "auto", false, "csv, jsonl or auto"},
      {"workdir", "lda2net-work", false, "artifact directory (LDA2NET_WORKDIR overrides)"},
      {"stopwords", nullptr, false, "stopword list, one word per line"},
      {"date_cutoff", nullptr, false, "keep documents dated strictly after YYYY-MM-DD"},
      {"undated", "keep", false, "keep or drop undated documents when a cutoff is set"},
      {"min_token_length", "3", false, "shortest kept token (acronyms exempt)"},
      {"keep_acronyms", "true", false, "keep all-caps tokens verbatim"},
      {"strip_numbers", "true", false, "drop numeric and roman-numeral tokens"},
      {"header_pattern", nullptr, true, "regex removed before tokenizing; 'none' disables the defaults"},
      {"break_exception", nullptr, true, "term kept whole despite break punctuation"},
      {"min_common_words", "10", false, "documents need this many common words"},
      {"common_threshold", "1", false, "per-million rate that makes a word common"},
      {"vocab_threshold", "1", false, "per-million rate for vocabulary membership"},
      {"frequency_denominator", "emitted", false, "emitted or raw token count for per-million rates"},
      {"topics", "10", false, "number of LDA topics K"},
      {"alpha", nullptr, false, "document-topic prior (default 50/K)"},
      {"beta", "0.1", false, "topic-word prior"},
      {"iterations", "1000", false, "Gibbs sweeps"},
      {"burnin", "200", false, "sweeps before averaging starts"},
      {"chains", "1", false, "independent chains; the best joint log-likelihood wins"},
      {"average_samples", "false", false, "average M and Q over post burn-in sweeps"},
      {"lda_resume", "0", false, "extra sweeps resumed from lda_state.bin"},
      {"lda_m", nullptr, false, "external topic-word matrix for ingest-lda (csv or mtx)"},
      {"lda_q", nullptr, false, "external document-topic matrix for ingest-lda (csv or mtx)"},
      {"node_pct", "100", false, "percent of heaviest nodes kept by the filter"},
      {"edge_pct", "100", false, "percent of heaviest edges kept by the filter"},
      {"drop_isolated", "true", false, "drop nodes left without edges by the filter"},
      {"analysis_network", "full", false, "full or filtered network for metrics, communities and labels"},
      {"path_length", "1/w", false, "shortest-path length: 1/w, -log w or unweighted"},
      {"pagerank_damping", "0.85", false, "PageRank damping factor"},
      {"walktrap_steps", "4", false, "random-walk length for walktrap"},
      {"community_graphml", "5", false, "GraphML files written for the largest communities"},
      {"correlation", "spearman", false, "spearman or pearson"},
      {"correlation_top_n", "0", false, "restrict correlations to the top-n words by LDA probability (0: all)"},
      {"exclude", nullptr, true, "topic ids left out of clustering (comma list)"},
      {"gmax", "9", false, "largest mixture size tried"},
      {"gmm_modes", "spherical,diagonal,full", false, "covariance modes tried"},
      {"gmm_starts", "10", false, "EM restarts per candidate"},
      {"label_lengths", "2,3,4", false, "n-gram lengths"},
      {"label_samples", "1000", false, "walks per label run"},
      {"label_communities", "1", false, "communities labelled per topic"},
      {"label_top", "5", false, "candidates kept per run"},
      {"filter_observed", "false", false, "drop 3+-grams never seen in the corpus"},
      {"no_revisit", "false", false, "forbid repeated nodes inside a walk"},
      {"seed", "1", false, "master seed"},
      {"threads", "1", false, "worker threads (0: all cores)"},
  };
  return keys;
}

inline const ConfigKey* find_key(std::string_view name) {
  for (const auto& k : config_schema())
    if (name == k.name) return &k;
  return nullptr;
}

// Declarative key = value settings. Later assignments override earlier
// ones; repeatable keys accumulate.
class Config {
 public:
  static Config parse(std::string_view text, const std::string& source = "config") {
    Config c;
    std::size_t line_no = 0;
    for (const auto& raw : io::split(text, '\n')) {
      ++line_no;
      auto line = io::trim(raw);
      if (line.empty() || line.front() == '#') continue;
      auto eq = line.find('=');
      if (eq == std::string_view::npos)
        throw UsageError(source + ":" + std::to_string(line_no) + ": expected 'key = value'");
      c.assign(std::string(io::trim(line.substr(0, eq))), std::string(io::trim(line.substr(eq + 1))),
               source + ":" + std::to_string(line_no));
    }
    return c;
  }

  static Config from_file(const fs::path& path) { return parse(io::read_file(path), path.string()); }

  // key=value from the command line; repeatable keys append.
  void assign(const std::string& key, const std::string& value, const std::string& where = "setting") {
    const auto* k = find_key(key);
    if (!k) throw UsageError(where + ": unknown configuration key '" + key + "'");
    auto& v = values_[key];
    if (!k->repeatable) v.clear();
    v.push_back(value);
  }

  void assign_pair(std::string_view kv) {
    auto eq = kv.find('=');
    if (eq == std::string_view::npos) throw UsageError("--set expects key=value, got '" + std::string(kv) + "'");
    assign(std::string(io::trim(kv.substr(0, eq))), std::string(io::trim(kv.substr(eq + 1))), "--set");
  }

  bool has(const std::string& key) const {
    auto it = values_.find(key);
    return it != values_.end() && !it->second.empty() && !it->second.back().empty();
  }

  std::optional<std::string> get(const std::string& key) const {
    auto it = values_.find(key);
    if (it != values_.end() && !it->second.empty()) return it->second.back();
    const auto* k = find_key(key);
    if (k && k->default_value) return std::string(k->default_value);
    return std::nullopt;
  }

  std::string str(const std::string& key) const {
    auto v = get(key);
    if (!v || v->empty()) throw UsageError("configuration key '" + key + "' is required");
    return *v;
  }

  std::vector<std::string> all(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return {};
    return it->second;
  }

  // Comma-separated items across every assignment of the key.
  std::vector<std::string> list(const std::string& key) const {
    std::vector<std::string> out;
    std::vector<std::string> raw = all(key);
    if (raw.empty())
      if (auto d = get(key)) raw.push_back(*d);
    for (const auto& r : raw)
      for (const auto& part : io::split(r, ','))
        if (auto t = io::trim(part); !t.empty()) out.emplace_back(t);
    return out;
  }

  double number(const std::string& key) const {
    try {
      return io::parse_double(str(key), key);
    } catch (const DataError& e) {
      throw UsageError(e.what());
    }
  }

  template <class Int = long long>
  Int integer(const std::string& key) const {
    try {
      return io::parse_int<Int>(str(key), key);
    } catch (const DataError& e) {
      throw UsageError(e.what());
    }
  }

  bool flag(const std::string& key) const {
    const auto v = str(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw UsageError("configuration key '" + key + "' expects true or false, got '" + v + "'");
  }

  // Effective settings (explicit values and defaults), for the manifest.
  nlohmann::json to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& k : config_schema()) {
      if (k.repeatable) {
        auto v = all(k.name);
        if (!v.empty()) j[k.name] = v;
      } else if (auto v = get(k.name)) {
        j[k.name] = *v;
      }
    }
    return j;
  }

 private:
  std::map<std::string, std::vector<std::string>> values_;
};

inline const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> s{"preprocess",  "matrices",  "train-lda",      "ingest-lda", "build-networks",
                                          "communities", "metrics",   "cluster-topics", "labels"};
  return s;
}

struct StageRecord {
  std::string stage;
  std::map<std::string, std::string> inputs;   // path -> sha256
  std::map<std::string, std::string> outputs;  // workdir-relative path -> sha256
  nlohmann::json parameters;
  double wall_time_s = 0.0;
  nlohmann::json versions;

  nlohmann::json to_json() const {
    return {{"stage", stage},     {"inputs", inputs},           {"outputs", outputs},
            {"parameters", parameters}, {"wall_time_s", wall_time_s}, {"versions", versions}};
  }

  static StageRecord from_json(const nlohmann::json& j) {
    StageRecord r;
    r.stage = j.at("stage").get<std::string>();
    r.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
    r.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
    r.parameters = j.value("parameters", nlohmann::json::object());
    r.wall_time_s = j.value("wall_time_s", 0.0);
    r.versions = j.value("versions", nlohmann::json::object());
    return r;
  }
};

// workdir/manifest.json: the latest record per stage plus the full history.
class RunManifest {
 public:
  static constexpr const char* kFile = "manifest.json";

  static RunManifest load(const fs::path& workdir) {
    RunManifest m;
    const auto path = workdir / kFile;
    if (!fs::exists(path)) return m;
    try {
      auto j = nlohmann::json::parse(io::read_file(path));
      for (const auto& [name, rec] : j.at("stages").items()) m.stages_[name] = StageRecord::from_json(rec);
      for (const auto& rec : j.value("history", nlohmann::json::array())) m.history_.push_back(StageRecord::from_json(rec));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ": unreadable manifest (" + e.what() + ")");
    }
    return m;
  }

  void save(const fs::path& workdir) const {
    nlohmann::json j;
    j["stages"] = nlohmann::json::object();
    for (const auto& [name, rec] : stages_) j["stages"][name] = rec.to_json();
    j["history"] = nlohmann::json::array();
    for (const auto& rec : history_) j["history"].push_back(rec.to_json());
    io::write_file_atomic(workdir / kFile, j.dump(2) + "\n");
  }

  // A stage rerun replaces its record; a producer of the same artifacts
  // (train-lda vs ingest-lda) loses ownership of them.
  void record(const StageRecord& r) {
    for (auto it = stages_.begin(); it != stages_.end();) {
      bool overlaps = it->first == r.stage;
      for (const auto& [path, sha] : r.outputs) overlaps = overlaps || it->second.outputs.count(path);
      if (overlaps && it->first != r.stage) {
        for (const auto& [path, sha] : r.outputs) it->second.outputs.erase(path);
        ++it;
      } else if (it->first == r.stage) {
        it = stages_.erase(it);
      } else {
        ++it;
      }
    }
    stages_[r.stage] = r;
    history_.push_back(r);
  }

  struct Producer {
    std::string stage;
    std::string sha256;
  };

  std::optional<Producer> producer_of(const std::string& rel) const {
    for (const auto& [name, rec] : stages_) {
      auto it = rec.outputs.find(rel);
      if (it != rec.outputs.end()) return Producer{name, it->second};
    }
    return std::nullopt;
  }

  const StageRecord* stage(const std::string& name) const {
    auto it = stages_.find(name);
    return it == stages_.end() ? nullptr : &it->second;
  }

  const std::vector<StageRecord>& history() const { return history_; }

 private:
  std::map<std::string, StageRecord> stages_;
  std::vector<StageRecord> history_;
};

// Stage that writes a workdir-relative artifact, for error messages.
inline std::string producing_stage(const std::string& rel) {
  if (rel == "tokens.jsonl" || rel == "preprocess.json") return "preprocess";
  if (rel == "vocab.txt" || rel == "U.mtx" || rel == "bigrams.tsv" || rel == "S.mtx") return "matrices";
  if (rel == "M.mtx" || rel == "Q.mtx") return "train-lda (or ingest-lda)";
  if (rel == "lda_state.bin" || rel == "lda.json") return "train-lda";
  if (rel.rfind("networks/", 0) == 0 || rel == "C.mtx") return "build-networks";
  if (rel.rfind("communities/", 0) == 0 || rel.rfind("modularity", 0) == 0) return "communities";
  if (rel.rfind("metrics/", 0) == 0 || rel.rfind("topic_summary", 0) == 0) return "metrics";
  if (rel == "clusters.csv" || rel == "bic.csv" || rel == "scatter.csv") return "cluster-topics";
  if (rel.rfind("labels", 0) == 0) return "labels";
  return "an earlier stage";
}

inline std::string network_path(int topic, bool filtered) {
  return std::string(filtered ? "networks/filtered/topic_" : "networks/topic_") + std::to_string(topic) + ".graphml";
}

inline std::string partition_path(int topic) { return "communities/topic_" + std::to_string(topic) + ".csv"; }

using ProgressFn = std::function<void(const nlohmann::json&)>;

class Pipeline {
 public:
  explicit Pipeline(Config config, ProgressFn progress = {}) : cfg_(std::move(config)), progress_(std::move(progress)) {
    if (const char* env = std::getenv("LDA2NET_WORKDIR"); env && *env && !workdir_from_cli_) workdir_ = env;
    else workdir_ = cfg_.str("workdir");
  }

  // The command line wins over the environment variable.
  void set_workdir(const fs::path& p) {
    workdir_ = p;
    workdir_from_cli_ = true;
  }

  const fs::path& workdir() const { return workdir_; }
  const Config& config() const { return cfg_; }

  StageRecord run_stage(const std::string& stage) {
    if (std::find(stage_names().begin(), stage_names().end(), stage) == stage_names().end())
      throw UsageError("unknown stage '" + stage + "'");
    fs::create_directories(workdir_);
    manifest_ = RunManifest::load(workdir_);
    rec_ = StageRecord{};
    rec_.stage = stage;
    rec_.parameters = cfg_.to_json();
    rec_.versions = {{"lda2net", LDA2NET_VERSION}, {"manifest", 1}};
    emit({{"event", "stage_start"}, {"stage", stage}});
    spdlog::info("stage {}: starting", stage);
    const auto t0 = std::chrono::steady_clock::now();
    if (stage == "preprocess") preprocess();
    else if (stage == "matrices") matrices();
    else if (stage == "train-lda") train_lda();
    else if (stage == "ingest-lda") ingest_lda();
    else if (stage == "build-networks") build_networks();
    else if (stage == "communities") communities();
    else if (stage == "metrics") metrics();
    else if (stage == "cluster-topics") cluster_topics();
    else if (stage == "labels") labels();
    rec_.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest_.record(rec_);
    manifest_.save(workdir_);
    emit({{"event", "stage_done"}, {"stage", stage}, {"wall_time_s", rec_.wall_time_s}, {"outputs", rec_.outputs.size()}});
    spdlog::info("stage {}: done in {:.2f}s ({} outputs)", stage, rec_.wall_time_s, rec_.outputs.size());
    return rec_;
  }

  std::vector<StageRecord> run_all() {
    std::vector<std::string> order{"preprocess", "matrices", cfg_.has("lda_m") ? "ingest-lda" : "train-lda",
                                   "build-networks", "communities", "metrics", "cluster-topics", "labels"};
    std::vector<StageRecord> out;
    for (const auto& s : order) out.push_back(run_stage(s));
    return out;
  }

  // Re-serializes a workdir artifact into `dest` in the requested format.
  void export_artifact(const std::string& artifact, const std::string& format, const fs::path& dest) {
    manifest_ = RunManifest::load(workdir_);
    rec_ = StageRecord{};
    auto [name, arg] = split_artifact(artifact);
    auto bad_format = [&]() -> UsageError {
      return UsageError("artifact '" + name + "' cannot be exported as '" + format + "'");
    };
    std::string content;
    if (name == "network") {
      const int k = topic_arg(arg);
      auto net = graphml::read(input(network_path(k, false)), vocab());
      if (format == "graphml") content = graphml::write(net);
      else if (format == "csv") content = edges_to_csv(net);
      else throw bad_format();
    } else if (name == "filtered-network") {
      const int k = topic_arg(arg);
      auto net = graphml::read(input(network_path(k, true)), vocab());
      if (format == "graphml") content = graphml::write(net);
      else if (format == "csv") content = edges_to_csv(net);
      else throw bad_format();
    } else if (name == "S" || name == "U") {
      if (format != "mtx") throw bad_format();
      content = SparseCountMatrix::from_matrix_market(input(name + ".mtx"), name).to_matrix_market();
    } else if (name == "M" || name == "Q" || name == "C") {
      auto m = DenseMatrix::from_matrix_market(input(name + ".mtx"), name);
      if (format == "mtx") content = m.to_matrix_market();
      else if (format == "csv") content = m.to_csv();
      else throw bad_format();
    } else if (name == "summary") {
      auto rows = summaries_from_csv(input("topic_summary.csv"));
      if (format == "csv") content = summaries_to_csv(rows);
      else if (format == "json") content = summaries_to_json(rows);
      else throw bad_format();
    } else if (name == "nodes") {
      const int k = topic_arg(arg);
      if (format != "csv") throw bad_format();
      content = input("metrics/topic_" + std::to_string(k) + "_nodes.csv");
    } else if (name == "communities") {
      const int k = topic_arg(arg);
      if (format != "csv") throw bad_format();
      content = input(partition_path(k));
    } else if (name == "vocab") {
      if (format != "txt") throw bad_format();
      content = Vocabulary::parse(input("vocab.txt")).serialize();
    } else if (name == "tokens") {
      if (format != "jsonl") throw bad_format();
      content = serialize_tokenized(parse_tokenized(input("tokens.jsonl")));
    } else if (name == "clusters" || name == "bic" || name == "modularity" || name == "labels" ||
               name == "correlations") {
      static const std::map<std::string, std::string> files{{"clusters", "clusters.csv"},
                                                            {"bic", "bic.csv"},
                                                            {"modularity", "modularity.csv"},
                                                            {"labels", "labels.csv"},
                                                            {"correlations", "metrics/correlations.csv"}};
      if (format == "csv") content = input(files.at(name));
      else if (format == "txt" && name == "labels") content = input("labels.txt");
      else throw bad_format();
    } else {
      throw UsageError("unknown artifact '" + artifact +
                       "' (network:K, filtered-network:K, S, U, M, Q, C, summary, nodes:K, communities:K, vocab, "
                       "tokens, clusters, bic, modularity, labels, correlations)");
    }
    io::write_file_atomic(dest, content);
    spdlog::info("exported {} as {} to {}", artifact, format, dest.string());
  }

 private:
  Config cfg_;
  ProgressFn progress_;
  fs::path workdir_;
  bool workdir_from_cli_ = false;
  RunManifest manifest_;
  StageRecord rec_;
  std::shared_ptr<const Vocabulary> vocab_;

  void emit(nlohmann::json j) const {
    if (progress_) progress_(j);
  }

  unsigned threads() const { return cfg_.integer<unsigned>("threads"); }
  std::uint64_t seed() const { return cfg_.integer<std::uint64_t>("seed"); }

  static std::pair<std::string, std::string> split_artifact(const std::string& a) {
    auto c = a.find(':');
    if (c == std::string::npos) return {a, ""};
    return {a.substr(0, c), a.substr(c + 1)};
  }

  static int topic_arg(const std::string& arg) {
    if (arg.empty()) throw UsageError("artifact needs a topic, e.g. network:3");
    try {
      return io::parse_int<int>(arg, "topic");
    } catch (const DataError& e) {
      throw UsageError(e.what());
    }
  }

  // Reads a workdir artifact after checking it against the manifest.
  std::string input(const std::string& rel) {
    const auto path = workdir_ / rel;
    if (!fs::exists(path))
      throw DataError("missing artifact '" + rel + "' in " + workdir_.string() + "; run `" + producing_stage(rel) +
                      "` first");
    auto content = io::read_file(path);
    const auto sha = io::sha256_hex(content);
    auto prod = manifest_.producer_of(rel);
    if (!prod)
      throw DataError("artifact '" + rel + "' is not recorded in the manifest; rerun `" + producing_stage(rel) + "`");
    if (prod->sha256 != sha)
      throw DataError("checksum mismatch for '" + rel + "': it changed after `" + prod->stage +
                      "` wrote it; rerun `" + prod->stage + "`");
    rec_.inputs[rel] = sha;
    return content;
  }

  // Reads a file outside the workdir (corpus, stopwords, external matrices).
  std::string external(const std::string& key) {
    const fs::path path = cfg_.str(key);
    if (!fs::exists(path)) throw DataError(key + " file not found: " + path.string());
    auto content = io::read_file(path);
    rec_.inputs[path.string()] = io::sha256_hex(content);
    return content;
  }

  void output(const std::string& rel, std::string_view content) {
    io::write_file_atomic(workdir_ / rel, content);
    rec_.outputs[rel] = io::sha256_hex(content);
  }

  std::shared_ptr<const Vocabulary> vocab() {
    if (!vocab_) vocab_ = std::make_shared<const Vocabulary>(Vocabulary::parse(input("vocab.txt"), "vocab.txt"));
    else input("vocab.txt");
    return vocab_;
  }

  FrequencyDenominator denominator() const {
    const auto v = cfg_.str("frequency_denominator");
    if (v == "emitted") return FrequencyDenominator::emitted_tokens;
    if (v == "raw") return FrequencyDenominator::raw_tokens;
    throw UsageError("frequency_denominator must be emitted or raw");
  }

  bool filtered_analysis() const {
    const auto v = cfg_.str("analysis_network");
    if (v == "full") return false;
    if (v == "filtered") return true;
    throw UsageError("analysis_network must be full or filtered");
  }

  std::size_t topic_count() {
    auto M = DenseMatrix::from_matrix_market(input("M.mtx"), "M.mtx");
    return M.rows();
  }

  std::vector<TopicNetwork> analysis_networks() {
    const std::size_t K = topic_count();
    const bool filtered = filtered_analysis();
    auto v = vocab();
    std::vector<TopicNetwork> nets;
    for (std::size_t k = 1; k <= K; ++k) nets.push_back(graphml::read(input(network_path(static_cast<int>(k), filtered)), v));
    return nets;
  }

  void preprocess() {
    const auto fmt = parse_corpus_format(cfg_.str("corpus_format"));
    const fs::path corpus_path = cfg_.str("corpus");
    auto load = parse_corpus(external("corpus"), fmt == CorpusFormat::automatic
                                                      ? (corpus_path.extension() == ".jsonl" ||
                                                                 corpus_path.extension() == ".json"
                                                             ? CorpusFormat::jsonl
                                                             : CorpusFormat::csv)
                                                      : fmt,
                             corpus_path.string());
    nlohmann::json report{{"loaded", load.documents.size()}, {"skipped_empty", load.skipped_empty}};
    auto docs = std::move(load.documents);
    if (cfg_.has("date_cutoff")) {
      auto cutoff = parse_date(cfg_.str("date_cutoff"));
      if (!cutoff) throw UsageError("date_cutoff must be YYYY-MM-DD");
      const auto pol = cfg_.str("undated");
      if (pol != "keep" && pol != "drop") throw UsageError("undated must be keep or drop");
      auto r = filter_by_date(docs, *cutoff, pol == "keep" ? UndatedPolicy::keep : UndatedPolicy::drop);
      report["dropped_before_cutoff"] = r.dropped_before_cutoff;
      report["dropped_undated"] = r.dropped_undated;
      report["unparseable_dates"] = r.unparseable_ids.size();
      docs = std::move(r.documents);
    }
    StopwordList stop;
    if (cfg_.has("stopwords")) {
      stop = StopwordList::from_text(external("stopwords"));
      if (stop.empty()) throw DataError("stopword list " + cfg_.str("stopwords") + " is empty");
    } else {
      spdlog::warn("no stopword list configured; only length and number rules apply");
    }
    PreprocessOptions opt;
    opt.min_token_length = cfg_.integer<std::size_t>("min_token_length");
    opt.keep_acronyms = cfg_.flag("keep_acronyms");
    opt.strip_numbers = cfg_.flag("strip_numbers");
    if (auto pats = cfg_.all("header_pattern"); !pats.empty()) {
      opt.header_strip_patterns.clear();
      for (const auto& p : pats)
        if (p != "none") opt.header_strip_patterns.push_back(p);
    }
    opt.break_exceptions = cfg_.all("break_exception");
    const Tokenizer tok(stop, opt);
    std::vector<TokenizedDocument> out(docs.size());
    parallel_for(docs.size(), threads(), [&](std::size_t i) { out[i] = tok(docs[i]); });
    const auto freqs = count_frequencies(out, denominator());
    auto kept = filter_documents(out, freqs, cfg_.integer<std::size_t>("min_common_words"),
                                 cfg_.number("common_threshold"));
    report["tokenized"] = out.size();
    report["dropped_few_common_words"] = out.size() - kept.size();
    report["kept"] = kept.size();
    if (kept.empty()) throw DataError("no documents left after preprocessing");
    spdlog::info("preprocess: {} documents kept of {}", kept.size(), out.size());
    output("tokens.jsonl", serialize_tokenized(kept));
    output("preprocess.json", report.dump(2) + "\n");
  }

  void matrices() {
    const auto docs = parse_tokenized(input("tokens.jsonl"), "tokens.jsonl");
    const auto vocab = build_vocabulary(docs, cfg_.number("vocab_threshold"), denominator());
    const auto U = build_doc_word_matrix(docs, vocab);
    const auto bm = build_bigram_doc_matrix(docs, vocab);
    spdlog::info("matrices: {} documents, {} words, {} bigrams", U.rows(), vocab.size(), bm.bigrams.size());
    if (bm.bigrams.size() == 0) throw DataError("corpus has no in-vocabulary bigrams");
    output("vocab.txt", vocab.serialize());
    output("U.mtx", U.to_matrix_market());
    output("bigrams.tsv", bm.bigrams.serialize(vocab));
    output("S.mtx", bm.S.to_matrix_market());
  }

  GibbsConfig gibbs_config() const {
    GibbsConfig g;
    g.topics = cfg_.integer<std::size_t>("topics");
    if (cfg_.has("alpha")) g.alpha = cfg_.number("alpha");
    g.beta = cfg_.number("beta");
    g.n_iterations = cfg_.integer<std::size_t>("iterations");
    g.n_burnin = cfg_.integer<std::size_t>("burnin");
    g.seed = seed();
    g.average_samples = cfg_.flag("average_samples");
    g.validate();
    return g;
  }

  void write_model(const TopicModel& m) {
    output("M.mtx", m.M.to_matrix_market());
    output("Q.mtx", m.Q.to_matrix_market());
  }

  void train_lda() {
    const auto U = SparseCountMatrix::from_matrix_market(input("U.mtx"), "U.mtx");
    const auto extra = cfg_.integer<std::size_t>("lda_resume");
    nlohmann::json report;
    if (extra > 0) {
      auto res = resume_lda(input("lda_state.bin"), U, extra);
      report = {{"resumed_iterations", extra}};
      write_model(res.model);
      output("lda_state.bin", res.state);
    } else {
      const auto g = gibbs_config();
      auto res = train_lda_chains(U, g, cfg_.integer<std::size_t>("chains"), threads());
      report = {{"topics", g.topics},
                {"alpha", g.alpha_value()},
                {"beta", g.beta},
                {"iterations", g.n_iterations},
                {"burnin", g.n_burnin},
                {"best_chain", res.best_chain},
                {"log_likelihoods", res.log_likelihoods}};
      write_model(res.model);
      output("lda_state.bin", res.best_state);
    }
    output("lda.json", report.dump(2) + "\n");
  }

  void ingest_lda() {
    const auto U = SparseCountMatrix::from_matrix_market(input("U.mtx"), "U.mtx");
    auto model = ingest_topic_model_text(external("lda_m"), external("lda_q"), *vocab(), U.rows());
    write_model(model);
  }

  void build_networks() {
    auto v = vocab();
    const auto M = DenseMatrix::from_matrix_market(input("M.mtx"), "M.mtx");
    const auto Q = DenseMatrix::from_matrix_market(input("Q.mtx"), "Q.mtx");
    const auto S = SparseCountMatrix::from_matrix_market(input("S.mtx"), "S.mtx");
    const auto bigrams = BigramVocabulary::parse(input("bigrams.tsv"), *v);
    detail::require(M.cols() == v->size(), "M.mtx columns do not match the vocabulary");
    detail::require(S.rows() == bigrams.size(), "S.mtx rows do not match bigrams.tsv");
    const auto C = compute_counts_weights(S, Q, threads());
    auto nets = build_all_networks(C, M, bigrams, v, threads());
    output("C.mtx", C.values.to_matrix_market());
    FilterOptions fo;
    fo.node_fraction = cfg_.number("node_pct") / 100.0;
    fo.edge_fraction = cfg_.number("edge_pct") / 100.0;
    fo.drop_isolated = cfg_.flag("drop_isolated");
    if (!(fo.node_fraction > 0.0 && fo.node_fraction <= 1.0 && fo.edge_fraction > 0.0 && fo.edge_fraction <= 1.0))
      throw UsageError("node_pct and edge_pct must be in (0, 100]");
    const bool write_filtered = filtered_analysis() || fo.node_fraction < 1.0 || fo.edge_fraction < 1.0;
    std::string top = "topic,rank,source,target,weight\n";
    for (const auto& net : nets) {
      output(network_path(net.topic_id, false), graphml::write(net));
      if (write_filtered) output(network_path(net.topic_id, true), graphml::write(filter_network(net, fo)));
      const auto edges = top_edges(net, 10);
      for (std::size_t r = 0; r < edges.size(); ++r)
        top += io::csv_line(std::vector<std::string>{std::to_string(net.topic_id), std::to_string(r + 1),
                                                     v->word(edges[r].source), v->word(edges[r].target),
                                                     io::format_double(edges[r].weight)});
    }
    output("networks/top_edges.csv", top);
  }

  void communities() {
    const auto nets = analysis_networks();
    const int steps = cfg_.integer<int>("walktrap_steps");
    std::vector<CommunityPartition> parts(nets.size());
    parallel_for(nets.size(), threads(), [&](std::size_t k) { parts[k] = walktrap(nets[k], steps); });
    const auto keep = cfg_.integer<std::size_t>("community_graphml");
    for (std::size_t k = 0; k < nets.size(); ++k) {
      output(partition_path(nets[k].topic_id), partition_to_csv(parts[k], *nets[k].vocab));
      for (std::size_t c = 1; c <= std::min(keep, parts[k].community_count()); ++c) {
        if (parts[k].sizes[c - 1] < 2) break;
        output("communities/topic_" + std::to_string(nets[k].topic_id) + "_c" + std::to_string(c) + ".graphml",
               graphml::write(subtopic_network(nets[k], parts[k], static_cast<int>(c))));
      }
    }
    const auto report = modularity_report(parts);
    output("modularity.csv", modularity_table_csv(report));
    output("modularity_histogram.csv", modularity_histogram_csv(report));
  }

  void metrics() {
    const auto nets = analysis_networks();
    auto v = vocab();
    const auto M = DenseMatrix::from_matrix_market(input("M.mtx"), "M.mtx");
    const auto Q = DenseMatrix::from_matrix_market(input("Q.mtx"), "Q.mtx");
    const auto C = TopicCountsMatrix{DenseMatrix::from_matrix_market(input("C.mtx"), "C.mtx")};
    const auto bigrams = BigramVocabulary::parse(input("bigrams.tsv"), *v);
    std::map<int, double> modularity_of;
    {
      auto rows = io::parse_csv(input("modularity.csv"), "modularity.csv");
      for (std::size_t r = 1; r < rows.size(); ++r)
        modularity_of[io::parse_int<int>(rows[r].fields.at(0))] = io::parse_double(rows[r].fields.at(1));
    }
    const auto mode = parse_path_length(cfg_.str("path_length"));
    PageRankOptions pr;
    pr.damping = cfg_.number("pagerank_damping");
    std::vector<NodeMetrics> nm(nets.size());
    std::vector<TopicSummary> summaries(nets.size());
    parallel_for(nets.size(), threads(), [&](std::size_t k) {
      const int t = nets[k].topic_id;
      nm[k] = compute_node_metrics(nets[k], mode, pr);
      const auto counts = C.distribution(t);
      const auto probs = compute_probs_weights(t, M, bigrams);
      summaries[k] = topic_summary(t, Q, nets[k], counts, probs, modularity_of.at(t));
    });
    const auto method = cfg_.str("correlation") == "pearson" ? CorrelationMethod::pearson : CorrelationMethod::spearman;
    if (auto c = cfg_.str("correlation"); c != "pearson" && c != "spearman")
      throw UsageError("correlation must be spearman or pearson");
    const auto top_n = cfg_.integer<std::size_t>("correlation_top_n");
    std::vector<CorrelationMatrix> per_topic;
    std::string long_csv = "topic,metric_a,metric_b,value\n";
    for (std::size_t k = 0; k < nets.size(); ++k) {
      output("metrics/topic_" + std::to_string(nets[k].topic_id) + "_nodes.csv", node_metrics_to_csv(nm[k], *v));
      const auto table = MetricTable::from_node_metrics(nm[k]);
      const std::size_t rows = top_n ? std::min(top_n, table.lda_probability.size()) : table.lda_probability.size();
      if (rows < 3) {
        spdlog::warn("topic {}: fewer than 3 nodes, correlations skipped", nets[k].topic_id);
        continue;
      }
      per_topic.push_back(correlation_matrix(table, method, top_n ? std::optional<std::size_t>(top_n) : std::nullopt));
      const auto& cm = per_topic.back();
      for (std::size_t i = 0; i < cm.names.size(); ++i)
        for (std::size_t j = i + 1; j < cm.names.size(); ++j)
          long_csv += std::to_string(nets[k].topic_id) + ',' + cm.names[i] + ',' + cm.names[j] + ',' +
                      (cm.at(i, j) ? io::format_double(*cm.at(i, j)) : "NA") + '\n';
    }
    if (!per_topic.empty()) output("metrics/correlations.csv", correlations_to_csv(average_correlations(per_topic)));
    output("metrics/correlations_per_topic.csv", long_csv);
    output("topic_summary.csv", summaries_to_csv(summaries));
    output("topic_summary.json", summaries_to_json(summaries));
  }

  void cluster_topics() {
    const auto summaries = summaries_from_csv(input("topic_summary.csv"));
    std::vector<int> exclude;
    for (const auto& s : cfg_.list("exclude")) exclude.push_back(io::parse_int<int>(s, "exclude"));
    std::size_t remaining = 0;
    for (const auto& s : summaries) remaining += std::find(exclude.begin(), exclude.end(), s.topic_id) == exclude.end();
    if (remaining < 3) {
      spdlog::warn("cluster-topics: only {} topics after exclusions, at least 3 needed; writing empty tables", remaining);
      output("clusters.csv", "topic_id,component,tag\n");
      output("bic.csv", "components,mode,bic,log_likelihood\n");
      output("scatter.csv", "topic_id,mean,variance,jsd,barrat_cc,component\n");
      return;
    }
    const auto features = build_features(summaries, exclude);
    GmmOptions opt;
    opt.g_max = cfg_.integer<std::size_t>("gmax");
    if (opt.g_max >= features.rows()) {
      spdlog::warn("cluster-topics: gmax {} lowered to {} (must be below the {} topics)", opt.g_max,
                   features.rows() - 1, features.rows());
      opt.g_max = features.rows() - 1;
    }
    opt.modes.clear();
    for (const auto& m : cfg_.list("gmm_modes")) opt.modes.push_back(parse_covariance_mode(m));
    opt.n_starts = cfg_.integer<std::size_t>("gmm_starts");
    opt.seed = derive_seed(seed(), 2);
    opt.threads = threads();
    const auto res = fit_gmm(features, opt);
    const auto tags = label_clusters(res.best, features);
    spdlog::info("cluster-topics: {} components ({}), BIC {:.3f}", res.best.n_components, to_string(res.best.mode),
                 res.best.bic);
    output("clusters.csv", assignments_to_csv(features, res.best, tags));
    output("bic.csv", bic_table_csv(res.table));
    output("scatter.csv", scatter_csv(features, res.best));
  }

  void labels() {
    const auto nets = analysis_networks();
    auto v = vocab();
    const auto docs = parse_tokenized(input("tokens.jsonl"), "tokens.jsonl");
    std::vector<std::size_t> lengths;
    for (const auto& s : cfg_.list("label_lengths")) lengths.push_back(io::parse_int<std::size_t>(s, "label_lengths"));
    if (lengths.empty()) throw UsageError("label_lengths is empty");
    std::map<std::size_t, NgramSet> grams;
    for (auto l : lengths) grams[l] = build_ngram_set(docs, *v, l);
    const auto mode = parse_path_length(cfg_.str("path_length"));
    const auto n_comm = cfg_.integer<std::size_t>("label_communities");
    const auto top = cfg_.integer<std::size_t>("label_top");
    const std::uint64_t master = derive_seed(seed(), 3);

    std::vector<std::vector<LabelRow>> per_topic(nets.size());
    std::vector<CommunityPartition> parts;
    for (const auto& net : nets) parts.push_back(partition_from_csv(input(partition_path(net.topic_id)), net));
    parallel_for(nets.size(), threads(), [&](std::size_t k) {
      const auto& net = nets[k];
      for (auto l : lengths) {
        WalkConfig wc;
        wc.length = l;
        wc.n_samples = cfg_.integer<std::size_t>("label_samples");
        wc.filter_observed = cfg_.flag("filter_observed");
        wc.no_revisit = cfg_.flag("no_revisit");
        auto add = [&](int community, const LabelResult& res) {
          for (std::size_t r = 0; r < std::min(top, res.candidates.size()); ++r)
            per_topic[k].push_back({net.topic_id, community, r + 1, res.candidates[r]});
        };
        wc.seed = derive_seed(master, (static_cast<std::uint64_t>(net.topic_id) << 16) | (l << 8));
        int chosen = 0;
        try {
          auto tl = topic_label(net, parts[k], wc, &grams.at(l), mode);
          chosen = tl.community;
          add(tl.community, tl.result);
        } catch (const DataError& e) {
          spdlog::warn("topic {}: no label of length {} ({})", net.topic_id, l, e.what());
        }
        for (int c = 1; c <= static_cast<int>(std::min(n_comm, parts[k].community_count())); ++c) {
          if (c == chosen) continue;
          wc.seed = derive_seed(master, (static_cast<std::uint64_t>(net.topic_id) << 16) | (l << 8) |
                                            static_cast<std::uint64_t>(c));
          try {
            add(c, generate_labels(subtopic_network(net, parts[k], c), wc, &grams.at(l), mode));
          } catch (const DataError& e) {
            spdlog::warn("topic {} community {}: no label of length {} ({})", net.topic_id, c, l, e.what());
          }
        }
      }
    });
    std::vector<LabelRow> rows;
    for (auto& t : per_topic) {
      std::stable_sort(t.begin(), t.end(), [](const LabelRow& a, const LabelRow& b) {
        if (a.community != b.community) return a.community < b.community;
        return a.candidate.words.size() < b.candidate.words.size();
      });
      rows.insert(rows.end(), t.begin(), t.end());
    }
    output("labels.csv", labels_to_csv(rows));
    output("labels.txt", render_label_table(rows));
  }
};

}  // namespace lda2net::pipeline
