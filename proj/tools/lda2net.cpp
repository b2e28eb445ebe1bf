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

// lda2net: command-line driver for the topic-network pipeline.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "lda2net/demo.hpp"
#include "lda2net/pipeline.hpp"

namespace {

using lda2net::pipeline::Config;

struct Globals {
  std::string config_file;
  std::string workdir;
  std::vector<std::string> sets;
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;
  bool progress_json = false;
  bool verbose = false;
  bool quiet = false;
};

// Flag values recorded as configuration overrides.
struct Overrides {
  std::vector<std::pair<std::string, std::string>> items;
  std::map<std::string, std::string> scratch;

  CLI::Option* add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    return app->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { items.emplace_back(key, v); }, help);
  }

  CLI::Option* toggle(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    return app->add_flag_callback(flag, [this, key] { items.emplace_back(key, "true"); }, help);
  }
};

void print_partition(lda2net::pipeline::Pipeline& p, int topic) {
  const auto path = p.workdir() / lda2net::pipeline::partition_path(topic);
  if (!std::filesystem::exists(path)) throw lda2net::UsageError("topic " + std::to_string(topic) + " has no partition");
  const auto rows = lda2net::io::parse_csv(lda2net::io::read_file(path), path.string());
  std::map<std::string, std::size_t> sizes;
  for (std::size_t r = 1; r < rows.size(); ++r) ++sizes[rows[r].fields.at(1)];
  std::cout << "topic " << topic << ": " << sizes.size() << " communities\n";
  std::vector<std::pair<std::size_t, std::string>> order;
  for (const auto& [c, n] : sizes) order.emplace_back(n, c);
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : std::stoi(a.second) < std::stoi(b.second);
  });
  for (std::size_t i = 0; i < std::min<std::size_t>(order.size(), 10); ++i)
    std::cout << "  community " << order[i].second << ": " << order[i].first << " words\n";
}

void print_labels(lda2net::pipeline::Pipeline& p, int topic) {
  const auto text = lda2net::io::read_file(p.workdir() / "labels.txt");
  const std::string prefix = "topic " + std::to_string(topic) + " ";
  for (const auto& line : lda2net::io::split(text, '\n'))
    if (line.rfind(prefix, 0) == 0) std::cout << line << '\n';
}

int run(int argc, char** argv) {
  CLI::App app{"lda2net: topic co-occurrence networks from LDA models"};
  app.set_version_flag("--version", LDA2NET_VERSION);
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  Overrides ov;
  app.add_option("-c,--config", g.config_file, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("-w,--workdir", g.workdir, "artifact directory (overrides LDA2NET_WORKDIR and the config)");
  app.add_option("--set", g.sets, "override a configuration key, key=value (repeatable)");
  app.add_option("--threads", g.threads, "worker threads (0: all cores)");
  app.add_option("--seed", g.seed, "master seed");
  app.add_flag("--progress-json", g.progress_json, "print JSON-lines progress events on stdout");
  app.add_flag("-v,--verbose", g.verbose, "debug logging");
  app.add_flag("-q,--quiet", g.quiet, "warnings and errors only");

  auto* pre = app.add_subcommand("preprocess", "tokenize and filter the corpus");
  ov.add(pre, "--corpus", "corpus", "corpus file (.csv or .jsonl)");
  ov.add(pre, "--format", "corpus_format", "csv, jsonl or auto");
  ov.add(pre, "--stopwords", "stopwords", "stopword list");
  ov.add(pre, "--date-cutoff", "date_cutoff", "keep documents dated after YYYY-MM-DD");
  ov.add(pre, "--min-length", "min_token_length", "shortest kept token");
  ov.add(pre, "--min-common-words", "min_common_words", "common words a document needs");

  auto* mat = app.add_subcommand("matrices", "build the vocabulary, U and S");
  ov.add(mat, "--vocab-threshold", "vocab_threshold", "per-million vocabulary threshold");

  auto* train = app.add_subcommand("train-lda", "fit LDA by collapsed Gibbs sampling");
  ov.add(train, "-k,--topics", "topics", "number of topics");
  ov.add(train, "--iterations", "iterations", "Gibbs sweeps");
  ov.add(train, "--burnin", "burnin", "burn-in sweeps");
  ov.add(train, "--alpha", "alpha", "document-topic prior");
  ov.add(train, "--beta", "beta", "topic-word prior");
  ov.add(train, "--chains", "chains", "independent chains");
  ov.add(train, "--resume", "lda_resume", "extra sweeps from the saved sampler state");
  ov.toggle(train, "--average", "average_samples", "average post burn-in samples");

  auto* ingest = app.add_subcommand("ingest-lda", "use externally fitted M and Q");
  ov.add(ingest, "--m", "lda_m", "topic-word matrix (csv or mtx)");
  ov.add(ingest, "--q", "lda_q", "document-topic matrix (csv or mtx)");

  auto* nets = app.add_subcommand("build-networks", "build one weighted bigram network per topic");
  ov.add(nets, "--node-pct", "node_pct", "percent of nodes kept by the filter");
  ov.add(nets, "--edge-pct", "edge_pct", "percent of edges kept by the filter");
  ov.add(nets, "--analysis", "analysis_network", "full or filtered network for later stages");

  auto* met = app.add_subcommand("metrics", "centralities, topic summaries and correlations");
  ov.add(met, "--path-length", "path_length", "1/w, -log w or unweighted");
  ov.add(met, "--correlation", "correlation", "spearman or pearson");
  ov.add(met, "--top-n", "correlation_top_n", "top words by LDA probability (0: all)");

  auto* clu = app.add_subcommand("cluster-topics", "Gaussian mixture clustering of topic summaries");
  ov.add(clu, "--exclude", "exclude", "topic ids to leave out, e.g. 54,106");
  ov.add(clu, "--gmax", "gmax", "largest mixture size");
  ov.add(clu, "--starts", "gmm_starts", "EM restarts");
  ov.add(clu, "--modes", "gmm_modes", "covariance modes");

  auto* com = app.add_subcommand("communities", "walktrap subtopics of every topic network");
  std::optional<int> com_topic;
  com->add_option("--topic", com_topic, "print the partition of this topic");
  ov.add(com, "--steps", "walktrap_steps", "random-walk length");

  auto* lab = app.add_subcommand("labels", "label candidates from random walks");
  std::optional<int> lab_topic;
  lab->add_option("--topic", lab_topic, "print the labels of this topic");
  ov.add(lab, "--length", "label_lengths", "n-gram lengths, e.g. 2,3,4");
  ov.add(lab, "--samples", "label_samples", "walks per run");
  ov.add(lab, "--communities", "label_communities", "communities labelled per topic");
  ov.toggle(lab, "--filter-observed", "filter_observed", "drop 3+-grams never seen in the corpus");
  ov.toggle(lab, "--no-revisit", "no_revisit", "forbid repeated nodes in a walk");

  auto* exp = app.add_subcommand("export", "re-serialize an artifact");
  std::string artifact, format, dest;
  exp->add_option("artifact", artifact, "network:K, summary, S, M, labels, ...")->required();
  exp->add_option("format", format, "graphml, csv, json, mtx, txt or jsonl")->required();
  exp->add_option("dest", dest, "output path")->required();

  auto* all = app.add_subcommand("run-all", "every stage in dependency order");
  ov.add(all, "--corpus", "corpus", "corpus file");
  ov.add(all, "--stopwords", "stopwords", "stopword list");
  ov.add(all, "-k,--topics", "topics", "number of topics");

  auto* demo = app.add_subcommand("demo-corpus", "write a synthetic corpus with planted themes");
  std::string demo_out;
  lda2net::demo::PlantedConfig demo_cfg;
  demo->add_option("out", demo_out, "output CSV path")->required();
  demo->add_option("--docs", demo_cfg.documents, "number of documents");
  demo->add_option("--demo-seed", demo_cfg.seed, "generator seed");
  demo->add_option("--chain-rate", demo_cfg.chain_rate, "chance a fragment carries the theme chain");
  demo->add_option("--secondary-rate", demo_cfg.secondary_rate, "chance a word comes from another theme");

  auto* keys = app.add_subcommand("config-keys", "list configuration keys and defaults");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  auto logger = spdlog::stderr_color_mt("lda2net");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%H:%M:%S] [%^%l%$] %v");
  spdlog::set_level(g.verbose ? spdlog::level::debug : g.quiet ? spdlog::level::warn : spdlog::level::info);

  if (keys->parsed()) {
    for (const auto& k : lda2net::pipeline::config_schema())
      std::cout << k.name << " = " << (k.default_value ? k.default_value : "") << (k.repeatable ? "  [repeatable]" : "")
                << "  # " << k.help << '\n';
    return 0;
  }
  if (demo->parsed()) {
    const auto corpus = lda2net::demo::planted_corpus(demo_cfg);
    lda2net::io::write_file_atomic(demo_out, lda2net::demo::corpus_to_csv(corpus.documents));
    spdlog::info("wrote {} documents to {}", corpus.documents.size(), demo_out);
    return 0;
  }

  Config cfg = g.config_file.empty() ? Config{} : Config::from_file(g.config_file);
  for (const auto& [k, v] : ov.items) cfg.assign(k, v, "command line");
  for (const auto& s : g.sets) cfg.assign_pair(s);
  if (g.threads) cfg.assign("threads", std::to_string(*g.threads), "--threads");
  if (g.seed) cfg.assign("seed", std::to_string(*g.seed), "--seed");

  lda2net::pipeline::ProgressFn progress;
  if (g.progress_json) {
    progress = [](const nlohmann::json& ev) {
      auto j = ev;
      j["time"] = std::chrono::duration<double>(std::chrono::system_clock::now().time_since_epoch()).count();
      std::cout << j.dump() << std::endl;
    };
  }
  lda2net::pipeline::Pipeline p(cfg, progress);
  if (!g.workdir.empty()) p.set_workdir(g.workdir);

  if (all->parsed()) {
    p.run_all();
  } else if (exp->parsed()) {
    p.export_artifact(artifact, format, dest);
  } else {
    for (auto* sub : app.get_subcommands()) {
      p.run_stage(sub->get_name());
      if (sub == com && com_topic && !g.progress_json) print_partition(p, *com_topic);
      if (sub == lab && lab_topic && !g.progress_json) print_labels(p, *lab_topic);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const lda2net::UsageError& e) {
    std::fprintf(stderr, "lda2net: usage error: %s\n", e.what());
    return 1;
  } catch (const lda2net::DataError& e) {
    std::fprintf(stderr, "lda2net: data error: %s\n", e.what());
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "lda2net: data error: %s\n", e.what());
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "lda2net: data error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "lda2net: internal error: %s\n", e.what());
    return 3;
  }
}
