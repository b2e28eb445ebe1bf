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


#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>

#include "lda2net/cluster.hpp"
#include "lda2net/community.hpp"
#include "lda2net/io.hpp"
#include "lda2net/labeling.hpp"
#include "lda2net/metrics.hpp"
#include "lda2net/network.hpp"

using namespace lda2net;
namespace fs = std::filesystem;

namespace {

const std::string kCli = LDA2NET_CLI;
const std::string kStopwords = std::string(LDA2NET_SOURCE_DIR) + "/data/stopwords_en.txt";

fs::path scratch() {
  static const fs::path root = [] {
    auto p = fs::temp_directory_path() / ("lda2net_pipeline_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

struct Run {
  int code;
  std::string err;
};

Run cli(const std::string& args) {
  const auto errfile = scratch() / "stderr.txt";
  const std::string cmd = kCli + " -q " + args + " >/dev/null 2>" + errfile.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, io::read_file(errfile)};
}

fs::path demo_corpus(std::size_t docs) {
  auto path = scratch() / ("demo_" + std::to_string(docs) + ".csv");
  if (!fs::exists(path)) {
    EXPECT_EQ(cli("demo-corpus " + path.string() + " --docs " + std::to_string(docs)).code, 0);
  }
  return path;
}

std::map<std::string, std::string> checksums(const fs::path& work) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(work)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), work).string();
    if (rel == "manifest.json") continue;
    out[rel] = io::sha256_file(e.path());
  }
  return out;
}

// Shared 500-document, 8-topic run.
const fs::path& full_run() {
  static const fs::path work = [] {
    auto w = scratch() / "full";
    const auto r = cli("-w " + w.string() + " run-all --corpus " + demo_corpus(500).string() + " --stopwords " +
                       kStopwords + " -k 8 --set iterations=300 --set burnin=100");
    EXPECT_EQ(r.code, 0) << r.err;
    return w;
  }();
  return work;
}

struct Cleanup : ::testing::Environment {
  void TearDown() override { fs::remove_all(scratch()); }
};
const auto* const cleanup = ::testing::AddGlobalTestEnvironment(new Cleanup);

}  // namespace

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli("config-keys").code, 0);
  EXPECT_EQ(cli("--no-such-flag preprocess").code, 1);
  EXPECT_EQ(cli("").code, 1);
  const auto w = scratch() / "codes";
  EXPECT_EQ(cli("-w " + w.string() + " --set no_such_key=1 preprocess").code, 1);
  auto missing = cli("-w " + w.string() + " preprocess --corpus " + (scratch() / "absent.csv").string());
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.err.find("absent.csv"), std::string::npos) << missing.err;
}

TEST(Cli, MissingStageIsNamed) {
  const auto w = scratch() / "missing";
  ASSERT_EQ(cli("-w " + w.string() + " preprocess --corpus " + demo_corpus(120).string() + " --stopwords " +
                kStopwords).code,
            0);
  auto r = cli("-w " + w.string() + " build-networks");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("matrices"), std::string::npos) << r.err;
  ASSERT_EQ(cli("-w " + w.string() + " matrices").code, 0);
  EXPECT_EQ(cli("-w " + w.string() + " train-lda --topics 0").code, 1);
  r = cli("-w " + w.string() + " build-networks");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("train-lda"), std::string::npos) << r.err;
}

TEST(Cli, TamperedArtifactRefused) {
  const auto w = scratch() / "tamper";
  ASSERT_EQ(cli("-w " + w.string() + " preprocess --corpus " + demo_corpus(120).string() + " --stopwords " +
                kStopwords).code,
            0);
  ASSERT_EQ(cli("-w " + w.string() + " matrices").code, 0);
  ASSERT_EQ(cli("-w " + w.string() + " train-lda -k 2 --iterations 20 --burnin 5").code, 0);
  auto text = io::read_file(w / "S.mtx");
  text[text.size() / 2] = text[text.size() / 2] == '1' ? '2' : '1';
  { std::ofstream(w / "S.mtx", std::ios::binary) << text; }
  auto r = cli("-w " + w.string() + " build-networks");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("checksum mismatch"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(w / "networks"));
}

TEST(Cli, RerunIsDeterministic) {
  const auto corpus = demo_corpus(120);
  std::map<std::string, std::string> sums[2];
  for (int i = 0; i < 2; ++i) {
    const auto w = scratch() / ("rerun_" + std::to_string(i));
    const auto r = cli("-w " + w.string() + " --seed 11 run-all --corpus " + corpus.string() + " --stopwords " +
                       kStopwords + " -k 3 --set iterations=100 --set burnin=20 --set label_samples=200");
    ASSERT_EQ(r.code, 0) << r.err;
    sums[i] = checksums(w);
  }
  EXPECT_GT(sums[0].size(), 20u);
  EXPECT_EQ(sums[0], sums[1]);
}

TEST(Cli, WorkdirFromEnvironment) {
  const auto w = scratch() / "env";
  const std::string cmd = "LDA2NET_WORKDIR=" + w.string() + " " + kCli + " -q preprocess --corpus " +
                          demo_corpus(120).string() + " --stopwords " + kStopwords + " 2>/dev/null";
  EXPECT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(fs::exists(w / "tokens.jsonl"));
}

TEST(Pipeline, DemoEmitsAllTables) {
  const auto& w = full_run();
  for (const char* f : {"tokens.jsonl", "vocab.txt", "U.mtx", "S.mtx", "bigrams.tsv", "M.mtx", "Q.mtx", "C.mtx",
                        "networks/topic_8.graphml", "networks/top_edges.csv", "metrics/topic_8_nodes.csv",
                        "metrics/correlations.csv", "topic_summary.csv", "topic_summary.json", "modularity.csv",
                        "modularity_histogram.csv", "communities/topic_8.csv", "clusters.csv", "bic.csv",
                        "scatter.csv", "labels.csv", "labels.txt", "manifest.json"})
    EXPECT_TRUE(fs::exists(w / f)) << f;
  EXPECT_EQ(summaries_from_csv(io::read_file(w / "topic_summary.csv")).size(), 8u);
}

TEST(Pipeline, ExportRoundTrips) {
  const auto& w = full_run();
  const auto dest = scratch() / "S_export.mtx";
  ASSERT_EQ(cli("-w " + w.string() + " export S mtx " + dest.string()).code, 0);
  const auto original = io::read_file(w / "S.mtx");
  EXPECT_EQ(io::read_file(dest), original);
  EXPECT_EQ(SparseCountMatrix::from_matrix_market(io::read_file(dest)).to_matrix_market(), original);
  const auto gml = scratch() / "net3.graphml";
  ASSERT_EQ(cli("-w " + w.string() + " export network:3 graphml " + gml.string()).code, 0);
  EXPECT_EQ(io::read_file(gml), io::read_file(w / "networks/topic_3.graphml"));
  const auto json = scratch() / "summary.json";
  ASSERT_EQ(cli("-w " + w.string() + " export summary json " + json.string()).code, 0);
  EXPECT_EQ(io::read_file(json), io::read_file(w / "topic_summary.json"));
  EXPECT_EQ(cli("-w " + w.string() + " export S graphml " + dest.string()).code, 1);
  EXPECT_EQ(cli("-w " + w.string() + " export nonsense csv " + dest.string()).code, 1);
}

TEST(Pipeline, ExportedCsvsReparse) {
  const auto& w = full_run();
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(w)) {
    if (e.path().extension() != ".csv") continue;
    const auto text = io::read_file(e.path());
    std::string again;
    for (const auto& row : io::parse_csv(text)) again += io::csv_line(row.fields);
    EXPECT_EQ(again, text) << e.path();
    ++files;
  }
  EXPECT_GT(files, 20u);

  const auto vocab = std::make_shared<const Vocabulary>(Vocabulary::parse(io::read_file(w / "vocab.txt")));
  auto same = [&](const std::string& rel, auto reserialize) {
    const auto text = io::read_file(w / rel);
    EXPECT_EQ(reserialize(text), text) << rel;
  };
  same("topic_summary.csv", [](const std::string& t) { return summaries_to_csv(summaries_from_csv(t)); });
  same("bic.csv", [](const std::string& t) { return bic_table_csv(bic_table_from_csv(t)); });
  same("labels.csv", [&](const std::string& t) { return labels_to_csv(labels_from_csv(t, *vocab)); });
  same("metrics/correlations.csv", [](const std::string& t) { return correlations_to_csv(correlations_from_csv(t)); });
  same("modularity.csv", [](const std::string& t) {
    ModularityReport r;
    r.rows = modularity_table_from_csv(t);
    return modularity_table_csv(r);
  });
  EXPECT_EQ(assignments_from_csv(io::read_file(w / "clusters.csv")).size(), 8u);
  for (int k = 1; k <= 8; ++k) {
    const auto tag = "topic_" + std::to_string(k);
    const auto gml = io::read_file(w / "networks" / (tag + ".graphml"));
    const auto net = graphml::read(gml, vocab);
    EXPECT_EQ(graphml::write(net), gml);
    same("metrics/" + tag + "_nodes.csv",
         [&](const std::string& t) { return node_metrics_to_csv(node_metrics_from_csv(t, *vocab), *vocab); });
    same("communities/" + tag + ".csv",
         [&](const std::string& t) { return partition_to_csv(partition_from_csv(t, net), *vocab); });
  }
}
