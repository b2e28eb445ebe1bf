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

// Topic model matrices M (topics x words) and Q (documents x topics):
// validated ingestion of externally estimated models, and a collapsed Gibbs
// sampler whose state can be saved and resumed bit-exactly.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <spdlog/spdlog.h>

#include "lda2net/dense.hpp"
#include "lda2net/error.hpp"
#include "lda2net/io.hpp"
#include "lda2net/matrices.hpp"
#include "lda2net/parallel.hpp"
#include "lda2net/random.hpp"

namespace lda2net {

struct TopicModel {
  DenseMatrix M;  // K x N_W, rows are word distributions
  DenseMatrix Q;  // N_D x K, rows are topic proportions

  std::size_t topics() const { return M.rows(); }
  std::size_t words() const { return M.cols(); }
  std::size_t documents() const { return Q.rows(); }
};

namespace detail {

// Rejects negative or non-finite entries and rows whose sum is off by more
// than `tolerance`; renormalizes the rest.
inline void make_row_stochastic(DenseMatrix& m, const std::string& name, double tolerance) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      if (!std::isfinite(v)) throw DataError(name + " row " + std::to_string(r) + " has a non-finite entry");
      if (v < 0.0) throw DataError(name + " row " + std::to_string(r) + " has a negative entry");
      sum += v;
    }
    if (std::abs(sum - 1.0) > tolerance) {
      throw DataError(name + " row " + std::to_string(r) + " sums to " + io::format_double(sum) +
                      ", not 1 within " + io::format_double(tolerance));
    }
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) /= sum;
  }
}

inline bool looks_like_matrix_market(std::string_view text) { return text.rfind("%%MatrixMarket", 0) == 0; }

inline DenseMatrix parse_dense(std::string_view text, std::size_t expected_cols, const std::string& source,
                               const Vocabulary* column_words) {
  if (looks_like_matrix_market(text)) return DenseMatrix::from_matrix_market(text, source);
  auto parsed = DenseMatrix::from_csv(text, expected_cols, source);
  if (column_words && !parsed.header.empty()) {
    // Columns labelled with words: reorder them into vocabulary order.
    std::vector<std::size_t> to_vocab(parsed.header.size());
    bool words = true;
    for (std::size_t c = 0; c < parsed.header.size() && words; ++c) {
      auto id = column_words->find(parsed.header[c]);
      if (!id) words = false;
      else to_vocab[c] = *id;
    }
    if (words) {
      DenseMatrix m(parsed.matrix.rows(), parsed.matrix.cols());
      for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) m(r, to_vocab[c]) = parsed.matrix(r, c);
      return m;
    }
  }
  return std::move(parsed.matrix);
}

}  // namespace detail

inline constexpr double kIngestTolerance = 1e-6;

// Validates and renormalizes externally estimated matrices. M must be
// K x |vocab|, Q must be n_documents x K (n_documents = 0 skips that check).
inline TopicModel make_topic_model(DenseMatrix M, DenseMatrix Q, std::size_t vocab_size, std::size_t n_documents) {
  if (M.cols() != vocab_size) {
    throw DataError("M has " + std::to_string(M.cols()) + " columns but the vocabulary has " +
                    std::to_string(vocab_size) + " words");
  }
  if (M.rows() == 0) throw DataError("M has no topics");
  if (Q.cols() != M.rows()) {
    throw DataError("Q has " + std::to_string(Q.cols()) + " columns but M has " + std::to_string(M.rows()) +
                    " topics");
  }
  if (n_documents != 0 && Q.rows() != n_documents) {
    throw DataError("Q has " + std::to_string(Q.rows()) + " rows but the corpus has " +
                    std::to_string(n_documents) + " documents");
  }
  detail::make_row_stochastic(M, "M", kIngestTolerance);
  detail::make_row_stochastic(Q, "Q", kIngestTolerance);
  return {std::move(M), std::move(Q)};
}

inline TopicModel ingest_topic_model_text(std::string_view m_text, std::string_view q_text, const Vocabulary& vocab,
                                          std::size_t n_documents) {
  auto M = detail::parse_dense(m_text, vocab.size(), "M", &vocab);
  if (M.rows() == 0) throw DataError("M has no topics");
  auto Q = detail::parse_dense(q_text, M.rows(), "Q", nullptr);
  return make_topic_model(std::move(M), std::move(Q), vocab.size(), n_documents);
}

inline TopicModel ingest_topic_model(const std::filesystem::path& m_path, const std::filesystem::path& q_path,
                                     const Vocabulary& vocab, std::size_t n_documents = 0) {
  return ingest_topic_model_text(io::read_file(m_path), io::read_file(q_path), vocab, n_documents);
}

struct GibbsConfig {
  std::size_t topics = 0;
  std::optional<double> alpha;  // defaults to 50 / K
  double beta = 0.1;
  std::size_t n_iterations = 1000;
  std::size_t n_burnin = 200;
  std::uint64_t seed = 1;
  // Average M and Q over post-burn-in sweeps instead of using the final state.
  bool average_samples = false;

  double alpha_value() const { return alpha.value_or(50.0 / static_cast<double>(topics)); }

  void validate() const {
    detail::require_arg(topics >= 1, "number of topics must be at least 1");
    detail::require_arg(alpha_value() > 0.0, "alpha must be positive");
    detail::require_arg(beta > 0.0, "beta must be positive");
    detail::require_arg(n_iterations > n_burnin, "iterations must exceed burn-in");
  }
};

namespace detail {

class ByteWriter {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    u64(bits);
  }
  void bytes(std::string_view s) {
    u64(s.size());
    out_ += s;
  }
  void raw(std::string_view s) { out_ += s; }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view in) : in_(in) {}
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64() {
    std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }
  std::string bytes() {
    const auto n = u64();
    need(n);
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  std::string raw(std::size_t n) {
    need(n);
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > in_.size()) throw DataError("sampler state is truncated");
  }
  std::string_view in_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// Collapsed Gibbs sampler over token-topic assignments. Tokens are visited
// in document-major order (U's triplet order, each count expanded), so a
// chain is a pure function of (U, config).
class GibbsSampler {
 public:
  static constexpr std::string_view kMagic = "L2NGIBBS";
  static constexpr std::uint32_t kStateVersion = 1;

  GibbsSampler(const SparseCountMatrix& U, GibbsConfig config)
      : config_(config), n_docs_(U.rows()), n_words_(U.cols()), checksum_(corpus_checksum(U)) {
    config_.validate();
    detail::require(U.total() > 0, "cannot train LDA on an empty document-word matrix");
    expand_tokens(U);
    rng_.seed(config_.seed);
    z_.resize(token_word_.size());
    for (auto& z : z_) z = static_cast<std::uint32_t>(uniform_index(rng_, config_.topics));
    rebuild_counts();
    alpha_ = config_.alpha_value();
    for (std::size_t d = 0; d < n_docs_; ++d)
      if (doc_length_[d] == 0) spdlog::warn("document {} has no in-vocabulary tokens; its topic row is uniform", d);
  }

  const GibbsConfig& config() const { return config_; }
  std::size_t iterations_done() const { return iterations_; }
  std::size_t tokens() const { return z_.size(); }

  void run(std::size_t sweeps) {
    const std::size_t K = config_.topics;
    const double beta = config_.beta;
    const double wbeta = beta * static_cast<double>(n_words_);
    std::vector<double> cumulative(K);
    for (std::size_t s = 0; s < sweeps; ++s) {
      for (std::size_t t = 0; t < z_.size(); ++t) {
        const std::uint32_t d = token_doc_[t], w = token_word_[t];
        std::uint32_t k = z_[t];
        --ndk_[d * K + k];
        --nkw_[k * n_words_ + w];
        --nk_[k];
        double acc = 0.0;
        for (std::size_t j = 0; j < K; ++j) {
          acc += (ndk_[d * K + j] + alpha_) * (nkw_[j * n_words_ + w] + beta) / (nk_[j] + wbeta);
          cumulative[j] = acc;
        }
        k = static_cast<std::uint32_t>(sample_cumulative(rng_, cumulative));
        z_[t] = k;
        ++ndk_[d * K + k];
        ++nkw_[k * n_words_ + w];
        ++nk_[k];
      }
      ++iterations_;
      if (config_.average_samples && iterations_ > config_.n_burnin) accumulate();
    }
  }

  TopicModel estimate() const {
    if (config_.average_samples && samples_ > 0) {
      TopicModel m{DenseMatrix(config_.topics, n_words_), DenseMatrix(n_docs_, config_.topics)};
      const double inv = 1.0 / static_cast<double>(samples_);
      for (std::size_t i = 0; i < sum_m_.size(); ++i) m.M.data()[i] = sum_m_[i] * inv;
      for (std::size_t i = 0; i < sum_q_.size(); ++i) m.Q.data()[i] = sum_q_[i] * inv;
      return m;
    }
    return point_estimate();
  }

  // Joint log p(w, z) of the current state under the collapsed model.
  double log_likelihood() const {
    const std::size_t K = config_.topics;
    const double beta = config_.beta, W = static_cast<double>(n_words_), Kd = static_cast<double>(K);
    double ll = Kd * (std::lgamma(W * beta) - W * std::lgamma(beta));
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t w = 0; w < n_words_; ++w) ll += std::lgamma(nkw_[k * n_words_ + w] + beta);
      ll -= std::lgamma(nk_[k] + W * beta);
    }
    ll += static_cast<double>(n_docs_) * (std::lgamma(Kd * alpha_) - Kd * std::lgamma(alpha_));
    for (std::size_t d = 0; d < n_docs_; ++d) {
      for (std::size_t k = 0; k < K; ++k) ll += std::lgamma(ndk_[d * K + k] + alpha_);
      ll -= std::lgamma(doc_length_[d] + Kd * alpha_);
    }
    return ll;
  }

  // Count tables are consistent with the assignments and each sums to the
  // token total.
  bool counts_conserved() const {
    std::uint64_t a = 0, b = 0, c = 0;
    for (auto v : ndk_) a += v;
    for (auto v : nkw_) b += v;
    for (auto v : nk_) c += v;
    return a == z_.size() && b == z_.size() && c == z_.size();
  }

  std::string save() const {
    detail::ByteWriter w;
    w.raw(kMagic);
    w.u32(kStateVersion);
    w.raw(checksum_);
    w.u64(n_docs_);
    w.u64(n_words_);
    w.u64(config_.topics);
    w.f64(alpha_);
    w.f64(config_.beta);
    w.u64(config_.n_iterations);
    w.u64(config_.n_burnin);
    w.u64(config_.seed);
    w.u32(config_.average_samples ? 1 : 0);
    w.u64(iterations_);
    w.u64(z_.size());
    for (auto z : z_) w.u32(z);
    std::ostringstream rng_state;
    rng_state << rng_;
    w.bytes(rng_state.str());
    w.u64(samples_);
    w.u64(sum_m_.size());
    for (double v : sum_m_) w.f64(v);
    w.u64(sum_q_.size());
    for (double v : sum_q_) w.f64(v);
    return w.take();
  }

  static GibbsSampler load(std::string_view state, const SparseCountMatrix& U) {
    detail::ByteReader r(state);
    if (r.raw(kMagic.size()) != kMagic) throw DataError("not an lda2net sampler state file");
    const auto version = r.u32();
    if (version != kStateVersion) throw DataError("unsupported sampler state version " + std::to_string(version));
    const std::string checksum = r.raw(32);
    const auto n_docs = r.u64();
    const auto n_words = r.u64();
    if (n_docs != U.rows() || n_words != U.cols()) {
      throw DataError("sampler state was saved for a " + std::to_string(n_docs) + " x " + std::to_string(n_words) +
                      " corpus, got " + std::to_string(U.rows()) + " x " + std::to_string(U.cols()));
    }
    if (checksum != corpus_checksum(U)) throw DataError("sampler state does not match this corpus (checksum)");
    GibbsSampler s;
    s.n_docs_ = n_docs;
    s.n_words_ = n_words;
    s.checksum_ = checksum;
    s.config_.topics = r.u64();
    s.alpha_ = r.f64();
    s.config_.alpha = s.alpha_;
    s.config_.beta = r.f64();
    s.config_.n_iterations = r.u64();
    s.config_.n_burnin = r.u64();
    s.config_.seed = r.u64();
    s.config_.average_samples = r.u32() != 0;
    s.iterations_ = r.u64();
    s.expand_tokens(U);
    const auto n_tokens = r.u64();
    if (n_tokens != s.token_word_.size()) throw DataError("sampler state token count does not match the corpus");
    s.z_.resize(n_tokens);
    for (auto& z : s.z_) {
      z = r.u32();
      if (z >= s.config_.topics) throw DataError("sampler state holds an out-of-range topic");
    }
    std::istringstream rng_state(r.bytes());
    rng_state >> s.rng_;
    if (!rng_state) throw DataError("sampler state has a corrupt RNG block");
    s.samples_ = r.u64();
    s.sum_m_.resize(r.u64());
    for (auto& v : s.sum_m_) v = r.f64();
    s.sum_q_.resize(r.u64());
    for (auto& v : s.sum_q_) v = r.f64();
    if (!r.done()) throw DataError("trailing bytes in sampler state");
    s.rebuild_counts();
    return s;
  }

  static std::string corpus_checksum(const SparseCountMatrix& U) {
    const std::string hex = io::sha256_hex(U.to_matrix_market());
    std::string raw(32, '\0');
    for (std::size_t i = 0; i < 32; ++i) raw[i] = static_cast<char>(std::stoi(hex.substr(2 * i, 2), nullptr, 16));
    return raw;
  }

 private:
  GibbsSampler() = default;

  void expand_tokens(const SparseCountMatrix& U) {
    token_doc_.clear();
    token_word_.clear();
    doc_length_.assign(U.rows(), 0);
    for (const auto& e : U.entries()) {
      for (std::uint32_t c = 0; c < e.count; ++c) {
        token_doc_.push_back(e.row);
        token_word_.push_back(e.col);
      }
      doc_length_[e.row] += e.count;
    }
  }

  void rebuild_counts() {
    const std::size_t K = config_.topics;
    ndk_.assign(n_docs_ * K, 0);
    nkw_.assign(K * n_words_, 0);
    nk_.assign(K, 0);
    for (std::size_t t = 0; t < z_.size(); ++t) {
      ++ndk_[token_doc_[t] * K + z_[t]];
      ++nkw_[z_[t] * n_words_ + token_word_[t]];
      ++nk_[z_[t]];
    }
  }

  TopicModel point_estimate() const {
    const std::size_t K = config_.topics;
    TopicModel m{DenseMatrix(K, n_words_), DenseMatrix(n_docs_, K)};
    const double wbeta = config_.beta * static_cast<double>(n_words_);
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t w = 0; w < n_words_; ++w)
        m.M(k, w) = (nkw_[k * n_words_ + w] + config_.beta) / (nk_[k] + wbeta);
    const double kalpha = alpha_ * static_cast<double>(K);
    for (std::size_t d = 0; d < n_docs_; ++d)
      for (std::size_t k = 0; k < K; ++k) m.Q(d, k) = (ndk_[d * K + k] + alpha_) / (doc_length_[d] + kalpha);
    return m;
  }

  void accumulate() {
    auto m = point_estimate();
    if (sum_m_.empty()) {
      sum_m_.assign(m.M.data().size(), 0.0);
      sum_q_.assign(m.Q.data().size(), 0.0);
    }
    for (std::size_t i = 0; i < sum_m_.size(); ++i) sum_m_[i] += m.M.data()[i];
    for (std::size_t i = 0; i < sum_q_.size(); ++i) sum_q_[i] += m.Q.data()[i];
    ++samples_;
  }

  GibbsConfig config_;
  std::size_t n_docs_ = 0;
  std::size_t n_words_ = 0;
  std::string checksum_;
  double alpha_ = 0.0;
  std::vector<std::uint32_t> token_doc_, token_word_, z_;
  std::vector<std::uint64_t> doc_length_;
  std::vector<std::uint32_t> ndk_, nkw_, nk_;
  Engine rng_;
  std::size_t iterations_ = 0;
  std::size_t samples_ = 0;
  std::vector<double> sum_m_, sum_q_;
};

inline TopicModel train_lda(const SparseCountMatrix& U, const GibbsConfig& config) {
  GibbsSampler s(U, config);
  s.run(config.n_iterations);
  return s.estimate();
}

struct ChainsResult {
  TopicModel model;
  std::size_t best_chain = 0;
  std::vector<double> log_likelihoods;
  std::string best_state;  // serialized sampler of the selected chain
};

// Runs independent chains (chain c seeded with derive_seed(seed, c); a
// single chain uses the seed unchanged) and keeps the one with the highest
// joint log-likelihood.
inline ChainsResult train_lda_chains(const SparseCountMatrix& U, const GibbsConfig& config, std::size_t chains,
                                     unsigned threads = 0) {
  detail::require_arg(chains >= 1, "at least one chain is required");
  std::vector<std::optional<GibbsSampler>> samplers(chains);
  parallel_for(chains, threads, [&](std::size_t c) {
    GibbsConfig cfg = config;
    if (chains > 1) cfg.seed = derive_seed(config.seed, c);
    samplers[c].emplace(U, cfg);
    samplers[c]->run(cfg.n_iterations);
  });
  ChainsResult out;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < chains; ++c) {
    out.log_likelihoods.push_back(samplers[c]->log_likelihood());
    if (out.log_likelihoods.back() > best) {
      best = out.log_likelihoods.back();
      out.best_chain = c;
    }
  }
  out.model = samplers[out.best_chain]->estimate();
  out.best_state = samplers[out.best_chain]->save();
  return out;
}

struct ResumeResult {
  TopicModel model;
  std::string state;
};

inline ResumeResult resume_lda(std::string_view state, const SparseCountMatrix& U, std::size_t extra_iterations) {
  auto s = GibbsSampler::load(state, U);
  s.run(extra_iterations);
  return {s.estimate(), s.save()};
}

}  // namespace lda2net
