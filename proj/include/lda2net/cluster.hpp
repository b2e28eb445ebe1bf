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
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "lda2net/error.hpp"
#include "lda2net/io.hpp"
#include "lda2net/metrics.hpp"
#include "lda2net/parallel.hpp"
#include "lda2net/random.hpp"

namespace lda2net {

struct FeatureMatrix {
  std::vector<int> topic_ids;
  std::vector<std::string> names;
  Eigen::MatrixXd values;  // standardized, topics x features
  std::vector<double> center, scale;

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
};

// Column-wise z-scores with population standard deviation.
inline FeatureMatrix standardize(std::vector<int> ids, std::vector<std::string> names, const Eigen::MatrixXd& raw) {
  detail::require(raw.rows() >= 3, "need at least 3 topics to cluster");
  FeatureMatrix f;
  f.topic_ids = std::move(ids);
  f.names = std::move(names);
  f.values = raw;
  const double n = static_cast<double>(raw.rows());
  for (Eigen::Index c = 0; c < raw.cols(); ++c) {
    const double mean = raw.col(c).sum() / n;
    const double sd = std::sqrt((raw.col(c).array() - mean).square().sum() / n);
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean))))
      throw DataError("feature '" + f.names[static_cast<std::size_t>(c)] + "' is constant across topics");
    f.values.col(c) = (raw.col(c).array() - mean) / sd;
    f.center.push_back(mean);
    f.scale.push_back(sd);
  }
  return f;
}

inline FeatureMatrix build_features(const std::vector<TopicSummary>& summaries, const std::vector<int>& exclude = {}) {
  const std::set<int> drop(exclude.begin(), exclude.end());
  std::vector<int> ids;
  std::vector<std::array<double, 4>> rows;
  for (const auto& s : summaries) {
    if (drop.count(s.topic_id)) continue;
    ids.push_back(s.topic_id);
    rows.push_back({s.mean, s.variance, s.jsd, s.barrat_cc});
  }
  Eigen::MatrixXd raw(static_cast<Eigen::Index>(rows.size()), 4);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (int c = 0; c < 4; ++c) raw(static_cast<Eigen::Index>(r), c) = rows[r][c];
  return standardize(std::move(ids), {"mean", "variance", "jsd", "barrat_cc"}, raw);
}

enum class CovarianceMode { spherical, diagonal, full };

inline const char* to_string(CovarianceMode m) {
  switch (m) {
    case CovarianceMode::spherical: return "spherical";
    case CovarianceMode::diagonal: return "diagonal";
    case CovarianceMode::full: return "full";
  }
  return "?";
}

inline CovarianceMode parse_covariance_mode(std::string_view s) {
  if (s == "spherical") return CovarianceMode::spherical;
  if (s == "diagonal") return CovarianceMode::diagonal;
  if (s == "full") return CovarianceMode::full;
  throw UsageError("unknown covariance mode '" + std::string(s) + "'");
}

inline std::size_t free_parameters(std::size_t G, std::size_t d, CovarianceMode mode) {
  std::size_t cov = 0;
  switch (mode) {
    case CovarianceMode::spherical: cov = G; break;
    case CovarianceMode::diagonal: cov = G * d; break;
    case CovarianceMode::full: cov = G * d * (d + 1) / 2; break;
  }
  return (G - 1) + G * d + cov;
}

inline double bic(double log_likelihood, std::size_t params, std::size_t n) {
  return -2.0 * log_likelihood + static_cast<double>(params) * std::log(static_cast<double>(n));
}

struct MixtureFit {
  std::size_t n_components = 0;
  CovarianceMode mode = CovarianceMode::full;
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covariances;
  std::vector<double> weights;
  double log_likelihood = -std::numeric_limits<double>::infinity();
  double bic = std::numeric_limits<double>::infinity();
  std::size_t parameters = 0;
  std::size_t iterations = 0;
  double ridge = 0.0;
  std::vector<int> assignments;        // input row -> component (0-based)
  Eigen::MatrixXd responsibilities;    // input rows x components
  std::vector<double> log_likelihood_trace;
};

struct GmmOptions {
  std::size_t g_min = 1, g_max = 9;
  std::vector<CovarianceMode> modes{CovarianceMode::spherical, CovarianceMode::diagonal, CovarianceMode::full};
  std::uint64_t seed = 1;
  std::size_t n_starts = 10;
  double tolerance = 1e-8;
  std::size_t max_iterations = 500;
  unsigned threads = 1;
};

struct BicEntry {
  std::size_t n_components;
  CovarianceMode mode;
  std::optional<double> bic;  // nullopt when every start was degenerate
  std::optional<double> log_likelihood;
  bool operator==(const BicEntry&) const = default;
};

struct GmmResult {
  MixtureFit best;
  std::vector<BicEntry> table;
};

namespace detail {

constexpr double kGmmRidge = 1e-6;

inline double log_gaussian(const Eigen::VectorXd& x, const Eigen::VectorXd& mu, const Eigen::LLT<Eigen::MatrixXd>& llt,
                           double log_det) {
  const Eigen::VectorXd z = llt.matrixL().solve(x - mu);
  const double d = static_cast<double>(x.size());
  return -0.5 * (d * std::log(2.0 * std::numbers::pi) + log_det + z.squaredNorm());
}

// One EM run from hard initial labels. Returns nullopt when degenerate.
inline std::optional<MixtureFit> run_em(const Eigen::MatrixXd& X, const std::vector<int>& init, std::size_t G,
                                        CovarianceMode mode, double ridge, double tol, std::size_t max_iter) {
  const Eigen::Index n = X.rows(), d = X.cols();
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(G));
  for (Eigen::Index i = 0; i < n; ++i) R(i, init[static_cast<std::size_t>(i)]) = 1.0;

  MixtureFit fit;
  fit.n_components = G;
  fit.mode = mode;
  fit.ridge = ridge;
  fit.means.assign(G, Eigen::VectorXd::Zero(d));
  fit.covariances.assign(G, Eigen::MatrixXd::Identity(d, d));
  fit.weights.assign(G, 0.0);
  const double min_eig = ridge > 0.0 ? 10.0 * ridge : 1e-10;

  double prev = -std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < max_iter; ++it) {
    // M-step
    for (std::size_t g = 0; g < G; ++g) {
      const auto gi = static_cast<Eigen::Index>(g);
      const double ng = R.col(gi).sum();
      if (!(ng > 1e-8)) return std::nullopt;
      fit.weights[g] = ng / static_cast<double>(n);
      fit.means[g] = (X.transpose() * R.col(gi)) / ng;
      const Eigen::MatrixXd C = X.rowwise() - fit.means[g].transpose();
      Eigen::MatrixXd S = (C.transpose() * R.col(gi).asDiagonal() * C) / ng;
      switch (mode) {
        case CovarianceMode::spherical:
          S = Eigen::MatrixXd::Identity(d, d) * (S.trace() / static_cast<double>(d));
          break;
        case CovarianceMode::diagonal: S = Eigen::MatrixXd(S.diagonal().asDiagonal()); break;
        case CovarianceMode::full: break;
      }
      S.diagonal().array() += ridge;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
      if (es.info() != Eigen::Success || !(es.eigenvalues().minCoeff() > min_eig)) return std::nullopt;
      fit.covariances[g] = S;
    }
    // E-step
    std::vector<Eigen::LLT<Eigen::MatrixXd>> llt;
    std::vector<double> log_det;
    for (std::size_t g = 0; g < G; ++g) {
      llt.emplace_back(fit.covariances[g]);
      if (llt.back().info() != Eigen::Success) return std::nullopt;
      log_det.push_back(2.0 * llt.back().matrixL().toDenseMatrix().diagonal().array().log().sum());
    }
    double ll = 0.0;
    Eigen::VectorXd lp(static_cast<Eigen::Index>(G));
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::VectorXd x = X.row(i).transpose();
      for (std::size_t g = 0; g < G; ++g)
        lp(static_cast<Eigen::Index>(g)) = std::log(fit.weights[g]) + log_gaussian(x, fit.means[g], llt[g], log_det[g]);
      const double mx = lp.maxCoeff();
      const double lse = mx + std::log((lp.array() - mx).exp().sum());
      R.row(i) = (lp.array() - lse).exp().transpose();
      ll += lse;
    }
    if (!std::isfinite(ll)) return std::nullopt;
    fit.log_likelihood_trace.push_back(ll);
    fit.log_likelihood = ll;
    fit.iterations = it + 1;
    if (ll - prev < tol) break;
    prev = ll;
  }
  fit.responsibilities = R;
  fit.assignments.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index best = 0;
    R.row(i).maxCoeff(&best);
    fit.assignments[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return fit;
}

// k-means++ seeding followed by a few Lloyd iterations; hard labels.
inline std::vector<int> kmeans_init(const Eigen::MatrixXd& X, std::size_t G, Engine& g) {
  const auto n = static_cast<std::size_t>(X.rows());
  std::vector<Eigen::VectorXd> centers;
  centers.push_back(X.row(static_cast<Eigen::Index>(uniform_index(g, n))).transpose());
  std::vector<double> d2(n), cum(n);
  while (centers.size() < G) {
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) best = std::min(best, (X.row(static_cast<Eigen::Index>(i)).transpose() - c).squaredNorm());
      d2[i] = best;
    }
    std::partial_sum(d2.begin(), d2.end(), cum.begin());
    const std::size_t pick = cum.back() > 0.0 ? sample_cumulative(g, cum) : uniform_index(g, n);
    centers.push_back(X.row(static_cast<Eigen::Index>(pick)).transpose());
  }
  std::vector<int> label(n, 0);
  for (int iter = 0; iter < 10; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < G; ++c) {
        const double dd = (X.row(static_cast<Eigen::Index>(i)).transpose() - centers[c]).squaredNorm();
        if (dd < best) {
          best = dd;
          label[i] = static_cast<int>(c);
        }
      }
    }
    for (std::size_t c = 0; c < G; ++c) {
      Eigen::VectorXd s = Eigen::VectorXd::Zero(X.cols());
      std::size_t cnt = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (label[i] == static_cast<int>(c)) {
          s += X.row(static_cast<Eigen::Index>(i)).transpose();
          ++cnt;
        }
      if (cnt > 0) centers[c] = s / static_cast<double>(cnt);
    }
  }
  return label;
}

// Relabel components by lexicographic order of their means.
inline void canonical_components(MixtureFit& f) {
  std::vector<std::size_t> order(f.n_components);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = f.means[a];
    const auto& y = f.means[b];
    return std::lexicographical_compare(x.data(), x.data() + x.size(), y.data(), y.data() + y.size());
  });
  std::vector<int> rank(f.n_components);
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = static_cast<int>(r);
  MixtureFit o = f;
  for (std::size_t r = 0; r < order.size(); ++r) {
    o.means[r] = f.means[order[r]];
    o.covariances[r] = f.covariances[order[r]];
    o.weights[r] = f.weights[order[r]];
    o.responsibilities.col(static_cast<Eigen::Index>(r)) = f.responsibilities.col(static_cast<Eigen::Index>(order[r]));
  }
  for (auto& a : o.assignments) a = rank[static_cast<std::size_t>(a)];
  f = std::move(o);
}

}  // namespace detail

// EM over every (components, mode) pair; best model has minimal BIC.
// Rows are sorted before initialisation so the fit does not depend on the
// input order.
inline GmmResult fit_gmm(const Eigen::MatrixXd& X, const GmmOptions& opt = {}) {
  const auto n = static_cast<std::size_t>(X.rows());
  detail::require_arg(opt.g_min >= 1 && opt.g_min <= opt.g_max, "component range must satisfy 1 <= min <= max");
  detail::require_arg(opt.g_max < n, "G_max (" + std::to_string(opt.g_max) + ") must be below the number of rows (" +
                                         std::to_string(n) + ")");
  detail::require_arg(!opt.modes.empty() && opt.n_starts >= 1, "need at least one mode and one start");

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    for (Eigen::Index c = 0; c < X.cols(); ++c) {
      const double x = X(static_cast<Eigen::Index>(a), c), y = X(static_cast<Eigen::Index>(b), c);
      if (x != y) return x < y;
    }
    return false;
  });
  Eigen::MatrixXd Xs(X.rows(), X.cols());
  for (std::size_t r = 0; r < n; ++r) Xs.row(static_cast<Eigen::Index>(r)) = X.row(static_cast<Eigen::Index>(perm[r]));

  struct Job {
    std::size_t G;
    CovarianceMode mode;
  };
  std::vector<Job> jobs;
  for (std::size_t G = opt.g_min; G <= opt.g_max; ++G)
    for (auto m : opt.modes) jobs.push_back({G, m});
  std::vector<std::optional<MixtureFit>> best(jobs.size());
  parallel_for(jobs.size(), opt.threads, [&](std::size_t j) {
    const auto [G, mode] = jobs[j];
    const std::size_t starts = G == 1 ? 1 : opt.n_starts;
    for (std::size_t s = 0; s < starts; ++s) {
      Engine g(derive_seed(opt.seed, (G << 32) ^ (static_cast<std::uint64_t>(mode) << 24) ^ s));
      const auto init = detail::kmeans_init(Xs, G, g);
      auto fit = detail::run_em(Xs, init, G, mode, 0.0, opt.tolerance, opt.max_iterations);
      if (!fit) fit = detail::run_em(Xs, init, G, mode, detail::kGmmRidge, opt.tolerance, opt.max_iterations);
      if (fit && (!best[j] || fit->log_likelihood > best[j]->log_likelihood)) best[j] = std::move(fit);
    }
  });

  GmmResult out;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    BicEntry e{jobs[j].G, jobs[j].mode, std::nullopt, std::nullopt};
    if (best[j]) {
      auto& f = *best[j];
      f.parameters = free_parameters(f.n_components, static_cast<std::size_t>(X.cols()), f.mode);
      f.bic = bic(f.log_likelihood, f.parameters, n);
      e.bic = f.bic;
      e.log_likelihood = f.log_likelihood;
      if (!out.best.means.size() || f.bic < out.best.bic) out.best = f;
    }
    out.table.push_back(e);
  }
  if (out.best.means.empty()) throw DataError("every mixture candidate was degenerate");

  auto& f = out.best;
  std::vector<int> assign(n);
  Eigen::MatrixXd resp(f.responsibilities.rows(), f.responsibilities.cols());
  for (std::size_t r = 0; r < n; ++r) {
    assign[perm[r]] = f.assignments[r];
    resp.row(static_cast<Eigen::Index>(perm[r])) = f.responsibilities.row(static_cast<Eigen::Index>(r));
  }
  f.assignments = std::move(assign);
  f.responsibilities = std::move(resp);
  detail::canonical_components(f);
  return out;
}

inline GmmResult fit_gmm(const FeatureMatrix& features, const GmmOptions& opt = {}) {
  return fit_gmm(features.values, opt);
}

// Semantic tag per component: lowest mean standardized variance is
// "cross-cutting", highest "specialised", the rest "cluster-<rank>".
inline std::vector<std::string> label_clusters(const MixtureFit& fit, const FeatureMatrix& features) {
  if (fit.n_components == 1) return {"all"};
  std::size_t var_col = 1;
  for (std::size_t c = 0; c < features.names.size(); ++c)
    if (features.names[c] == "variance") var_col = c;
  std::vector<double> mean(fit.n_components, 0.0);
  std::vector<std::size_t> count(fit.n_components, 0);
  for (std::size_t r = 0; r < features.rows(); ++r) {
    const auto g = static_cast<std::size_t>(fit.assignments[r]);
    mean[g] += features.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(var_col));
    ++count[g];
  }
  for (std::size_t g = 0; g < mean.size(); ++g)
    mean[g] = count[g] ? mean[g] / static_cast<double>(count[g])
                       : fit.means[g](static_cast<Eigen::Index>(var_col));
  std::vector<std::size_t> order(mean.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mean[a] < mean[b]; });
  std::vector<std::string> tags(mean.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (r == 0) tags[order[r]] = "cross-cutting";
    else if (r + 1 == order.size()) tags[order[r]] = "specialised";
    else tags[order[r]] = "cluster-" + std::to_string(r + 1);
  }
  return tags;
}

inline std::string assignments_to_csv(const FeatureMatrix& f, const MixtureFit& fit,
                                      const std::vector<std::string>& tags) {
  std::string out = "topic_id,component,tag\n";
  for (std::size_t r = 0; r < f.rows(); ++r) {
    const auto g = fit.assignments[r];
    out += std::to_string(f.topic_ids[r]) + ',' + std::to_string(g + 1) + ',' + tags[static_cast<std::size_t>(g)] + '\n';
  }
  return out;
}

struct AssignmentRow {
  int topic_id = 0;
  int component = 0;  // 1-based
  std::string tag;
  bool operator==(const AssignmentRow&) const = default;
};

inline std::vector<AssignmentRow> assignments_from_csv(std::string_view text) {
  auto rows = io::parse_csv(text, "clusters");
  detail::require(!rows.empty() && rows[0].fields.size() == 3, "clusters CSV needs a topic_id,component,tag header");
  std::vector<AssignmentRow> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    const std::string where = "clusters:" + std::to_string(rows[r].line);
    detail::require(f.size() == 3, where + ": expected 3 fields");
    out.push_back({io::parse_int<int>(f[0], where), io::parse_int<int>(f[1], where), f[2]});
  }
  return out;
}

inline std::string bic_table_csv(const std::vector<BicEntry>& table) {
  std::string out = "components,mode,bic,log_likelihood\n";
  for (const auto& e : table)
    out += std::to_string(e.n_components) + ',' + to_string(e.mode) + ',' +
           (e.bic ? io::format_double(*e.bic) : "NA") + ',' +
           (e.log_likelihood ? io::format_double(*e.log_likelihood) : "NA") + '\n';
  return out;
}

inline std::vector<BicEntry> bic_table_from_csv(std::string_view text) {
  auto rows = io::parse_csv(text, "bic");
  detail::require(!rows.empty() && rows[0].fields.size() == 4, "BIC CSV needs a 4-column header");
  auto opt = [](const std::string& s, const std::string& where) -> std::optional<double> {
    if (s == "NA") return std::nullopt;
    return io::parse_double(s, where);
  };
  std::vector<BicEntry> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    const std::string where = "bic:" + std::to_string(rows[r].line);
    detail::require(f.size() == 4, where + ": expected 4 fields");
    out.push_back({io::parse_int<std::size_t>(f[0], where), parse_covariance_mode(f[1]), opt(f[2], where),
                   opt(f[3], where)});
  }
  return out;
}

// Standardized features plus assignment, one row per topic, for scatter plots.
inline std::string scatter_csv(const FeatureMatrix& f, const MixtureFit& fit) {
  std::vector<std::string> header{"topic_id"};
  header.insert(header.end(), f.names.begin(), f.names.end());
  header.push_back("component");
  std::string out = io::csv_line(header);
  for (std::size_t r = 0; r < f.rows(); ++r) {
    std::vector<std::string> row{std::to_string(f.topic_ids[r])};
    for (std::size_t c = 0; c < f.cols(); ++c)
      row.push_back(io::format_double(f.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))));
    row.push_back(std::to_string(fit.assignments[r] + 1));
    out += io::csv_line(row);
  }
  return out;
}

}  // namespace lda2net
