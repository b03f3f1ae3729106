#pragma once

// L2-regularised hinge-loss linear SVM trained by dual coordinate descent.
// Multiclass problems are decomposed one-vs-rest (default) or one-vs-one.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "modwst/classify/features.hpp"
#include "modwst/error.hpp"
#include "modwst/simulate.hpp"

namespace modwst {

enum class SvmMulticlass { OneVsRest, OneVsOne };

inline std::string_view to_string(SvmMulticlass m) { return m == SvmMulticlass::OneVsRest ? "ovr" : "ovo"; }

inline SvmMulticlass svm_multiclass_from_string(std::string_view s) {
  if (s == "ovr") return SvmMulticlass::OneVsRest;
  if (s == "ovo") return SvmMulticlass::OneVsOne;
  throw Error(ErrorKind::NotFound, "unknown multiclass strategy '" + std::string(s) + "' (expected ovr or ovo)");
}

struct SvmParams {
  double C = 1.0;
  double tol = 1e-4;
  int max_iter = 10000;
  double bias = 1.0;  // constant feature appended to every row; its weight is regularised
  std::uint64_t seed = 1;
  unsigned threads = 1;
  SvmMulticlass multiclass = SvmMulticlass::OneVsRest;
};

struct BinarySvmResult {
  Eigen::VectorXd w;  // d weights followed by the bias weight
  int iterations = 0;
  bool converged = false;
  double dual_objective = 0.0;
  double pg_gap = 0.0;  // final max - min projected gradient
};

/// One row of `weights` per binary problem: class k against the rest (OvR), or
/// pairs[r].first (+1) against pairs[r].second (-1) (OvO).
struct LinearModel {
  std::vector<std::string> classes;
  RowMatrix weights;
  Eigen::VectorXd intercepts;
  std::vector<std::pair<int, int>> pairs;  // OvO only
  SvmParams params;
  std::vector<int> iterations;
  std::vector<bool> converged;

  Eigen::VectorXd decision_values(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
    return weights * x.transpose() + intercepts;
  }
};

namespace detail {

/// One binary problem, labels y in {-1, +1}.
inline BinarySvmResult solve_binary_svm(const RowMatrix& X, const std::vector<int>& y, const SvmParams& p,
                                        std::uint64_t stream) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  const double C = p.C;
  const double bias = p.bias;

  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  double wb = 0.0;
  std::vector<double> alpha(static_cast<std::size_t>(n), 0.0);
  std::vector<double> qd(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) qd[static_cast<std::size_t>(i)] = X.row(i).squaredNorm() + bias * bias;

  std::vector<Eigen::Index> index(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) index[static_cast<std::size_t>(i)] = i;
  std::size_t active = static_cast<std::size_t>(n);

  constexpr double inf = std::numeric_limits<double>::infinity();
  double pg_max_old = inf;
  double pg_min_old = -inf;
  Sampler rng(derive_seed(p.seed, 0x57a, stream));

  BinarySvmResult res;
#ifndef NDEBUG
  double previous_objective = 0.0;
#endif
  int iter = 0;
  while (iter < p.max_iter) {
    double pg_max_new = -inf;
    double pg_min_new = inf;

    for (std::size_t i = 0; i < active; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.uniform01() * static_cast<double>(active - i));
      std::swap(index[i], index[std::min(j, active - 1)]);
    }

    for (std::size_t s = 0; s < active; ++s) {
      const Eigen::Index i = index[s];
      const auto iu = static_cast<std::size_t>(i);
      const double yi = y[iu];
      const double G = yi * (X.row(i).dot(w) + wb * bias) - 1.0;
      double pg = 0.0;
      if (alpha[iu] == 0.0) {
        if (G > pg_max_old) {
          --active;
          std::swap(index[s], index[active]);
          --s;
          continue;
        }
        if (G < 0.0) pg = G;
      } else if (alpha[iu] == C) {
        if (G < pg_min_old) {
          --active;
          std::swap(index[s], index[active]);
          --s;
          continue;
        }
        if (G > 0.0) pg = G;
      } else {
        pg = G;
      }
      pg_max_new = std::max(pg_max_new, pg);
      pg_min_new = std::min(pg_min_new, pg);
      if (std::abs(pg) > 1e-12) {
        const double old = alpha[iu];
        alpha[iu] = std::min(std::max(old - G / qd[iu], 0.0), C);
        const double delta = (alpha[iu] - old) * yi;
        w.noalias() += delta * X.row(i).transpose();
        wb += delta * bias;
      }
    }
    ++iter;

#ifndef NDEBUG
    {
      double asum = 0.0;
      for (double a : alpha) asum += a;
      const double obj = 0.5 * (w.squaredNorm() + wb * wb) - asum;
      assert(obj <= previous_objective + 1e-9 * (1.0 + std::abs(previous_objective)));
      previous_objective = obj;
    }
#endif

    res.pg_gap = pg_max_new - pg_min_new;
    if (pg_max_new - pg_min_new <= p.tol) {
      if (active == static_cast<std::size_t>(n)) {
        res.converged = true;
        break;
      }
      active = static_cast<std::size_t>(n);
      pg_max_old = inf;
      pg_min_old = -inf;
      continue;
    }
    pg_max_old = pg_max_new <= 0.0 ? inf : pg_max_new;
    pg_min_old = pg_min_new >= 0.0 ? -inf : pg_min_new;
  }

  double asum = 0.0;
  for (double a : alpha) asum += a;
  res.dual_objective = 0.5 * (w.squaredNorm() + wb * wb) - asum;
  res.iterations = iter;
  res.w.resize(d + 1);
  res.w.head(d) = w;
  res.w(d) = wb;
  return res;
}

}  // namespace detail

/// Each binary sub-problem is deterministic given (X, y, params), so the thread
/// count does not change the result.
inline LinearModel train_linear_svm(const FeatureMatrix& X, const SvmParams& params = {}) {
  X.check();
  const auto enc = encode_labels(X.labels);
  const std::size_t K = enc.classes.size();
  if (K < 2) throw Error(ErrorKind::InvalidLabels, "linear SVM needs at least 2 classes");
  if (!(params.C > 0.0) || !(params.tol > 0.0) || params.max_iter < 1) {
    throw Error(ErrorKind::InvalidInput, "SVM parameters must be positive");
  }

  LinearModel model;
  model.classes = enc.classes;
  model.params = params;
  if (params.multiclass == SvmMulticlass::OneVsOne) {
    for (std::size_t a = 0; a < K; ++a)
      for (std::size_t b = a + 1; b < K; ++b) model.pairs.emplace_back(static_cast<int>(a), static_cast<int>(b));
  }
  const std::size_t P = model.pairs.empty() ? K : model.pairs.size();
  model.weights.resize(static_cast<Eigen::Index>(P), X.d());
  model.intercepts.resize(static_cast<Eigen::Index>(P));
  model.iterations.assign(P, 0);
  model.converged.assign(P, false);

  std::vector<BinarySvmResult> results(P);
  auto solve = [&](std::size_t k) {
    if (model.pairs.empty()) {
      std::vector<int> y(enc.y.size());
      for (std::size_t i = 0; i < y.size(); ++i) y[i] = enc.y[i] == static_cast<int>(k) ? 1 : -1;
      results[k] = detail::solve_binary_svm(X.rows, y, params, k);
      return;
    }
    const auto [a, b] = model.pairs[k];
    std::vector<Eigen::Index> rows;
    std::vector<int> y;
    for (std::size_t i = 0; i < enc.y.size(); ++i) {
      if (enc.y[i] != a && enc.y[i] != b) continue;
      rows.push_back(static_cast<Eigen::Index>(i));
      y.push_back(enc.y[i] == a ? 1 : -1);
    }
    const RowMatrix sub = X.rows(rows, Eigen::all);
    results[k] = detail::solve_binary_svm(sub, y, params, k);
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(params.threads, static_cast<unsigned>(P)));
  if (threads == 1) {
    for (std::size_t k = 0; k < P; ++k) solve(k);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t k = t; k < P; k += threads) solve(k);
      });
    }
    for (auto& th : pool) th.join();
  }

  for (std::size_t k = 0; k < P; ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    model.weights.row(kk) = results[k].w.head(X.d()).transpose();
    model.intercepts(kk) = results[k].w(X.d()) * params.bias;
    model.iterations[k] = results[k].iterations;
    model.converged[k] = results[k].converged;
  }
  return model;
}

/// OvR: argmax of decision values. OvO: majority vote over the pairwise
/// problems. Ties go to the lowest class index in both cases.
inline std::vector<std::string> predict(const LinearModel& m, const FeatureMatrix& X) {
  if (X.d() != m.weights.cols()) throw Error(ErrorKind::InvalidInput, "feature dimension mismatch");
  const Eigen::MatrixXd scores = (X.rows * m.weights.transpose()).rowwise() + m.intercepts.transpose();
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(X.n()));
  std::vector<int> votes(m.classes.size());
  for (Eigen::Index i = 0; i < X.n(); ++i) {
    std::size_t best = 0;
    if (m.pairs.empty()) {
      for (Eigen::Index k = 1; k < scores.cols(); ++k) {
        if (scores(i, k) > scores(i, static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(k);
      }
    } else {
      std::fill(votes.begin(), votes.end(), 0);
      for (std::size_t r = 0; r < m.pairs.size(); ++r) {
        ++votes[static_cast<std::size_t>(scores(i, static_cast<Eigen::Index>(r)) > 0.0 ? m.pairs[r].first : m.pairs[r].second)];
      }
      for (std::size_t k = 1; k < votes.size(); ++k) {
        if (votes[k] > votes[best]) best = k;
      }
    }
    out.push_back(m.classes[best]);
  }
  return out;
}

inline nlohmann::json to_json(const SvmParams& p) {
  return {{"C", p.C}, {"tol", p.tol}, {"max_iter", p.max_iter}, {"bias", p.bias}, {"seed", p.seed},
          {"multiclass", to_string(p.multiclass)}};
}

inline nlohmann::json to_json(const LinearModel& m) {
  nlohmann::json w = nlohmann::json::array();
  for (Eigen::Index k = 0; k < m.weights.rows(); ++k) {
    w.push_back(std::vector<double>(m.weights.row(k).data(), m.weights.row(k).data() + m.weights.cols()));
  }
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [a, b] : m.pairs) pairs.push_back({a, b});
  return {{"type", "svm_linear"},
          {"classes", m.classes},
          {"pairs", pairs},
          {"params", to_json(m.params)},
          {"weights", w},
          {"intercepts", std::vector<double>(m.intercepts.data(), m.intercepts.data() + m.intercepts.size())},
          {"iterations", m.iterations},
          {"converged", m.converged}};
}

}  // namespace modwst
