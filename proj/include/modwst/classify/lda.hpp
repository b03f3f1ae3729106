#pragma once

// Linear discriminant analysis with a ridge-regularised pooled covariance.

#include <cmath>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "modwst/classify/features.hpp"
#include "modwst/error.hpp"

namespace modwst {

enum class LdaSolver { Auto, Primal, Woodbury };

struct LdaParams {
  double ridge_scale = 1e-6;  // ridge = ridge_scale * trace(S) / d
  LdaSolver solver = LdaSolver::Auto;
};

struct LdaModel {
  std::vector<std::string> classes;
  RowMatrix coef;  // K x d, rows are Sigma^{-1} mu_k
  Eigen::VectorXd intercepts;
  Eigen::VectorXd priors;
  RowMatrix means;  // K x d
  double ridge = 0.0;
  LdaParams params;
};

namespace detail {

inline Eigen::LLT<Eigen::MatrixXd> checked_llt(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::NumericalError, "pooled covariance is not positive definite after the ridge");
  }
  return llt;
}

}  // namespace detail

/// Scores x' S^{-1} mu_k - mu_k' S^{-1} mu_k / 2 + log pi_k with S the pooled
/// within-class covariance (divisor n - K) plus ridge. For n < d the inverse is
/// applied through the Woodbury identity on the n x n Gram matrix.
inline LdaModel train_lda(const FeatureMatrix& X, const LdaParams& params = {}) {
  X.check();
  const auto enc = encode_labels(X.labels);
  const auto K = static_cast<Eigen::Index>(enc.classes.size());
  const Eigen::Index n = X.n();
  const Eigen::Index d = X.d();
  if (K < 2) throw Error(ErrorKind::InvalidLabels, "LDA needs at least 2 classes");
  if (n <= K) throw Error(ErrorKind::InvalidInput, "LDA needs more rows than classes");
  if (!(params.ridge_scale >= 0.0)) throw Error(ErrorKind::InvalidInput, "ridge scale must be non-negative");

  LdaModel m;
  m.classes = enc.classes;
  m.params = params;
  m.means = RowMatrix::Zero(K, d);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(K);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int k = enc.y[static_cast<std::size_t>(i)];
    m.means.row(k) += X.rows.row(i);
    counts(k) += 1.0;
  }
  for (Eigen::Index k = 0; k < K; ++k) m.means.row(k) /= counts(k);
  m.priors = counts / static_cast<double>(n);

  // A = (X - class means) / sqrt(n - K), so that S = A' A
  Eigen::MatrixXd A(n, d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n - K));
  for (Eigen::Index i = 0; i < n; ++i) {
    A.row(i) = (X.rows.row(i) - m.means.row(enc.y[static_cast<std::size_t>(i)])) * scale;
  }
  const double trace = A.squaredNorm();
  m.ridge = params.ridge_scale * trace / static_cast<double>(d);
  if (!(m.ridge > 0.0) && n - K < d) {
    throw Error(ErrorKind::NumericalError, "pooled covariance is singular and the ridge is zero");
  }

  const Eigen::MatrixXd M = m.means.transpose();  // d x K
  Eigen::MatrixXd SinvM;
  const bool woodbury = params.solver == LdaSolver::Woodbury || (params.solver == LdaSolver::Auto && n < d);
  if (woodbury) {
    Eigen::MatrixXd gram = Eigen::MatrixXd::Identity(n, n) * m.ridge;
    gram.selfadjointView<Eigen::Lower>().rankUpdate(A);
    const auto llt = detail::checked_llt(gram);
    const Eigen::MatrixXd AM = A * M;
    SinvM = (M - A.transpose() * llt.solve(AM)) / m.ridge;
  } else {
    Eigen::MatrixXd S = Eigen::MatrixXd::Identity(d, d) * m.ridge;
    S.selfadjointView<Eigen::Lower>().rankUpdate(A.transpose());
    const auto llt = detail::checked_llt(S);
    SinvM = llt.solve(M);
  }
  if (!SinvM.allFinite()) throw Error(ErrorKind::NumericalError, "LDA solve produced non-finite coefficients");

  m.coef = SinvM.transpose();
  m.intercepts.resize(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    m.intercepts(k) = -0.5 * m.means.row(k).dot(m.coef.row(k)) + std::log(m.priors(k));
  }
  return m;
}

inline Eigen::MatrixXd decision_scores(const LdaModel& m, const FeatureMatrix& X) {
  if (X.d() != m.coef.cols()) throw Error(ErrorKind::InvalidInput, "feature dimension mismatch");
  return (X.rows * m.coef.transpose()).rowwise() + m.intercepts.transpose();
}

inline nlohmann::json to_json(const LdaModel& m) {
  nlohmann::json coef = nlohmann::json::array();
  for (Eigen::Index k = 0; k < m.coef.rows(); ++k) {
    coef.push_back(std::vector<double>(m.coef.row(k).data(), m.coef.row(k).data() + m.coef.cols()));
  }
  return {{"type", "lda"},
          {"classes", m.classes},
          {"ridge_scale", m.params.ridge_scale},
          {"ridge", m.ridge},
          {"priors", std::vector<double>(m.priors.data(), m.priors.data() + m.priors.size())},
          {"coef", coef},
          {"intercepts", std::vector<double>(m.intercepts.data(), m.intercepts.data() + m.intercepts.size())}};
}

}  // namespace modwst
