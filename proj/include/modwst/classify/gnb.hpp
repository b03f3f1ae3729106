#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "modwst/classify/features.hpp"
#include "modwst/error.hpp"

namespace modwst {

struct GnbModel {
  std::vector<std::string> classes;
  RowMatrix means;      // K x d
  RowMatrix variances;  // K x d, floored
  Eigen::VectorXd log_priors;
  double var_floor = 1e-9;
};

/// Per-class, per-feature Gaussian likelihoods (maximum-likelihood variances).
inline GnbModel train_gnb(const FeatureMatrix& X, double var_floor = 1e-9) {
  X.check();
  const auto enc = encode_labels(X.labels);
  const auto K = static_cast<Eigen::Index>(enc.classes.size());
  if (K < 2) throw Error(ErrorKind::InvalidLabels, "naive Bayes needs at least 2 classes");
  if (!(var_floor > 0.0)) throw Error(ErrorKind::InvalidInput, "variance floor must be positive");
  GnbModel m;
  m.classes = enc.classes;
  m.var_floor = var_floor;
  m.means = RowMatrix::Zero(K, X.d());
  m.variances = RowMatrix::Zero(K, X.d());
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(K);
  for (Eigen::Index i = 0; i < X.n(); ++i) {
    const int k = enc.y[static_cast<std::size_t>(i)];
    m.means.row(k) += X.rows.row(i);
    counts(k) += 1.0;
  }
  for (Eigen::Index k = 0; k < K; ++k) m.means.row(k) /= counts(k);
  for (Eigen::Index i = 0; i < X.n(); ++i) {
    const int k = enc.y[static_cast<std::size_t>(i)];
    m.variances.row(k).array() += (X.rows.row(i) - m.means.row(k)).array().square();
  }
  for (Eigen::Index k = 0; k < K; ++k) {
    m.variances.row(k) = (m.variances.row(k).array() / counts(k)).max(var_floor).matrix();
  }
  m.log_priors = (counts / static_cast<double>(X.n())).array().log().matrix();
  return m;
}

/// Log joint densities, n x K.
inline Eigen::MatrixXd decision_scores(const GnbModel& m, const FeatureMatrix& X) {
  if (X.d() != m.means.cols()) throw Error(ErrorKind::InvalidInput, "feature dimension mismatch");
  const auto K = m.means.rows();
  Eigen::MatrixXd scores(X.n(), K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const Eigen::ArrayXd inv_var = m.variances.row(k).array().inverse().transpose();
    const double norm = -0.5 * (m.variances.row(k).array() * (2.0 * std::numbers::pi)).log().sum();
    for (Eigen::Index i = 0; i < X.n(); ++i) {
      const Eigen::ArrayXd diff = (X.rows.row(i) - m.means.row(k)).array().transpose();
      scores(i, k) = m.log_priors(k) + norm - 0.5 * (diff.square() * inv_var).sum();
    }
  }
  return scores;
}

inline nlohmann::json to_json(const GnbModel& m) {
  auto rows = [](const RowMatrix& a) {
    nlohmann::json j = nlohmann::json::array();
    for (Eigen::Index k = 0; k < a.rows(); ++k) j.push_back(std::vector<double>(a.row(k).data(), a.row(k).data() + a.cols()));
    return j;
  };
  return {{"type", "gnb"},
          {"classes", m.classes},
          {"var_floor", m.var_floor},
          {"log_priors", std::vector<double>(m.log_priors.data(), m.log_priors.data() + m.log_priors.size())},
          {"means", rows(m.means)},
          {"variances", rows(m.variances)}};
}

}  // namespace modwst
