#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "modwst/classify/features.hpp"
#include "modwst/error.hpp"

namespace modwst {

struct CentroidModel {
  std::vector<std::string> classes;
  RowMatrix centroids;  // K x d
};

inline CentroidModel train_centroid(const FeatureMatrix& X) {
  X.check();
  const auto enc = encode_labels(X.labels);
  const auto K = static_cast<Eigen::Index>(enc.classes.size());
  if (K < 1) throw Error(ErrorKind::InvalidLabels, "no classes to fit");
  CentroidModel m;
  m.classes = enc.classes;
  m.centroids = RowMatrix::Zero(K, X.d());
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(K);
  for (Eigen::Index i = 0; i < X.n(); ++i) {
    const int k = enc.y[static_cast<std::size_t>(i)];
    m.centroids.row(k) += X.rows.row(i);
    counts(k) += 1.0;
  }
  for (Eigen::Index k = 0; k < K; ++k) m.centroids.row(k) /= counts(k);
  return m;
}

/// Negative squared distances, so that larger is better as for the other models.
inline Eigen::MatrixXd decision_scores(const CentroidModel& m, const FeatureMatrix& X) {
  if (X.d() != m.centroids.cols()) throw Error(ErrorKind::InvalidInput, "feature dimension mismatch");
  Eigen::MatrixXd scores(X.n(), m.centroids.rows());
  for (Eigen::Index i = 0; i < X.n(); ++i) {
    for (Eigen::Index k = 0; k < m.centroids.rows(); ++k) scores(i, k) = -(X.rows.row(i) - m.centroids.row(k)).squaredNorm();
  }
  return scores;
}

inline nlohmann::json to_json(const CentroidModel& m) {
  nlohmann::json c = nlohmann::json::array();
  for (Eigen::Index k = 0; k < m.centroids.rows(); ++k) {
    c.push_back(std::vector<double>(m.centroids.row(k).data(), m.centroids.row(k).data() + m.centroids.cols()));
  }
  return {{"type", "centroid"}, {"classes", m.classes}, {"centroids", c}};
}

}  // namespace modwst
