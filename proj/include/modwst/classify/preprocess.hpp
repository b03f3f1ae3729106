#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "modwst/classify/features.hpp"
#include "modwst/error.hpp"

namespace modwst {

enum class ScalingKind { None, ZScore };

inline constexpr double kZeroVarianceThreshold = 1e-12;

/// Column-wise affine map learned from training rows, with optional removal of
/// constant columns.
struct Preprocessor {
  ScalingKind kind = ScalingKind::ZScore;
  bool drop_zero_variance = true;
  Eigen::VectorXd means;
  Eigen::VectorXd sds;  // population standard deviation
  std::vector<Eigen::Index> kept;

  FeatureMatrix apply(const FeatureMatrix& X) const {
    if (X.d() != means.size()) {
      throw Error(ErrorKind::InvalidInput, "preprocessor fitted on " + std::to_string(means.size()) +
                                               " columns, got " + std::to_string(X.d()));
    }
    FeatureMatrix out;
    out.labels = X.labels;
    out.rows.resize(X.n(), static_cast<Eigen::Index>(kept.size()));
    for (std::size_t c = 0; c < kept.size(); ++c) {
      const Eigen::Index src = kept[c];
      if (kind == ScalingKind::ZScore) {
        out.rows.col(static_cast<Eigen::Index>(c)) = (X.rows.col(src).array() - means(src)) / sds(src);
      } else {
        out.rows.col(static_cast<Eigen::Index>(c)) = X.rows.col(src);
      }
      if (!X.column_names.empty()) out.column_names.push_back(X.column_names[static_cast<std::size_t>(src)]);
    }
    return out;
  }
};

inline Preprocessor fit_preprocessor(const FeatureMatrix& X, ScalingKind kind, bool drop_zero_variance) {
  if (X.n() < 1) throw Error(ErrorKind::InvalidInput, "cannot fit a preprocessor on zero rows");
  Preprocessor p;
  p.kind = kind;
  p.drop_zero_variance = drop_zero_variance;
  p.means = X.rows.colwise().mean().transpose();
  p.sds.resize(X.d());
  for (Eigen::Index c = 0; c < X.d(); ++c) {
    const double var = (X.rows.col(c).array() - p.means(c)).square().mean();
    p.sds(c) = std::sqrt(var);
  }
  for (Eigen::Index c = 0; c < X.d(); ++c) {
    const bool constant = p.sds(c) < kZeroVarianceThreshold;
    if (constant && drop_zero_variance) continue;
    // z-scoring a kept constant column would divide by ~0; leave it centred only
    if (constant) p.sds(c) = 1.0;
    p.kept.push_back(c);
  }
  if (p.kept.empty()) throw Error(ErrorKind::EmptyFeatureSet, "all feature columns were dropped");
  return p;
}

inline nlohmann::json to_json(const Preprocessor& p) {
  return {{"kind", p.kind == ScalingKind::ZScore ? "zscore" : "none"},
          {"drop_zero_variance", p.drop_zero_variance},
          {"input_columns", p.means.size()},
          {"kept_columns", p.kept.size()},
          {"means", std::vector<double>(p.means.data(), p.means.data() + p.means.size())},
          {"sds", std::vector<double>(p.sds.data(), p.sds.data() + p.sds.size())},
          {"kept", std::vector<Eigen::Index>(p.kept.begin(), p.kept.end())}};
}

}  // namespace modwst
