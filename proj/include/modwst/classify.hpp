#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "modwst/classify/centroid.hpp"
#include "modwst/classify/features.hpp"
#include "modwst/classify/gnb.hpp"
#include "modwst/classify/lda.hpp"
#include "modwst/classify/metrics.hpp"
#include "modwst/classify/preprocess.hpp"
#include "modwst/classify/split.hpp"
#include "modwst/classify/svm.hpp"

namespace modwst {

enum class ClassifierKind { SvmLinear, Lda, Gnb, Centroid };

inline std::string_view to_string(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::SvmLinear: return "svm_linear";
    case ClassifierKind::Lda: return "lda";
    case ClassifierKind::Gnb: return "gnb";
    case ClassifierKind::Centroid: return "centroid";
  }
  return "unknown";
}

inline ClassifierKind classifier_from_string(std::string_view s) {
  for (auto k : {ClassifierKind::SvmLinear, ClassifierKind::Lda, ClassifierKind::Gnb, ClassifierKind::Centroid}) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorKind::NotFound, "unknown classifier '" + std::string(s) + "'");
}

struct ClassifierParams {
  SvmParams svm;
  LdaParams lda;
  double gnb_var_floor = 1e-9;
};

using Model = std::variant<LinearModel, LdaModel, GnbModel, CentroidModel>;

inline Model train(ClassifierKind kind, const FeatureMatrix& X, const ClassifierParams& p = {}) {
  switch (kind) {
    case ClassifierKind::SvmLinear: return train_linear_svm(X, p.svm);
    case ClassifierKind::Lda: return train_lda(X, p.lda);
    case ClassifierKind::Gnb: return train_gnb(X, p.gnb_var_floor);
    case ClassifierKind::Centroid: return train_centroid(X);
  }
  throw Error(ErrorKind::InvalidInput, "unknown classifier kind");
}

namespace detail {

inline std::vector<std::string> argmax_labels(const Eigen::MatrixXd& scores, const std::vector<std::string>& classes) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(scores.rows()));
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < scores.cols(); ++k) {
      if (scores(i, k) > scores(i, best)) best = k;
    }
    out.push_back(classes[static_cast<std::size_t>(best)]);
  }
  return out;
}

}  // namespace detail

inline std::vector<std::string> predict(const LdaModel& m, const FeatureMatrix& X) {
  return detail::argmax_labels(decision_scores(m, X), m.classes);
}
inline std::vector<std::string> predict(const GnbModel& m, const FeatureMatrix& X) {
  return detail::argmax_labels(decision_scores(m, X), m.classes);
}
/// Nearest centroid; ties go to the lower class index.
inline std::vector<std::string> predict(const CentroidModel& m, const FeatureMatrix& X) {
  return detail::argmax_labels(decision_scores(m, X), m.classes);
}
inline std::vector<std::string> predict(const Model& m, const FeatureMatrix& X) {
  return std::visit([&](const auto& model) { return predict(model, X); }, m);
}

inline nlohmann::json to_json(const Model& m) {
  return std::visit([](const auto& model) { return to_json(model); }, m);
}

}  // namespace modwst
