#pragma once

// Accuracy with exact binomial interval, Cohen's kappa and confusion matrices.

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/special_functions/beta.hpp>
#include <nlohmann/json.hpp>

#include "modwst/error.hpp"

namespace modwst {

/// counts[p][r]: rows are predicted classes, columns the reference classes.
struct ConfusionMatrix {
  std::vector<std::string> classes;
  std::vector<std::vector<std::int64_t>> counts;

  std::int64_t total() const {
    std::int64_t n = 0;
    for (const auto& row : counts)
      for (auto c : row) n += c;
    return n;
  }
};

struct EvalReport {
  double accuracy = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double kappa = 0.0;
  std::int64_t n = 0;
  std::int64_t correct = 0;
  ConfusionMatrix confusion;
};

/// Two-sided Clopper-Pearson interval for `successes` out of `trials`.
inline std::pair<double, double> clopper_pearson(std::int64_t successes, std::int64_t trials, double confidence = 0.95) {
  if (trials <= 0 || successes < 0 || successes > trials) {
    throw Error(ErrorKind::InvalidInput, "invalid binomial counts");
  }
  const double alpha = 1.0 - confidence;
  const auto x = static_cast<double>(successes);
  const auto n = static_cast<double>(trials);
  const double lo = successes == 0 ? 0.0 : boost::math::ibeta_inv(x, n - x + 1.0, alpha / 2.0);
  const double hi = successes == trials ? 1.0 : boost::math::ibeta_inv(x + 1.0, n - x, 1.0 - alpha / 2.0);
  return {lo, hi};
}

inline EvalReport evaluate(const ConfusionMatrix& cm) {
  const std::size_t K = cm.classes.size();
  if (cm.counts.size() != K) throw Error(ErrorKind::InvalidInput, "confusion matrix shape mismatch");
  for (const auto& row : cm.counts) {
    if (row.size() != K) throw Error(ErrorKind::InvalidInput, "confusion matrix shape mismatch");
    for (auto c : row) {
      if (c < 0) throw Error(ErrorKind::InvalidInput, "negative confusion count");
    }
  }
  EvalReport r;
  r.confusion = cm;
  r.n = cm.total();
  if (r.n == 0) throw Error(ErrorKind::InvalidInput, "empty confusion matrix");
  std::vector<double> row_sum(K, 0.0), col_sum(K, 0.0);
  for (std::size_t p = 0; p < K; ++p) {
    r.correct += cm.counts[p][p];
    for (std::size_t q = 0; q < K; ++q) {
      row_sum[p] += static_cast<double>(cm.counts[p][q]);
      col_sum[q] += static_cast<double>(cm.counts[p][q]);
    }
  }
  const auto N = static_cast<double>(r.n);
  r.accuracy = static_cast<double>(r.correct) / N;
  double pe = 0.0;
  for (std::size_t k = 0; k < K; ++k) pe += row_sum[k] * col_sum[k];
  pe /= N * N;
  r.kappa = pe < 1.0 ? (r.accuracy - pe) / (1.0 - pe) : 1.0;
  std::tie(r.ci_low, r.ci_high) = clopper_pearson(r.correct, r.n);
  return r;
}

/// Classes are the sorted union of both label vectors unless `classes` is given.
inline EvalReport evaluate(const std::vector<std::string>& y_true, const std::vector<std::string>& y_pred,
                           std::vector<std::string> classes = {}) {
  if (y_true.size() != y_pred.size()) {
    throw Error(ErrorKind::InvalidInput, "label vectors differ in length (" + std::to_string(y_true.size()) + " vs " +
                                             std::to_string(y_pred.size()) + ")");
  }
  if (y_true.empty()) throw Error(ErrorKind::InvalidInput, "nothing to evaluate");
  if (classes.empty()) {
    classes = y_true;
    classes.insert(classes.end(), y_pred.begin(), y_pred.end());
  }
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  std::map<std::string, std::size_t> index;
  for (std::size_t k = 0; k < classes.size(); ++k) index[classes[k]] = k;

  ConfusionMatrix cm;
  cm.classes = classes;
  cm.counts.assign(classes.size(), std::vector<std::int64_t>(classes.size(), 0));
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const auto t = index.find(y_true[i]);
    const auto p = index.find(y_pred[i]);
    if (t == index.end() || p == index.end()) throw Error(ErrorKind::InvalidInput, "label outside the class list");
    ++cm.counts[p->second][t->second];
  }
  return evaluate(cm);
}

inline nlohmann::json to_json(const ConfusionMatrix& cm) {
  return {{"classes", cm.classes}, {"rows", "predicted"}, {"columns", "reference"}, {"counts", cm.counts}};
}

inline nlohmann::json to_json(const EvalReport& r) {
  return {{"accuracy", r.accuracy}, {"ci_low", r.ci_low},   {"ci_high", r.ci_high},
          {"kappa", r.kappa},       {"n", r.n},             {"correct", r.correct},
          {"confusion", to_json(r.confusion)}};
}

/// Aligned text table with columns Classifier, Accuracy (%), LL (%), UL (%), Kappa.
inline std::string render_table(const std::vector<std::pair<std::string, EvalReport>>& rows) {
  std::size_t w = std::string("Classifier").size();
  for (const auto& [name, _] : rows) w = std::max(w, name.size());
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(w)) << "Classifier" << std::right << "  " << std::setw(12)
     << "Accuracy (%)" << "  " << std::setw(7) << "LL (%)" << "  " << std::setw(7) << "UL (%)" << "  " << std::setw(7)
     << "Kappa" << "\n";
  os << std::fixed;
  for (const auto& [name, r] : rows) {
    os << std::left << std::setw(static_cast<int>(w)) << name << std::right << "  " << std::setw(12)
       << std::setprecision(1) << 100.0 * r.accuracy << "  " << std::setw(7) << std::setprecision(2) << 100.0 * r.ci_low
       << "  " << std::setw(7) << std::setprecision(2) << 100.0 * r.ci_high << "  " << std::setw(7)
       << std::setprecision(4) << r.kappa << "\n";
  }
  return os.str();
}

/// CSV with a "prediction\reference" corner cell, class names across and down.
inline std::string confusion_csv(const ConfusionMatrix& cm) {
  std::ostringstream os;
  os << "prediction\\reference";
  for (const auto& c : cm.classes) os << ',' << c;
  os << '\n';
  for (std::size_t p = 0; p < cm.classes.size(); ++p) {
    os << cm.classes[p];
    for (auto c : cm.counts[p]) os << ',' << c;
    os << '\n';
  }
  return os.str();
}

}  // namespace modwst
