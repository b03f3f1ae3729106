#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "modwst/error.hpp"

namespace modwst {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// n x d features with one label per row. `column_names` is empty or has d entries.
struct FeatureMatrix {
  RowMatrix rows;
  std::vector<std::string> labels;
  std::vector<std::string> column_names;

  Eigen::Index n() const noexcept { return rows.rows(); }
  Eigen::Index d() const noexcept { return rows.cols(); }

  void check() const {
    if (static_cast<std::size_t>(rows.rows()) != labels.size()) {
      throw Error(ErrorKind::InvalidInput, "feature matrix has " + std::to_string(rows.rows()) + " rows but " +
                                               std::to_string(labels.size()) + " labels");
    }
    if (!column_names.empty() && static_cast<std::size_t>(rows.cols()) != column_names.size()) {
      throw Error(ErrorKind::InvalidInput, "column name count does not match feature count");
    }
    if (!rows.allFinite()) throw Error(ErrorKind::InvalidInput, "feature matrix contains non-finite entries");
  }

  FeatureMatrix subset(const std::vector<std::size_t>& idx) const {
    FeatureMatrix out;
    out.rows.resize(static_cast<Eigen::Index>(idx.size()), rows.cols());
    out.labels.reserve(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      out.rows.row(static_cast<Eigen::Index>(i)) = rows.row(static_cast<Eigen::Index>(idx[i]));
      out.labels.push_back(labels[idx[i]]);
    }
    out.column_names = column_names;
    return out;
  }
};

/// Sorted distinct labels and the per-row class index into them.
struct EncodedLabels {
  std::vector<std::string> classes;
  std::vector<int> y;
};

inline EncodedLabels encode_labels(const std::vector<std::string>& labels) {
  EncodedLabels e;
  e.classes = labels;
  std::sort(e.classes.begin(), e.classes.end());
  e.classes.erase(std::unique(e.classes.begin(), e.classes.end()), e.classes.end());
  std::map<std::string, int> index;
  for (std::size_t k = 0; k < e.classes.size(); ++k) index[e.classes[k]] = static_cast<int>(k);
  e.y.reserve(labels.size());
  for (const auto& l : labels) e.y.push_back(index[l]);
  return e;
}

}  // namespace modwst
