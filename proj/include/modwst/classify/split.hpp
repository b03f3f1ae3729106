#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "modwst/classify/features.hpp"
#include "modwst/dataset.hpp"
#include "modwst/error.hpp"
#include "modwst/simulate.hpp"

namespace modwst {

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Per-class shuffle, then round(fraction * n_class) members to train (at least
/// one on each side). Both index lists are returned in ascending order.
inline SplitIndices stratified_split_indices(const std::vector<std::string>& labels, double train_fraction,
                                             std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorKind::InvalidInput, "train fraction must lie in (0, 1)");
  }
  std::map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);

  SplitIndices out;
  std::uint64_t class_no = 0;
  for (auto& [label, idx] : members) {
    if (idx.size() < 2) {
      throw Error(ErrorKind::StratificationError, "class '" + label + "' has fewer than 2 members");
    }
    // Fisher-Yates with the portable sampler
    Sampler rng(derive_seed(seed, 0x5b117, class_no++));
    for (std::size_t i = idx.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(i + 1));
      std::swap(idx[i], idx[std::min(j, i)]);
    }
    auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(idx.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, idx.size() - 1);
    out.train.insert(out.train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test.insert(out.test.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

inline std::pair<FeatureMatrix, FeatureMatrix> stratified_split(const FeatureMatrix& X, double train_fraction,
                                                                std::uint64_t seed) {
  const auto s = stratified_split_indices(X.labels, train_fraction, seed);
  return {X.subset(s.train), X.subset(s.test)};
}

inline std::pair<LabeledDataset, LabeledDataset> stratified_split(const LabeledDataset& ds, double train_fraction,
                                                                  std::uint64_t seed) {
  const auto s = stratified_split_indices(ds.labels, train_fraction, seed);
  auto pick = [&](const std::vector<std::size_t>& idx) {
    LabeledDataset out;
    out.seed = ds.seed;
    for (auto i : idx) {
      out.series.push_back(ds.series[i]);
      out.labels.push_back(ds.labels[i]);
    }
    return out;
  };
  return {pick(s.train), pick(s.test)};
}

}  // namespace modwst
