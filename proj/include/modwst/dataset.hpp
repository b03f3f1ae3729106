#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "modwst/error.hpp"

namespace modwst {

/// Equal-length series with one class label each.
struct LabeledDataset {
  std::vector<std::vector<double>> series;
  std::vector<std::string> labels;
  std::optional<std::uint64_t> seed;

  std::size_t size() const noexcept { return series.size(); }
  std::size_t length() const noexcept { return series.empty() ? 0 : series.front().size(); }

  void check() const {
    if (series.size() != labels.size()) {
      throw Error(ErrorKind::InvalidInput, "dataset has " + std::to_string(series.size()) + " series but " +
                                               std::to_string(labels.size()) + " labels");
    }
    for (std::size_t i = 0; i < series.size(); ++i) {
      if (series[i].size() != length()) {
        throw Error(ErrorKind::FormatError, "series " + std::to_string(i) + " has length " +
                                                std::to_string(series[i].size()) + ", expected " + std::to_string(length()));
      }
    }
  }

  std::map<std::string, std::size_t> class_counts() const {
    std::map<std::string, std::size_t> counts;
    for (const auto& l : labels) ++counts[l];
    return counts;
  }
};

}  // namespace modwst
