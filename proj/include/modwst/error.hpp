#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace modwst {

enum class ErrorKind {
  NotFound,
  InvalidFilter,
  InvalidLength,
  InvalidLevel,
  InvalidSize,
  FilterTooLong,
  StratificationError,
  EmptyFeatureSet,
  InvalidLabels,
  InvalidInput,
  NumericalError,
  FormatError,
  ParseError,
  IoError,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::InvalidFilter: return "InvalidFilter";
    case ErrorKind::InvalidLength: return "InvalidLength";
    case ErrorKind::InvalidLevel: return "InvalidLevel";
    case ErrorKind::InvalidSize: return "InvalidSize";
    case ErrorKind::FilterTooLong: return "FilterTooLong";
    case ErrorKind::StratificationError: return "StratificationError";
    case ErrorKind::EmptyFeatureSet: return "EmptyFeatureSet";
    case ErrorKind::InvalidLabels: return "InvalidLabels";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NumericalError: return "NumericalError";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace modwst
