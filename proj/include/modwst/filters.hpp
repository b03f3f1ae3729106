#pragma once

// Orthonormal wavelet/scaling filter pairs and their validity checks.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "modwst/error.hpp"

namespace modwst {

using Taps = std::vector<double>;

inline constexpr double kDefaultFilterTolerance = 1e-10;

/// g_l = (-1)^{l+1} h_{L-1-l}
inline Taps scaling_from_wavelet(std::span<const double> h) {
  const std::size_t L = h.size();
  if (L == 0 || L % 2 != 0) {
    throw Error(ErrorKind::InvalidFilter, "filter length must be even and positive, got " + std::to_string(L));
  }
  Taps g(L);
  for (std::size_t l = 0; l < L; ++l) {
    const double v = h[L - 1 - l];
    g[l] = (l % 2 == 0) ? -v : v;
  }
  return g;
}

/// h_l = (-1)^l g_{L-1-l}
inline Taps wavelet_from_scaling(std::span<const double> g) {
  const std::size_t L = g.size();
  if (L == 0 || L % 2 != 0) {
    throw Error(ErrorKind::InvalidFilter, "filter length must be even and positive, got " + std::to_string(L));
  }
  Taps h(L);
  for (std::size_t l = 0; l < L; ++l) {
    const double v = g[L - 1 - l];
    h[l] = (l % 2 == 0) ? v : -v;
  }
  return h;
}

struct ValidationReport {
  double sum_zero_residual = 0.0;
  double unit_energy_residual = 0.0;
  double max_orthogonality_residual = 0.0;
  double tolerance = kDefaultFilterTolerance;
  bool passed = false;
};

/// Residuals of the zero-sum, unit-energy and even-shift orthogonality conditions.
inline ValidationReport validate_filter(std::span<const double> h, double tol = kDefaultFilterTolerance) {
  if (!(tol > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "validation tolerance must be positive");
  }
  ValidationReport r;
  r.tolerance = tol;
  double sum = 0.0;
  double energy = 0.0;
  for (double v : h) {
    sum += v;
    energy += v * v;
  }
  r.sum_zero_residual = std::abs(sum);
  r.unit_energy_residual = std::abs(energy - 1.0);
  const std::size_t L = h.size();
  for (std::size_t shift = 2; shift < L; shift += 2) {
    double acc = 0.0;
    for (std::size_t l = 0; l + shift < L; ++l) acc += h[l] * h[l + shift];
    r.max_orthogonality_residual = std::max(r.max_orthogonality_residual, std::abs(acc));
  }
  r.passed = r.sum_zero_residual <= tol && r.unit_energy_residual <= tol && r.max_orthogonality_residual <= tol;
  return r;
}

/// A wavelet filter {h_l} with its quadrature-mirror scaling filter {g_l}.
/// The scaling filter is always derived from h, never supplied independently.
class WaveletFilter {
 public:
  WaveletFilter(std::string name, Taps h) : name_(std::move(name)), h_(std::move(h)) {
    g_ = scaling_from_wavelet(h_);
    if (h_.front() == 0.0 || h_.back() == 0.0) {
      throw Error(ErrorKind::InvalidFilter, "filter '" + name_ + "' must have nonzero end taps");
    }
  }

  /// Builds and checks the filter; throws InvalidFilter if the conditions fail at `tol`.
  static WaveletFilter validated(std::string name, Taps h, double tol = kDefaultFilterTolerance) {
    WaveletFilter f(std::move(name), std::move(h));
    const auto report = validate_filter(f.h(), tol);
    if (!report.passed) {
      throw Error(ErrorKind::InvalidFilter,
                  "filter '" + f.name() + "' fails validation (sum " + std::to_string(report.sum_zero_residual) +
                      ", energy " + std::to_string(report.unit_energy_residual) + ", orthogonality " +
                      std::to_string(report.max_orthogonality_residual) + ")");
    }
    return f;
  }

  const std::string& name() const noexcept { return name_; }
  std::span<const double> h() const noexcept { return h_; }
  std::span<const double> g() const noexcept { return g_; }
  std::size_t length() const noexcept { return h_.size(); }

 private:
  std::string name_;
  Taps h_;
  Taps g_;
};

/// MODWT filters: each tap of the base pair divided by sqrt(2). The pyramid
/// applies this per stage, giving the cumulative 2^{-j/2} at level j.
class ModwtFilter {
 public:
  explicit ModwtFilter(WaveletFilter base) : base_(std::move(base)) {
    constexpr double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    h_.reserve(base_.length());
    g_.reserve(base_.length());
    for (double v : base_.h()) h_.push_back(v * inv_sqrt2);
    for (double v : base_.g()) g_.push_back(v * inv_sqrt2);
  }

  const WaveletFilter& base() const noexcept { return base_; }
  std::span<const double> h() const noexcept { return h_; }
  std::span<const double> g() const noexcept { return g_; }
  std::size_t length() const noexcept { return h_.size(); }

 private:
  WaveletFilter base_;
  Taps h_;
  Taps g_;
};

inline ModwtFilter modwt_rescale(const WaveletFilter& f) { return ModwtFilter(f); }

namespace detail {

// Published scaling filters (Daubechies extremal phase and least asymmetric).
inline constexpr std::array<double, 4> kD4Scaling = {
    0.48296291314453414337, 0.83651630373780790557, 0.22414386804201338102, -0.12940952255126038117};
inline constexpr std::array<double, 6> kD6Scaling = {
    0.3326705529500826, 0.8068915093110925, 0.4598775021184915,
    -0.1350110200102546, -0.0854412738820267, 0.0352262918857095};
inline constexpr std::array<double, 8> kLa8Scaling = {
    -0.07576571478950221, -0.029635527646002493, 0.497618667632775, 0.8037387518051321,
    0.29785779560530606,  -0.09921954357663353, -0.012603967262031304, 0.032223100604051466};

}  // namespace detail

inline std::vector<std::string> builtin_filter_names() { return {"haar", "d4", "d6", "la8"}; }

inline WaveletFilter builtin_filter(std::string_view name) {
  std::string key(name);
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (key == "haar") {
    constexpr double s = 1.0 / std::numbers::sqrt2;
    return WaveletFilter("haar", {s, -s});
  }
  if (key == "d4") return WaveletFilter("d4", wavelet_from_scaling(detail::kD4Scaling));
  if (key == "d6") return WaveletFilter("d6", wavelet_from_scaling(detail::kD6Scaling));
  if (key == "la8") return WaveletFilter("la8", wavelet_from_scaling(detail::kLa8Scaling));
  throw Error(ErrorKind::NotFound, "unknown wavelet filter '" + std::string(name) + "'");
}

/// Reads {name, h: [taps]}; any "g" field in the document is ignored.
inline WaveletFilter filter_from_json(const nlohmann::json& doc, double tol = kDefaultFilterTolerance) {
  if (!doc.is_object() || !doc.contains("h") || !doc["h"].is_array()) {
    throw Error(ErrorKind::FormatError, "filter JSON must be an object with an 'h' array");
  }
  const std::string name = doc.value("name", std::string("custom"));
  Taps h;
  for (const auto& v : doc["h"]) {
    if (!v.is_number()) throw Error(ErrorKind::ParseError, "filter tap is not a number");
    h.push_back(v.get<double>());
  }
  return WaveletFilter::validated(name, std::move(h), tol);
}

inline nlohmann::json to_json(const WaveletFilter& f) {
  return {{"name", f.name()}, {"h", Taps(f.h().begin(), f.h().end())}};
}

}  // namespace modwst
