#pragma once

// DWT and MODWT pyramid algorithms with circular boundaries.

#include <algorithm>
#include <bit>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "modwst/error.hpp"
#include "modwst/filters.hpp"

namespace modwst {

/// A finite real-valued series of length at least two.
class TimeSeries {
 public:
  TimeSeries() = default;
  explicit TimeSeries(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) {
      throw Error(ErrorKind::InvalidLength, "time series needs at least 2 values, got " + std::to_string(values_.size()));
    }
    for (std::size_t t = 0; t < values_.size(); ++t) {
      if (!std::isfinite(values_[t])) {
        throw Error(ErrorKind::InvalidInput, "non-finite value at index " + std::to_string(t));
      }
    }
  }

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t t) const noexcept { return values_[t]; }
  operator std::span<const double>() const noexcept { return values_; }

 private:
  std::vector<double> values_;
};

template <std::floating_point Real = double>
struct DwtCoefficients {
  std::vector<std::vector<Real>> detail;  // W_1..W_J, W_j has T/2^j entries
  std::vector<Real> smooth;               // V_J
  int levels = 0;
  std::string filter_name;

  std::size_t size() const {
    std::size_t n = smooth.size();
    for (const auto& w : detail) n += w.size();
    return n;
  }

  /// (W_1, ..., W_J, V_J) concatenated.
  std::vector<Real> flatten() const {
    std::vector<Real> out;
    out.reserve(size());
    for (const auto& w : detail) out.insert(out.end(), w.begin(), w.end());
    out.insert(out.end(), smooth.begin(), smooth.end());
    return out;
  }
};

template <std::floating_point Real = double>
struct ModwtCoefficients {
  std::vector<std::vector<Real>> detail;  // W~_1..W~_J, each of length T
  std::vector<Real> smooth;               // V~_J
  int levels = 0;
  std::string filter_name;
  bool levels_exceed_length = false;  // J > floor(log2 T)

  std::vector<Real> flatten() const {
    std::vector<Real> out;
    out.reserve(smooth.size() * (detail.size() + 1));
    for (const auto& w : detail) out.insert(out.end(), w.begin(), w.end());
    out.insert(out.end(), smooth.begin(), smooth.end());
    return out;
  }
};

/// floor(log2 T), the default number of MODWT levels.
inline int max_level_for_length(std::size_t T) {
  return T == 0 ? 0 : static_cast<int>(std::bit_width(T)) - 1;
}

namespace detail {

inline std::size_t circular_index(std::ptrdiff_t i, std::size_t n) {
  const auto m = static_cast<std::ptrdiff_t>(n);
  std::ptrdiff_t r = i % m;
  return static_cast<std::size_t>(r < 0 ? r + m : r);
}

}  // namespace detail

/// Pyramid DWT. W_{j,t} = sum_l h_l V_{j-1,(2t+1-l) mod T_{j-1}}, likewise V with g.
template <std::floating_point Real>
DwtCoefficients<Real> dwt(std::span<const Real> x, const WaveletFilter& f, int levels) {
  const std::size_t T = x.size();
  if (T < 2 || !std::has_single_bit(T)) {
    throw Error(ErrorKind::InvalidLength, "DWT requires a power-of-two length, got " + std::to_string(T));
  }
  if (levels < 1 || levels > max_level_for_length(T)) {
    throw Error(ErrorKind::InvalidLevel,
                "DWT level " + std::to_string(levels) + " outside [1, " + std::to_string(max_level_for_length(T)) + "]");
  }
  const auto h = f.h();
  const auto g = f.g();
  const std::size_t L = f.length();

  DwtCoefficients<Real> out;
  out.levels = levels;
  out.filter_name = f.name();
  std::vector<Real> v(x.begin(), x.end());
  for (int j = 1; j <= levels; ++j) {
    const std::size_t n_prev = v.size();
    const std::size_t n = n_prev / 2;
    std::vector<Real> w_next(n, Real(0));
    std::vector<Real> v_next(n, Real(0));
    for (std::size_t t = 0; t < n; ++t) {
      Real wa = 0;
      Real va = 0;
      for (std::size_t l = 0; l < L; ++l) {
        const std::size_t idx =
            detail::circular_index(static_cast<std::ptrdiff_t>(2 * t + 1) - static_cast<std::ptrdiff_t>(l), n_prev);
        wa += static_cast<Real>(h[l]) * v[idx];
        va += static_cast<Real>(g[l]) * v[idx];
      }
      w_next[t] = wa;
      v_next[t] = va;
    }
    out.detail.push_back(std::move(w_next));
    v = std::move(v_next);
  }
  out.smooth = std::move(v);
  return out;
}

inline DwtCoefficients<double> dwt(const TimeSeries& x, const WaveletFilter& f, int levels) {
  return dwt<double>(x.values(), f, levels);
}

/// The orthonormal DWT matrix with rows ordered (W_1, ..., W_J, V_J), built as
/// products of the per-stage circular filtering/decimation matrices. Test oracle.
inline Eigen::MatrixXd dwt_matrix(std::size_t T, const WaveletFilter& f, int levels) {
  if (T < 2 || !std::has_single_bit(T)) {
    throw Error(ErrorKind::InvalidLength, "DWT requires a power-of-two length, got " + std::to_string(T));
  }
  if (T > 1024) {
    throw Error(ErrorKind::InvalidLength, "dwt_matrix is limited to T <= 1024");
  }
  if (levels < 1 || levels > max_level_for_length(T)) {
    throw Error(ErrorKind::InvalidLevel, "DWT level out of range");
  }
  const auto h = f.h();
  const auto g = f.g();
  Eigen::MatrixXd result(static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(T));
  Eigen::MatrixXd smooth_map = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(T));
  Eigen::Index row = 0;
  std::size_t n_prev = T;
  for (int j = 1; j <= levels; ++j) {
    const std::size_t n = n_prev / 2;
    Eigen::MatrixXd hi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n_prev));
    Eigen::MatrixXd lo = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n_prev));
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t l = 0; l < h.size(); ++l) {
        const auto col = static_cast<Eigen::Index>(
            detail::circular_index(static_cast<std::ptrdiff_t>(2 * t + 1) - static_cast<std::ptrdiff_t>(l), n_prev));
        hi(static_cast<Eigen::Index>(t), col) += h[l];
        lo(static_cast<Eigen::Index>(t), col) += g[l];
      }
    }
    result.middleRows(row, static_cast<Eigen::Index>(n)) = hi * smooth_map;
    row += static_cast<Eigen::Index>(n);
    smooth_map = (lo * smooth_map).eval();
    n_prev = n;
  }
  result.middleRows(row, smooth_map.rows()) = smooth_map;
  return result;
}

/// One MODWT stage at level j: circular filtering of `v` with taps upsampled by 2^{j-1}.
template <std::floating_point Real>
void modwt_stage(std::span<const Real> v, std::span<const double> h_tilde, std::span<const double> g_tilde, int level,
                 std::span<Real> w_out, std::span<Real> v_out) {
  const std::size_t T = v.size();
  // 2^{j-1} mod T, computed without overflow for large j.
  std::size_t step = 1 % T;
  for (int i = 1; i < level; ++i) step = (step * 2) % T;
  std::fill(w_out.begin(), w_out.end(), Real(0));
  std::fill(v_out.begin(), v_out.end(), Real(0));
  std::size_t offset = 0;
  for (std::size_t l = 0; l < h_tilde.size(); ++l) {
    const auto hl = static_cast<Real>(h_tilde[l]);
    const auto gl = static_cast<Real>(g_tilde[l]);
    // t - offset wraps for t < offset
    for (std::size_t t = 0; t < offset; ++t) {
      const Real s = v[t + T - offset];
      w_out[t] += hl * s;
      v_out[t] += gl * s;
    }
    for (std::size_t t = offset; t < T; ++t) {
      const Real s = v[t - offset];
      w_out[t] += hl * s;
      v_out[t] += gl * s;
    }
    offset = (offset + step) % T;
  }
}

/// Pyramid MODWT for any length T >= 2. Levels beyond floor(log2 T) are computed
/// but flagged in `levels_exceed_length`.
template <std::floating_point Real>
ModwtCoefficients<Real> modwt(std::span<const Real> x, const ModwtFilter& f, int levels) {
  const std::size_t T = x.size();
  if (T < 2) {
    throw Error(ErrorKind::InvalidLength, "MODWT requires at least 2 values");
  }
  if (levels < 1) {
    throw Error(ErrorKind::InvalidLevel, "MODWT level must be >= 1, got " + std::to_string(levels));
  }
  ModwtCoefficients<Real> out;
  out.levels = levels;
  out.filter_name = f.base().name();
  out.levels_exceed_length = levels > max_level_for_length(T);
  out.detail.assign(static_cast<std::size_t>(levels), std::vector<Real>(T));
  std::vector<Real> v(x.begin(), x.end());
  std::vector<Real> v_next(T);
  for (int j = 1; j <= levels; ++j) {
    modwt_stage<Real>(v, f.h(), f.g(), j, out.detail[static_cast<std::size_t>(j - 1)], v_next);
    std::swap(v, v_next);
  }
  out.smooth = std::move(v);
  return out;
}

template <std::floating_point Real>
ModwtCoefficients<Real> modwt(std::span<const Real> x, const WaveletFilter& f, int levels) {
  return modwt<Real>(x, ModwtFilter(f), levels);
}

inline ModwtCoefficients<double> modwt(const TimeSeries& x, const WaveletFilter& f, int levels) {
  return modwt<double>(x.values(), ModwtFilter(f), levels);
}

inline ModwtCoefficients<double> modwt(const TimeSeries& x, const WaveletFilter& f) {
  return modwt(x, f, max_level_for_length(x.size()));
}

template <std::floating_point Real>
Real squared_norm(std::span<const Real> v) {
  Real acc = 0;
  for (Real a : v) acc += a * a;
  return acc;
}

/// Per-level energies (|W_1|^2, ..., |W_J|^2, |V_J|^2).
template <std::floating_point Real>
std::vector<Real> energy_decomposition(const DwtCoefficients<Real>& c) {
  std::vector<Real> e;
  for (const auto& w : c.detail) e.push_back(squared_norm<Real>(w));
  e.push_back(squared_norm<Real>(c.smooth));
  return e;
}

template <std::floating_point Real>
std::vector<Real> energy_decomposition(const ModwtCoefficients<Real>& c) {
  std::vector<Real> e;
  for (const auto& w : c.detail) e.push_back(squared_norm<Real>(w));
  e.push_back(squared_norm<Real>(c.smooth));
  return e;
}

}  // namespace modwst
