#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "modwst/transforms.hpp"

using namespace modwst;
using Catch::Approx;

namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

std::vector<double> gaussian(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<double> v(n);
  for (auto& x : v) x = nd(rng);
  return v;
}

std::vector<double> rotate_right(const std::vector<double>& v, std::size_t s) {
  std::vector<double> out(v.size());
  for (std::size_t t = 0; t < v.size(); ++t) out[(t + s) % v.size()] = v[t];
  return out;
}

double sum_sq(const std::vector<double>& v) {
  double a = 0.0;
  for (double x : v) a += x * x;
  return a;
}

}  // namespace

TEST_CASE("TimeSeries invariants", "[transforms]") {
  CHECK_THROWS_AS(TimeSeries({1.0}), Error);
  CHECK_THROWS_AS(TimeSeries({1.0, std::nan("")}), Error);
  CHECK(TimeSeries({1.0, 2.0}).size() == 2);
}

TEST_CASE("DWT of (1,2,3,4) with haar", "[transforms][dwt]") {
  const TimeSeries x({1.0, 2.0, 3.0, 4.0});
  const auto c = dwt(x, builtin_filter("haar"), 2);
  REQUIRE(c.detail.size() == 2);
  CHECK(c.detail[0][0] == Approx(kInvSqrt2));
  CHECK(c.detail[0][1] == Approx(kInvSqrt2));
  CHECK(c.detail[1][0] == Approx(2.0));
  CHECK(c.smooth[0] == Approx(5.0));
  CHECK(c.size() == 4);

  // same values through the explicit matrix
  const auto W = dwt_matrix(4, builtin_filter("haar"), 2);
  Eigen::Vector4d xv(1, 2, 3, 4);
  const Eigen::Vector4d mw = W * xv;
  const auto flat = c.flatten();
  for (int i = 0; i < 4; ++i) CHECK(mw(i) == Approx(flat[static_cast<std::size_t>(i)]));

  const auto e = energy_decomposition(c);
  REQUIRE(e.size() == 3);
  CHECK(e[0] == Approx(1.0));
  CHECK(e[1] == Approx(4.0));
  CHECK(e[2] == Approx(25.0));
}

TEST_CASE("DWT of a constant series", "[transforms][dwt]") {
  for (const auto& name : builtin_filter_names()) {
    const auto f = builtin_filter(name);
    const std::vector<double> x(64, 3.0);
    const int J = 4;
    const auto c = dwt<double>(x, f, J);
    for (const auto& w : c.detail) {
      for (double v : w) CHECK(std::abs(v) < 1e-12);
    }
    for (double v : c.smooth) CHECK(v == Approx(3.0 * std::pow(2.0, J / 2.0)));
  }
}

TEST_CASE("DWT errors", "[transforms][dwt]") {
  const auto haar = builtin_filter("haar");
  const std::vector<double> x6(6, 1.0);
  try {
    dwt<double>(x6, haar, 1);
    FAIL();
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidLength);
  }
  const std::vector<double> x8(8, 1.0);
  try {
    dwt<double>(x8, haar, 4);
    FAIL();
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidLevel);
  }
}

TEST_CASE("DWT matrix oracle", "[transforms][dwt]") {
  SECTION("T=2 haar") {
    const auto W = dwt_matrix(2, builtin_filter("haar"), 1);
    CHECK(W(0, 0) == Approx(-kInvSqrt2));
    CHECK(W(0, 1) == Approx(kInvSqrt2));
    CHECK(W(1, 0) == Approx(kInvSqrt2));
    CHECK(W(1, 1) == Approx(kInvSqrt2));
  }
  SECTION("orthonormal and reconstructs") {
    const auto W = dwt_matrix(8, builtin_filter("haar"), 3);
    CHECK((W.transpose() * W - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-12);
    const auto xs = gaussian(8, 3);
    const Eigen::Map<const Eigen::VectorXd> xv(xs.data(), 8);
    CHECK((W.transpose() * (W * xv) - xv).cwiseAbs().maxCoeff() < 1e-12);
  }
  SECTION("pyramid equals matrix product for random inputs") {
    for (const auto& name : builtin_filter_names()) {
      const auto f = builtin_filter(name);
      for (std::size_t T : {2u, 4u, 8u, 16u, 32u}) {
        const int J = max_level_for_length(T);
        const auto W = dwt_matrix(T, f, J);
        for (int trial = 0; trial < 10; ++trial) {
          const auto xs = gaussian(T, 1000 * T + static_cast<std::uint64_t>(trial));
          const auto flat = dwt<double>(xs, f, J).flatten();
          const Eigen::Map<const Eigen::VectorXd> xv(xs.data(), static_cast<Eigen::Index>(T));
          const Eigen::VectorXd mw = W * xv;
          for (std::size_t i = 0; i < T; ++i) CHECK(std::abs(mw(static_cast<Eigen::Index>(i)) - flat[i]) < 1e-10);
        }
      }
    }
  }
  CHECK_THROWS_AS(dwt_matrix(2048, builtin_filter("haar"), 1), Error);
}

TEST_CASE("MODWT of (1,2,3,4) level 1, hand evaluated", "[transforms][modwt]") {
  const TimeSeries x({1.0, 2.0, 3.0, 4.0});
  const auto c = modwt(x, builtin_filter("haar"), 1);
  // (X_t - X_{t-1})/2 and (X_t + X_{t-1})/2 with circular wrap
  const std::vector<double> w = {-1.5, 0.5, 0.5, 0.5};
  const std::vector<double> v = {2.5, 1.5, 2.5, 3.5};
  for (std::size_t t = 0; t < 4; ++t) {
    CHECK(c.detail[0][t] == Approx(w[t]));
    CHECK(c.smooth[t] == Approx(v[t]));
  }
}

TEST_CASE("MODWT constant series", "[transforms][modwt]") {
  const std::vector<double> x(37, -2.0);
  for (const auto& name : builtin_filter_names()) {
    const auto c = modwt<double>(x, builtin_filter(name), 5);
    for (const auto& w : c.detail) {
      for (double v : w) CHECK(std::abs(v) < 1e-12);
    }
    for (double v : c.smooth) CHECK(v == Approx(-2.0));
  }
}

TEST_CASE("MODWT against direct equivalent-filter convolution", "[transforms][modwt]") {
  // Level-j wavelet filter built by convolving upsampled stage filters, then
  // applied by direct circular convolution.
  for (const auto& name : builtin_filter_names()) {
    const auto mf = modwt_rescale(builtin_filter(name));
    const std::size_t T = 50;
    const int J = 4;
    const auto xs = gaussian(T, 42);
    const auto c = modwt<double>(xs, mf, J);
    std::vector<double> smooth_eq{1.0};
    for (int j = 1; j <= J; ++j) {
      const std::size_t up = std::size_t{1} << (j - 1);
      auto upsampled = [&](std::span<const double> taps) {
        std::vector<double> u((taps.size() - 1) * up + 1, 0.0);
        for (std::size_t l = 0; l < taps.size(); ++l) u[l * up] = taps[l];
        return u;
      };
      auto conv = [](const std::vector<double>& a, const std::vector<double>& b) {
        std::vector<double> r(a.size() + b.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.size(); ++i)
          for (std::size_t k = 0; k < b.size(); ++k) r[i + k] += a[i] * b[k];
        return r;
      };
      const auto wave_eq = conv(smooth_eq, upsampled(mf.h()));
      smooth_eq = conv(smooth_eq, upsampled(mf.g()));
      for (std::size_t t = 0; t < T; ++t) {
        double acc = 0.0;
        for (std::size_t l = 0; l < wave_eq.size(); ++l) acc += wave_eq[l] * xs[(t + T * 64 - l) % T];
        CHECK(c.detail[static_cast<std::size_t>(j - 1)][t] == Approx(acc).margin(1e-12));
      }
    }
  }
}

TEST_CASE("MODWT energy preservation including non powers of two", "[transforms][modwt]") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t T = 3 + rng() % 2046;
    const auto xs = gaussian(T, rng());
    for (const auto& name : builtin_filter_names()) {
      const auto c = modwt<double>(xs, builtin_filter(name), max_level_for_length(T));
      double total = 0.0;
      for (double e : energy_decomposition(c)) total += e;
      CHECK(std::abs(total - sum_sq(xs)) / sum_sq(xs) < 1e-8);
    }
  }
}

TEST_CASE("MODWT shift equivariance", "[transforms][modwt]") {
  const auto xs = gaussian(100, 8);
  for (const auto& name : builtin_filter_names()) {
    const auto f = builtin_filter(name);
    const auto base = modwt<double>(xs, f, 6);
    for (std::size_t s : {1u, 7u, 64u}) {
      const auto shifted = modwt<double>(rotate_right(xs, s), f, 6);
      for (std::size_t j = 0; j < 6; ++j) {
        const auto expected = rotate_right(base.detail[j], s);
        for (std::size_t t = 0; t < xs.size(); ++t) CHECK(std::abs(shifted.detail[j][t] - expected[t]) < 1e-12);
      }
    }
  }
}

TEST_CASE("MODWT levels and sizes", "[transforms][modwt]") {
  const auto xs = gaussian(20, 1);
  const auto c = modwt<double>(xs, builtin_filter("d4"), 4);
  CHECK(c.flatten().size() == 5 * 20);
  CHECK_FALSE(c.levels_exceed_length);
  const auto deep = modwt<double>(xs, builtin_filter("d4"), 7);
  CHECK(deep.levels_exceed_length);
  double total = 0.0;
  for (double e : energy_decomposition(deep)) total += e;
  CHECK(total == Approx(sum_sq(xs)).epsilon(1e-10));
  try {
    modwt<double>(xs, builtin_filter("haar"), 0);
    FAIL();
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidLevel);
  }
}

TEST_CASE("energy decomposition edge cases", "[transforms]") {
  const std::vector<double> zeros(16, 0.0);
  for (double e : energy_decomposition(modwt<double>(zeros, builtin_filter("haar"), 4))) CHECK(e == 0.0);
  const auto noise = gaussian(1024, 77);
  double total = 0.0;
  for (double e : energy_decomposition(dwt<double>(noise, builtin_filter("la8"), 10))) total += e;
  CHECK(std::abs(total / sum_sq(noise) - 1.0) < 1e-8);
}
