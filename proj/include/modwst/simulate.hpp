#pragma once

// Seeded generators for the fifteen stationary benchmark processes.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "modwst/dataset.hpp"
#include "modwst/error.hpp"

namespace modwst {

enum class ProcessClass { AR1a, AR1b, AR1c, AR2, ARMA1a, ARMA1b, N1, N2, T1, T3, C, U, E, B, P };

inline constexpr std::array<ProcessClass, 15> kAllProcessClasses = {
    ProcessClass::AR1a, ProcessClass::AR1b,   ProcessClass::AR1c, ProcessClass::AR2, ProcessClass::ARMA1a,
    ProcessClass::ARMA1b, ProcessClass::N1,   ProcessClass::N2,   ProcessClass::T1,  ProcessClass::T3,
    ProcessClass::C,    ProcessClass::U,      ProcessClass::E,    ProcessClass::B,   ProcessClass::P};

inline constexpr std::array<std::string_view, 15> kProcessClassNames = {
    "AR1a", "AR1b", "AR1c", "AR2", "ARMA1a", "ARMA1b", "N1", "N2", "T1", "T3", "C", "U", "E", "B", "P"};

inline std::string_view to_string(ProcessClass c) { return kProcessClassNames[static_cast<std::size_t>(c)]; }

enum class Innovation { Normal, StudentT, Cauchy, Uniform, Exponential, Bernoulli, Poisson };

/// Parameters of one process class. AR/ARMA classes use Normal innovations.
struct ProcessSpec {
  ProcessClass id = ProcessClass::N1;
  std::vector<double> ar;  // phi_1..phi_p
  std::vector<double> ma;  // theta_1..theta_q
  Innovation innovation = Innovation::Normal;
  double sd = 0.0;         // Normal
  int dof = 0;             // StudentT
  double scale = 0.0;      // Cauchy gamma
  double lower = 0.0;      // Uniform
  double upper = 0.0;
  double rate = 0.0;       // Exponential lambda / Poisson lambda
  double prob = 0.0;       // Bernoulli p
};

namespace detail {

// AR(2) with phi1=0.8, phi2=-0.9: stationarity triangle phi2+phi1<1, phi2-phi1<1, |phi2|<1.
inline constexpr double kAr2Phi1 = 0.8;
inline constexpr double kAr2Phi2 = -0.9;
static_assert(kAr2Phi1 + kAr2Phi2 < 1.0 && kAr2Phi2 - kAr2Phi1 < 1.0 && kAr2Phi2 > -1.0 && kAr2Phi2 < 1.0,
              "AR(2) benchmark parameters must be stationary");

}  // namespace detail

inline ProcessSpec process_spec(ProcessClass id) {
  ProcessSpec s;
  s.id = id;
  s.sd = 0.5;
  switch (id) {
    case ProcessClass::AR1a: s.ar = {0.8}; break;
    case ProcessClass::AR1b: s.ar = {0.4}; break;
    case ProcessClass::AR1c: s.ar = {-0.4}; break;
    case ProcessClass::AR2: s.ar = {detail::kAr2Phi1, detail::kAr2Phi2}; break;
    case ProcessClass::ARMA1a: s.ar = {0.8}; s.ma = {0.8}; break;
    case ProcessClass::ARMA1b: s.ar = {0.8}; s.ma = {-0.8}; break;
    case ProcessClass::N1: break;
    case ProcessClass::N2: s.sd = 2.5; break;
    case ProcessClass::T1: s.innovation = Innovation::StudentT; s.dof = 1; break;
    case ProcessClass::T3: s.innovation = Innovation::StudentT; s.dof = 3; break;
    case ProcessClass::C: s.innovation = Innovation::Cauchy; s.scale = 0.5; break;
    case ProcessClass::U: s.innovation = Innovation::Uniform; s.lower = -0.75; s.upper = 0.75; break;
    case ProcessClass::E: s.innovation = Innovation::Exponential; s.rate = 2.0; break;
    case ProcessClass::B: s.innovation = Innovation::Bernoulli; s.prob = 0.5; break;
    case ProcessClass::P: s.innovation = Innovation::Poisson; s.rate = 0.25; break;
  }
  return s;
}

inline ProcessSpec process_spec(std::string_view name) {
  for (std::size_t i = 0; i < kProcessClassNames.size(); ++i) {
    if (kProcessClassNames[i] == name) return process_spec(kAllProcessClasses[i]);
  }
  throw Error(ErrorKind::NotFound, "unknown process class '" + std::string(name) + "'");
}

/// SplitMix64 finalizer; used to derive independent sub-seeds.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for stream (a, b) under `seed`; independent of the order streams are drawn in.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return mix64(mix64(mix64(seed) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

/// Portable variate generation on top of mt19937_64 (identical output on every platform).
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1].
  double uniform01_open_low() { return 1.0 - uniform01(); }

  /// Marsaglia polar method.
  double standard_normal() {
    if (spare_) {
      const double v = *spare_;
      spare_.reset();
      return v;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    return u * f;
  }

  /// Normal over sqrt(chi-square/nu), chi-square as a sum of nu squared normals.
  double student_t(int nu) {
    const double z = standard_normal();
    double chi = 0.0;
    for (int i = 0; i < nu; ++i) {
      const double n = standard_normal();
      chi += n * n;
    }
    return z / std::sqrt(chi / nu);
  }

  double cauchy(double gamma) { return gamma * std::tan(std::numbers::pi * (uniform01() - 0.5)); }

  double exponential(double rate) { return -std::log(uniform01_open_low()) / rate; }

  int bernoulli(double p) { return uniform01() < p ? 1 : 0; }

  /// Inverse CDF by sequential search; fine for small lambda.
  int poisson(double lambda) {
    const double u = uniform01();
    int k = 0;
    double p = std::exp(-lambda);
    double cdf = p;
    while (u >= cdf && k < 1000) {
      ++k;
      p *= lambda / k;
      cdf += p;
    }
    return k;
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

inline constexpr std::size_t kArmaBurnIn = 1024;

namespace detail {

inline double draw_innovation(const ProcessSpec& s, Sampler& rng) {
  switch (s.innovation) {
    case Innovation::Normal: return s.sd * rng.standard_normal();
    case Innovation::StudentT: return rng.student_t(s.dof);
    case Innovation::Cauchy: return rng.cauchy(s.scale);
    case Innovation::Uniform: return s.lower + (s.upper - s.lower) * rng.uniform01();
    case Innovation::Exponential: return rng.exponential(s.rate) - 1.0 / s.rate;
    case Innovation::Bernoulli: return rng.bernoulli(s.prob) - s.prob;
    case Innovation::Poisson: return rng.poisson(s.rate) - s.rate;
  }
  return 0.0;
}

}  // namespace detail

/// One realisation of length T. AR/ARMA recursions start from zero state and
/// discard kArmaBurnIn samples.
inline std::vector<double> simulate(const ProcessSpec& spec, std::size_t T, std::uint64_t seed) {
  if (T < 1) throw Error(ErrorKind::InvalidLength, "simulation length must be >= 1");
  Sampler rng(seed);
  std::vector<double> out(T);
  if (spec.ar.empty() && spec.ma.empty()) {
    for (auto& v : out) v = detail::draw_innovation(spec, rng);
    return out;
  }
  const std::size_t p = spec.ar.size();
  const std::size_t q = spec.ma.size();
  const std::size_t total = kArmaBurnIn + T;
  std::vector<double> x(total, 0.0);
  std::vector<double> eps(total, 0.0);
  for (std::size_t t = 0; t < total; ++t) {
    eps[t] = detail::draw_innovation(spec, rng);
    double v = eps[t];
    for (std::size_t i = 1; i <= p && i <= t; ++i) v += spec.ar[i - 1] * x[t - i];
    for (std::size_t j = 1; j <= q && j <= t; ++j) v += spec.ma[j - 1] * eps[t - j];
    x[t] = v;
  }
  std::copy(x.begin() + static_cast<std::ptrdiff_t>(kArmaBurnIn), x.end(), out.begin());
  return out;
}

/// n_per_class series for every class, class-major order; series i of class c
/// uses sub-seed derive_seed(seed, c, i).
inline LabeledDataset benchmark_suite(std::size_t n_per_class, std::size_t T, std::uint64_t seed) {
  if (n_per_class < 1) throw Error(ErrorKind::InvalidInput, "n_per_class must be >= 1");
  LabeledDataset ds;
  ds.seed = seed;
  ds.series.reserve(n_per_class * kAllProcessClasses.size());
  for (std::size_t c = 0; c < kAllProcessClasses.size(); ++c) {
    const auto spec = process_spec(kAllProcessClasses[c]);
    for (std::size_t i = 0; i < n_per_class; ++i) {
      ds.series.push_back(simulate(spec, T, derive_seed(seed, c, i)));
      ds.labels.emplace_back(kProcessClassNames[c]);
    }
  }
  return ds;
}

inline nlohmann::json to_json(const ProcessSpec& s) {
  static constexpr std::array<std::string_view, 7> kInnovationNames = {"normal",      "student_t", "cauchy", "uniform",
                                                                       "exponential", "bernoulli", "poisson"};
  nlohmann::json j = {{"class", to_string(s.id)}, {"innovation", kInnovationNames[static_cast<std::size_t>(s.innovation)]}};
  if (!s.ar.empty()) j["ar"] = s.ar;
  if (!s.ma.empty()) j["ma"] = s.ma;
  switch (s.innovation) {
    case Innovation::Normal: j["sd"] = s.sd; break;
    case Innovation::StudentT: j["dof"] = s.dof; break;
    case Innovation::Cauchy: j["scale"] = s.scale; break;
    case Innovation::Uniform: j["lower"] = s.lower; j["upper"] = s.upper; break;
    case Innovation::Exponential: j["rate"] = s.rate; j["mean_shift"] = 1.0 / s.rate; break;
    case Innovation::Bernoulli: j["p"] = s.prob; j["mean_shift"] = s.prob; break;
    case Innovation::Poisson: j["lambda"] = s.rate; j["mean_shift"] = s.rate; break;
  }
  if (!s.ar.empty() || !s.ma.empty()) j["burn_in"] = kArmaBurnIn;
  return j;
}

}  // namespace modwst
