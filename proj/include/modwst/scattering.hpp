#pragma once

// Maximal overlap discrete wavelet scattering: cascaded MODWT moduli with
// strided local averaging at every depth.

#include <cmath>
#include <compare>
#include <concepts>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "modwst/error.hpp"
#include "modwst/filters.hpp"
#include "modwst/transforms.hpp"

namespace modwst {

/// Non-negative averaging taps summing to one.
class AveragingFilter {
 public:
  explicit AveragingFilter(std::vector<double> phi) : phi_(std::move(phi)) {
    if (phi_.empty()) throw Error(ErrorKind::InvalidSize, "averaging filter must have at least one tap");
    double sum = 0.0;
    for (double v : phi_) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorKind::InvalidInput, "averaging taps must be finite and non-negative");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw Error(ErrorKind::InvalidInput, "averaging taps must sum to 1, got " + std::to_string(sum));
    }
  }

  std::span<const double> phi() const noexcept { return phi_; }
  std::size_t size() const noexcept { return phi_.size(); }
  bool is_uniform() const {
    for (double v : phi_) {
      if (v != phi_.front()) return false;
    }
    return true;
  }

 private:
  std::vector<double> phi_;
};

inline AveragingFilter uniform_averaging_filter(std::size_t M) {
  if (M == 0) throw Error(ErrorKind::InvalidSize, "averaging filter size must be >= 1");
  return AveragingFilter(std::vector<double>(M, 1.0 / static_cast<double>(M)));
}

/// Number of outputs per path, ceil(T/k).
inline std::size_t averaged_length(std::size_t T, std::size_t stride) { return (T + stride - 1) / stride; }

/// out_i = sum_l phi_l signal_{(k i + l) mod T}, i = 0 .. ceil(T/k)-1.
template <std::floating_point Real>
std::vector<Real> local_average(std::span<const Real> signal, const AveragingFilter& avg, std::size_t stride) {
  const std::size_t T = signal.size();
  const std::size_t M = avg.size();
  if (M >= T) {
    throw Error(ErrorKind::FilterTooLong,
                "averaging filter size " + std::to_string(M) + " must be smaller than series length " + std::to_string(T));
  }
  if (stride < 1 || stride > M) {
    throw Error(ErrorKind::InvalidInput, "stride must satisfy 1 <= k <= M");
  }
  const auto phi = avg.phi();
  std::vector<Real> out(averaged_length(T, stride));
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::size_t start = stride * i;
    Real acc = 0;
    for (std::size_t l = 0; l < M; ++l) {
      std::size_t idx = start + l;
      if (idx >= T) idx -= T;
      acc += static_cast<Real>(phi[l]) * signal[idx];
    }
    out[i] = acc;
  }
  return out;
}

/// Level sequence (j_1, ..., j_d). Ordered by depth, then lexicographically.
struct Path {
  std::vector<int> levels;

  Path() = default;
  Path(std::initializer_list<int> l) : levels(l) {}
  explicit Path(std::vector<int> l) : levels(std::move(l)) {}

  std::size_t depth() const noexcept { return levels.size(); }

  Path child(int level) const {
    Path p = *this;
    p.levels.push_back(level);
    return p;
  }

  /// "0" for the empty path, otherwise levels joined by '.'.
  std::string label() const {
    if (levels.empty()) return "0";
    std::string s;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      if (i) s += '.';
      s += std::to_string(levels[i]);
    }
    return s;
  }

  friend bool operator==(const Path&, const Path&) = default;
  friend std::strong_ordering operator<=>(const Path& a, const Path& b) {
    if (auto c = a.levels.size() <=> b.levels.size(); c != 0) return c;
    return a.levels <=> b.levels;
  }
};

/// All paths of depth 0..max_depth over levels 1..J, in canonical order.
inline std::vector<Path> enumerate_paths(int J, int max_depth) {
  if (J < 1) throw Error(ErrorKind::InvalidLevel, "J must be >= 1");
  if (max_depth < 0) throw Error(ErrorKind::InvalidInput, "depth must be >= 0");
  std::vector<Path> out{Path{}};
  std::vector<Path> frontier{Path{}};
  for (int d = 1; d <= max_depth; ++d) {
    std::vector<Path> next;
    next.reserve(frontier.size() * static_cast<std::size_t>(J));
    for (const auto& p : frontier) {
      for (int j = 1; j <= J; ++j) next.push_back(p.child(j));
    }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

struct ScatteringConfig {
  WaveletFilter filter = builtin_filter("haar");
  AveragingFilter avg = uniform_averaging_filter(32);
  std::size_t stride = 16;
  std::optional<int> max_level;  // nullopt = floor(log2 T)
  int max_depth = 2;
  std::vector<Path> drop_paths;

  int resolved_levels(std::size_t T) const { return max_level.value_or(max_level_for_length(T)); }

  void check() const {
    if (stride < 1 || stride > avg.size()) throw Error(ErrorKind::InvalidInput, "stride must satisfy 1 <= k <= M");
    if (max_depth < 0) throw Error(ErrorKind::InvalidInput, "max_depth must be >= 0");
    if (max_level && *max_level < 1) throw Error(ErrorKind::InvalidLevel, "max_level must be >= 1");
  }
};

/// ceil(T/k) * sum_{d=0}^{m} J^d; J defaults to floor(log2 T).
inline std::size_t coefficient_count(std::size_t T, std::size_t stride, std::optional<int> J, int max_depth) {
  const auto levels = static_cast<std::size_t>(J.value_or(max_level_for_length(T)));
  std::size_t paths = 0;
  std::size_t per_depth = 1;
  for (int d = 0; d <= max_depth; ++d) {
    paths += per_depth;
    per_depth *= levels;
  }
  return averaged_length(T, stride) * paths;
}

template <std::floating_point Real = double>
struct ScatteringCoefficients {
  std::map<Path, std::vector<Real>> entries;
  std::size_t length = 0;         // T of the input
  std::size_t output_length = 0;  // ceil(T/k)
  int levels = 0;
  int max_depth = 0;

  std::size_t total_size() const { return entries.size() * output_length; }

  const std::vector<Real>& at(const Path& p) const {
    auto it = entries.find(p);
    if (it == entries.end()) throw Error(ErrorKind::NotFound, "path S_" + p.label() + " not present");
    return it->second;
  }
};

/// Ignores per-node callbacks.
struct NoObserver {
  template <class... Args>
  void operator()(Args&&...) const noexcept {}
};

/// Scattering cascade. `on_node(path, input, modwt_coefficients)` is invoked for
/// every MODWT run, with `input` being the signal decomposed at that node.
template <std::floating_point Real, class Observer = NoObserver>
ScatteringCoefficients<Real> modwst(std::span<const Real> x, const ScatteringConfig& cfg, Observer&& on_node = {}) {
  cfg.check();
  const std::size_t T = x.size();
  if (T < 2) throw Error(ErrorKind::InvalidLength, "series must have at least 2 values");
  const int J = cfg.resolved_levels(T);
  const ModwtFilter mf(cfg.filter);

  ScatteringCoefficients<Real> out;
  out.length = T;
  out.output_length = averaged_length(T, cfg.stride);
  out.levels = J;
  out.max_depth = cfg.max_depth;
  out.entries.emplace(Path{}, local_average<Real>(x, cfg.avg, cfg.stride));

  std::vector<std::pair<Path, std::vector<Real>>> frontier;
  frontier.emplace_back(Path{}, std::vector<Real>(x.begin(), x.end()));
  for (int d = 0; d < cfg.max_depth; ++d) {
    const bool last = d + 1 == cfg.max_depth;
    std::vector<std::pair<Path, std::vector<Real>>> next;
    for (const auto& [path, signal] : frontier) {
      auto mc = modwt<Real>(std::span<const Real>(signal), mf, J);
      on_node(path, std::span<const Real>(signal), std::as_const(mc));
      for (int j = 1; j <= J; ++j) {
        auto& w = mc.detail[static_cast<std::size_t>(j - 1)];
        for (auto& v : w) v = std::abs(v);
        Path child = path.child(j);
        out.entries.emplace(child, local_average<Real>(std::span<const Real>(w), cfg.avg, cfg.stride));
        if (!last) next.emplace_back(std::move(child), std::move(w));
      }
    }
    frontier = std::move(next);
  }
  return out;
}

inline ScatteringCoefficients<double> modwst(const TimeSeries& x, const ScatteringConfig& cfg) {
  return modwst<double>(x.values(), cfg);
}

/// Concatenation in canonical path order, minus the dropped paths.
template <std::floating_point Real>
std::vector<Real> flatten(const ScatteringCoefficients<Real>& s, const std::vector<Path>& drop = {}) {
  std::set<Path> dropped;
  for (const auto& p : drop) {
    if (!s.entries.contains(p)) throw Error(ErrorKind::NotFound, "dropped path S_" + p.label() + " not present");
    dropped.insert(p);
  }
  std::vector<Real> out;
  out.reserve((s.entries.size() - dropped.size()) * s.output_length);
  for (const auto& [path, v] : s.entries) {
    if (dropped.contains(path)) continue;
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

/// Column names "S_<path>[i]" matching flatten().
inline std::vector<std::string> scattering_column_names(int J, int max_depth, std::size_t output_length,
                                                        const std::vector<Path>& drop = {}) {
  const std::set<Path> dropped(drop.begin(), drop.end());
  std::vector<std::string> names;
  for (const auto& p : enumerate_paths(J, max_depth)) {
    if (dropped.contains(p)) continue;
    const std::string base = "S_" + p.label() + "[";
    for (std::size_t i = 0; i < output_length; ++i) names.push_back(base + std::to_string(i) + "]");
  }
  return names;
}

template <std::floating_point Real>
Real path_energy(const ScatteringCoefficients<Real>& s, const Path& p) {
  return squared_norm<Real>(s.at(p));
}

// JSON form: {wavelet: "haar" | {name, h}, avg: {kind: "uniform", M} | {kind: "custom", phi},
//             stride, max_level: "auto" | int, max_depth, drop_paths: [[10,10]]}

inline ScatteringConfig scattering_config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::FormatError, "scattering config must be a JSON object");
  ScatteringConfig cfg;
  try {
    if (doc.contains("wavelet")) {
      const auto& w = doc["wavelet"];
      cfg.filter = w.is_string() ? builtin_filter(w.get<std::string>()) : filter_from_json(w);
    }
    if (doc.contains("avg")) {
      const auto& a = doc["avg"];
      const std::string kind = a.value("kind", std::string("uniform"));
      if (kind == "uniform") {
        cfg.avg = uniform_averaging_filter(a.at("M").get<std::size_t>());
      } else if (kind == "custom") {
        cfg.avg = AveragingFilter(a.at("phi").get<std::vector<double>>());
      } else {
        throw Error(ErrorKind::FormatError, "unknown averaging filter kind '" + kind + "'");
      }
    }
    if (doc.contains("stride")) cfg.stride = doc["stride"].get<std::size_t>();
    if (doc.contains("max_level")) {
      const auto& ml = doc["max_level"];
      if (ml.is_string()) {
        if (ml.get<std::string>() != "auto") throw Error(ErrorKind::FormatError, "max_level must be \"auto\" or an integer");
        cfg.max_level.reset();
      } else {
        cfg.max_level = ml.get<int>();
      }
    }
    if (doc.contains("max_depth")) cfg.max_depth = doc["max_depth"].get<int>();
    if (doc.contains("drop_paths")) {
      for (const auto& p : doc["drop_paths"]) cfg.drop_paths.emplace_back(p.get<std::vector<int>>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::FormatError, std::string("scattering config: ") + e.what());
  }
  cfg.check();
  return cfg;
}

inline nlohmann::json to_json(const ScatteringConfig& cfg) {
  nlohmann::json j;
  j["wavelet"] = cfg.filter.name();
  if (cfg.avg.is_uniform()) {
    j["avg"] = {{"kind", "uniform"}, {"M", cfg.avg.size()}};
  } else {
    j["avg"] = {{"kind", "custom"}, {"phi", std::vector<double>(cfg.avg.phi().begin(), cfg.avg.phi().end())}};
  }
  j["stride"] = cfg.stride;
  if (cfg.max_level) {
    j["max_level"] = *cfg.max_level;
  } else {
    j["max_level"] = "auto";
  }
  j["max_depth"] = cfg.max_depth;
  auto drops = nlohmann::json::array();
  for (const auto& p : cfg.drop_paths) drops.push_back(p.levels);
  j["drop_paths"] = drops;
  return j;
}

}  // namespace modwst
