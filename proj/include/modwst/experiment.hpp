#pragma once

// Feature representations, batch extraction and the split -> preprocess ->
// train -> evaluate pipeline used by the command-line tool.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "modwst/classify.hpp"
#include "modwst/dataio.hpp"
#include "modwst/dataset.hpp"
#include "modwst/error.hpp"
#include "modwst/scattering.hpp"
#include "modwst/simulate.hpp"
#include "modwst/transforms.hpp"
#include "modwst/version.hpp"

namespace modwst {

enum class Representation { Original, Dwt, Modwt, Modwst };

inline std::string_view to_string(Representation r) {
  switch (r) {
    case Representation::Original: return "original";
    case Representation::Dwt: return "dwt";
    case Representation::Modwt: return "modwt";
    case Representation::Modwst: return "modwst";
  }
  return "unknown";
}

inline Representation representation_from_string(std::string_view s) {
  for (auto r : {Representation::Original, Representation::Dwt, Representation::Modwt, Representation::Modwst}) {
    if (to_string(r) == s) return r;
  }
  throw Error(ErrorKind::NotFound, "unknown representation '" + std::string(s) + "'");
}

struct RepresentationConfig {
  Representation kind = Representation::Modwst;
  WaveletFilter filter = builtin_filter("haar");  // DWT / MODWT
  std::optional<int> levels;                      // DWT / MODWT; nullopt = floor(log2 T)
  ScatteringConfig scattering;                    // MODWST
};

/// Called with (done, total) as series are processed; may be invoked from worker threads.
using ProgressFn = std::function<void(std::size_t, std::size_t)>;

namespace detail {

inline std::vector<std::string> transform_column_names(const char* prefix, int J, std::size_t T, bool decimated) {
  std::vector<std::string> names;
  for (int j = 1; j <= J; ++j) {
    const std::size_t n = decimated ? T >> j : T;
    for (std::size_t t = 0; t < n; ++t) names.push_back(std::string("W") + prefix + std::to_string(j) + "[" + std::to_string(t) + "]");
  }
  const std::size_t n = decimated ? T >> J : T;
  for (std::size_t t = 0; t < n; ++t) names.push_back(std::string("V") + prefix + std::to_string(J) + "[" + std::to_string(t) + "]");
  return names;
}

}  // namespace detail

/// Column names of `extract_features` for series of length T.
inline std::vector<std::string> feature_column_names(const RepresentationConfig& rc, std::size_t T) {
  switch (rc.kind) {
    case Representation::Original: {
      std::vector<std::string> names;
      for (std::size_t t = 0; t < T; ++t) names.push_back("x" + std::to_string(t + 1));
      return names;
    }
    case Representation::Dwt: return detail::transform_column_names("_", rc.levels.value_or(max_level_for_length(T)), T, true);
    case Representation::Modwt:
      return detail::transform_column_names("~_", rc.levels.value_or(max_level_for_length(T)), T, false);
    case Representation::Modwst: {
      const auto& s = rc.scattering;
      return scattering_column_names(s.resolved_levels(T), s.max_depth, averaged_length(T, s.stride), s.drop_paths);
    }
  }
  return {};
}

/// Feature vector of one series.
inline std::vector<double> represent(std::span<const double> x, const RepresentationConfig& rc) {
  switch (rc.kind) {
    case Representation::Original: return {x.begin(), x.end()};
    case Representation::Dwt: return dwt<double>(x, rc.filter, rc.levels.value_or(max_level_for_length(x.size()))).flatten();
    case Representation::Modwt:
      return modwt<double>(x, ModwtFilter(rc.filter), rc.levels.value_or(max_level_for_length(x.size()))).flatten();
    case Representation::Modwst: return flatten(modwst<double>(x, rc.scattering), rc.scattering.drop_paths);
  }
  return {};
}

/// Features for every series. Rows are assigned to threads in fixed blocks, so
/// the result does not depend on the thread count.
inline FeatureMatrix extract_features(const LabeledDataset& ds, const RepresentationConfig& rc, unsigned threads = 1,
                                      const ProgressFn& progress = {}) {
  ds.check();
  if (ds.size() == 0) throw Error(ErrorKind::InvalidInput, "dataset is empty");
  const std::size_t T = ds.length();
  FeatureMatrix X;
  X.labels = ds.labels;
  X.column_names = feature_column_names(rc, T);
  X.rows.resize(static_cast<Eigen::Index>(ds.size()), static_cast<Eigen::Index>(X.column_names.size()));

  // validate once up front so workers only see per-series failures
  (void)represent(ds.series.front(), rc);

  std::atomic<std::size_t> done{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&](std::size_t begin, std::size_t end) {
    try {
      for (std::size_t i = begin; i < end; ++i) {
        const auto f = represent(ds.series[i], rc);
        X.rows.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(f.data(), static_cast<Eigen::Index>(f.size()));
        const auto n = ++done;
        if (progress) progress(n, ds.size());
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  const std::size_t nthreads = std::clamp<std::size_t>(threads, 1, ds.size());
  if (nthreads == 1) {
    work(0, ds.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t block = (ds.size() + nthreads - 1) / nthreads;
    for (std::size_t t = 0; t < nthreads; ++t) {
      const std::size_t b = t * block;
      const std::size_t e = std::min(ds.size(), b + block);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return X;
}

inline nlohmann::json to_json(const RepresentationConfig& rc) {
  nlohmann::json j = {{"kind", to_string(rc.kind)}};
  if (rc.kind == Representation::Dwt || rc.kind == Representation::Modwt) {
    j["wavelet"] = rc.filter.name();
    if (rc.levels) {
      j["levels"] = *rc.levels;
    } else {
      j["levels"] = "auto";
    }
  }
  if (rc.kind == Representation::Modwst) j["scattering"] = to_json(rc.scattering);
  return j;
}

// ---------------------------------------------------------------------------

struct SimulatedSource {
  std::size_t n_per_class = 200;
  std::size_t length = 1024;
  std::optional<std::uint64_t> seed;  // defaults to the experiment seed
};

struct CsvSource {
  std::filesystem::path path;
  bool has_header = true;
  LabelColumn label_column;
};

struct EcgSource {
  std::vector<std::filesystem::path> paths;
  EcgOptions options;
};

using DataSource = std::variant<SimulatedSource, CsvSource, EcgSource>;

struct ExperimentConfig {
  DataSource source = SimulatedSource{};
  RepresentationConfig representation;
  ClassifierKind classifier = ClassifierKind::SvmLinear;
  ClassifierParams params;
  ScalingKind scaling = ScalingKind::ZScore;
  bool drop_zero_variance = true;
  double train_fraction = 0.8;
  std::optional<std::uint64_t> seed;  // required
  std::filesystem::path output_dir;   // empty = write nothing
  unsigned threads = 1;

  std::uint64_t resolved_seed() const {
    if (!seed) throw Error(ErrorKind::InvalidInput, "experiment seed is required");
    return *seed;
  }
};

/// Loaded dataset together with provenance for the report.
struct LoadedData {
  LabeledDataset data;
  nlohmann::json provenance;
};

inline LoadedData load_source(const DataSource& src, std::uint64_t experiment_seed) {
  return std::visit(
      [&](const auto& s) -> LoadedData {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, SimulatedSource>) {
          const auto seed = s.seed.value_or(experiment_seed);
          nlohmann::json specs = nlohmann::json::array();
          for (auto c : kAllProcessClasses) specs.push_back(to_json(process_spec(c)));
          return {benchmark_suite(s.n_per_class, s.length, seed),
                  {{"kind", "simulate"}, {"n_per_class", s.n_per_class}, {"length", s.length}, {"seed", seed},
                   {"processes", specs}}};
        } else if constexpr (std::is_same_v<S, CsvSource>) {
          return {read_series_csv(s.path, s.has_header, s.label_column),
                  {{"kind", "csv"}, {"path", s.path.string()}, {"sha256", file_sha256(s.path)}}};
        } else {
          nlohmann::json files = nlohmann::json::array();
          for (const auto& p : s.paths) files.push_back({{"path", p.string()}, {"sha256", file_sha256(p)}});
          return {ingest_ecg(s.paths, s.options),
                  {{"kind", "ecg"},
                   {"files", files},
                   {"target_length", s.options.target_length},
                   {"pad", s.options.pad == PadSide::Right ? "right" : "left"}}};
        }
      },
      src);
}

struct ExperimentResult {
  EvalReport report;
  Preprocessor preprocessor;
  Model model;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  nlohmann::json json;  // full report document
};

namespace detail {

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(name) + ": " + e.what());
  }
}

inline std::string scaling_name(ScalingKind k) { return k == ScalingKind::ZScore ? "zscore" : "none"; }

}  // namespace detail

inline nlohmann::json to_json(const ClassifierParams& p, ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::SvmLinear: return to_json(p.svm);
    case ClassifierKind::Lda:
      return {{"ridge_scale", p.lda.ridge_scale},
              {"solver", p.lda.solver == LdaSolver::Auto ? "auto" : p.lda.solver == LdaSolver::Primal ? "primal" : "woodbury"}};
    case ClassifierKind::Gnb: return {{"var_floor", p.gnb_var_floor}};
    case ClassifierKind::Centroid: return nlohmann::json::object();
  }
  return nlohmann::json::object();
}

/// Resolved configuration as echoed into reports.
inline nlohmann::json to_json(const ExperimentConfig& cfg) {
  return {{"representation", to_json(cfg.representation)},
          {"classifier", to_string(cfg.classifier)},
          {"classifier_params", to_json(cfg.params, cfg.classifier)},
          {"scaling", detail::scaling_name(cfg.scaling)},
          {"drop_zero_variance", cfg.drop_zero_variance},
          {"train_fraction", cfg.train_fraction},
          {"seed", cfg.resolved_seed()}};
}

/// Split, preprocess, train and evaluate on an already-extracted feature matrix.
inline ExperimentResult run_on_features(const FeatureMatrix& X, const ExperimentConfig& cfg) {
  const auto seed = cfg.resolved_seed();
  const auto split = detail::stage("split", [&] { return stratified_split_indices(X.labels, cfg.train_fraction, seed); });
  const auto train_raw = X.subset(split.train);
  const auto test_raw = X.subset(split.test);

  ExperimentResult r;
  r.n_train = split.train.size();
  r.n_test = split.test.size();
  r.preprocessor = detail::stage("preprocess", [&] { return fit_preprocessor(train_raw, cfg.scaling, cfg.drop_zero_variance); });
  const auto train_set = r.preprocessor.apply(train_raw);
  const auto test_set = r.preprocessor.apply(test_raw);

  auto params = cfg.params;
  params.svm.threads = cfg.threads;
  params.svm.seed = seed;
  r.model = detail::stage("train", [&] { return train(cfg.classifier, train_set, params); });
  const auto predicted = detail::stage("predict", [&] { return predict(r.model, test_set); });
  r.report = detail::stage("evaluate", [&] { return evaluate(test_set.labels, predicted); });

  r.json = {{"version", MODWST_VERSION},
            {"config", to_json(cfg)},
            {"n_features", X.d()},
            {"n_features_kept", train_set.d()},
            {"n_train", r.n_train},
            {"n_test", r.n_test},
            {"metrics", to_json(r.report)}};
  if (const auto* svm = std::get_if<LinearModel>(&r.model)) {
    r.json["solver"] = {{"iterations", svm->iterations}, {"converged", svm->converged}};
  }
  return r;
}

/// Report files written by `run_experiment`: report.json, table.txt, confusion.csv.
inline void write_report(const ExperimentResult& r, const std::string& row_name, const std::filesystem::path& dir) {
  write_json(r.json, dir / "report.json");
  auto table = detail::open_output(dir / "table.txt");
  table << render_table({{row_name, r.report}});
  detail::finish_output(table, dir / "table.txt");
  auto cm = detail::open_output(dir / "confusion.csv");
  cm << confusion_csv(r.report.confusion);
  detail::finish_output(cm, dir / "confusion.csv");
}

inline std::string row_label(const ExperimentConfig& cfg) {
  std::string rep(to_string(cfg.representation.kind));
  if (cfg.representation.kind == Representation::Modwst) rep += std::to_string(cfg.representation.scattering.max_depth);
  return rep + " / " + std::string(to_string(cfg.classifier));
}

/// Full pipeline from data source to report. `log` receives progress lines.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr) {
  const auto seed = cfg.resolved_seed();
  if (log) *log << "loading data\n";
  const auto loaded = detail::stage("load", [&] { return load_source(cfg.source, seed); });
  if (log) *log << "extracting " << to_string(cfg.representation.kind) << " features for " << loaded.data.size() << " series\n";
  const auto X = detail::stage("features", [&] { return extract_features(loaded.data, cfg.representation, cfg.threads); });
  if (log) *log << "training " << to_string(cfg.classifier) << " on " << X.d() << " features\n";
  auto r = run_on_features(X, cfg);
  r.json["data"] = loaded.provenance;
  if (!cfg.output_dir.empty()) write_report(r, row_label(cfg), cfg.output_dir);
  return r;
}

// ---------------------------------------------------------------------------
// JSON experiment configuration

inline ExperimentConfig experiment_config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::FormatError, "experiment config must be a JSON object");
  ExperimentConfig cfg;
  try {
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("data")) {
      const auto& d = doc["data"];
      const std::string kind = d.value("kind", std::string("simulate"));
      if (kind == "simulate") {
        SimulatedSource s;
        s.n_per_class = d.value("n_per_class", s.n_per_class);
        s.length = d.value("length", s.length);
        if (d.contains("seed")) s.seed = d["seed"].get<std::uint64_t>();
        cfg.source = s;
      } else if (kind == "csv") {
        CsvSource s;
        s.path = d.at("path").get<std::string>();
        s.has_header = d.value("has_header", true);
        if (d.contains("label_column")) {
          const auto& lc = d["label_column"];
          s.label_column.index = lc.is_string() && lc.get<std::string>() == "last" ? LabelColumn::kLast : lc.get<long>();
        }
        cfg.source = s;
      } else if (kind == "ecg") {
        EcgSource s;
        if (d.at("path").is_array()) {
          for (const auto& p : d["path"]) s.paths.emplace_back(p.get<std::string>());
        } else {
          s.paths.emplace_back(d["path"].get<std::string>());
        }
        s.options.target_length = d.value("target_length", kEcgLength);
        const std::string pad = d.value("pad", std::string("right"));
        if (pad != "right" && pad != "left") throw Error(ErrorKind::FormatError, "pad must be 'right' or 'left'");
        s.options.pad = pad == "right" ? PadSide::Right : PadSide::Left;
        cfg.source = s;
      } else {
        throw Error(ErrorKind::FormatError, "unknown data kind '" + kind + "'");
      }
    }
    if (doc.contains("representation")) {
      const auto& r = doc["representation"];
      cfg.representation.kind = representation_from_string(r.value("kind", std::string("modwst")));
      if (r.contains("wavelet")) {
        const auto& w = r["wavelet"];
        cfg.representation.filter = w.is_string() ? builtin_filter(w.get<std::string>()) : filter_from_json(w);
      }
      if (r.contains("levels") && !r["levels"].is_string()) cfg.representation.levels = r["levels"].get<int>();
      if (r.contains("scattering")) cfg.representation.scattering = scattering_config_from_json(r["scattering"]);
    }
    if (doc.contains("classifier")) cfg.classifier = classifier_from_string(doc["classifier"].get<std::string>());
    if (doc.contains("classifier_params")) {
      const auto& p = doc["classifier_params"];
      auto& svm = cfg.params.svm;
      svm.C = p.value("C", svm.C);
      svm.tol = p.value("tol", svm.tol);
      svm.max_iter = p.value("max_iter", svm.max_iter);
      svm.bias = p.value("bias", svm.bias);
      if (p.contains("multiclass")) svm.multiclass = svm_multiclass_from_string(p["multiclass"].get<std::string>());
      cfg.params.lda.ridge_scale = p.value("ridge_scale", cfg.params.lda.ridge_scale);
      cfg.params.gnb_var_floor = p.value("var_floor", cfg.params.gnb_var_floor);
    }
    if (doc.contains("scaling")) {
      const auto s = doc["scaling"].get<std::string>();
      if (s != "zscore" && s != "none") throw Error(ErrorKind::FormatError, "scaling must be 'zscore' or 'none'");
      cfg.scaling = s == "zscore" ? ScalingKind::ZScore : ScalingKind::None;
    }
    cfg.drop_zero_variance = doc.value("drop_zero_variance", cfg.drop_zero_variance);
    cfg.train_fraction = doc.value("train_fraction", cfg.train_fraction);
    if (doc.contains("output_dir")) cfg.output_dir = doc["output_dir"].get<std::string>();
    cfg.threads = doc.value("threads", cfg.threads);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::FormatError, std::string("experiment config: ") + e.what());
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Timing

struct BenchPoint {
  std::size_t length = 0;
  int depth = 0;
  double seconds = 0.0;  // per transform
  int repeats = 0;
};

struct BenchReport {
  std::vector<BenchPoint> points;
  // log(t2/t1)/log(T2/T1) between consecutive lengths, per depth
  std::vector<std::tuple<int, std::size_t, double>> exponents;
  // t(m=2)/t(m=1) at each length
  std::vector<std::pair<std::size_t, double>> depth_ratios;
};

inline BenchReport run_bench(const std::vector<std::size_t>& lengths, const std::vector<int>& depths, std::uint64_t seed,
                             double min_seconds = 0.2, std::ostream* log = nullptr) {
  BenchReport rep;
  for (int m : depths) {
    for (std::size_t T : lengths) {
      ScatteringConfig cfg;
      cfg.max_depth = m;
      if (cfg.avg.size() >= T) throw Error(ErrorKind::FilterTooLong, "bench length must exceed the averaging filter");
      const auto x = simulate(process_spec(ProcessClass::N1), T, derive_seed(seed, T));
      BenchPoint p{T, m, 0.0, 0};
      const auto start = std::chrono::steady_clock::now();
      double elapsed = 0.0;
      do {
        auto s = modwst<double>(std::span<const double>(x), cfg);
        ++p.repeats;
        elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      } while (elapsed < min_seconds);
      p.seconds = elapsed / p.repeats;
      if (log) *log << "T=" << T << " m=" << m << ": " << p.seconds * 1e3 << " ms\n";
      rep.points.push_back(p);
    }
  }
  for (std::size_t i = 1; i < rep.points.size(); ++i) {
    const auto& a = rep.points[i - 1];
    const auto& b = rep.points[i];
    if (a.depth != b.depth) continue;
    rep.exponents.emplace_back(b.depth, b.length,
                               std::log(b.seconds / a.seconds) / std::log(static_cast<double>(b.length) / a.length));
  }
  for (const auto& a : rep.points) {
    if (a.depth != 1) continue;
    for (const auto& b : rep.points) {
      if (b.depth == 2 && b.length == a.length) rep.depth_ratios.emplace_back(a.length, b.seconds / a.seconds);
    }
  }
  return rep;
}

inline nlohmann::json to_json(const BenchReport& r) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : r.points) {
    pts.push_back({{"length", p.length}, {"depth", p.depth}, {"seconds", p.seconds}, {"repeats", p.repeats}});
  }
  nlohmann::json ex = nlohmann::json::array();
  for (const auto& [m, T, e] : r.exponents) ex.push_back({{"depth", m}, {"length", T}, {"exponent", e}});
  nlohmann::json dr = nlohmann::json::array();
  for (const auto& [T, ratio] : r.depth_ratios) {
    dr.push_back({{"length", T}, {"ratio_m2_m1", ratio}, {"levels", max_level_for_length(T)}});
  }
  return {{"version", MODWST_VERSION}, {"points", pts}, {"scaling_exponents", ex}, {"depth_ratios", dr}};
}

}  // namespace modwst
