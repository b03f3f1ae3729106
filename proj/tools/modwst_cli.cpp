// modwst: simulate, transform, scatter, experiment, bench

#include <atomic>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "modwst/dataio.hpp"
#include "modwst/experiment.hpp"
#include "modwst/scattering.hpp"
#include "modwst/simulate.hpp"
#include "modwst/transforms.hpp"
#include "modwst/version.hpp"

namespace {

using namespace modwst;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

int exit_code(ErrorKind k) { return k == ErrorKind::NumericalError ? kExitNumerical : kExitData; }

struct SeriesInput {
  std::string path;
  bool no_header = false;
  std::string label_column = "0";

  void add(CLI::App* app) {
    app->add_option("-i,--in", path, "Series CSV (label column plus values)")->required()->check(CLI::ExistingFile);
    app->add_flag("--no-header", no_header, "Input has no header row");
    app->add_option("--label-column", label_column, "0-based label column, or 'last'")->capture_default_str();
  }

  LabeledDataset load() const {
    LabelColumn lc;
    if (label_column == "last") {
      lc.index = LabelColumn::kLast;
    } else {
      try {
        lc.index = std::stol(label_column);
      } catch (const std::exception&) {
        throw CLI::ValidationError("--label-column", "expected an integer or 'last'");
      }
    }
    auto ds = read_series_csv(path, !no_header, lc);
    ds.check();
    if (ds.size() == 0) throw Error(ErrorKind::FormatError, path + ": no series");
    return ds;
  }
};

// one stderr line per 10% step
ProgressFn stderr_progress(const char* what) {
  return [what, reported = std::make_shared<std::atomic<std::size_t>>(0)](std::size_t done, std::size_t total) {
    const std::size_t step = 10 * done / total;
    std::size_t prev = reported->load();
    while (step > prev) {
      if (reported->compare_exchange_weak(prev, step)) {
        std::cerr << what << ": " << done << "/" << total << " series\n";
        break;
      }
    }
  };
}

std::vector<Path> parse_drop_paths(const std::vector<std::string>& specs) {
  std::vector<Path> out;
  for (const auto& s : specs) {
    Path p;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, '.')) {
      try {
        p.levels.push_back(std::stoi(part));
      } catch (const std::exception&) {
        throw CLI::ValidationError("--drop", "path '" + s + "' must look like 10.10");
      }
    }
    out.push_back(p);
  }
  return out;
}

void warn_levels(std::size_t T, int J) {
  if (J > max_level_for_length(T)) {
    std::cerr << "warning: " << J << " levels exceed floor(log2 " << T << ") = " << max_level_for_length(T) << "\n";
  }
}

nlohmann::json command_line(int argc, char** argv) {
  nlohmann::json args = nlohmann::json::array();
  for (int i = 1; i < argc; ++i) args.push_back(argv[i]);
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wavelet scattering features and classification experiments", "modwst"};
  app.set_version_flag("--version", MODWST_VERSION);
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  // simulate
  auto* sim = app.add_subcommand("simulate", "Simulate the fifteen stationary process classes");
  std::size_t sim_n = 200, sim_len = 1024;
  std::uint64_t sim_seed = 0;
  std::string sim_out;
  sim->add_option("--n", sim_n, "Series per class")->check(CLI::PositiveNumber);
  sim->add_option("--len", sim_len, "Series length")->check(CLI::PositiveNumber);
  sim->add_option("--seed", sim_seed, "Random seed")->required();
  sim->add_option("-o,--out", sim_out, "Output series CSV")->required();

  // transform
  auto* tr = app.add_subcommand("transform", "DWT or MODWT coefficients as features");
  SeriesInput tr_in;
  tr_in.add(tr);
  std::string tr_kind = "modwt", tr_wavelet = "haar", tr_out;
  int tr_levels = 0;
  unsigned tr_threads = 1;
  tr->add_option("--kind", tr_kind, "dwt or modwt")->check(CLI::IsMember({"dwt", "modwt"}));
  tr->add_option("--wavelet", tr_wavelet, "Built-in filter (haar, d4, d6, la8)");
  tr->add_option("--levels", tr_levels, "Decomposition levels (0 = floor(log2 T))")->check(CLI::NonNegativeNumber);
  tr->add_option("--threads", tr_threads, "Worker threads")->check(CLI::PositiveNumber);
  tr->add_option("-o,--out", tr_out, "Output feature CSV")->required();

  // scatter
  auto* sc = app.add_subcommand("scatter", "MODWST scattering coefficients as features");
  SeriesInput sc_in;
  sc_in.add(sc);
  std::string sc_config, sc_out, sc_wavelet;
  std::size_t sc_M = 0, sc_stride = 0;
  int sc_levels = 0, sc_depth = -1;
  std::vector<std::string> sc_drop;
  unsigned sc_threads = 1;
  sc->add_option("-c,--config", sc_config, "Scattering config JSON")->check(CLI::ExistingFile);
  sc->add_option("--wavelet", sc_wavelet, "Built-in filter (overrides config)");
  sc->add_option("--avg-size", sc_M, "Uniform averaging filter size M (overrides config; default 32)");
  sc->add_option("--stride", sc_stride, "Averaging stride k (overrides config; default 16)");
  sc->add_option("--levels", sc_levels, "MODWT levels J (overrides config; default floor(log2 T))");
  sc->add_option("--depth", sc_depth, "Maximum depth m (overrides config; default 2)");
  sc->add_option("--drop", sc_drop, "Paths to omit, e.g. 10.10 (overrides config)");
  sc->add_option("--threads", sc_threads, "Worker threads")->check(CLI::PositiveNumber);
  sc->add_option("-o,--out", sc_out, "Output feature CSV")->required();

  // experiment
  auto* ex = app.add_subcommand("experiment", "Split, preprocess, train and evaluate one configuration");
  std::string ex_config, ex_data, ex_repr, ex_classifier, ex_scaling, ex_multiclass, ex_out, ex_scatter_config, ex_pad;
  std::vector<std::string> ex_in;
  std::size_t ex_n = 0, ex_len = 0;
  int ex_depth = -1;
  double ex_C = 0.0, ex_fraction = 0.0;
  std::uint64_t ex_seed = 0;
  unsigned ex_threads = 1;
  ex->add_option("-c,--config", ex_config, "Experiment config JSON (flags take precedence)")->check(CLI::ExistingFile);
  ex->add_option("--data", ex_data, "Data source: simulate, csv or ecg (default simulate)")
      ->check(CLI::IsMember({"simulate", "csv", "ecg"}));
  ex->add_option("-i,--in", ex_in, "Input file(s) for csv / ecg sources");
  ex->add_option("--n", ex_n, "Series per class for simulated data (default 200)");
  ex->add_option("--len", ex_len, "Series length for simulated data (default 1024)");
  ex->add_option("--pad", ex_pad, "ECG padding side (default right)")->check(CLI::IsMember({"right", "left"}));
  ex->add_option("--representation", ex_repr, "original, dwt, modwt or modwst (default modwst)")
      ->check(CLI::IsMember({"original", "dwt", "modwt", "modwst"}));
  ex->add_option("--scatter-config", ex_scatter_config, "Scattering config JSON")->check(CLI::ExistingFile);
  ex->add_option("--depth", ex_depth, "Scattering depth (default 2)");
  ex->add_option("--classifier", ex_classifier, "svm_linear, lda, gnb or centroid (default svm_linear)")
      ->check(CLI::IsMember({"svm_linear", "lda", "gnb", "centroid"}));
  ex->add_option("--C", ex_C, "SVM cost (default 1)")->check(CLI::PositiveNumber);
  ex->add_option("--multiclass", ex_multiclass, "SVM decomposition: ovr or ovo (default ovr)")
      ->check(CLI::IsMember({"ovr", "ovo"}));
  ex->add_option("--scaling", ex_scaling, "zscore or none (default zscore)")->check(CLI::IsMember({"zscore", "none"}));
  ex->add_option("--train-fraction", ex_fraction, "Training share per class (default 0.8)")->check(CLI::Range(0.0, 1.0));
  auto* seed_opt = ex->add_option("--seed", ex_seed, "Random seed (required here or in the config)");
  ex->add_option("-o,--out", ex_out, "Output directory for report.json, table.txt, confusion.csv");
  ex->add_option("--threads", ex_threads, "Worker threads")->check(CLI::PositiveNumber);

  // bench
  auto* be = app.add_subcommand("bench", "Time the scattering transform over series lengths and depths");
  std::vector<std::size_t> be_lengths = {256, 512, 1024, 2048, 4096, 8192, 16384};
  std::vector<int> be_depths = {1, 2};
  double be_min_time = 0.2;
  std::uint64_t be_seed = 1;
  std::string be_out;
  be->add_option("--lengths", be_lengths, "Series lengths");
  be->add_option("--depths", be_depths, "Scattering depths");
  be->add_option("--min-time", be_min_time, "Minimum seconds per measurement")->check(CLI::PositiveNumber);
  be->add_option("--seed", be_seed, "Random seed");
  be->add_option("-o,--out", be_out, "Output JSON (the table always goes to stderr)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*sim) {
      std::cerr << "simulating " << sim_n << " x 15 series of length " << sim_len << "\n";
      const auto ds = benchmark_suite(sim_n, sim_len, sim_seed);
      write_series_csv(ds, sim_out);
      nlohmann::json specs = nlohmann::json::array();
      for (auto c : kAllProcessClasses) specs.push_back(to_json(process_spec(c)));
      write_json(make_manifest(sim_out, {{"command", "simulate"},
                                         {"n_per_class", sim_n},
                                         {"length", sim_len},
                                         {"seed", sim_seed},
                                         {"processes", specs}}),
                 manifest_path(sim_out));
      std::cerr << "wrote " << ds.size() << " series to " << sim_out << "\n";
    } else if (*tr) {
      const auto ds = tr_in.load();
      RepresentationConfig rc;
      rc.kind = tr_kind == "dwt" ? Representation::Dwt : Representation::Modwt;
      rc.filter = builtin_filter(tr_wavelet);
      if (tr_levels > 0) rc.levels = tr_levels;
      const int J = rc.levels.value_or(max_level_for_length(ds.length()));
      if (rc.kind == Representation::Modwt) warn_levels(ds.length(), J);
      const auto X = extract_features(ds, rc, tr_threads, stderr_progress(tr_kind.c_str()));
      write_feature_matrix(X, tr_out);
      write_json(make_manifest(tr_out, {{"command", "transform"},
                                        {"input", tr_in.path},
                                        {"input_sha256", file_sha256(tr_in.path)},
                                        {"representation", to_json(rc)},
                                        {"levels", J}}),
                 manifest_path(tr_out));
      std::cerr << "wrote " << X.n() << " x " << X.d() << " features to " << tr_out << "\n";
    } else if (*sc) {
      const auto ds = sc_in.load();
      ScatteringConfig cfg = sc_config.empty() ? ScatteringConfig{} : scattering_config_from_json(read_json(sc_config));
      if (!sc_wavelet.empty()) cfg.filter = builtin_filter(sc_wavelet);
      if (sc_M > 0) cfg.avg = uniform_averaging_filter(sc_M);
      if (sc_stride > 0) cfg.stride = sc_stride;
      if (sc_levels > 0) cfg.max_level = sc_levels;
      if (sc_depth >= 0) cfg.max_depth = sc_depth;
      if (!sc->get_option("--drop")->empty()) cfg.drop_paths = parse_drop_paths(sc_drop);
      cfg.check();
      warn_levels(ds.length(), cfg.resolved_levels(ds.length()));
      RepresentationConfig rc;
      rc.kind = Representation::Modwst;
      rc.scattering = cfg;
      const auto X = extract_features(ds, rc, sc_threads, stderr_progress("scatter"));
      write_feature_matrix(X, sc_out);
      write_json(make_manifest(sc_out, {{"command", "scatter"},
                                        {"input", sc_in.path},
                                        {"input_sha256", file_sha256(sc_in.path)},
                                        {"scattering", to_json(cfg)},
                                        {"levels", cfg.resolved_levels(ds.length())}}),
                 manifest_path(sc_out));
      std::cerr << "wrote " << X.n() << " x " << X.d() << " features to " << sc_out << "\n";
    } else if (*ex) {
      ExperimentConfig cfg = ex_config.empty() ? ExperimentConfig{} : experiment_config_from_json(read_json(ex_config));
      if (!ex_data.empty() || !ex_in.empty()) {
        const std::string kind = !ex_data.empty() ? ex_data
                                 : std::holds_alternative<SimulatedSource>(cfg.source) ? "csv"
                                 : std::holds_alternative<EcgSource>(cfg.source)       ? "ecg"
                                                                                       : "csv";
        if (kind == "simulate") {
          if (!std::holds_alternative<SimulatedSource>(cfg.source)) cfg.source = SimulatedSource{};
        } else {
          if (ex_in.empty()) throw CLI::ValidationError("--in", "csv and ecg sources need --in");
          if (kind == "csv") {
            if (ex_in.size() != 1) throw CLI::ValidationError("--in", "csv source takes one file");
            CsvSource s;
            s.path = ex_in.front();
            cfg.source = s;
          } else {
            EcgSource s;
            for (const auto& p : ex_in) s.paths.emplace_back(p);
            cfg.source = s;
          }
        }
      }
      if (auto* s = std::get_if<SimulatedSource>(&cfg.source)) {
        if (ex_n > 0) s->n_per_class = ex_n;
        if (ex_len > 0) s->length = ex_len;
      }
      if (auto* s = std::get_if<EcgSource>(&cfg.source); s && !ex_pad.empty()) {
        s->options.pad = ex_pad == "right" ? PadSide::Right : PadSide::Left;
      }
      if (!ex_repr.empty()) cfg.representation.kind = representation_from_string(ex_repr);
      if (!ex_scatter_config.empty()) cfg.representation.scattering = scattering_config_from_json(read_json(ex_scatter_config));
      if (ex_depth >= 0) cfg.representation.scattering.max_depth = ex_depth;
      if (!ex_classifier.empty()) cfg.classifier = classifier_from_string(ex_classifier);
      if (ex_C > 0.0) cfg.params.svm.C = ex_C;
      if (!ex_multiclass.empty()) cfg.params.svm.multiclass = svm_multiclass_from_string(ex_multiclass);
      if (!ex_scaling.empty()) cfg.scaling = ex_scaling == "zscore" ? ScalingKind::ZScore : ScalingKind::None;
      if (ex_fraction > 0.0) cfg.train_fraction = ex_fraction;
      if (seed_opt->count() > 0) cfg.seed = ex_seed;
      if (!ex_out.empty()) cfg.output_dir = ex_out;
      if (ex->get_option("--threads")->count() > 0) cfg.threads = ex_threads;
      if (!cfg.seed) throw CLI::RequiredError("--seed");

      auto r = run_experiment(cfg, &std::cerr);
      r.json["command_line"] = command_line(argc, argv);
      if (!cfg.output_dir.empty()) write_json(r.json, cfg.output_dir / "report.json");
      std::cerr << render_table({{row_label(cfg), r.report}});
      if (cfg.output_dir.empty()) std::cerr << "no --out given; nothing written\n";
    } else if (*be) {
      const auto rep = run_bench(be_lengths, be_depths, be_seed, be_min_time, &std::cerr);
      const auto j = to_json(rep);
      if (!be_out.empty()) write_json(j, be_out);
      std::cerr << "length  depth  ms/transform\n";
      for (const auto& p : rep.points) {
        std::cerr << std::setw(6) << p.length << "  " << std::setw(5) << p.depth << "  " << std::fixed
                  << std::setprecision(3) << std::setw(12) << p.seconds * 1e3 << "\n";
      }
      for (const auto& [m, T, e] : rep.exponents) {
        std::cerr << "m=" << m << " T=" << T << " exponent " << std::setprecision(2) << e << "\n";
      }
      for (const auto& [T, ratio] : rep.depth_ratios) {
        std::cerr << "T=" << T << " time(m=2)/time(m=1) " << std::setprecision(1) << ratio << " (J=" << max_level_for_length(T)
                  << ")\n";
      }
    }
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
