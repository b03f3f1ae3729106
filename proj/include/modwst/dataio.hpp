#pragma once

// CSV and JSON file formats: labelled series, feature matrices, the ECG
// heartbeat ingester and provenance manifests.

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "modwst/classify/features.hpp"
#include "modwst/dataset.hpp"
#include "modwst/error.hpp"
#include "modwst/version.hpp"

namespace modwst {

inline constexpr std::size_t kEcgLength = 187;

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return cells;
}

// rows and columns are reported 1-based, as a spreadsheet would show them
inline double parse_cell(std::string_view cell, const std::string& path, std::size_t row, std::size_t col) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  const auto where = path + ":" + std::to_string(row) + ":" + std::to_string(col);
  if (cell.empty() || ec != std::errc() || ptr != last) {
    throw Error(ErrorKind::ParseError, where + ": cannot parse '" + std::string(cell) + "' as a number");
  }
  if (!std::isfinite(v)) throw Error(ErrorKind::ParseError, where + ": non-finite value '" + std::string(cell) + "'");
  return v;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "' for reading");
  return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "' for writing");
  return out;
}

inline void finish_output(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorKind::IoError, "write to '" + path.string() + "' failed");
}

inline bool blank(std::string_view line) { return trim(line).empty(); }

}  // namespace detail

/// Shortest-safe decimal form with 17 significant digits, independent of locale.
inline std::string format_double(double v) {
  std::array<char, 40> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  if (ec != std::errc()) throw Error(ErrorKind::FormatError, "cannot format value");
  return std::string(buf.data(), ptr);
}

/// Where the label sits in a series CSV row.
struct LabelColumn {
  static constexpr long kLast = -1;
  long index = 0;  // 0-based, or kLast
};

/// Labelled series, one row each. Cells are decimal numbers except the label.
inline LabeledDataset read_series_csv(const std::filesystem::path& path, bool has_header = true,
                                      LabelColumn label_column = {}) {
  auto in = detail::open_input(path);
  LabeledDataset ds;
  std::string line;
  std::size_t row = 0;
  std::optional<std::size_t> width;
  while (std::getline(in, line)) {
    ++row;
    if (row == 1 && has_header) continue;
    if (detail::blank(line)) continue;
    const auto cells = detail::split_csv_line(line);
    if (width && cells.size() != *width) {
      throw Error(ErrorKind::FormatError, path.string() + ":" + std::to_string(row) + ": expected " +
                                              std::to_string(*width) + " cells, found " + std::to_string(cells.size()));
    }
    width = cells.size();
    if (cells.size() < 2) throw Error(ErrorKind::FormatError, path.string() + ":" + std::to_string(row) + ": no values");
    const std::size_t lab =
        label_column.index == LabelColumn::kLast ? cells.size() - 1 : static_cast<std::size_t>(label_column.index);
    if (lab >= cells.size()) {
      throw Error(ErrorKind::FormatError, path.string() + ": label column " + std::to_string(lab) + " out of range");
    }
    if (cells[lab].empty()) {
      throw Error(ErrorKind::FormatError, path.string() + ":" + std::to_string(row) + ": empty label");
    }
    std::vector<double> values;
    values.reserve(cells.size() - 1);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c == lab) continue;
      values.push_back(detail::parse_cell(cells[c], path.string(), row, c + 1));
    }
    ds.series.push_back(std::move(values));
    ds.labels.emplace_back(cells[lab]);
  }
  return ds;
}

/// Writes "label,x1,...,xT" followed by one row per series.
inline void write_series_csv(const LabeledDataset& ds, const std::filesystem::path& path) {
  ds.check();
  auto out = detail::open_output(path);
  out << "label";
  for (std::size_t t = 0; t < ds.length(); ++t) out << ",x" << (t + 1);
  out << '\n';
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out << ds.labels[i];
    for (double v : ds.series[i]) out << ',' << format_double(v);
    out << '\n';
  }
  detail::finish_output(out, path);
}

enum class PadSide { Right, Left };

struct EcgOptions {
  std::size_t target_length = kEcgLength;
  PadSide pad = PadSide::Right;
};

/// Heartbeat rows: samples followed by a trailing 0/1 label. Shorter rows are
/// zero-padded to the target length.
inline LabeledDataset ingest_ecg(const std::filesystem::path& path, const EcgOptions& opt = {}) {
  auto in = detail::open_input(path);
  LabeledDataset ds;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (detail::blank(line)) continue;
    const auto cells = detail::split_csv_line(line);
    const auto where = path.string() + ":" + std::to_string(row);
    if (cells.size() < 2) throw Error(ErrorKind::FormatError, where + ": a row needs samples and a label");
    const std::size_t n = cells.size() - 1;
    if (n > opt.target_length) {
      throw Error(ErrorKind::FormatError, where + ": " + std::to_string(n) + " samples exceed the target length " +
                                              std::to_string(opt.target_length));
    }
    const double label = detail::parse_cell(cells.back(), path.string(), row, cells.size());
    if (label != 0.0 && label != 1.0) throw Error(ErrorKind::FormatError, where + ": label must be 0 or 1");
    std::vector<double> x(opt.target_length, 0.0);
    const std::size_t offset = opt.pad == PadSide::Right ? 0 : opt.target_length - n;
    for (std::size_t c = 0; c < n; ++c) x[offset + c] = detail::parse_cell(cells[c], path.string(), row, c + 1);
    ds.series.push_back(std::move(x));
    ds.labels.emplace_back(label == 0.0 ? "0" : "1");
  }
  return ds;
}

/// Concatenates several heartbeat files in the order given.
inline LabeledDataset ingest_ecg(const std::vector<std::filesystem::path>& paths, const EcgOptions& opt = {}) {
  LabeledDataset all;
  for (const auto& p : paths) {
    auto part = ingest_ecg(p, opt);
    all.series.insert(all.series.end(), std::make_move_iterator(part.series.begin()),
                      std::make_move_iterator(part.series.end()));
    all.labels.insert(all.labels.end(), part.labels.begin(), part.labels.end());
  }
  return all;
}

/// "label,<col>..." then one row per sample. Unnamed columns become f1..fd.
inline void write_feature_matrix(const FeatureMatrix& X, const std::filesystem::path& path) {
  X.check();
  auto out = detail::open_output(path);
  out << "label";
  for (Eigen::Index c = 0; c < X.d(); ++c) {
    out << ',';
    if (X.column_names.empty()) {
      out << 'f' << (c + 1);
    } else {
      out << X.column_names[static_cast<std::size_t>(c)];
    }
  }
  out << '\n';
  std::string buf;
  for (Eigen::Index i = 0; i < X.n(); ++i) {
    buf = X.labels[static_cast<std::size_t>(i)];
    for (Eigen::Index c = 0; c < X.d(); ++c) {
      buf += ',';
      buf += format_double(X.rows(i, c));
    }
    buf += '\n';
    out << buf;
  }
  detail::finish_output(out, path);
}

inline FeatureMatrix read_feature_matrix(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::FormatError, path.string() + ": missing header");
  const auto header = detail::split_csv_line(line);
  if (header.empty() || header.front() != "label") {
    throw Error(ErrorKind::FormatError, path.string() + ": first header cell must be 'label'");
  }
  FeatureMatrix X;
  for (std::size_t c = 1; c < header.size(); ++c) X.column_names.emplace_back(header[c]);
  const std::size_t d = X.column_names.size();
  std::vector<double> values;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (detail::blank(line)) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != d + 1) {
      throw Error(ErrorKind::FormatError, path.string() + ":" + std::to_string(row) + ": expected " +
                                              std::to_string(d + 1) + " cells, found " + std::to_string(cells.size()));
    }
    X.labels.emplace_back(cells[0]);
    for (std::size_t c = 1; c < cells.size(); ++c) values.push_back(detail::parse_cell(cells[c], path.string(), row, c + 1));
  }
  X.rows = Eigen::Map<const RowMatrix>(values.data(), static_cast<Eigen::Index>(X.labels.size()),
                                       static_cast<Eigen::Index>(d));
  return X;
}

/// Incremental SHA-256 with a lower-case hex digest.
class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (ctx_ == nullptr || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) {
      EVP_MD_CTX_free(ctx_);
      throw Error(ErrorKind::IoError, "SHA-256 unavailable");
    }
  }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;
  ~Sha256() { EVP_MD_CTX_free(ctx_); }

  Sha256& update(const void* data, std::size_t n) {
    EVP_DigestUpdate(ctx_, data, n);
    return *this;
  }
  Sha256& update(std::string_view s) { return update(s.data(), s.size()); }

  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_, md.data(), &len);
    std::string out;
    char byte[3];
    for (unsigned int i = 0; i < len; ++i) {
      std::snprintf(byte, sizeof byte, "%02x", md[i]);
      out += byte;
    }
    return out;
  }

 private:
  EVP_MD_CTX* ctx_;
};

inline std::string file_sha256(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  Sha256 h;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

inline void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  out << j.dump(2) << '\n';
  detail::finish_output(out, path);
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::FormatError, path.string() + ": " + e.what());
  }
}

/// Provenance record for a data file: its hash plus whatever produced it.
inline nlohmann::json make_manifest(const std::filesystem::path& data_file, nlohmann::json generator) {
  return {{"file", data_file.filename().string()},
          {"sha256", file_sha256(data_file)},
          {"generator", std::move(generator)},
          {"version", MODWST_VERSION}};
}

/// "corpus.csv" -> "corpus.manifest.json"
inline std::filesystem::path manifest_path(const std::filesystem::path& data_file) {
  auto p = data_file;
  p.replace_extension(".manifest.json");
  return p;
}

}  // namespace modwst
