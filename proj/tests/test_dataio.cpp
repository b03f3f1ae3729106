#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>

#include "modwst/dataio.hpp"
#include "modwst/scattering.hpp"

using namespace modwst;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("modwst_dataio_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  fs::path file(const std::string& name, const std::string& content) const {
    std::ofstream(path / name, std::ios::binary) << content;
    return path / name;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

template <class F>
ErrorKind error_kind(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::InvalidInput;
}

}  // namespace

TEST_CASE("series CSV reading", "[dataio]") {
  TempDir tmp;
  const auto ds = read_series_csv(tmp.file("a.csv", "a,1,2\nb,3,4\n"), false);
  REQUIRE(ds.size() == 2);
  CHECK(ds.labels == std::vector<std::string>{"a", "b"});
  CHECK(ds.series[0] == std::vector<double>{1, 2});
  CHECK(ds.series[1] == std::vector<double>{3, 4});

  const auto h = read_series_csv(tmp.file("h.csv", "label,x1,x2\r\na, 1.5 ,-2e-3\r\n"), true);
  REQUIRE(h.size() == 1);
  CHECK(h.series[0] == std::vector<double>{1.5, -2e-3});

  const auto last = read_series_csv(tmp.file("l.csv", "1,2,z\n"), false, {LabelColumn::kLast});
  CHECK(last.labels[0] == "z");
  CHECK(last.series[0] == std::vector<double>{1, 2});

  CHECK(error_kind([&] { read_series_csv(tmp.file("r.csv", "a,1,2\nb,3\n"), false); }) == ErrorKind::FormatError);
  CHECK(error_kind([&] { read_series_csv(tmp.path / "missing.csv", false); }) == ErrorKind::IoError);
  CHECK(error_kind([&] { read_series_csv(tmp.file("n.csv", "a,1,nan\n"), false); }) == ErrorKind::ParseError);
  CHECK(error_kind([&] { read_series_csv(tmp.file("i.csv", "a,inf,1\n"), false); }) == ErrorKind::ParseError);
  CHECK(error_kind([&] { read_series_csv(tmp.file("e.csv", "a,1,\n"), false); }) == ErrorKind::ParseError);

  try {
    read_series_csv(tmp.file("p.csv", "h\na,1,2\nb,3,x4\n"), true);
    FAIL();
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
    CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring(":3:3"));
  }
}

TEST_CASE("series CSV round trip is lossless", "[dataio]") {
  TempDir tmp;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  LabeledDataset ds;
  for (int i = 0; i < 20; ++i) {
    std::vector<double> x(33);
    for (auto& v : x) v = nd(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    ds.series.push_back(x);
    ds.labels.push_back("c" + std::to_string(i % 3));
  }
  ds.series[0][0] = 0.1;
  ds.series[0][1] = -0.0;
  ds.series[0][2] = 5e-324;
  ds.series[0][3] = 1.7976931348623157e308;
  const auto p = tmp.path / "rt.csv";
  write_series_csv(ds, p);
  const auto back = read_series_csv(p, true);
  CHECK(back.labels == ds.labels);
  CHECK(back.series == ds.series);

  // writing again gives identical bytes
  write_series_csv(back, tmp.path / "rt2.csv");
  CHECK(slurp(p) == slurp(tmp.path / "rt2.csv"));
  CHECK(slurp(p).find("0.10000000000000001") != std::string::npos);
}

TEST_CASE("number formatting ignores the global locale", "[dataio]") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(-1234.25) == "-1234.25");
  CHECK(format_double(1e-7) == "9.9999999999999995e-08");
}

TEST_CASE("ECG ingestion pads to 187 samples", "[dataio][ecg]") {
  TempDir tmp;
  std::string content;
  std::string row100;
  for (int i = 0; i < 100; ++i) row100 += std::to_string(i + 1) + ",";
  content += row100 + "1.0\n";
  std::string row187;
  for (int i = 0; i < 187; ++i) row187 += "0.5,";
  content += row187 + "0.0\n";
  const auto p = tmp.file("ecg.csv", content);

  const auto ds = ingest_ecg(p);
  REQUIRE(ds.size() == 2);
  CHECK(ds.length() == 187);
  CHECK(ds.labels == std::vector<std::string>{"1", "0"});
  CHECK(ds.series[0][0] == 1.0);
  CHECK(ds.series[0][99] == 100.0);
  for (std::size_t t = 100; t < 187; ++t) CHECK(ds.series[0][t] == 0.0);
  CHECK(ds.series[1] == std::vector<double>(187, 0.5));

  EcgOptions left;
  left.pad = PadSide::Left;
  const auto l = ingest_ecg(p, left);
  for (std::size_t t = 0; t < 87; ++t) CHECK(l.series[0][t] == 0.0);
  CHECK(l.series[0][87] == 1.0);
  CHECK(l.series[0][186] == 100.0);

  CHECK(ingest_ecg(std::vector<fs::path>{p, p}).size() == 4);

  std::string row188;
  for (int i = 0; i < 188; ++i) row188 += "0,";
  CHECK(error_kind([&] { ingest_ecg(tmp.file("long.csv", row188 + "1\n")); }) == ErrorKind::FormatError);
  CHECK(error_kind([&] { ingest_ecg(tmp.file("lab.csv", "1,2,3,2\n")); }) == ErrorKind::FormatError);
}

TEST_CASE("feature matrix round trip", "[dataio]") {
  TempDir tmp;
  FeatureMatrix X;
  X.rows = RowMatrix::Random(6, 64 * 3);
  X.rows(0, 0) = 1.0 / 3.0;
  X.labels = {"a", "b", "a", "b", "a", "b"};
  X.column_names = scattering_column_names(2, 1, 64);
  const auto p = tmp.path / "f.csv";
  write_feature_matrix(X, p);
  const auto header = slurp(p).substr(0, slurp(p).find('\n'));
  CHECK(header.rfind("label,S_0[0],S_0[1],", 0) == 0);
  CHECK(header.find("S_1[0]") != std::string::npos);
  CHECK(header.find("S_2[63]") != std::string::npos);

  const auto back = read_feature_matrix(p);
  CHECK(back.labels == X.labels);
  CHECK(back.column_names == X.column_names);
  CHECK((back.rows - X.rows).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(back.rows == X.rows);

  FeatureMatrix empty;
  empty.rows.resize(0, 2);
  empty.column_names = {"S_0[0]", "S_0[1]"};
  write_feature_matrix(empty, tmp.path / "e.csv");
  CHECK(slurp(tmp.path / "e.csv") == "label,S_0[0],S_0[1]\n");
  const auto e = read_feature_matrix(tmp.path / "e.csv");
  CHECK(e.n() == 0);
  CHECK(e.d() == 2);

  CHECK(error_kind([&] { read_feature_matrix(tmp.file("bad.csv", "label,a\nx,1,2\n")); }) == ErrorKind::FormatError);
  CHECK(error_kind([&] { read_feature_matrix(tmp.file("nh.csv", "y,a\n")); }) == ErrorKind::FormatError);
  CHECK(error_kind([&] { write_feature_matrix(X, "/proc/nonexistent/dir/f.csv"); }) == ErrorKind::IoError);
}

TEST_CASE("file hashes and manifests", "[dataio]") {
  TempDir tmp;
  // SHA-256("abc")
  CHECK(file_sha256(tmp.file("abc.txt", "abc")) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(file_sha256(tmp.file("empty.txt", "")) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");

  CHECK(Sha256().update("ab").update("c").hex() == file_sha256(tmp.path / "abc.txt"));

  const auto data = tmp.file("corpus.csv", "a,1\n");
  const auto m = make_manifest(data, {{"seed", 7}});
  CHECK(m["file"] == "corpus.csv");
  CHECK(m["generator"]["seed"] == 7);
  CHECK(m["sha256"] == file_sha256(data));
  CHECK(manifest_path(data).filename() == "corpus.manifest.json");
  write_json(m, manifest_path(data));
  CHECK(read_json(manifest_path(data)) == m);
  CHECK(error_kind([&] { read_json(tmp.file("bad.json", "{")); }) == ErrorKind::FormatError);
}
