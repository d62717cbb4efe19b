#include <gtest/gtest.h>

#include <json.hpp>

#include "core/error.hpp"
#include "core/manifest.hpp"
#include "oracle.hpp"

using namespace sdti;
using nlohmann::json;

namespace {

std::string csv_with_rows(std::size_t rows, const char* a, const char* b) {
  std::string s = "x1,x2,label\n";
  for (std::size_t r = 0; r < rows; ++r) {
    s += std::to_string(r) + "," + std::to_string((r * 7) % 11) + "," + (r % 3 ? a : b) + "\n";
  }
  return s;
}

}  // namespace

TEST(Manifest, ParsesEntriesRelativeToBaseDir) {
  const json doc = json::parse(R"({
    "train_fraction": 0.5,
    "records": 40,
    "shuffle_seed": 3,
    "datasets": [
      {"name": "first", "path": "a.csv", "label_column": "label"},
      {"path": "sub/b.csv", "label_column": 2, "classes": [3, 5]}
    ]
  })");
  const Manifest m = parse_manifest(doc, "/data/root");
  ASSERT_EQ(m.datasets.size(), 2u);
  EXPECT_EQ(m.datasets[0].name, "first");
  EXPECT_EQ(m.datasets[0].path, std::filesystem::path("/data/root/a.csv"));
  EXPECT_EQ(std::get<std::string>(m.datasets[0].label_column), "label");
  EXPECT_EQ(m.datasets[1].name, "b");
  EXPECT_EQ(std::get<std::size_t>(m.datasets[1].label_column), 2u);
  ASSERT_TRUE(m.datasets[1].classes.has_value());
  EXPECT_EQ(m.datasets[1].classes->first, 3);
  EXPECT_EQ(m.datasets[1].classes->second, 5);
  EXPECT_DOUBLE_EQ(m.train_fraction, 0.5);
  EXPECT_EQ(m.records, 40u);
  EXPECT_EQ(m.shuffle_seed, 3u);
  EXPECT_FALSE(m.synthetic.has_value());
}

TEST(Manifest, SyntheticBlock) {
  const json doc = json::parse(R"({"synthetic": {"n_datasets": 3, "n_features": 9, "n_records": 120,
                                                  "noise_rate": 0.1, "seed": 8}})");
  const Manifest m = parse_manifest(doc, ".");
  ASSERT_TRUE(m.synthetic.has_value());
  EXPECT_EQ(m.synthetic->n_features, (std::vector<std::size_t>{9, 9, 9}));
  EXPECT_EQ(m.synthetic->n_records, 120u);
  EXPECT_DOUBLE_EQ(m.synthetic->noise_rate, 0.1);
  const Corpus c = build_corpus(m);
  EXPECT_EQ(c.size(), 3u);
  EXPECT_EQ(c.record_count, 120u);
  EXPECT_EQ(c.max_features, 9u);
}

TEST(Manifest, SyntheticSpecRoundTrips) {
  SyntheticSpec spec;
  spec.n_features = {3, 4, 5, 6, 7};
  spec.decoy_features = 2;
  spec.nuisance_scale = 1.5;
  spec.seed = 99;
  const SyntheticSpec back = synthetic_spec_from_json(to_json(spec));
  EXPECT_EQ(back.n_features, spec.n_features);
  EXPECT_EQ(back.decoy_features, 2u);
  EXPECT_DOUBLE_EQ(back.nuisance_scale, 1.5);
  EXPECT_EQ(back.seed, 99u);
}

TEST(Manifest, RejectsMalformedDocuments) {
  EXPECT_THROW(parse_manifest(json::array(), "."), Error);
  EXPECT_THROW(parse_manifest(json::object(), "."), Error);
  EXPECT_THROW(parse_manifest(json::parse(R"({"datasets": [{"label_column": 0}]})"), "."), Error);
  EXPECT_THROW(
      parse_manifest(json::parse(R"({"datasets": [{"path": "a.csv", "label_column": 0, "classes": [1]}]})"), "."),
      Error);
}

TEST(Manifest, MissingFileNamesPath) {
  try {
    read_manifest("/no/such/manifest.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
    EXPECT_NE(std::string(e.what()).find("/no/such/manifest.json"), std::string::npos);
  }
}

TEST(Manifest, BuildsCsvCorpusTruncatedToShortest) {
  oracle::TempDir dir("manifest");
  oracle::write_file(dir / "a.csv", csv_with_rows(60, "yes", "no"));
  oracle::write_file(dir / "b.csv", csv_with_rows(45, "p", "q"));
  oracle::write_file(dir / "m.json", R"({"datasets": [
      {"path": "a.csv", "label_column": "label"},
      {"path": "b.csv", "label_column": 2}]})");
  const Corpus c = load_manifest(dir / "m.json");
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.record_count, 45u);
  EXPECT_EQ(c.datasets[0].name, "a");
  EXPECT_EQ(c.datasets[1].rows(), 45u);
  EXPECT_EQ(c.max_features, 2u);
}

TEST(Manifest, PairwiseClassesFromOneSource) {
  oracle::TempDir dir("manifest");
  std::string csv = "x,digit\n";
  for (int r = 0; r < 100; ++r) csv += std::to_string(r) + "," + std::to_string(r % 4) + "\n";
  oracle::write_file(dir / "digits.csv", csv);
  oracle::write_file(dir / "m.json", R"({"datasets": [
      {"name": "d01", "path": "digits.csv", "label_column": "digit", "classes": [0, 1]},
      {"name": "d23", "path": "digits.csv", "label_column": "digit", "classes": [2, 3]}]})");
  const Corpus c = load_manifest(dir / "m.json");
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.record_count, 50u);
  EXPECT_EQ(c.datasets[1].labels[0], 0);
  EXPECT_EQ(c.datasets[1].labels[1], 1);
}

TEST(Manifest, RecordsBeyondShortestRejected) {
  oracle::TempDir dir("manifest");
  oracle::write_file(dir / "a.csv", csv_with_rows(30, "yes", "no"));
  oracle::write_file(dir / "m.json", R"({"records": 31, "datasets": [{"path": "a.csv", "label_column": "label"}]})");
  EXPECT_THROW(load_manifest(dir / "m.json"), Error);
}

TEST(Manifest, ShippedManifestsLoad) {
  for (const char* name : {"synthetic_improved.json", "synthetic_decoy.json", "full_grid_small.json"}) {
    const auto path = std::filesystem::path(SDTI_MANIFEST_DIR) / name;
    const Corpus c = load_manifest(path);
    EXPECT_EQ(c.size(), 5u) << name;
  }
}
