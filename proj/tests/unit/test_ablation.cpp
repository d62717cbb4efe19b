#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include <json.hpp>

#include "core/ablation.hpp"
#include "core/error.hpp"
#include "oracle.hpp"

using namespace sdti;
using nlohmann::json;

namespace {

const Corpus& grid_corpus() {
  static const Corpus corpus = [] {
    SyntheticSpec spec;
    spec.n_datasets = 3;
    spec.n_features = {3, 4, 2};
    spec.n_records = 2000;
    spec.noise_rate = 0.05;
    spec.seed = 10;
    std::vector<Dataset> ds;
    for (auto& d : generate_synthetic(spec)) ds.push_back(normalize_zscore(d, 0.8));
    return truncate_corpus(std::move(ds), 2000);
  }();
  return corpus;
}

std::vector<AblationConfig> cheap_configs() {
  std::vector<AblationConfig> out;
  for (const auto& c : enumerate_grid()) {
    if (c.records <= 300 && c.epochs <= 3 && c.sdti_epochs <= 10) out.push_back(c);
  }
  return out;
}

std::string strip_wall_time(const std::string& line) {
  json j = json::parse(line);
  j.erase("wall_time_seconds");
  return j.dump();
}

std::vector<std::string> stripped_lines(const std::filesystem::path& path) {
  std::vector<std::string> out;
  for (const auto& l : oracle::read_lines(path)) out.push_back(strip_wall_time(l));
  return out;
}

}  // namespace

TEST(Grid, ExactProduct) {
  const auto grid = enumerate_grid();
  EXPECT_EQ(grid.size(), 3600u);
  std::set<std::size_t> records, epochs, sdti;
  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> triples;
  for (const auto& c : grid) {
    records.insert(c.records);
    epochs.insert(c.epochs);
    sdti.insert(c.sdti_epochs);
    triples.insert({c.records, c.epochs, c.sdti_epochs});
    EXPECT_EQ(c.epochs % 2, 1u);
  }
  EXPECT_EQ(triples.size(), 3600u);
  std::set<std::size_t> want_records, want_epochs, want_sdti;
  for (std::size_t r = 100; r <= 2000; r += 100) want_records.insert(r);
  for (std::size_t k = 0; k < 30; ++k) want_epochs.insert(2 * k + 1);
  for (std::size_t s = 5; s <= 30; s += 5) want_sdti.insert(s);
  EXPECT_EQ(records, want_records);
  EXPECT_EQ(epochs, want_epochs);
  EXPECT_EQ(sdti, want_sdti);
}

TEST(Grid, Ordering) {
  const auto grid = enumerate_grid();
  EXPECT_EQ(grid.front().records, 2000u);
  EXPECT_EQ(grid.front().epochs, 1u);
  EXPECT_EQ(grid.front().sdti_epochs, 30u);
  EXPECT_EQ(grid.back().records, 100u);
  EXPECT_EQ(grid.back().epochs, 59u);
  EXPECT_EQ(grid.back().sdti_epochs, 5u);
  EXPECT_EQ(grid[1].sdti_epochs, 25u);
  EXPECT_EQ(grid_records().front(), 2000u);
  EXPECT_EQ(grid_sdti_epochs().back(), 5u);
}

TEST(ConfigSeed, DependsOnEveryField) {
  const auto s = config_seed(1, 500, 11, 30);
  EXPECT_EQ(s, config_seed(1, 500, 11, 30));
  EXPECT_NE(s, config_seed(2, 500, 11, 30));
  EXPECT_NE(s, config_seed(1, 600, 11, 30));
  EXPECT_NE(s, config_seed(1, 500, 13, 30));
  EXPECT_NE(s, config_seed(1, 500, 11, 25));
}

TEST(RunConfig, ReproducibleApartFromWallTime) {
  const AblationConfig c{200, 3, 5, config_seed(0, 200, 3, 5)};
  AblationRecord a = run_config(grid_corpus(), c);
  AblationRecord b = run_config(grid_corpus(), c);
  EXPECT_EQ(a.status, RunStatus::Ok);
  a.wall_time_seconds = b.wall_time_seconds = 0.0;
  EXPECT_EQ(to_json(a), to_json(b));
  EXPECT_EQ(a.final_costs.size(), 3u);
  EXPECT_EQ(a.final_costs[0].size(), 9u);
  EXPECT_EQ(a.stratified.size(), 5u);
  EXPECT_EQ(a.n_datasets, 3u);
}

TEST(RunConfig, FailureIsCapturedNotThrown) {
  SyntheticSpec spec;
  spec.n_datasets = 2;
  spec.n_features = {2, 2};
  spec.n_records = 150;
  Corpus small = truncate_corpus(generate_synthetic(spec), 150);
  const AblationRecord r = run_config(small, {200, 1, 5, 1});
  EXPECT_EQ(r.status, RunStatus::Error);
  EXPECT_FALSE(r.message.empty());
}

TEST(RecordJson, RoundTrip) {
  const AblationConfig c{100, 1, 5, 42};
  AblationRecord r = run_config(grid_corpus(), c);
  r.final_costs[0][1] = std::numeric_limits<double>::infinity();
  const json j = to_json(r);
  EXPECT_EQ(j.at("schema_version"), kRecordSchemaVersion);
  EXPECT_TRUE(j.at("final_costs")[0][1].is_null());
  const AblationRecord back = record_from_json(json::parse(j.dump()));
  EXPECT_EQ(to_json(back).dump(), j.dump());
  EXPECT_TRUE(std::isinf(back.final_costs[0][1]));
}

TEST(RecordJson, RejectsOtherSchemaVersions) {
  json j = to_json(run_config(grid_corpus(), {100, 1, 5, 1}));
  j["schema_version"] = 2;
  EXPECT_THROW(record_from_json(j), Error);
  j.erase("schema_version");
  EXPECT_THROW(record_from_json(j), Error);
}

TEST(RunGrid, BudgetOfOneWritesOneLine) {
  oracle::TempDir dir("grid");
  GridOptions o;
  o.results_path = dir / "r.jsonl";
  o.budget = 1;
  const auto result = run_grid(grid_corpus(), cheap_configs(), o);
  EXPECT_EQ(result.executed, 1u);
  EXPECT_EQ(oracle::read_lines(o.results_path).size(), 1u);
}

TEST(RunGrid, ResumeCompletesOnlyMissingConfigs) {
  oracle::TempDir dir("grid");
  const auto configs = cheap_configs();
  ASSERT_GE(configs.size(), 12u);

  GridOptions clean;
  clean.results_path = dir / "clean.jsonl";
  clean.budget = 12;
  clean.base_seed = 3;
  run_grid(grid_corpus(), configs, clean);

  GridOptions part = clean;
  part.results_path = dir / "part.jsonl";
  part.budget = 5;
  EXPECT_EQ(run_grid(grid_corpus(), configs, part).executed, 5u);

  // Simulate an interrupted write.
  {
    std::ofstream out(part.results_path, std::ios::app);
    out << "{\"schema_version\": 1, \"records\": 3";
  }
  part.budget = 12;
  part.resume = true;
  std::size_t callbacks = 0;
  part.on_record = [&](const AblationRecord&) { ++callbacks; };
  const auto resumed = run_grid(grid_corpus(), configs, part);
  EXPECT_EQ(resumed.executed, 7u);
  EXPECT_EQ(resumed.skipped_existing, 5u);
  EXPECT_EQ(resumed.records.size(), 12u);
  EXPECT_EQ(callbacks, 7u);
  EXPECT_EQ(stripped_lines(part.results_path), stripped_lines(clean.results_path));

  // A complete file needs no further work.
  const auto again = run_grid(grid_corpus(), configs, part);
  EXPECT_EQ(again.executed, 0u);
  EXPECT_EQ(again.records.size(), 12u);
}

TEST(RunGrid, ParallelMatchesSequentialAsASet) {
  oracle::TempDir dir("grid");
  const auto configs = cheap_configs();
  GridOptions seq;
  seq.results_path = dir / "seq.jsonl";
  seq.budget = 8;
  run_grid(grid_corpus(), configs, seq);
  GridOptions par = seq;
  par.results_path = dir / "par.jsonl";
  par.threads = 3;
  run_grid(grid_corpus(), configs, par);
  auto a = stripped_lines(seq.results_path);
  auto b = stripped_lines(par.results_path);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  EXPECT_EQ(a, b);
}

TEST(RunGrid, WithoutResumeOverwrites) {
  oracle::TempDir dir("grid");
  GridOptions o;
  o.results_path = dir / "r.jsonl";
  o.budget = 2;
  run_grid(grid_corpus(), cheap_configs(), o);
  run_grid(grid_corpus(), cheap_configs(), o);
  EXPECT_EQ(oracle::read_lines(o.results_path).size(), 2u);
}

TEST(RunGrid, CsvColumns) {
  oracle::TempDir dir("grid");
  GridOptions o;
  o.results_path = dir / "r.jsonl";
  o.csv_path = dir / "r.csv";
  o.budget = 3;
  run_grid(grid_corpus(), cheap_configs(), o);
  const auto lines = oracle::read_lines(*o.csv_path);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], "records,epochs,sdti_epochs,seed,f1,accuracy,wall_time_seconds,status");
  EXPECT_NE(lines[1].find(",ok"), std::string::npos);
}

TEST(LoadRecords, CountsMalformedLines) {
  oracle::TempDir dir("grid");
  GridOptions o;
  o.results_path = dir / "r.jsonl";
  o.budget = 2;
  run_grid(grid_corpus(), cheap_configs(), o);
  {
    std::ofstream out(o.results_path, std::ios::app);
    out << "not json\n{\"schema_version\": 1}\n";
  }
  std::size_t skipped = 0;
  const auto records = load_records(o.results_path, &skipped);
  EXPECT_EQ(records.size(), 2u);
  EXPECT_EQ(skipped, 2u);
  EXPECT_THROW(load_records(dir / "missing.jsonl"), Error);
}
