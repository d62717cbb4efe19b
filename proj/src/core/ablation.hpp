#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "corpus.hpp"
#include "records.hpp"

namespace sdti {

inline constexpr int kRecordSchemaVersion = 1;

std::vector<std::size_t> grid_records();      // 2000, 1900, ..., 100
std::vector<std::size_t> grid_epochs();       // 1, 3, ..., 59
std::vector<std::size_t> grid_sdti_epochs();  // 30, 25, ..., 5

// Full A x B x C product in lexicographic order of the generating indices:
// (2000, 1, 30) first, (100, 59, 5) last. Seeds are left at 0.
std::vector<AblationConfig> enumerate_grid();

std::uint64_t config_seed(std::uint64_t base_seed, std::size_t records, std::size_t epochs, std::size_t sdti_epochs);

// Truncates the corpus to config.records and runs the full SDTI workflow.
// Failures are captured in the record's status, never thrown.
AblationRecord run_config(const Corpus& corpus, const AblationConfig& config, unsigned threads = 1);

nlohmann::json to_json(const AblationRecord& record);
AblationRecord record_from_json(const nlohmann::json& j);

// Parses a JSON-lines results file; malformed lines are skipped and counted.
std::vector<AblationRecord> load_records(const std::filesystem::path& path, std::size_t* skipped = nullptr);

void write_records_csv(const std::filesystem::path& path, const std::vector<AblationRecord>& records);

struct GridOptions {
  std::uint64_t base_seed = 0;
  std::optional<std::size_t> budget;  // run only the first `budget` configs
  std::filesystem::path results_path;
  std::optional<std::filesystem::path> csv_path;
  bool resume = false;
  unsigned threads = 1;
  std::function<void(const AblationRecord&)> on_record;
};

struct GridResult {
  std::vector<AblationRecord> records;  // everything in the results file
  std::size_t executed = 0;
  std::size_t skipped_existing = 0;
  std::size_t skipped_lines = 0;
};

// Streams each finished record to results_path as one JSON line. With resume,
// configs already present in the file are skipped and a torn final line is
// dropped; without it the file is overwritten.
GridResult run_grid(const Corpus& corpus, std::vector<AblationConfig> configs, const GridOptions& options);

}  // namespace sdti
