#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "corpus.hpp"

namespace sdti {

struct ManifestEntry {
  std::string name;
  std::filesystem::path path;
  LabelColumn label_column = std::size_t{0};
  std::optional<std::pair<long, long>> classes;  // pairwise binarization
};

// Declarative corpus: CSV entries and/or one synthetic block.
struct Manifest {
  std::vector<ManifestEntry> datasets;
  std::optional<SyntheticSpec> synthetic;
  double train_fraction = 0.8;
  std::optional<std::size_t> records;
  std::optional<std::uint64_t> shuffle_seed;
};

Manifest parse_manifest(const nlohmann::json& doc, const std::filesystem::path& base_dir);
Manifest read_manifest(const std::filesystem::path& path);

// Loads, binarizes, shuffles (if requested), normalizes, then truncates. The
// default record count is the shortest dataset capped at kMaxRecords.
Corpus build_corpus(const Manifest& manifest);
Corpus load_manifest(const std::filesystem::path& path);

SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SyntheticSpec& spec);

}  // namespace sdti
