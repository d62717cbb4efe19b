#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "matrix.hpp"

namespace sdti {

inline constexpr std::size_t kMaxRecords = 2000;

struct NormStats {
  std::vector<double> mean;
  std::vector<double> stddev;  // population; 0 marks a constant column
  std::size_t train_rows = 0;
};

// A feature matrix (rows x features) with its binary target vector.
struct Dataset {
  std::string name;
  RealMatrix features;
  std::vector<std::uint8_t> labels;
  NormStats norm_stats;

  std::size_t rows() const noexcept { return features.rows(); }
  std::size_t num_features() const noexcept { return features.cols(); }
};

// Datasets truncated to a common record count. Order defines the dataset
// index used by every downstream structure.
struct Corpus {
  std::vector<Dataset> datasets;
  std::size_t record_count = 0;
  std::size_t max_features = 0;

  std::size_t size() const noexcept { return datasets.size(); }
};

struct SyntheticSpec {
  std::size_t n_datasets = 5;
  std::vector<std::size_t> n_features{4, 6, 8, 5, 7};
  std::size_t n_records = kMaxRecords;
  double signal_strength = 1.0;  // (0, 1]
  double noise_rate = 0.0;       // [0, 0.5)
  std::uint64_t seed = 0;

  // Attenuated-correlation variant. With nuisance_scale > 0 every signal
  // feature carries a shared nuisance factor scaled by nuisance_scale; the
  // hidden weights are +-1 with balanced signs so the factor cancels in the
  // weighted sum and only a multi-feature fit recovers the label.
  double nuisance_scale = 0.0;
  // Extra columns correlated (at decoy_correlation) with the label of
  // dataset (i + 1) mod n_datasets.
  std::size_t decoy_features = 0;
  double decoy_correlation = 0.45;
};

using LabelColumn = std::variant<std::string, std::size_t>;

// Numeric feature table plus the raw text of the selected label column.
struct RawTable {
  std::vector<std::string> feature_names;
  RealMatrix features;
  std::vector<std::string> labels;
};

RawTable read_csv_table(const std::filesystem::path& path, const LabelColumn& label_column);

// Two distinct label values required; the lower one (numeric order when both
// parse as numbers, lexicographic otherwise) maps to 0.
Dataset load_csv(const std::filesystem::path& path, const LabelColumn& label_column);

Dataset binarize_multiclass(const RealMatrix& features, const std::vector<long>& labels,
                            long class_a, long class_b, std::string name = {});

Dataset normalize_zscore(const Dataset& dataset, double train_fraction);

Dataset shuffle_rows(const Dataset& dataset, std::uint64_t seed);

Corpus truncate_corpus(std::vector<Dataset> datasets, std::size_t record_count);
Corpus truncate_corpus(const Corpus& corpus, std::size_t record_count);

std::vector<Dataset> generate_synthetic(const SyntheticSpec& spec);

}  // namespace sdti
