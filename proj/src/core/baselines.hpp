#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "corpus.hpp"
#include "matrix.hpp"
#include "prediction.hpp"

namespace sdti {

enum class BaselineMethod { Pearson, MutualInformation, Cosine };
enum class Aggregation { Mean, Max };

std::string_view to_string(BaselineMethod method);
std::optional<BaselineMethod> parse_baseline_method(std::string_view name);
std::string_view to_string(Aggregation aggregation);
std::optional<Aggregation> parse_aggregation(std::string_view name);

struct BaselineOptions {
  std::size_t bins = 10;
  Aggregation aggregation = Aggregation::Mean;
};

struct SimilarityMatrix {
  RealMatrix scores;  // row = dataset, column = candidate label
  BaselineMethod method = BaselineMethod::Pearson;
};

// Per-feature |Pearson r| against the label; zero variance scores 0.
double pearson_score(const RealMatrix& features, std::span<const std::uint8_t> labels,
                     Aggregation aggregation = Aggregation::Mean);

// Per-feature MI in nats between equal-width-binned feature and label.
double mutual_information_score(const RealMatrix& features, std::span<const std::uint8_t> labels,
                                std::size_t bins = 10, Aggregation aggregation = Aggregation::Mean);

// Per-feature |cos(x, y)|; zero norm scores 0.
double cosine_score(const RealMatrix& features, std::span<const std::uint8_t> labels,
                    Aggregation aggregation = Aggregation::Mean);

double baseline_score(BaselineMethod method, const RealMatrix& features, std::span<const std::uint8_t> labels,
                      const BaselineOptions& options = {});

SimilarityMatrix similarity_matrix(const Corpus& corpus, BaselineMethod method, const BaselineOptions& options = {});

// Single deterministic decision; vote_counts is its one-hot.
AssignmentResult baseline_assign(const Corpus& corpus, BaselineMethod method, const BaselineOptions& options = {});
AssignmentResult assign_from_similarity(const SimilarityMatrix& similarity);

}  // namespace sdti
