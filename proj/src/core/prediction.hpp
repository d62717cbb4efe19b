#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "corpus.hpp"
#include "engine.hpp"
#include "matrix.hpp"

namespace sdti {

// T: one one-hot N x N matrix per completed outer epoch.
class VoteTally {
 public:
  explicit VoteTally(std::size_t n_datasets) : n_(n_datasets) {}

  void append(IntMatrix one_hot);
  std::size_t epochs_completed() const noexcept { return epochs_.size(); }
  std::size_t n_datasets() const noexcept { return n_; }
  const std::vector<IntMatrix>& epochs() const noexcept { return epochs_; }

  // Sum over the epoch axis.
  IntMatrix totals() const;

 private:
  std::size_t n_;
  std::vector<IntMatrix> epochs_;
};

struct AssignmentResult {
  std::vector<std::size_t> predicted;
  IntMatrix vote_counts;
  std::vector<long> margins;
  std::size_t total_epochs = 0;
  double inference_time_seconds = 0.0;

  // Label indices claimed by more than one dataset.
  std::vector<std::size_t> duplicate_claims() const;
};

// First index of the largest value.
std::size_t argmax_lowest(std::span<const double> values);
std::size_t argmax_lowest(std::span<const long> values);

// Row-major N x N reshape of the costs, argmin per row (argmax of -cost),
// lowest index on ties. +inf never wins unless the whole row is +inf.
IntMatrix epoch_prediction(std::span<const double> final_costs, std::size_t n_datasets);

AssignmentResult assignment_from_votes(const IntMatrix& vote_counts, std::size_t total_epochs);

struct RunOptions {
  std::size_t epochs = 11;
  std::size_t sdti_epochs = 30;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool concurrent_epochs = false;
  std::size_t element_budget = kDefaultElementBudget;
  DivergencePolicy divergence = DivergencePolicy::MarkWorst;
};

struct SdtiRun {
  AssignmentResult assignment;
  VoteTally tally{0};
  std::vector<TrainingTrace> traces;  // one per outer epoch
};

// Seed of outer epoch k; independent of scheduling.
std::uint64_t epoch_seed(std::uint64_t seed, std::size_t epoch);

SdtiRun run_full(const Corpus& corpus, const RunOptions& options);

}  // namespace sdti
