#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

#include "corpus.hpp"
#include "matrix.hpp"
#include "rng.hpp"

namespace sdti {

// Elements of A (N^2 * m * c) allowed before assembly refuses to allocate.
inline constexpr std::size_t kDefaultElementBudget = 2'000'000'000;

// Dataset-major combination index: q = dataset * n + label.
class IndexMap {
 public:
  explicit IndexMap(std::size_t n_datasets) : n_(n_datasets) {}

  std::size_t n_datasets() const noexcept { return n_; }
  std::size_t combinations() const noexcept { return n_ * n_; }
  std::size_t combination(std::size_t dataset, std::size_t label) const noexcept { return dataset * n_ + label; }
  std::size_t dataset_of(std::size_t q) const noexcept { return q / n_; }
  std::size_t label_of(std::size_t q) const noexcept { return q % n_; }
  bool is_correct(std::size_t q) const noexcept { return dataset_of(q) == label_of(q); }

 private:
  std::size_t n_;
};

// Per-combination Adam hyperparameters; rows of one dataset block are equal.
struct Hyperparameters {
  std::vector<double> learning_rate;              // N^2 x 1
  std::vector<std::array<double, 2>> betas;       // N^2 x 2
};

inline constexpr double kLogLrLow = -5.0;
inline constexpr double kLogLrHigh = -1.0;
inline constexpr double kBeta1Low = 0.85;
inline constexpr double kBeta1High = 0.99;
inline constexpr double kBeta2Low = 0.98;
inline constexpr double kBeta2High = 0.9999;

struct Parameters {
  Tensor3 weights;  // N^2 x c x 1
  Tensor3 biases;   // N^2 x 1 x 1
};

// A and NL never change across outer epochs and are shared between copies;
// parameters and hyperparameters are owned per training run.
struct CombinationTensors {
  IndexMap index{0};
  std::shared_ptr<const Tensor3> data;    // A:  N^2 x m x c
  std::shared_ptr<const Tensor3> labels;  // NL: N^2 x m x 1
  Parameters params;
  Hyperparameters hyper;
};

RealMatrix zero_pad(const RealMatrix& features, std::size_t width);

std::size_t data_tensor_elements(const Corpus& corpus);
Tensor3 assemble_data_tensor(const Corpus& corpus, std::size_t element_budget = kDefaultElementBudget);
Tensor3 assemble_label_tensor(const Corpus& corpus);

// One (lr, beta1, beta2) triple per dataset, tiled over that dataset's N rows.
Hyperparameters sample_hyperparameters(std::size_t n_datasets, Rng& rng);

// Glorot-uniform weights (fan_in = c, fan_out = 1); zero biases.
Parameters init_weights(std::size_t n_datasets, std::size_t width, Rng& rng);
double glorot_bound(std::size_t width);

// A and NL only; parameters and hyperparameters are filled per outer epoch.
CombinationTensors assemble(const Corpus& corpus, std::size_t element_budget = kDefaultElementBudget);

// Draws hyperparameters then weights from rng, in that order.
void reset_epoch_state(CombinationTensors& tensors, Rng& rng);

}  // namespace sdti
