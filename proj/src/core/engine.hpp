#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "matrix.hpp"
#include "tensor_assembly.hpp"

namespace sdti {

inline constexpr double kProbabilityClamp = 1e-12;
inline constexpr double kAdamEpsilon = 1e-8;

struct Gradients {
  Tensor3 weights;  // N^2 x c x 1
  Tensor3 biases;   // N^2 x 1 x 1
};

struct AdamState {
  Tensor3 m1_weights, m2_weights;
  Tensor3 m1_biases, m2_biases;
  std::uint64_t step = 0;
  double epsilon = kAdamEpsilon;

  static AdamState zeros_like(const Parameters& params);
};

struct TrainingTrace {
  RealMatrix costs;                 // S x N^2, recorded before each update
  std::vector<double> final_costs;  // row S-1
  std::chrono::duration<double> wall_time{0};
};

enum class DivergencePolicy {
  Throw,      // raise DivergenceError
  MarkWorst,  // freeze the slice and report +inf cost from then on
};

// sigma(A[q] W[q] + B[q]) for every slice q.
Tensor3 forward(const Tensor3& data, const Tensor3& weights, const Tensor3& biases, unsigned threads = 1);

// Mean binary cross-entropy per slice with p clamped to [1e-12, 1 - 1e-12].
std::vector<double> bce_cost(const Tensor3& outputs, const Tensor3& labels);

// Analytic sigmoid + BCE gradient; the clamp is not differentiated.
Gradients backward(const Tensor3& data, const Tensor3& labels, const Tensor3& outputs, unsigned threads = 1);

// One bias-corrected Adam update with each slice's own lr and betas.
void adam_step(Parameters& params, const Gradients& grads, AdamState& state, const Hyperparameters& hyper);

TrainingTrace run_sdti_layer(CombinationTensors& tensors, std::size_t sdti_epochs, unsigned threads = 1,
                             DivergencePolicy policy = DivergencePolicy::Throw);

}  // namespace sdti
