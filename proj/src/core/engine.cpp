#include "engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"
#include "parallel.hpp"

namespace sdti {
namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_data_weights(const Tensor3& data, const Tensor3& weights, const Tensor3& biases) {
  if (weights.slices() != data.slices() || weights.rows() != data.cols() || weights.cols() != 1 ||
      biases.slices() != data.slices() || biases.rows() != 1 || biases.cols() != 1) {
    throw Error(ErrorCode::InvalidArgument, "forward: tensor shapes do not conform");
  }
}

void check_column(const Tensor3& t, const Tensor3& data, const char* what) {
  if (t.slices() != data.slices() || t.rows() != data.rows() || t.cols() != 1) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + ": tensor shapes do not conform");
  }
}

}  // namespace

AdamState AdamState::zeros_like(const Parameters& params) {
  const auto& w = params.weights;
  const auto& b = params.biases;
  return AdamState{Tensor3(w.slices(), w.rows(), w.cols()), Tensor3(w.slices(), w.rows(), w.cols()),
                   Tensor3(b.slices(), b.rows(), b.cols()), Tensor3(b.slices(), b.rows(), b.cols())};
}

Tensor3 forward(const Tensor3& data, const Tensor3& weights, const Tensor3& biases, unsigned threads) {
  check_data_weights(data, weights, biases);
  const std::size_t m = data.rows();
  const std::size_t c = data.cols();
  Tensor3 out(data.slices(), m, 1);
  parallel_for(data.slices(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t q = begin; q < end; ++q) {
      const double* a = data.slice(q).data();
      const double* w = weights.slice(q).data();
      const double b = biases(q, 0, 0);
      double* o = out.slice(q).data();
      for (std::size_t r = 0; r < m; ++r) {
        double z = 0.0;
        for (std::size_t k = 0; k < c; ++k) z += a[r * c + k] * w[k];
        o[r] = sigmoid(z + b);
      }
    }
  });
  return out;
}

std::vector<double> bce_cost(const Tensor3& outputs, const Tensor3& labels) {
  if (!outputs.same_shape(labels) || outputs.cols() != 1) {
    throw Error(ErrorCode::InvalidArgument, "bce_cost: tensor shapes do not conform");
  }
  const std::size_t m = outputs.rows();
  std::vector<double> cost(outputs.slices(), 0.0);
  for (std::size_t q = 0; q < outputs.slices(); ++q) {
    const auto p = outputs.slice(q);
    const auto y = labels.slice(q);
    double total = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      const double pc = std::clamp(p[r], kProbabilityClamp, 1.0 - kProbabilityClamp);
      total += y[r] * std::log(pc) + (1.0 - y[r]) * std::log(1.0 - pc);
    }
    cost[q] = -total / static_cast<double>(m);
  }
  return cost;
}

Gradients backward(const Tensor3& data, const Tensor3& labels, const Tensor3& outputs, unsigned threads) {
  check_column(labels, data, "backward");
  check_column(outputs, data, "backward");
  const std::size_t m = data.rows();
  const std::size_t c = data.cols();
  const double inv_m = 1.0 / static_cast<double>(m);
  Gradients g{Tensor3(data.slices(), c, 1), Tensor3(data.slices(), 1, 1)};
  parallel_for(data.slices(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t q = begin; q < end; ++q) {
      const double* a = data.slice(q).data();
      const double* y = labels.slice(q).data();
      const double* p = outputs.slice(q).data();
      double* gw = g.weights.slice(q).data();
      double gb = 0.0;
      for (std::size_t r = 0; r < m; ++r) {
        const double residual = p[r] - y[r];
        gb += residual;
        for (std::size_t k = 0; k < c; ++k) gw[k] += a[r * c + k] * residual;
      }
      for (std::size_t k = 0; k < c; ++k) gw[k] *= inv_m;
      g.biases(q, 0, 0) = gb * inv_m;
    }
  });
  return g;
}

void adam_step(Parameters& params, const Gradients& grads, AdamState& state, const Hyperparameters& hyper) {
  const std::size_t slices = params.weights.slices();
  if (!grads.weights.same_shape(params.weights) || !grads.biases.same_shape(params.biases) ||
      !state.m1_weights.same_shape(params.weights) || !state.m1_biases.same_shape(params.biases) ||
      hyper.learning_rate.size() != slices || hyper.betas.size() != slices) {
    throw Error(ErrorCode::InvalidArgument, "adam_step: shapes do not conform");
  }
  const double t = static_cast<double>(state.step + 1);

  const auto update = [&](double& param, double grad, double& m1, double& m2, double lr, double beta1,
                          double beta2, double correction1, double correction2) {
    m1 = beta1 * m1 + (1.0 - beta1) * grad;
    m2 = beta2 * m2 + (1.0 - beta2) * grad * grad;
    const double m1_hat = m1 / correction1;
    const double m2_hat = m2 / correction2;
    param -= lr * m1_hat / (std::sqrt(m2_hat) + state.epsilon);
  };

  const std::size_t c = params.weights.rows();
  for (std::size_t q = 0; q < slices; ++q) {
    const double lr = hyper.learning_rate[q];
    const auto [beta1, beta2] = hyper.betas[q];
    const double correction1 = 1.0 - std::pow(beta1, t);
    const double correction2 = 1.0 - std::pow(beta2, t);
    for (std::size_t k = 0; k < c; ++k) {
      update(params.weights(q, k, 0), grads.weights(q, k, 0), state.m1_weights(q, k, 0),
             state.m2_weights(q, k, 0), lr, beta1, beta2, correction1, correction2);
    }
    update(params.biases(q, 0, 0), grads.biases(q, 0, 0), state.m1_biases(q, 0, 0), state.m2_biases(q, 0, 0), lr,
           beta1, beta2, correction1, correction2);
  }
  ++state.step;
}

TrainingTrace run_sdti_layer(CombinationTensors& tensors, std::size_t sdti_epochs, unsigned threads,
                             DivergencePolicy policy) {
  if (sdti_epochs == 0) throw Error(ErrorCode::InvalidArgument, "sdti_epochs must be at least 1");
  const auto start = std::chrono::steady_clock::now();
  if (!tensors.data || !tensors.labels) throw Error(ErrorCode::InvalidArgument, "tensors not assembled");
  const Tensor3& data = *tensors.data;
  const Tensor3& labels = *tensors.labels;
  const std::size_t slices = data.slices();

  TrainingTrace trace;
  trace.costs = RealMatrix(sdti_epochs, slices);
  AdamState state = AdamState::zeros_like(tensors.params);
  std::vector<bool> frozen(slices, false);

  for (std::size_t epoch = 0; epoch < sdti_epochs; ++epoch) {
    const Tensor3 outputs = forward(data, tensors.params.weights, tensors.params.biases, threads);
    std::vector<double> cost = bce_cost(outputs, labels);
    for (std::size_t q = 0; q < slices; ++q) {
      if (!frozen[q] && std::isfinite(cost[q])) continue;
      if (policy == DivergencePolicy::Throw) throw DivergenceError(q, epoch);
      frozen[q] = true;
      cost[q] = std::numeric_limits<double>::infinity();
    }
    std::copy(cost.begin(), cost.end(), trace.costs.row(epoch).begin());

    Gradients grads = backward(data, labels, outputs, threads);
    for (std::size_t q = 0; q < slices; ++q) {
      if (!frozen[q]) continue;
      std::fill(grads.weights.slice(q).begin(), grads.weights.slice(q).end(), 0.0);
      grads.biases(q, 0, 0) = 0.0;
    }
    adam_step(tensors.params, grads, state, tensors.hyper);
  }

  const auto last = trace.costs.row(sdti_epochs - 1);
  trace.final_costs.assign(last.begin(), last.end());
  trace.wall_time = std::chrono::steady_clock::now() - start;
  return trace;
}

}  // namespace sdti
