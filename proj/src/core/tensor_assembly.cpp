#include "tensor_assembly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"

namespace sdti {

RealMatrix zero_pad(const RealMatrix& features, std::size_t width) {
  if (features.cols() > width) {
    throw Error(ErrorCode::InvalidArgument, "cannot pad " + std::to_string(features.cols()) +
                                                " columns to width " + std::to_string(width));
  }
  RealMatrix out(features.rows(), width, 0.0);
  for (std::size_t r = 0; r < features.rows(); ++r) {
    const auto src = features.row(r);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

std::size_t data_tensor_elements(const Corpus& corpus) {
  const std::size_t n = corpus.size();
  const std::size_t max = std::numeric_limits<std::size_t>::max();
  std::size_t total = n * n;
  for (std::size_t f : {corpus.record_count, corpus.max_features}) {
    if (f != 0 && total > max / f) return max;
    total *= f;
  }
  return total;
}

Tensor3 assemble_data_tensor(const Corpus& corpus, std::size_t element_budget) {
  const std::size_t n = corpus.size();
  const std::size_t m = corpus.record_count;
  const std::size_t c = corpus.max_features;
  const std::size_t elements = data_tensor_elements(corpus);
  if (elements > element_budget) {
    throw Error(ErrorCode::Budget, "data tensor needs " + std::to_string(elements) +
                                       " elements (N^2 * m * c), budget is " +
                                       std::to_string(element_budget));
  }

  Tensor3 a(n * n, m, c, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Dataset& d = corpus.datasets[i];
    if (d.rows() != m) throw Error(ErrorCode::InvalidArgument, "dataset '" + d.name + "' is not truncated");
    const RealMatrix padded = zero_pad(d.features, c);
    for (std::size_t j = 0; j < n; ++j) {
      std::copy(padded.data().begin(), padded.data().end(), a.slice(i * n + j).begin());
    }
  }
  return a;
}

Tensor3 assemble_label_tensor(const Corpus& corpus) {
  const std::size_t n = corpus.size();
  const std::size_t m = corpus.record_count;
  Tensor3 nl(n * n, m, 1, 0.0);
  for (std::size_t q = 0; q < n * n; ++q) {
    const auto& labels = corpus.datasets[q % n].labels;
    if (labels.size() != m) throw Error(ErrorCode::InvalidArgument, "label vector length mismatch");
    std::copy(labels.begin(), labels.end(), nl.slice(q).begin());
  }
  return nl;
}

Hyperparameters sample_hyperparameters(std::size_t n_datasets, Rng& rng) {
  Hyperparameters h;
  h.learning_rate.reserve(n_datasets * n_datasets);
  h.betas.reserve(n_datasets * n_datasets);
  for (std::size_t i = 0; i < n_datasets; ++i) {
    const double lr = std::pow(10.0, rng.uniform(kLogLrLow, kLogLrHigh));
    const double beta1 = rng.uniform(kBeta1Low, kBeta1High);
    const double beta2 = rng.uniform(kBeta2Low, kBeta2High);
    for (std::size_t j = 0; j < n_datasets; ++j) {
      h.learning_rate.push_back(lr);
      h.betas.push_back({beta1, beta2});
    }
  }
  return h;
}

double glorot_bound(std::size_t width) { return std::sqrt(6.0 / static_cast<double>(width + 1)); }

Parameters init_weights(std::size_t n_datasets, std::size_t width, Rng& rng) {
  const std::size_t slices = n_datasets * n_datasets;
  const double bound = glorot_bound(width);
  Parameters p{Tensor3(slices, width, 1), Tensor3(slices, 1, 1, 0.0)};
  for (double& w : p.weights.data()) w = rng.uniform(-bound, bound);
  return p;
}

CombinationTensors assemble(const Corpus& corpus, std::size_t element_budget) {
  CombinationTensors t;
  t.index = IndexMap(corpus.size());
  t.data = std::make_shared<const Tensor3>(assemble_data_tensor(corpus, element_budget));
  t.labels = std::make_shared<const Tensor3>(assemble_label_tensor(corpus));
  return t;
}

void reset_epoch_state(CombinationTensors& tensors, Rng& rng) {
  const std::size_t n = tensors.index.n_datasets();
  tensors.hyper = sample_hyperparameters(n, rng);
  tensors.params = init_weights(n, tensors.data->cols(), rng);
}

}  // namespace sdti
