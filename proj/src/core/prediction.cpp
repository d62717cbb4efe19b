#include "prediction.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "error.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace sdti {

void VoteTally::append(IntMatrix one_hot) {
  if (one_hot.rows() != n_ || one_hot.cols() != n_) {
    throw Error(ErrorCode::InvalidArgument, "vote matrix must be N x N");
  }
  for (std::size_t i = 0; i < n_; ++i) {
    long sum = 0;
    for (long v : one_hot.row(i)) {
      if (v != 0 && v != 1) throw Error(ErrorCode::InvalidArgument, "vote matrix must be one-hot");
      sum += v;
    }
    if (sum != 1) throw Error(ErrorCode::InvalidArgument, "each vote row must sum to 1");
  }
  epochs_.push_back(std::move(one_hot));
}

IntMatrix VoteTally::totals() const {
  IntMatrix sum(n_, n_, 0);
  for (const auto& e : epochs_) {
    for (std::size_t k = 0; k < sum.data().size(); ++k) sum.data()[k] += e.data()[k];
  }
  return sum;
}

std::vector<std::size_t> AssignmentResult::duplicate_claims() const {
  std::vector<std::size_t> counts(vote_counts.cols(), 0);
  for (std::size_t p : predicted) ++counts[p];
  std::vector<std::size_t> dup;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] > 1) dup.push_back(j);
  }
  return dup;
}

std::size_t argmax_lowest(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < values.size(); ++j) {
    if (values[j] > values[best]) best = j;
  }
  return best;
}

std::size_t argmax_lowest(std::span<const long> values) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < values.size(); ++j) {
    if (values[j] > values[best]) best = j;
  }
  return best;
}

IntMatrix epoch_prediction(std::span<const double> final_costs, std::size_t n_datasets) {
  if (final_costs.size() != n_datasets * n_datasets) {
    throw Error(ErrorCode::InvalidArgument, "final_costs must have N^2 entries");
  }
  IntMatrix one_hot(n_datasets, n_datasets, 0);
  std::vector<double> negated(n_datasets);
  for (std::size_t i = 0; i < n_datasets; ++i) {
    for (std::size_t j = 0; j < n_datasets; ++j) {
      const double c = final_costs[i * n_datasets + j];
      negated[j] = std::isnan(c) ? -std::numeric_limits<double>::infinity() : -c;
    }
    one_hot(i, argmax_lowest(negated)) = 1;
  }
  return one_hot;
}

AssignmentResult assignment_from_votes(const IntMatrix& vote_counts, std::size_t total_epochs) {
  AssignmentResult result;
  result.vote_counts = vote_counts;
  result.total_epochs = total_epochs;
  for (std::size_t i = 0; i < vote_counts.rows(); ++i) {
    const auto row = vote_counts.row(i);
    const std::size_t best = argmax_lowest(row);
    long runner_up = 0;
    bool have_runner_up = false;
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j == best) continue;
      if (!have_runner_up || row[j] > runner_up) runner_up = row[j];
      have_runner_up = true;
    }
    result.predicted.push_back(best);
    result.margins.push_back(row[best] - (have_runner_up ? runner_up : 0));
  }
  return result;
}

std::uint64_t epoch_seed(std::uint64_t seed, std::size_t epoch) { return derive_seed({seed, epoch}); }

SdtiRun run_full(const Corpus& corpus, const RunOptions& options) {
  if (options.epochs == 0 || options.sdti_epochs == 0) {
    throw Error(ErrorCode::InvalidArgument, "epochs and sdti_epochs must be at least 1");
  }
  const auto start = std::chrono::steady_clock::now();
  const CombinationTensors base = assemble(corpus, options.element_budget);
  const std::size_t n = corpus.size();

  std::vector<TrainingTrace> traces(options.epochs);
  const auto run_epoch = [&](std::size_t k, unsigned layer_threads) {
    CombinationTensors tensors = base;
    Rng rng(epoch_seed(options.seed, k));
    reset_epoch_state(tensors, rng);
    traces[k] = run_sdti_layer(tensors, options.sdti_epochs, layer_threads, options.divergence);
  };

  if (options.concurrent_epochs && options.threads > 1) {
    parallel_for(options.epochs, options.threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t k = begin; k < end; ++k) run_epoch(k, 1);
    });
  } else {
    for (std::size_t k = 0; k < options.epochs; ++k) run_epoch(k, options.threads);
  }

  SdtiRun run;
  run.tally = VoteTally(n);
  for (const auto& trace : traces) run.tally.append(epoch_prediction(trace.final_costs, n));
  run.assignment = assignment_from_votes(run.tally.totals(), run.tally.epochs_completed());
  run.traces = std::move(traces);
  run.assignment.inference_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

}  // namespace sdti
