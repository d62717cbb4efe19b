#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace sdti {

// Streaming count / mean / sum of squared deviations; combines exactly
// enough for pooling across runs.
struct Moments {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x);
  void merge(const Moments& other);
  double variance() const noexcept { return count > 0 ? m2 / static_cast<double>(count) : 0.0; }
};

struct VarianceSummary {
  double mean_correct = 0.0;
  double var_correct = 0.0;
  double mean_incorrect = 0.0;
  double var_incorrect = 0.0;
  std::size_t n_correct = 0;
  std::size_t n_incorrect = 0;
};

// Cost moments of one SDTI epoch index, split by pairing correctness.
struct StratifiedEpoch {
  Moments correct;
  Moments incorrect;
};

struct AblationConfig {
  std::size_t records = 0;
  std::size_t epochs = 0;
  std::size_t sdti_epochs = 0;
  std::uint64_t seed = 0;

  bool same_point(const AblationConfig& o) const noexcept {
    return records == o.records && epochs == o.epochs && sdti_epochs == o.sdti_epochs;
  }
};

enum class RunStatus { Ok, Diverged, Error };

struct AblationRecord {
  AblationConfig config;
  RunStatus status = RunStatus::Ok;
  double f1 = 0.0;
  double accuracy = 0.0;
  double wall_time_seconds = 0.0;
  std::vector<std::size_t> predicted;
  VarianceSummary variance_summary;
  std::size_t n_datasets = 0;
  std::vector<std::vector<double>> final_costs;  // per outer epoch, N^2 each
  std::vector<StratifiedEpoch> stratified;        // per SDTI epoch
  std::string message;                            // failure detail when status != Ok
};

}  // namespace sdti
