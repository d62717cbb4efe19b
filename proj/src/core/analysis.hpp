#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "engine.hpp"
#include "records.hpp"

namespace sdti {

struct MetricsReport {
  double f1_macro = 0.0;
  double accuracy = 0.0;
  std::vector<bool> per_dataset_correct;
  double inference_time_seconds = 0.0;
};

// Macro F1 over label-index classes that occur in truth or predictions.
double f1_macro(std::span<const std::size_t> predicted, std::span<const std::size_t> truth);
double accuracy(std::span<const std::size_t> predicted, std::span<const std::size_t> truth);
MetricsReport evaluate(std::span<const std::size_t> predicted, std::span<const std::size_t> truth,
                       double inference_time_seconds = 0.0);

// Dataset i's true label sits at index i.
std::vector<std::size_t> identity_truth(std::size_t n_datasets);

struct CostGroups {
  std::vector<double> correct;
  std::vector<double> incorrect;
};

enum class CostPooling { FinalOnly, AllEpochs };

// Correct pairs are the diagonal q / N == q % N.
CostGroups group_costs(std::span<const double> costs, std::size_t n_datasets);
void append_costs(CostGroups& groups, std::span<const double> costs, std::size_t n_datasets);
CostGroups group_trace_costs(std::span<const TrainingTrace> traces, std::size_t n_datasets, CostPooling pooling);

VarianceSummary summarize_groups(const CostGroups& groups);
VarianceSummary split_costs(std::span<const double> final_costs, std::size_t n_datasets);

std::vector<StratifiedEpoch> stratify(std::span<const TrainingTrace> traces, std::size_t n_datasets);
void merge_stratified(std::vector<StratifiedEpoch>& into, const std::vector<StratifiedEpoch>& from);

enum class Center { Mean, Median };

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Levene (center = mean) or Brown-Forsythe (center = median) test for equal
// variances of two groups; p from F(1, n_a + n_b - 2).
TestResult levene_test(std::span<const double> group_a, std::span<const double> group_b, Center center);

double median(std::vector<double> values);
// Linear interpolation between closest ranks, q in [0, 1].
double percentile(std::vector<double> values, double q);

struct SummaryRow {
  std::string group;
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single value
  double min = 0.0;
  double p25 = 0.0;
  double p50 = 0.0;
  double p75 = 0.0;
  double max = 0.0;
};

SummaryRow describe(std::span<const double> values, std::string group = {});

using RecordPredicate = std::function<bool(const AblationRecord&)>;

// F1 distribution of the ok records matching predicate.
SummaryRow summarize_runs(const std::vector<AblationRecord>& records, const RecordPredicate& predicate,
                          std::string group = {});

struct NamedPredicate {
  std::string name;
  RecordPredicate predicate;
};

// Records >= / < 500, epochs >= / < 10, SDTI epochs 30 / 5, improved / worse.
std::vector<NamedPredicate> comparison_groups();

}  // namespace sdti
