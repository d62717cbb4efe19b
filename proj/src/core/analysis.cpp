#include "analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <boost/math/distributions/fisher_f.hpp>

#include "error.hpp"

namespace sdti {

void Moments::add(double x) {
  ++count;
  const double delta = x - mean;
  mean += delta / static_cast<double>(count);
  m2 += delta * (x - mean);
}

void Moments::merge(const Moments& other) {
  if (other.count == 0) return;
  if (count == 0) {
    *this = other;
    return;
  }
  const double n_a = static_cast<double>(count);
  const double n_b = static_cast<double>(other.count);
  const double delta = other.mean - mean;
  const double n = n_a + n_b;
  mean += delta * n_b / n;
  m2 += other.m2 + delta * delta * n_a * n_b / n;
  count += other.count;
}

double f1_macro(std::span<const std::size_t> predicted, std::span<const std::size_t> truth) {
  if (predicted.size() != truth.size()) throw Error(ErrorCode::InvalidArgument, "f1_macro: length mismatch");
  if (truth.empty()) return 0.0;
  std::set<std::size_t> classes(truth.begin(), truth.end());
  classes.insert(predicted.begin(), predicted.end());

  double total = 0.0;
  for (std::size_t c : classes) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      const bool p = predicted[i] == c;
      const bool t = truth[i] == c;
      tp += p && t;
      fp += p && !t;
      fn += !p && t;
    }
    total += tp == 0 ? 0.0 : 2.0 * tp / static_cast<double>(2 * tp + fp + fn);
  }
  return total / static_cast<double>(classes.size());
}

double accuracy(std::span<const std::size_t> predicted, std::span<const std::size_t> truth) {
  if (predicted.size() != truth.size()) throw Error(ErrorCode::InvalidArgument, "accuracy: length mismatch");
  if (truth.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

MetricsReport evaluate(std::span<const std::size_t> predicted, std::span<const std::size_t> truth,
                       double inference_time_seconds) {
  MetricsReport r;
  r.f1_macro = f1_macro(predicted, truth);
  r.accuracy = accuracy(predicted, truth);
  for (std::size_t i = 0; i < truth.size(); ++i) r.per_dataset_correct.push_back(predicted[i] == truth[i]);
  r.inference_time_seconds = inference_time_seconds;
  return r;
}

std::vector<std::size_t> identity_truth(std::size_t n_datasets) {
  std::vector<std::size_t> t(n_datasets);
  for (std::size_t i = 0; i < n_datasets; ++i) t[i] = i;
  return t;
}

void append_costs(CostGroups& groups, std::span<const double> costs, std::size_t n_datasets) {
  if (costs.size() != n_datasets * n_datasets) {
    throw Error(ErrorCode::InvalidArgument, "cost vector must have N^2 entries");
  }
  for (std::size_t q = 0; q < costs.size(); ++q) {
    (q / n_datasets == q % n_datasets ? groups.correct : groups.incorrect).push_back(costs[q]);
  }
}

CostGroups group_costs(std::span<const double> costs, std::size_t n_datasets) {
  CostGroups g;
  append_costs(g, costs, n_datasets);
  return g;
}

CostGroups group_trace_costs(std::span<const TrainingTrace> traces, std::size_t n_datasets, CostPooling pooling) {
  CostGroups g;
  for (const auto& trace : traces) {
    if (pooling == CostPooling::FinalOnly) {
      append_costs(g, trace.final_costs, n_datasets);
    } else {
      for (std::size_t s = 0; s < trace.costs.rows(); ++s) append_costs(g, trace.costs.row(s), n_datasets);
    }
  }
  return g;
}

VarianceSummary summarize_groups(const CostGroups& groups) {
  Moments c, i;
  for (double v : groups.correct) c.add(v);
  for (double v : groups.incorrect) i.add(v);
  return {c.mean, c.variance(), i.mean, i.variance(), c.count, i.count};
}

VarianceSummary split_costs(std::span<const double> final_costs, std::size_t n_datasets) {
  return summarize_groups(group_costs(final_costs, n_datasets));
}

std::vector<StratifiedEpoch> stratify(std::span<const TrainingTrace> traces, std::size_t n_datasets) {
  std::vector<StratifiedEpoch> out;
  for (const auto& trace : traces) {
    if (out.size() < trace.costs.rows()) out.resize(trace.costs.rows());
    for (std::size_t s = 0; s < trace.costs.rows(); ++s) {
      const auto row = trace.costs.row(s);
      for (std::size_t q = 0; q < row.size(); ++q) {
        (q / n_datasets == q % n_datasets ? out[s].correct : out[s].incorrect).add(row[q]);
      }
    }
  }
  return out;
}

void merge_stratified(std::vector<StratifiedEpoch>& into, const std::vector<StratifiedEpoch>& from) {
  if (into.size() < from.size()) into.resize(from.size());
  for (std::size_t s = 0; s < from.size(); ++s) {
    into[s].correct.merge(from[s].correct);
    into[s].incorrect.merge(from[s].incorrect);
  }
}

double median(std::vector<double> values) { return percentile(std::move(values), 0.5); }

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "percentile of empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

TestResult levene_test(std::span<const double> group_a, std::span<const double> group_b, Center center) {
  if (group_a.size() < 2 || group_b.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "levene_test needs at least 2 samples per group");
  }
  const auto deviations = [center](std::span<const double> g) {
    double c = 0.0;
    if (center == Center::Median) {
      c = median(std::vector<double>(g.begin(), g.end()));
    } else {
      for (double v : g) c += v;
      c /= static_cast<double>(g.size());
    }
    std::vector<double> z;
    z.reserve(g.size());
    for (double v : g) z.push_back(std::abs(v - c));
    return z;
  };
  const auto mean_of = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };

  const std::vector<double> za = deviations(group_a);
  const std::vector<double> zb = deviations(group_b);
  const double na = static_cast<double>(za.size());
  const double nb = static_cast<double>(zb.size());
  const double n = na + nb;
  const double mean_a = mean_of(za);
  const double mean_b = mean_of(zb);
  const double grand = (na * mean_a + nb * mean_b) / n;

  const double between = na * (mean_a - grand) * (mean_a - grand) + nb * (mean_b - grand) * (mean_b - grand);
  double within = 0.0;
  for (double z : za) within += (z - mean_a) * (z - mean_a);
  for (double z : zb) within += (z - mean_b) * (z - mean_b);

  if (within == 0.0) {
    if (between == 0.0) return {0.0, 1.0};
    return {std::numeric_limits<double>::infinity(), 0.0};
  }
  const double statistic = (n - 2.0) * between / within;
  const boost::math::fisher_f dist(1.0, n - 2.0);
  return {statistic, boost::math::cdf(boost::math::complement(dist, statistic))};
}

SummaryRow describe(std::span<const double> values, std::string group) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "empty group" + (group.empty() ? "" : ": " + group));
  SummaryRow row;
  row.group = std::move(group);
  row.count = values.size();
  Moments m;
  for (double v : values) m.add(v);
  row.mean = m.mean;
  row.std = values.size() > 1 ? std::sqrt(m.m2 / static_cast<double>(values.size() - 1)) : 0.0;
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  row.min = v.front();
  row.max = v.back();
  row.p25 = percentile(v, 0.25);
  row.p50 = percentile(v, 0.50);
  row.p75 = percentile(v, 0.75);
  return row;
}

SummaryRow summarize_runs(const std::vector<AblationRecord>& records, const RecordPredicate& predicate,
                          std::string group) {
  std::vector<double> f1s;
  for (const auto& r : records) {
    if (r.status == RunStatus::Ok && (!predicate || predicate(r))) f1s.push_back(r.f1);
  }
  return describe(f1s, std::move(group));
}

std::vector<NamedPredicate> comparison_groups() {
  const auto improved = [](const AblationRecord& r) {
    return r.config.records >= 500 && r.config.epochs >= 10 && r.config.sdti_epochs == 30;
  };
  const auto worse = [](const AblationRecord& r) {
    return r.config.records < 500 && r.config.epochs < 10 && r.config.sdti_epochs == 5;
  };
  return {
      {"records>=500", [](const AblationRecord& r) { return r.config.records >= 500; }},
      {"records<500", [](const AblationRecord& r) { return r.config.records < 500; }},
      {"epochs>=10", [](const AblationRecord& r) { return r.config.epochs >= 10; }},
      {"epochs<10", [](const AblationRecord& r) { return r.config.epochs < 10; }},
      {"sdti_epochs=30", [](const AblationRecord& r) { return r.config.sdti_epochs == 30; }},
      {"sdti_epochs=5", [](const AblationRecord& r) { return r.config.sdti_epochs == 5; }},
      {"improved", improved},
      {"worse", worse},
  };
}

}  // namespace sdti
