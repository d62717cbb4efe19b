#include "baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "error.hpp"

namespace sdti {
namespace {

double aggregate(const std::vector<double>& scores, Aggregation aggregation) {
  if (scores.empty()) return 0.0;
  if (aggregation == Aggregation::Max) return *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double s : scores) sum += s;
  return sum / static_cast<double>(scores.size());
}

void check_lengths(const RealMatrix& features, std::span<const std::uint8_t> labels) {
  if (features.rows() != labels.size()) {
    throw Error(ErrorCode::InvalidArgument, "feature rows and label count differ");
  }
}

}  // namespace

std::string_view to_string(BaselineMethod method) {
  switch (method) {
    case BaselineMethod::Pearson: return "pearson";
    case BaselineMethod::MutualInformation: return "mutual_information";
    case BaselineMethod::Cosine: return "cosine";
  }
  return "unknown";
}

std::optional<BaselineMethod> parse_baseline_method(std::string_view name) {
  if (name == "pearson") return BaselineMethod::Pearson;
  if (name == "mutual_information" || name == "mi") return BaselineMethod::MutualInformation;
  if (name == "cosine") return BaselineMethod::Cosine;
  return std::nullopt;
}

std::string_view to_string(Aggregation aggregation) {
  return aggregation == Aggregation::Mean ? "mean" : "max";
}

std::optional<Aggregation> parse_aggregation(std::string_view name) {
  if (name == "mean") return Aggregation::Mean;
  if (name == "max") return Aggregation::Max;
  return std::nullopt;
}

double pearson_score(const RealMatrix& features, std::span<const std::uint8_t> labels, Aggregation aggregation) {
  check_lengths(features, labels);
  const std::size_t m = features.rows();
  if (m < 2) throw Error(ErrorCode::InvalidArgument, "pearson_score needs at least 2 rows");

  double y_mean = 0.0;
  for (auto y : labels) y_mean += y;
  y_mean /= static_cast<double>(m);
  double syy = 0.0;
  for (auto y : labels) syy += (y - y_mean) * (y - y_mean);

  std::vector<double> scores;
  for (std::size_t c = 0; c < features.cols(); ++c) {
    double x_mean = 0.0;
    for (std::size_t r = 0; r < m; ++r) x_mean += features(r, c);
    x_mean /= static_cast<double>(m);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      const double dx = features(r, c) - x_mean;
      sxx += dx * dx;
      sxy += dx * (labels[r] - y_mean);
    }
    scores.push_back(sxx > 0.0 && syy > 0.0 ? std::abs(sxy) / std::sqrt(sxx * syy) : 0.0);
  }
  return aggregate(scores, aggregation);
}

double mutual_information_score(const RealMatrix& features, std::span<const std::uint8_t> labels, std::size_t bins,
                                Aggregation aggregation) {
  check_lengths(features, labels);
  const std::size_t m = features.rows();
  if (bins == 0 || m < bins) throw Error(ErrorCode::InvalidArgument, "mutual_information_score needs m >= bins > 0");

  std::vector<double> scores;
  std::vector<double> joint(bins * 2);
  for (std::size_t c = 0; c < features.cols(); ++c) {
    double lo = features(0, c);
    double hi = lo;
    for (std::size_t r = 1; r < m; ++r) {
      lo = std::min(lo, features(r, c));
      hi = std::max(hi, features(r, c));
    }
    std::fill(joint.begin(), joint.end(), 0.0);
    const double width = hi - lo;
    for (std::size_t r = 0; r < m; ++r) {
      std::size_t bin = 0;
      if (width > 0.0) {
        bin = static_cast<std::size_t>((features(r, c) - lo) / width * static_cast<double>(bins));
        bin = std::min(bin, bins - 1);
      }
      joint[bin * 2 + labels[r]] += 1.0;
    }

    const double total = static_cast<double>(m);
    const double p_y1 = [&] {
      double s = 0.0;
      for (std::size_t b = 0; b < bins; ++b) s += joint[b * 2 + 1];
      return s / total;
    }();
    const double p_y[2] = {1.0 - p_y1, p_y1};
    double mi = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
      const double p_x = (joint[b * 2] + joint[b * 2 + 1]) / total;
      for (int y = 0; y < 2; ++y) {
        const double p_xy = joint[b * 2 + y] / total;
        if (p_xy > 0.0) mi += p_xy * std::log(p_xy / (p_x * p_y[y]));
      }
    }
    scores.push_back(std::max(0.0, mi));
  }
  return aggregate(scores, aggregation);
}

double cosine_score(const RealMatrix& features, std::span<const std::uint8_t> labels, Aggregation aggregation) {
  check_lengths(features, labels);
  const std::size_t m = features.rows();
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "cosine_score needs at least 1 row");

  double yy = 0.0;
  for (auto y : labels) yy += static_cast<double>(y) * y;
  std::vector<double> scores;
  for (std::size_t c = 0; c < features.cols(); ++c) {
    double xx = 0.0;
    double xy = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      xx += features(r, c) * features(r, c);
      xy += features(r, c) * labels[r];
    }
    scores.push_back(xx > 0.0 && yy > 0.0 ? std::abs(xy) / std::sqrt(xx * yy) : 0.0);
  }
  return aggregate(scores, aggregation);
}

double baseline_score(BaselineMethod method, const RealMatrix& features, std::span<const std::uint8_t> labels,
                      const BaselineOptions& options) {
  switch (method) {
    case BaselineMethod::Pearson: return pearson_score(features, labels, options.aggregation);
    case BaselineMethod::MutualInformation:
      return mutual_information_score(features, labels, options.bins, options.aggregation);
    case BaselineMethod::Cosine: return cosine_score(features, labels, options.aggregation);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown baseline method");
}

SimilarityMatrix similarity_matrix(const Corpus& corpus, BaselineMethod method, const BaselineOptions& options) {
  const std::size_t n = corpus.size();
  SimilarityMatrix s{RealMatrix(n, n), method};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      s.scores(i, j) = baseline_score(method, corpus.datasets[i].features, corpus.datasets[j].labels, options);
    }
  }
  return s;
}

AssignmentResult assign_from_similarity(const SimilarityMatrix& similarity) {
  const std::size_t n = similarity.scores.rows();
  IntMatrix votes(n, n, 0);
  for (std::size_t i = 0; i < n; ++i) votes(i, argmax_lowest(similarity.scores.row(i))) = 1;
  return assignment_from_votes(votes, 1);
}

AssignmentResult baseline_assign(const Corpus& corpus, BaselineMethod method, const BaselineOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  AssignmentResult result = assign_from_similarity(similarity_matrix(corpus, method, options));
  result.inference_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace sdti
