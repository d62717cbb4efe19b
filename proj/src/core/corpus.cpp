#include "corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <set>

#include "error.hpp"
#include "rng.hpp"

namespace sdti {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field.push_back('"');
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (*begin == '+') ++begin;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

std::size_t resolve_label_column(const std::vector<std::string>& header,
                                 const LabelColumn& label_column,
                                 const std::filesystem::path& path) {
  if (const auto* index = std::get_if<std::size_t>(&label_column)) {
    if (*index >= header.size()) {
      throw Error(ErrorCode::InvalidArgument,
                  path.string() + ": label column index " + std::to_string(*index) +
                      " out of range (" + std::to_string(header.size()) + " columns)");
    }
    return *index;
  }
  const auto& name = std::get<std::string>(label_column);
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw Error(ErrorCode::InvalidArgument,
                path.string() + ": no label column named '" + name + "'");
  }
  return static_cast<std::size_t>(it - header.begin());
}

void require_finite(const RealMatrix& m, const std::string& what) {
  for (double v : m.data()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, what + ": non-finite feature value");
  }
}

}  // namespace

RawTable read_csv_table(const std::filesystem::path& path, const LabelColumn& label_column) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open CSV file: " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::Parse, path.string() + ": missing header row");
  std::vector<std::string> header = split_csv_line(line);
  for (auto& h : header) h = trim(h);
  const std::size_t label_index = resolve_label_column(header, label_column, path);

  RawTable table;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != label_index) table.feature_names.push_back(header[c]);
  }

  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::Parse, path.string() + ": row " + std::to_string(line_no) + " has " +
                                        std::to_string(fields.size()) + " fields, expected " +
                                        std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const std::string cell = trim(fields[c]);
      if (c == label_index) {
        table.labels.push_back(cell);
        continue;
      }
      const auto value = parse_number(cell);
      if (!value) {
        throw Error(ErrorCode::Parse, path.string() + ": non-numeric value '" + cell + "' at row " +
                                          std::to_string(line_no) + ", column " +
                                          std::to_string(c) + " (" + header[c] + ")");
      }
      values.push_back(*value);
    }
    ++rows;
  }

  table.features = RealMatrix(rows, header.size() - 1);
  table.features.data() = std::move(values);
  return table;
}

Dataset load_csv(const std::filesystem::path& path, const LabelColumn& label_column) {
  RawTable table = read_csv_table(path, label_column);

  std::set<std::string> distinct(table.labels.begin(), table.labels.end());
  if (distinct.size() != 2) {
    throw Error(ErrorCode::InvalidArgument,
                path.string() + ": non-binary label column (" + std::to_string(distinct.size()) +
                    " distinct values)");
  }
  std::string low = *distinct.begin();
  std::string high = *distinct.rbegin();
  const auto low_num = parse_number(low);
  const auto high_num = parse_number(high);
  if (low_num && high_num && *high_num < *low_num) std::swap(low, high);

  Dataset d;
  d.name = path.stem().string();
  d.features = std::move(table.features);
  d.labels.reserve(table.labels.size());
  for (const auto& l : table.labels) d.labels.push_back(l == low ? 0 : 1);
  return d;
}

Dataset binarize_multiclass(const RealMatrix& features, const std::vector<long>& labels, long class_a,
                            long class_b, std::string name) {
  if (class_a == class_b) throw Error(ErrorCode::InvalidArgument, "classes must differ");
  if (features.rows() != labels.size()) {
    throw Error(ErrorCode::InvalidArgument, "feature rows and label count differ");
  }
  const auto count = [&](long c) { return std::count(labels.begin(), labels.end(), c); };
  if (count(class_a) == 0 || count(class_b) == 0) {
    throw Error(ErrorCode::InvalidArgument,
                "class " + std::to_string(count(class_a) == 0 ? class_a : class_b) + " absent");
  }

  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < labels.size(); ++r) {
    if (labels[r] == class_a || labels[r] == class_b) keep.push_back(r);
  }

  Dataset d;
  d.name = name.empty() ? std::to_string(class_a) + "_vs_" + std::to_string(class_b) : std::move(name);
  d.features = RealMatrix(keep.size(), features.cols());
  d.labels.reserve(keep.size());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const auto src = features.row(keep[k]);
    std::copy(src.begin(), src.end(), d.features.row(k).begin());
    d.labels.push_back(labels[keep[k]] == class_a ? 0 : 1);
  }
  return d;
}

Dataset normalize_zscore(const Dataset& dataset, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "train_fraction must lie in (0, 1]");
  }
  const std::size_t m = dataset.rows();
  const auto train_rows = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(m)));
  if (train_rows < 2) {
    throw Error(ErrorCode::InvalidArgument,
                dataset.name + ": normalization needs at least 2 training rows");
  }

  const std::size_t u = dataset.num_features();
  Dataset out = dataset;
  out.norm_stats.mean.assign(u, 0.0);
  out.norm_stats.stddev.assign(u, 0.0);
  out.norm_stats.train_rows = train_rows;

  for (std::size_t c = 0; c < u; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < train_rows; ++r) mean += dataset.features(r, c);
    mean /= static_cast<double>(train_rows);
    double ss = 0.0;
    for (std::size_t r = 0; r < train_rows; ++r) {
      const double d = dataset.features(r, c) - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(train_rows));
    out.norm_stats.mean[c] = mean;
    out.norm_stats.stddev[c] = sd;
    for (std::size_t r = 0; r < m; ++r) {
      out.features(r, c) = sd > 0.0 ? (dataset.features(r, c) - mean) / sd : 0.0;
    }
  }
  require_finite(out.features, dataset.name);
  return out;
}

Dataset shuffle_rows(const Dataset& dataset, std::uint64_t seed) {
  std::vector<std::size_t> order(dataset.rows());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng.engine());

  Dataset out = dataset;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto src = dataset.features.row(order[k]);
    std::copy(src.begin(), src.end(), out.features.row(k).begin());
    out.labels[k] = dataset.labels[order[k]];
  }
  return out;
}

Corpus truncate_corpus(std::vector<Dataset> datasets, std::size_t record_count) {
  if (datasets.empty()) throw Error(ErrorCode::InvalidArgument, "corpus has no datasets");
  if (record_count == 0 || record_count > kMaxRecords) {
    throw Error(ErrorCode::InvalidArgument,
                "record_count must lie in [1, " + std::to_string(kMaxRecords) + "]");
  }
  Corpus corpus;
  corpus.record_count = record_count;
  for (auto& d : datasets) {
    if (d.rows() < record_count) {
      throw Error(ErrorCode::InvalidArgument, "dataset '" + d.name + "' has " +
                                                  std::to_string(d.rows()) + " rows, fewer than " +
                                                  std::to_string(record_count));
    }
    if (d.labels.size() != d.rows()) {
      throw Error(ErrorCode::InvalidArgument, "dataset '" + d.name + "' label count mismatch");
    }
    if (d.rows() > record_count) {
      RealMatrix head(record_count, d.num_features());
      std::copy_n(d.features.data().begin(), record_count * d.num_features(), head.data().begin());
      d.features = std::move(head);
      d.labels.resize(record_count);
    }
    corpus.max_features = std::max(corpus.max_features, d.num_features());
    corpus.datasets.push_back(std::move(d));
  }
  return corpus;
}

Corpus truncate_corpus(const Corpus& corpus, std::size_t record_count) {
  return truncate_corpus(corpus.datasets, record_count);
}

std::vector<Dataset> generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n_datasets == 0) throw Error(ErrorCode::InvalidArgument, "n_datasets must be positive");
  if (spec.n_features.size() != spec.n_datasets) {
    throw Error(ErrorCode::InvalidArgument, "n_features must list one width per dataset");
  }
  if (!(spec.signal_strength > 0.0 && spec.signal_strength <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "signal_strength must lie in (0, 1]");
  }
  if (!(spec.noise_rate >= 0.0 && spec.noise_rate < 0.5)) {
    throw Error(ErrorCode::InvalidArgument, "noise_rate must lie in [0, 0.5)");
  }
  if (spec.n_records < 2) throw Error(ErrorCode::InvalidArgument, "n_records must be at least 2");
  if (spec.decoy_features > 0 && spec.n_datasets < 2) {
    throw Error(ErrorCode::InvalidArgument, "decoy features need at least two datasets");
  }
  if (!(spec.decoy_correlation >= 0.0 && spec.decoy_correlation < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "decoy_correlation must lie in [0, 1)");
  }
  if (spec.nuisance_scale < 0.0) throw Error(ErrorCode::InvalidArgument, "nuisance_scale must be >= 0");

  Rng rng(spec.seed);
  const std::size_t m = spec.n_records;
  const double s = spec.signal_strength;
  const double residual = std::sqrt(std::max(0.0, 1.0 - s * s));
  std::vector<Dataset> out(spec.n_datasets);

  for (std::size_t i = 0; i < spec.n_datasets; ++i) {
    const std::size_t u = spec.n_features[i];
    if (u == 0) throw Error(ErrorCode::InvalidArgument, "every dataset needs at least one feature");

    RealMatrix latent(m, u);
    for (double& v : latent.data()) v = rng.normal();

    std::vector<double> weights(u);
    double scale = 0.0;
    if (spec.nuisance_scale > 0.0) {
      for (std::size_t k = 0; k < u; ++k) weights[k] = k < u / 2 ? 1.0 : -1.0;
      std::shuffle(weights.begin(), weights.end(), rng.engine());
      scale = std::sqrt(static_cast<double>(u));
    } else {
      for (double& w : weights) w = rng.normal();
      scale = std::sqrt(std::inner_product(weights.begin(), weights.end(), weights.begin(), 0.0));
      if (scale == 0.0) scale = 1.0;
    }
    const double bias = rng.uniform(-0.25, 0.25);

    Dataset& d = out[i];
    d.name = "synthetic_" + std::to_string(i);
    d.features = RealMatrix(m, u + spec.decoy_features);
    d.labels.resize(m);
    for (std::size_t r = 0; r < m; ++r) {
      const auto z = latent.row(r);
      const double h = std::inner_product(z.begin(), z.end(), weights.begin(), 0.0) / scale;
      const double score = s * h + residual * rng.normal();
      std::uint8_t y = score + bias > 0.0 ? 1 : 0;
      if (rng.bernoulli(spec.noise_rate)) y = 1 - y;
      d.labels[r] = y;

      const double nuisance = spec.nuisance_scale > 0.0 ? spec.nuisance_scale * rng.normal() : 0.0;
      for (std::size_t k = 0; k < u; ++k) d.features(r, k) = z[k] + nuisance;
    }
  }

  if (spec.decoy_features > 0) {
    const double rho = spec.decoy_correlation;
    const double rest = std::sqrt(1.0 - rho * rho);
    for (std::size_t i = 0; i < spec.n_datasets; ++i) {
      const auto& target = out[(i + 1) % spec.n_datasets].labels;
      const double p = std::accumulate(target.begin(), target.end(), 0.0) / static_cast<double>(m);
      const double sd = std::sqrt(p * (1.0 - p));
      const std::size_t u = spec.n_features[i];
      for (std::size_t r = 0; r < m; ++r) {
        const double centered = sd > 0.0 ? (target[r] - p) / sd : 0.0;
        for (std::size_t k = 0; k < spec.decoy_features; ++k) {
          out[i].features(r, u + k) = rho * centered + rest * rng.normal();
        }
      }
    }
  }
  return out;
}

}  // namespace sdti
