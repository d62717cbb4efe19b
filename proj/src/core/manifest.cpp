#include "manifest.hpp"

#include <algorithm>
#include <fstream>

#include "error.hpp"

namespace sdti {

using nlohmann::json;

SyntheticSpec synthetic_spec_from_json(const json& j) {
  SyntheticSpec spec;
  spec.n_datasets = j.value("n_datasets", spec.n_datasets);
  if (j.contains("n_features")) {
    const auto& f = j.at("n_features");
    if (f.is_array()) {
      spec.n_features = f.get<std::vector<std::size_t>>();
    } else {
      spec.n_features.assign(spec.n_datasets, f.get<std::size_t>());
    }
  } else if (spec.n_features.size() != spec.n_datasets) {
    spec.n_features.resize(spec.n_datasets, 6);
  }
  spec.n_records = j.value("n_records", spec.n_records);
  spec.signal_strength = j.value("signal_strength", spec.signal_strength);
  spec.noise_rate = j.value("noise_rate", spec.noise_rate);
  spec.seed = j.value("seed", spec.seed);
  spec.nuisance_scale = j.value("nuisance_scale", spec.nuisance_scale);
  spec.decoy_features = j.value("decoy_features", spec.decoy_features);
  spec.decoy_correlation = j.value("decoy_correlation", spec.decoy_correlation);
  return spec;
}

json to_json(const SyntheticSpec& spec) {
  return {{"n_datasets", spec.n_datasets},         {"n_features", spec.n_features},
          {"n_records", spec.n_records},           {"signal_strength", spec.signal_strength},
          {"noise_rate", spec.noise_rate},         {"seed", spec.seed},
          {"nuisance_scale", spec.nuisance_scale}, {"decoy_features", spec.decoy_features},
          {"decoy_correlation", spec.decoy_correlation}};
}

Manifest parse_manifest(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw Error(ErrorCode::Parse, "manifest must be a JSON object");
  try {
    Manifest m;
    m.train_fraction = doc.value("train_fraction", m.train_fraction);
    if (doc.contains("records") && !doc.at("records").is_null()) m.records = doc.at("records").get<std::size_t>();
    if (doc.contains("shuffle_seed") && !doc.at("shuffle_seed").is_null()) {
      m.shuffle_seed = doc.at("shuffle_seed").get<std::uint64_t>();
    }
    if (doc.contains("synthetic")) m.synthetic = synthetic_spec_from_json(doc.at("synthetic"));
    if (doc.contains("datasets")) {
      for (const auto& e : doc.at("datasets")) {
        ManifestEntry entry;
        entry.path = e.at("path").get<std::string>();
        if (entry.path.is_relative()) entry.path = base_dir / entry.path;
        entry.name = e.value("name", entry.path.stem().string());
        const auto& lc = e.at("label_column");
        if (lc.is_number_unsigned() || lc.is_number_integer()) {
          entry.label_column = lc.get<std::size_t>();
        } else {
          entry.label_column = lc.get<std::string>();
        }
        if (e.contains("classes")) {
          const auto c = e.at("classes").get<std::vector<long>>();
          if (c.size() != 2) throw Error(ErrorCode::Parse, "'classes' must list exactly two labels");
          entry.classes = std::make_pair(c[0], c[1]);
        }
        m.datasets.push_back(std::move(entry));
      }
    }
    if (m.datasets.empty() && !m.synthetic) {
      throw Error(ErrorCode::Parse, "manifest declares no datasets");
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("invalid manifest: ") + e.what());
  }
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open manifest: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, path.string() + ": " + e.what());
  }
  return parse_manifest(doc, path.parent_path());
}

namespace {

Dataset load_entry(const ManifestEntry& entry) {
  Dataset d;
  if (entry.classes) {
    RawTable table = read_csv_table(entry.path, entry.label_column);
    std::vector<long> labels;
    labels.reserve(table.labels.size());
    for (const auto& l : table.labels) {
      try {
        std::size_t used = 0;
        labels.push_back(std::stol(l, &used));
        if (used != l.size()) throw std::invalid_argument(l);
      } catch (const std::exception&) {
        throw Error(ErrorCode::Parse, entry.path.string() + ": non-integer class label '" + l + "'");
      }
    }
    d = binarize_multiclass(table.features, labels, entry.classes->first, entry.classes->second);
  } else {
    d = load_csv(entry.path, entry.label_column);
  }
  d.name = entry.name;
  return d;
}

}  // namespace

Corpus build_corpus(const Manifest& manifest) {
  std::vector<Dataset> raw;
  for (const auto& entry : manifest.datasets) raw.push_back(load_entry(entry));
  if (manifest.synthetic) {
    auto generated = generate_synthetic(*manifest.synthetic);
    std::move(generated.begin(), generated.end(), std::back_inserter(raw));
  }

  std::vector<Dataset> normalized;
  normalized.reserve(raw.size());
  std::size_t shortest = kMaxRecords;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    Dataset d = manifest.shuffle_seed ? shuffle_rows(raw[i], *manifest.shuffle_seed + i) : std::move(raw[i]);
    normalized.push_back(normalize_zscore(d, manifest.train_fraction));
    shortest = std::min(shortest, normalized.back().rows());
  }
  return truncate_corpus(std::move(normalized), manifest.records.value_or(shortest));
}

Corpus load_manifest(const std::filesystem::path& path) { return build_corpus(read_manifest(path)); }

}  // namespace sdti
