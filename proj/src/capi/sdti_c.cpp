#include "sdti/sdti.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>

#include <json.hpp>

#include "core/ablation.hpp"
#include "core/analysis.hpp"
#include "core/baselines.hpp"
#include "core/error.hpp"
#include "core/manifest.hpp"
#include "core/prediction.hpp"
#include "core/report.hpp"

using nlohmann::json;

struct sdti_corpus {
  sdti::Corpus corpus;
};

namespace {

thread_local std::string g_last_error;

sdti_status to_status(sdti::ErrorCode code) {
  switch (code) {
    case sdti::ErrorCode::InvalidArgument: return SDTI_ERROR_INVALID_ARGUMENT;
    case sdti::ErrorCode::Io: return SDTI_ERROR_IO;
    case sdti::ErrorCode::Parse: return SDTI_ERROR_PARSE;
    case sdti::ErrorCode::Diverged: return SDTI_ERROR_DIVERGED;
    case sdti::ErrorCode::Budget: return SDTI_ERROR_BUDGET;
    case sdti::ErrorCode::Runtime: return SDTI_ERROR_RUNTIME;
  }
  return SDTI_ERROR_RUNTIME;
}

template <typename Fn>
sdti_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return SDTI_OK;
  } catch (const sdti::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const json::exception& e) {
    g_last_error = std::string("invalid JSON: ") + e.what();
    return SDTI_ERROR_PARSE;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SDTI_ERROR_RUNTIME;
  } catch (...) {
    g_last_error = "unknown error";
    return SDTI_ERROR_RUNTIME;
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(bool ok, const char* message) {
  if (!ok) throw sdti::Error(sdti::ErrorCode::InvalidArgument, message);
}

json parse_options(const char* options_json) {
  if (!options_json || !*options_json) return json::object();
  json j = json::parse(options_json);
  require(j.is_object(), "options must be a JSON object");
  return j;
}

json matrix_json(const sdti::IntMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    rows.push_back(std::vector<long>(r.begin(), r.end()));
  }
  return rows;
}

json matrix_json(const sdti::RealMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return rows;
}

json assignment_json(const sdti::AssignmentResult& a) {
  return {{"predicted", a.predicted},
          {"vote_counts", matrix_json(a.vote_counts)},
          {"margins", a.margins},
          {"total_epochs", a.total_epochs},
          {"inference_time_seconds", a.inference_time_seconds},
          {"duplicate_claims", a.duplicate_claims()}};
}

json metrics_json(const sdti::MetricsReport& m) {
  return {{"f1_macro", m.f1_macro},
          {"accuracy", m.accuracy},
          {"per_dataset_correct", m.per_dataset_correct},
          {"inference_time_seconds", m.inference_time_seconds}};
}

json dataset_names(const sdti::Corpus& c) {
  json names = json::array();
  for (const auto& d : c.datasets) names.push_back(d.name);
  return names;
}

sdti::Corpus maybe_truncate(const sdti::Corpus& corpus, const json& options) {
  if (options.contains("records") && !options.at("records").is_null()) {
    const auto records = options.at("records").get<std::size_t>();
    if (records > corpus.record_count) {
      throw sdti::Error(sdti::ErrorCode::InvalidArgument,
                        "records " + std::to_string(records) + " exceeds corpus capacity " +
                            std::to_string(corpus.record_count));
    }
    return sdti::truncate_corpus(corpus, records);
  }
  return corpus;
}

void write_trace_csv(const std::string& path, const sdti::SdtiRun& run, std::size_t n) {
  std::ofstream out(path);
  if (!out) throw sdti::Error(sdti::ErrorCode::Io, "cannot write " + path);
  out << "epoch,sdti_epoch,q,dataset_index,label_index,cost\n";
  for (std::size_t e = 0; e < run.traces.size(); ++e) {
    const auto& costs = run.traces[e].costs;
    for (std::size_t s = 0; s < costs.rows(); ++s) {
      for (std::size_t q = 0; q < costs.cols(); ++q) {
        out << e << ',' << s << ',' << q << ',' << q / n << ',' << q % n << ','
            << (std::isfinite(costs(s, q)) ? json(costs(s, q)).dump() : std::string("inf")) << '\n';
      }
    }
  }
}

std::vector<std::size_t> filter_values(const json& options, const char* key) {
  if (!options.contains(key) || options.at(key).is_null()) return {};
  return options.at(key).get<std::vector<std::size_t>>();
}

bool keep(const std::vector<std::size_t>& allowed, std::size_t v) {
  return allowed.empty() || std::find(allowed.begin(), allowed.end(), v) != allowed.end();
}

}  // namespace

extern "C" {

const char* sdti_version(void) { return "1.0.0"; }

const char* sdti_last_error(void) { return g_last_error.c_str(); }

const char* sdti_status_name(sdti_status status) {
  switch (status) {
    case SDTI_OK: return "ok";
    case SDTI_ERROR_INVALID_ARGUMENT: return "invalid_argument";
    case SDTI_ERROR_IO: return "io";
    case SDTI_ERROR_PARSE: return "parse";
    case SDTI_ERROR_DIVERGED: return "diverged";
    case SDTI_ERROR_BUDGET: return "budget";
    case SDTI_ERROR_RUNTIME: return "runtime";
  }
  return "unknown";
}

void sdti_string_free(char* str) { std::free(str); }

sdti_status sdti_corpus_load_manifest(const char* path, sdti_corpus** out) {
  return guarded([&] {
    require(path && out, "path and out must be non-null");
    *out = nullptr;
    auto handle = std::make_unique<sdti_corpus>();
    handle->corpus = sdti::load_manifest(path);
    *out = handle.release();
  });
}

sdti_status sdti_corpus_from_json(const char* manifest_json, const char* base_dir, sdti_corpus** out) {
  return guarded([&] {
    require(manifest_json && out, "manifest_json and out must be non-null");
    *out = nullptr;
    json doc;
    try {
      doc = json::parse(manifest_json);
    } catch (const json::exception& e) {
      throw sdti::Error(sdti::ErrorCode::Parse, std::string("manifest: ") + e.what());
    }
    auto handle = std::make_unique<sdti_corpus>();
    handle->corpus = sdti::build_corpus(sdti::parse_manifest(doc, base_dir ? base_dir : "."));
    *out = handle.release();
  });
}

void sdti_corpus_free(sdti_corpus* corpus) { delete corpus; }

sdti_status sdti_corpus_info(const sdti_corpus* corpus, size_t* n_datasets, size_t* record_count,
                             size_t* max_features) {
  return guarded([&] {
    require(corpus != nullptr, "corpus must be non-null");
    if (n_datasets) *n_datasets = corpus->corpus.size();
    if (record_count) *record_count = corpus->corpus.record_count;
    if (max_features) *max_features = corpus->corpus.max_features;
  });
}

sdti_status sdti_corpus_describe(const sdti_corpus* corpus, char** json_out) {
  return guarded([&] {
    require(corpus && json_out, "corpus and json_out must be non-null");
    const auto& c = corpus->corpus;
    const std::size_t n = c.size();
    const std::size_t m = c.record_count;
    const std::size_t w = c.max_features;

    json datasets = json::array();
    for (const auto& d : c.datasets) {
      double positives = 0.0;
      for (auto y : d.labels) positives += y;
      datasets.push_back({{"name", d.name},
                          {"rows", d.rows()},
                          {"features", d.num_features()},
                          {"positive_rate", d.rows() ? positives / static_cast<double>(d.rows()) : 0.0}});
    }
    const sdti::IndexMap index(n);
    json map = json::array();
    for (std::size_t q = 0; q < index.combinations(); ++q) {
      map.push_back({{"q", q},
                     {"dataset", index.dataset_of(q)},
                     {"label", index.label_of(q)},
                     {"correct", index.is_correct(q)}});
    }
    const json doc = {{"n_datasets", n},
                      {"record_count", m},
                      {"max_features", w},
                      {"datasets", datasets},
                      {"index_map", map},
                      {"tensor_shapes",
                       {{"A", {n * n, m, w}},
                        {"NL", {n * n, m, 1}},
                        {"W", {n * n, w, 1}},
                        {"B", {n * n, 1, 1}},
                        {"H_lr", {n * n, 1}},
                        {"H_beta", {n * n, 2}}}},
                      {"data_elements", sdti::data_tensor_elements(c)},
                      {"element_budget", sdti::kDefaultElementBudget}};
    *json_out = copy_string(doc.dump(2));
  });
}

sdti_status sdti_run(const sdti_corpus* corpus, const char* options_json, char** result_json) {
  return guarded([&] {
    require(corpus && result_json, "corpus and result_json must be non-null");
    *result_json = nullptr;
    const json opts = parse_options(options_json);

    sdti::RunOptions options;
    options.epochs = opts.value("epochs", options.epochs);
    options.sdti_epochs = opts.value("sdti_epochs", options.sdti_epochs);
    options.seed = opts.value("seed", options.seed);
    options.threads = opts.value("threads", options.threads);
    options.concurrent_epochs = opts.value("concurrent_epochs", options.concurrent_epochs);
    options.element_budget = opts.value("element_budget", options.element_budget);
    require(options.epochs >= 1 && options.sdti_epochs >= 1, "epochs and sdti_epochs must be at least 1");

    const sdti::Corpus working = maybe_truncate(corpus->corpus, opts);
    const sdti::SdtiRun run = sdti::run_full(working, options);
    const auto truth = sdti::identity_truth(working.size());
    const auto metrics =
        sdti::evaluate(run.assignment.predicted, truth, run.assignment.inference_time_seconds);

    if (opts.contains("trace_path") && !opts.at("trace_path").is_null()) {
      write_trace_csv(opts.at("trace_path").get<std::string>(), run, working.size());
    }

    json result = assignment_json(run.assignment);
    result["seed"] = options.seed;
    result["config"] = {{"epochs", options.epochs},
                        {"sdti_epochs", options.sdti_epochs},
                        {"records", working.record_count},
                        {"n_datasets", working.size()},
                        {"max_features", working.max_features},
                        {"threads", options.threads},
                        {"concurrent_epochs", options.concurrent_epochs}};
    result["datasets"] = dataset_names(working);
    result["metrics"] = metrics_json(metrics);
    result["variance_summary"] = sdti::to_json(sdti::summarize_groups(
        sdti::group_trace_costs(run.traces, working.size(), sdti::CostPooling::FinalOnly)));
    *result_json = copy_string(result.dump(2));
  });
}

sdti_status sdti_baseline(const sdti_corpus* corpus, const char* options_json, char** result_json) {
  return guarded([&] {
    require(corpus && result_json, "corpus and result_json must be non-null");
    *result_json = nullptr;
    const json opts = parse_options(options_json);

    const std::string method_name = opts.value("method", std::string("pearson"));
    const auto method = sdti::parse_baseline_method(method_name);
    require(method.has_value(), ("unknown baseline method '" + method_name + "'").c_str());
    sdti::BaselineOptions options;
    options.bins = opts.value("bins", options.bins);
    const std::string agg_name = opts.value("aggregation", std::string("mean"));
    const auto agg = sdti::parse_aggregation(agg_name);
    require(agg.has_value(), ("unknown aggregation '" + agg_name + "'").c_str());
    options.aggregation = *agg;

    const sdti::Corpus working = maybe_truncate(corpus->corpus, opts);
    const auto start = std::chrono::steady_clock::now();
    const sdti::SimilarityMatrix similarity = sdti::similarity_matrix(working, *method, options);
    sdti::AssignmentResult assignment = sdti::assign_from_similarity(similarity);
    assignment.inference_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto metrics = sdti::evaluate(assignment.predicted, sdti::identity_truth(working.size()),
                                        assignment.inference_time_seconds);

    if (opts.contains("similarity_path") && !opts.at("similarity_path").is_null()) {
      const auto path = opts.at("similarity_path").get<std::string>();
      std::ofstream out(path);
      if (!out) throw sdti::Error(sdti::ErrorCode::Io, "cannot write " + path);
      out << "dataset_index,label_index,score\n";
      for (std::size_t i = 0; i < similarity.scores.rows(); ++i) {
        for (std::size_t j = 0; j < similarity.scores.cols(); ++j) {
          out << i << ',' << j << ',' << json(similarity.scores(i, j)).dump() << '\n';
        }
      }
    }

    json result = assignment_json(assignment);
    result["method"] = std::string(sdti::to_string(*method));
    result["config"] = {{"bins", options.bins},
                        {"aggregation", std::string(sdti::to_string(options.aggregation))},
                        {"records", working.record_count},
                        {"n_datasets", working.size()}};
    result["datasets"] = dataset_names(working);
    result["scores"] = matrix_json(similarity.scores);
    result["metrics"] = metrics_json(metrics);
    *result_json = copy_string(result.dump(2));
  });
}

sdti_status sdti_ablate(const sdti_corpus* corpus, const char* options_json, sdti_record_callback on_record,
                        void* user_data, char** summary_json) {
  return guarded([&] {
    require(corpus && summary_json, "corpus and summary_json must be non-null");
    *summary_json = nullptr;
    const json opts = parse_options(options_json);
    require(opts.contains("results_path"), "results_path is required");

    sdti::GridOptions options;
    options.results_path = opts.at("results_path").get<std::string>();
    if (opts.contains("csv_path") && !opts.at("csv_path").is_null()) {
      options.csv_path = opts.at("csv_path").get<std::string>();
    }
    options.base_seed = opts.value("base_seed", options.base_seed);
    if (opts.contains("budget") && !opts.at("budget").is_null()) options.budget = opts.at("budget").get<std::size_t>();
    options.resume = opts.value("resume", false);
    options.threads = opts.value("threads", 1u);
    if (on_record) {
      options.on_record = [on_record, user_data](const sdti::AblationRecord& r) {
        on_record(sdti::to_json(r).dump().c_str(), user_data);
      };
    }

    const auto records = filter_values(opts, "records");
    const auto epochs = filter_values(opts, "epochs");
    const auto sdti_epochs = filter_values(opts, "sdti_epochs");
    std::vector<sdti::AblationConfig> configs;
    for (const auto& c : sdti::enumerate_grid()) {
      if (keep(records, c.records) && keep(epochs, c.epochs) && keep(sdti_epochs, c.sdti_epochs)) {
        configs.push_back(c);
      }
    }
    std::size_t needed = 0;
    for (const auto& c : configs) needed = std::max(needed, c.records);
    const std::size_t limit = options.budget ? std::min(*options.budget, configs.size()) : configs.size();
    for (std::size_t k = 0; k < limit; ++k) {
      if (configs[k].records > corpus->corpus.record_count) {
        throw sdti::Error(sdti::ErrorCode::InvalidArgument,
                          "grid needs " + std::to_string(configs[k].records) + " records but corpus holds " +
                              std::to_string(corpus->corpus.record_count));
      }
    }

    const sdti::GridResult grid = sdti::run_grid(corpus->corpus, configs, options);
    json groups = json::array();
    for (const auto& g : sdti::comparison_groups()) {
      try {
        groups.push_back(sdti::to_json(sdti::summarize_runs(grid.records, g.predicate, g.name)));
      } catch (const sdti::Error&) {
        groups.push_back({{"group", g.name}, {"count", 0}});
      }
    }
    std::size_t failures = 0;
    for (const auto& r : grid.records) failures += r.status != sdti::RunStatus::Ok;
    const json summary = {{"executed", grid.executed},
                          {"skipped_existing", grid.skipped_existing},
                          {"skipped_lines", grid.skipped_lines},
                          {"total_records", grid.records.size()},
                          {"failed_records", failures},
                          {"planned_configs", limit},
                          {"groups", groups}};
    *summary_json = copy_string(summary.dump(2));
  });
}

sdti_status sdti_report(const char* results_path, const char* options_json, char** report_json) {
  return guarded([&] {
    require(results_path && report_json, "results_path and report_json must be non-null");
    *report_json = nullptr;
    const json opts = parse_options(options_json);

    sdti::ReportOptions options;
    if (opts.contains("sdti_epochs") && !opts.at("sdti_epochs").is_null()) {
      options.sdti_epochs = opts.at("sdti_epochs").get<std::size_t>();
    }
    const std::string pooling = opts.value("pooling", std::string("final"));
    require(pooling == "final" || pooling == "all", "pooling must be 'final' or 'all'");
    options.pooling = pooling == "final" ? sdti::CostPooling::FinalOnly : sdti::CostPooling::AllEpochs;
    options.alpha = opts.value("alpha", options.alpha);

    std::size_t skipped = 0;
    const auto records = sdti::load_records(results_path, &skipped);
    sdti::Report report = sdti::build_report(records, options);
    report.skipped_lines = skipped;
    if (opts.contains("stratified_path") && !opts.at("stratified_path").is_null()) {
      sdti::write_stratified_csv(opts.at("stratified_path").get<std::string>(), report.stratified);
    }
    json doc = sdti::to_json(report);
    doc["pooling"] = pooling;
    doc["alpha"] = options.alpha;
    *report_json = copy_string(doc.dump(2));
  });
}

}  // extern "C"
