#include "ablation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>

#include "analysis.hpp"
#include "error.hpp"
#include "parallel.hpp"
#include "prediction.hpp"
#include "rng.hpp"

namespace sdti {

using nlohmann::json;

std::vector<std::size_t> grid_records() {
  std::vector<std::size_t> v;
  for (std::size_t k = 0; k <= 19; ++k) v.push_back(2000 - 100 * k);
  return v;
}

std::vector<std::size_t> grid_epochs() {
  std::vector<std::size_t> v;
  for (std::size_t k = 0; k <= 29; ++k) v.push_back(2 * k + 1);
  return v;
}

std::vector<std::size_t> grid_sdti_epochs() {
  std::vector<std::size_t> v;
  for (std::size_t k = 0; k <= 5; ++k) v.push_back(30 - 5 * k);
  return v;
}

std::vector<AblationConfig> enumerate_grid() {
  std::vector<AblationConfig> grid;
  for (std::size_t a : grid_records()) {
    for (std::size_t b : grid_epochs()) {
      for (std::size_t c : grid_sdti_epochs()) grid.push_back({a, b, c, 0});
    }
  }
  return grid;
}

std::uint64_t config_seed(std::uint64_t base_seed, std::size_t records, std::size_t epochs, std::size_t sdti_epochs) {
  return derive_seed({base_seed, records, epochs, sdti_epochs});
}

AblationRecord run_config(const Corpus& corpus, const AblationConfig& config, unsigned threads) {
  AblationRecord record;
  record.config = config;
  record.n_datasets = corpus.size();
  const auto start = std::chrono::steady_clock::now();
  try {
    const Corpus truncated = truncate_corpus(corpus, config.records);
    RunOptions options;
    options.epochs = config.epochs;
    options.sdti_epochs = config.sdti_epochs;
    options.seed = config.seed;
    options.threads = threads;
    const SdtiRun run = run_full(truncated, options);

    const auto truth = identity_truth(corpus.size());
    record.predicted = run.assignment.predicted;
    record.f1 = f1_macro(record.predicted, truth);
    record.accuracy = accuracy(record.predicted, truth);
    record.variance_summary =
        summarize_groups(group_trace_costs(run.traces, corpus.size(), CostPooling::FinalOnly));
    record.stratified = stratify(run.traces, corpus.size());
    for (const auto& trace : run.traces) {
      record.final_costs.push_back(trace.final_costs);
      if (std::any_of(trace.final_costs.begin(), trace.final_costs.end(),
                      [](double c) { return !std::isfinite(c); })) {
        record.status = RunStatus::Diverged;
        record.message = "at least one combination diverged";
      }
    }
  } catch (const std::exception& e) {
    record.status = RunStatus::Error;
    record.message = e.what();
  }
  record.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

namespace {

const char* status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Ok: return "ok";
    case RunStatus::Diverged: return "diverged";
    case RunStatus::Error: return "error";
  }
  return "error";
}

RunStatus parse_status(const std::string& s) {
  if (s == "ok") return RunStatus::Ok;
  if (s == "diverged") return RunStatus::Diverged;
  if (s == "error") return RunStatus::Error;
  throw Error(ErrorCode::Parse, "unknown status '" + s + "'");
}

json moments_json(const Moments& m) { return {{"count", m.count}, {"mean", m.mean}, {"m2", m.m2}}; }

Moments moments_from(const json& j) {
  return {j.at("count").get<std::size_t>(), j.at("mean").get<double>(), j.at("m2").get<double>()};
}

// JSON has no infinity; diverged costs are written as null.
json cost_row(const std::vector<double>& row) {
  json out = json::array();
  for (double c : row) out.push_back(std::isfinite(c) ? json(c) : json(nullptr));
  return out;
}

std::vector<double> cost_row_from(const json& j) {
  std::vector<double> row;
  for (const auto& v : j) row.push_back(v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>());
  return row;
}

}  // namespace

json to_json(const AblationRecord& r) {
  json stratified = json::array();
  for (const auto& s : r.stratified) {
    stratified.push_back({{"correct", moments_json(s.correct)}, {"incorrect", moments_json(s.incorrect)}});
  }
  json costs = json::array();
  for (const auto& row : r.final_costs) costs.push_back(cost_row(row));
  const auto& v = r.variance_summary;
  return {
      {"schema_version", kRecordSchemaVersion},
      {"records", r.config.records},
      {"epochs", r.config.epochs},
      {"sdti_epochs", r.config.sdti_epochs},
      {"seed", r.config.seed},
      {"status", status_name(r.status)},
      {"f1", r.f1},
      {"accuracy", r.accuracy},
      {"wall_time_seconds", r.wall_time_seconds},
      {"predicted", r.predicted},
      {"n_datasets", r.n_datasets},
      {"variance_summary",
       {{"mean_correct", v.mean_correct},
        {"var_correct", v.var_correct},
        {"mean_incorrect", v.mean_incorrect},
        {"var_incorrect", v.var_incorrect},
        {"n_correct", v.n_correct},
        {"n_incorrect", v.n_incorrect}}},
      {"final_costs", costs},
      {"stratified", stratified},
      {"message", r.message},
  };
}

AblationRecord record_from_json(const json& j) {
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kRecordSchemaVersion) {
      throw Error(ErrorCode::Parse, "unsupported record schema version " + std::to_string(version));
    }
    AblationRecord r;
    r.config = {j.at("records").get<std::size_t>(), j.at("epochs").get<std::size_t>(),
                j.at("sdti_epochs").get<std::size_t>(), j.at("seed").get<std::uint64_t>()};
    r.status = parse_status(j.at("status").get<std::string>());
    r.f1 = j.at("f1").get<double>();
    r.accuracy = j.at("accuracy").get<double>();
    r.wall_time_seconds = j.at("wall_time_seconds").get<double>();
    r.predicted = j.at("predicted").get<std::vector<std::size_t>>();
    r.n_datasets = j.at("n_datasets").get<std::size_t>();
    const auto& v = j.at("variance_summary");
    r.variance_summary = {v.at("mean_correct").get<double>(),   v.at("var_correct").get<double>(),
                          v.at("mean_incorrect").get<double>(), v.at("var_incorrect").get<double>(),
                          v.at("n_correct").get<std::size_t>(), v.at("n_incorrect").get<std::size_t>()};
    for (const auto& row : j.at("final_costs")) r.final_costs.push_back(cost_row_from(row));
    for (const auto& s : j.at("stratified")) {
      r.stratified.push_back({moments_from(s.at("correct")), moments_from(s.at("incorrect"))});
    }
    r.message = j.value("message", "");
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("malformed record: ") + e.what());
  }
}

std::vector<AblationRecord> load_records(const std::filesystem::path& path, std::size_t* skipped) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open results file: " + path.string());
  std::vector<AblationRecord> records;
  std::size_t bad = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      records.push_back(record_from_json(json::parse(line)));
    } catch (const std::exception&) {
      ++bad;
    }
  }
  if (skipped) *skipped = bad;
  return records;
}

void write_records_csv(const std::filesystem::path& path, const std::vector<AblationRecord>& records) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << "records,epochs,sdti_epochs,seed,f1,accuracy,wall_time_seconds,status\n";
  for (const auto& r : records) {
    out << r.config.records << ',' << r.config.epochs << ',' << r.config.sdti_epochs << ',' << r.config.seed << ','
        << json(r.f1).dump() << ',' << json(r.accuracy).dump() << ',' << json(r.wall_time_seconds).dump() << ','
        << status_name(r.status) << '\n';
  }
}

namespace {

// Drops a trailing partial line left by an interrupted writer.
void drop_torn_tail(const std::filesystem::path& path) {
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec || size == 0) return;
  std::string content;
  {
    std::ifstream in(path, std::ios::binary);
    content.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  if (content.back() == '\n') return;
  const auto last_newline = content.find_last_of('\n');
  std::filesystem::resize_file(path, last_newline == std::string::npos ? 0 : last_newline + 1);
}

}  // namespace

GridResult run_grid(const Corpus& corpus, std::vector<AblationConfig> configs, const GridOptions& options) {
  if (options.results_path.empty()) throw Error(ErrorCode::InvalidArgument, "run_grid needs a results path");
  if (options.budget && *options.budget < configs.size()) configs.resize(*options.budget);
  for (auto& c : configs) c.seed = config_seed(options.base_seed, c.records, c.epochs, c.sdti_epochs);

  GridResult result;
  std::vector<AblationRecord> existing;
  if (options.resume && std::filesystem::exists(options.results_path)) {
    drop_torn_tail(options.results_path);
    existing = load_records(options.results_path, &result.skipped_lines);
  } else {
    std::ofstream truncate(options.results_path, std::ios::trunc);
    if (!truncate) throw Error(ErrorCode::Io, "cannot write " + options.results_path.string());
  }

  std::vector<AblationConfig> pending;
  for (const auto& c : configs) {
    const bool done = std::any_of(existing.begin(), existing.end(), [&](const AblationRecord& r) {
      return r.config.same_point(c) && r.config.seed == c.seed;
    });
    if (done) {
      ++result.skipped_existing;
    } else {
      pending.push_back(c);
    }
  }

  std::ofstream out(options.results_path, std::ios::app);
  if (!out) throw Error(ErrorCode::Io, "cannot append to " + options.results_path.string());
  std::mutex writer;
  std::vector<AblationRecord> fresh(pending.size());

  const unsigned config_threads = std::max(1u, options.threads);
  parallel_for(pending.size(), config_threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      AblationRecord record = run_config(corpus, pending[k], 1);
      std::lock_guard lock(writer);
      out << to_json(record).dump() << '\n';
      out.flush();
      if (options.on_record) options.on_record(record);
      fresh[k] = std::move(record);
    }
  });
  result.executed = pending.size();

  result.records = std::move(existing);
  std::move(fresh.begin(), fresh.end(), std::back_inserter(result.records));
  if (options.csv_path) write_records_csv(*options.csv_path, result.records);
  return result;
}

}  // namespace sdti
