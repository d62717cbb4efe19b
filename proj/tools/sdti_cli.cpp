// Command-line front end over the sdti C API.
#include <sdti/sdti.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct Failure {
  int exit_code;
  std::string message;
};

int exit_code_for(sdti_status status) {
  switch (status) {
    case SDTI_ERROR_INVALID_ARGUMENT:
    case SDTI_ERROR_IO:
    case SDTI_ERROR_PARSE:
      return kExitUsage;
    default:
      return kExitRuntime;
  }
}

void check(sdti_status status, const std::string& what) {
  if (status != SDTI_OK) {
    throw Failure{exit_code_for(status), what + ": " + sdti_last_error() + " [" + sdti_status_name(status) + "]"};
  }
}

// Owns a string returned by the library.
class OwnedString {
 public:
  OwnedString() = default;
  OwnedString(const OwnedString&) = delete;
  OwnedString& operator=(const OwnedString&) = delete;
  ~OwnedString() { sdti_string_free(ptr_); }
  char** out() { return &ptr_; }
  json parse() const { return json::parse(ptr_ ? ptr_ : "null"); }

 private:
  char* ptr_ = nullptr;
};

class CorpusHandle {
 public:
  explicit CorpusHandle(const std::string& manifest) {
    if (!fs::exists(manifest)) throw Failure{kExitUsage, "manifest not found: " + manifest};
    check(sdti_corpus_load_manifest(manifest.c_str(), &ptr_), "loading " + manifest);
  }
  CorpusHandle(const CorpusHandle&) = delete;
  CorpusHandle& operator=(const CorpusHandle&) = delete;
  ~CorpusHandle() { sdti_corpus_free(ptr_); }
  const sdti_corpus* get() const { return ptr_; }

 private:
  sdti_corpus* ptr_ = nullptr;
};

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Failure{kExitUsage, "cannot create " + dir.string() + ": " + ec.message()};
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw Failure{kExitRuntime, "cannot write " + path.string()};
  out << doc.dump(2) << '\n';
}

std::string fixed(double v, int digits = 4) {
  if (!std::isfinite(v)) return "nan";
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

std::string number(const json& v, int digits = 4) {
  return v.is_number() ? fixed(v.get<double>(), digits) : std::string("nan");
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

// Sample standard deviation, 0 for a single value.
MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd r;
  if (xs.empty()) return r;
  for (double x : xs) r.mean += x;
  r.mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return r;
  double ss = 0.0;
  for (double x : xs) ss += (x - r.mean) * (x - r.mean);
  r.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  return r;
}

struct RunArgs {
  std::string manifest;
  std::size_t epochs = 11;
  std::size_t sdti_epochs = 30;
  std::optional<std::size_t> records;
  std::uint64_t seed = 0;
  std::string out = "out";
  bool trace = false;
  bool dump_map = false;
  bool concurrent_epochs = false;
  unsigned threads = 1;
};

int cmd_run(const RunArgs& a) {
  CorpusHandle corpus(a.manifest);
  ensure_dir(a.out);
  const fs::path out(a.out);

  if (a.dump_map) {
    OwnedString described;
    check(sdti_corpus_describe(corpus.get(), described.out()), "describe");
    write_json(out / "tensor_map.json", described.parse());
  }

  json options = {{"epochs", a.epochs},
                  {"sdti_epochs", a.sdti_epochs},
                  {"seed", a.seed},
                  {"threads", a.threads},
                  {"concurrent_epochs", a.concurrent_epochs}};
  if (a.records) options["records"] = *a.records;
  if (a.trace) options["trace_path"] = (out / "trace.csv").string();

  OwnedString result;
  check(sdti_run(corpus.get(), options.dump().c_str(), result.out()), "run");
  const json doc = result.parse();
  write_json(out / "result.json", doc);

  const auto& m = doc.at("metrics");
  std::cout << "sdti: F1 " << number(m.at("f1_macro")) << "  accuracy " << number(m.at("accuracy")) << "  time "
            << fixed(m.at("inference_time_seconds").get<double>(), 2) << "s  predicted ["
            << join(doc.at("predicted").get<std::vector<std::size_t>>()) << "]\n";
  return kExitOk;
}

struct BaselineArgs {
  std::string manifest;
  std::vector<std::string> methods{"pearson", "mutual_information", "cosine"};
  std::optional<std::size_t> records;
  std::string out = "out";
  std::size_t bins = 10;
  std::string aggregation = "mean";
  std::size_t repeats = 5;
  bool similarity = false;
  std::vector<std::string> sdti_results;
};

int cmd_baselines(const BaselineArgs& a) {
  CorpusHandle corpus(a.manifest);
  ensure_dir(a.out);
  const fs::path out(a.out);

  struct Row {
    std::string name;
    MeanStd f1;
    MeanStd accuracy;
    double seconds = 0.0;
    std::size_t runs = 0;
  };
  std::vector<Row> rows;

  for (const auto& method : a.methods) {
    json options = {{"method", method}, {"bins", a.bins}, {"aggregation", a.aggregation}};
    if (a.records) options["records"] = *a.records;
    std::vector<double> f1s, accs;
    double seconds = 0.0;
    std::string canonical = method;
    for (std::size_t r = 0; r < a.repeats; ++r) {
      json o = options;
      if (r == 0 && a.similarity) o["similarity_path"] = (out / ("similarity_" + method + ".csv")).string();
      OwnedString result;
      check(sdti_baseline(corpus.get(), o.dump().c_str(), result.out()), "baseline " + method);
      json doc = result.parse();
      canonical = doc.at("method").get<std::string>();
      f1s.push_back(doc.at("metrics").at("f1_macro").get<double>());
      accs.push_back(doc.at("metrics").at("accuracy").get<double>());
      seconds += doc.at("inference_time_seconds").get<double>();
      if (r == 0) {
        if (a.similarity && canonical != method) {
          fs::rename(out / ("similarity_" + method + ".csv"), out / ("similarity_" + canonical + ".csv"));
        }
        write_json(out / ("baseline_" + canonical + ".json"), doc);
      }
    }
    rows.push_back({canonical, mean_std(f1s), mean_std(accs), seconds / static_cast<double>(a.repeats), a.repeats});
  }

  if (!a.sdti_results.empty()) {
    std::vector<double> f1s, accs;
    double seconds = 0.0;
    for (const auto& path : a.sdti_results) {
      std::ifstream in(path);
      if (!in) throw Failure{kExitUsage, "cannot read SDTI result " + path};
      json doc;
      try {
        doc = json::parse(in);
        f1s.push_back(doc.at("metrics").at("f1_macro").get<double>());
        accs.push_back(doc.at("metrics").at("accuracy").get<double>());
        seconds += doc.at("metrics").at("inference_time_seconds").get<double>();
      } catch (const json::exception& e) {
        throw Failure{kExitUsage, "malformed SDTI result " + path + ": " + e.what()};
      }
    }
    rows.push_back({"sdti", mean_std(f1s), mean_std(accs), seconds / static_cast<double>(f1s.size()), f1s.size()});
  }

  std::cout << "Method                Runs   Mean F1       Std  Accuracy  Time (s)\n";
  for (const auto& r : rows) {
    std::string name = r.name;
    name.resize(20, ' ');
    std::cout << name << pad(std::to_string(r.runs), 6) << pad(fixed(r.f1.mean), 10) << pad(fixed(r.f1.std), 10)
              << pad(fixed(r.accuracy.mean), 10) << pad(fixed(r.seconds, 4), 10) << '\n';
  }
  return kExitOk;
}

void print_group_table(const json& groups) {
  std::cout << "Group                      Count   Mean F1    F1 STD       Min       P25       P50       P75       Max\n";
  for (const auto& g : groups) {
    std::string name = g.at("group").get<std::string>();
    name.resize(24, ' ');
    const auto count = g.at("count").get<std::size_t>();
    std::cout << name << pad(std::to_string(count), 7);
    if (count == 0) {
      std::cout << pad("-", 10) << pad("-", 10) << pad("-", 10) << pad("-", 10) << pad("-", 10) << pad("-", 10)
                << pad("-", 10) << '\n';
      continue;
    }
    for (const char* key : {"mean_f1", "f1_std", "min_f1", "p25_f1", "p50_f1", "p75_f1", "max_f1"}) {
      std::cout << pad(number(g.at(key)), 10);
    }
    std::cout << '\n';
  }
}

struct AblateArgs {
  std::string manifest;
  std::string out = "out";
  std::optional<std::size_t> budget;
  bool resume = false;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::vector<std::size_t> records;
  std::vector<std::size_t> epochs;
  std::vector<std::size_t> sdti_epochs;
  bool progress = false;
};

void on_record(const char* record_json, void* user_data) {
  auto* count = static_cast<std::size_t*>(user_data);
  ++*count;
  const json r = json::parse(record_json);
  std::cerr << "[" << *count << "] records=" << r.at("records") << " epochs=" << r.at("epochs")
            << " sdti_epochs=" << r.at("sdti_epochs") << " f1=" << number(r.at("f1")) << " " << r.at("status").get<std::string>()
            << '\n';
}

int cmd_ablate(const AblateArgs& a) {
  CorpusHandle corpus(a.manifest);
  ensure_dir(a.out);
  const fs::path out(a.out);
  json options = {{"results_path", (out / "results.jsonl").string()},
                  {"csv_path", (out / "results.csv").string()},
                  {"base_seed", a.seed},
                  {"resume", a.resume},
                  {"threads", a.threads}};
  if (a.budget) options["budget"] = *a.budget;
  if (!a.records.empty()) options["records"] = a.records;
  if (!a.epochs.empty()) options["epochs"] = a.epochs;
  if (!a.sdti_epochs.empty()) options["sdti_epochs"] = a.sdti_epochs;

  std::size_t seen = 0;
  OwnedString summary;
  check(sdti_ablate(corpus.get(), options.dump().c_str(), a.progress ? on_record : nullptr, &seen, summary.out()),
        "ablate");
  const json doc = summary.parse();
  std::cout << "ablation: executed " << doc.at("executed") << ", already present " << doc.at("skipped_existing")
            << ", total " << doc.at("total_records") << ", failed " << doc.at("failed_records") << '\n';
  if (doc.at("skipped_lines").get<std::size_t>() > 0) {
    std::cerr << "warning: skipped " << doc.at("skipped_lines") << " malformed result lines\n";
  }
  print_group_table(doc.at("groups"));
  return kExitOk;
}

struct ReportArgs {
  std::string results;
  std::string out = "out";
  std::optional<std::size_t> sdti_epochs;
  std::string pooling = "final";
  double alpha = 0.05;
};

void print_test(const char* name, const json& t) {
  std::cout << name;
  if (t.at("status") != "ok") {
    std::cout << "insufficient samples\n";
    return;
  }
  std::cout << "W = " << number(t.at("statistic")) << "  p = " << t.at("p_value").get<double>() << '\n';
}

int cmd_report(const ReportArgs& a) {
  if (!fs::exists(a.results)) throw Failure{kExitUsage, "results file not found: " + a.results};
  ensure_dir(a.out);
  const fs::path out(a.out);
  json options = {{"pooling", a.pooling}, {"alpha", a.alpha}, {"stratified_path", (out / "stratified.csv").string()}};
  if (a.sdti_epochs) options["sdti_epochs"] = *a.sdti_epochs;

  OwnedString report;
  check(sdti_report(a.results.c_str(), options.dump().c_str(), report.out()), "report");
  const json doc = report.parse();
  write_json(out / "report.json", doc);

  if (doc.at("skipped_lines").get<std::size_t>() > 0) {
    std::cerr << "warning: skipped " << doc.at("skipped_lines") << " malformed result lines\n";
  }
  const auto& v = doc.at("variance_summary");
  std::cout << "runs used: " << doc.at("records_used") << '\n';
  std::cout << "                 Mean  Variance       n\n";
  std::cout << "correct    " << pad(number(v.at("mean_correct")), 10) << pad(number(v.at("var_correct")), 10)
            << pad(v.at("n_correct").dump(), 8) << '\n';
  std::cout << "incorrect  " << pad(number(v.at("mean_incorrect")), 10) << pad(number(v.at("var_incorrect")), 10)
            << pad(v.at("n_incorrect").dump(), 8) << '\n';
  print_test("Levene (mean):          ", doc.at("levene"));
  print_test("Brown-Forsythe (median): ", doc.at("brown_forsythe"));
  std::cout << "lower mean and variance for correct pairs at alpha " << fixed(a.alpha, 3) << ": "
            << (doc.at("direction_holds").get<bool>() ? "yes" : "no") << '\n';
  print_group_table(doc.at("groups"));
  return kExitOk;
}

unsigned default_threads() {
  if (const char* env = std::getenv("SDTI_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring SDTI_THREADS='" << env << "'\n";
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-directed task identification: match unlabeled datasets to label columns"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(sdti_version()));

  const unsigned threads = default_threads();

  RunArgs run;
  run.threads = threads;
  auto* run_cmd = app.add_subcommand("run", "Train all dataset/label combinations and vote on the assignment");
  run_cmd->add_option("--manifest", run.manifest, "Corpus manifest (JSON)")->required();
  run_cmd->add_option("--epochs", run.epochs, "Outer epochs (votes)")->check(CLI::PositiveNumber);
  run_cmd->add_option("--sdti-epochs", run.sdti_epochs, "Training steps per outer epoch")->check(CLI::PositiveNumber);
  run_cmd->add_option("--records", run.records, "Truncate every dataset to this many rows")->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", run.seed, "Random seed");
  run_cmd->add_option("--out", run.out, "Output directory");
  run_cmd->add_flag("--trace", run.trace, "Write per-step costs to trace.csv");
  run_cmd->add_flag("--dump-map", run.dump_map, "Write the combination map and tensor shapes to tensor_map.json");
  run_cmd->add_flag("--concurrent-epochs", run.concurrent_epochs, "Run outer epochs concurrently");
  run_cmd->add_option("--threads", run.threads, "Worker threads (default $SDTI_THREADS or 1)")->check(CLI::PositiveNumber);

  BaselineArgs base;
  auto* base_cmd = app.add_subcommand("baselines", "Score label columns with correlation-style baselines");
  base_cmd->add_option("--manifest", base.manifest, "Corpus manifest (JSON)")->required();
  base_cmd->add_option("--methods", base.methods, "pearson, mutual_information (mi), cosine")->delimiter(',');
  base_cmd->add_option("--records", base.records, "Truncate every dataset to this many rows")->check(CLI::PositiveNumber);
  base_cmd->add_option("--out", base.out, "Output directory");
  base_cmd->add_option("--bins", base.bins, "Histogram bins for mutual information")->check(CLI::PositiveNumber);
  base_cmd->add_option("--aggregation", base.aggregation, "Per-feature score aggregation")
      ->check(CLI::IsMember({"mean", "max"}));
  base_cmd->add_option("--repeats", base.repeats, "Repetitions per method for the std column")
      ->check(CLI::PositiveNumber);
  base_cmd->add_flag("--similarity", base.similarity, "Write similarity_<method>.csv");
  base_cmd->add_option("--sdti-result", base.sdti_results, "result.json from 'run' to include as a comparison row");

  AblateArgs abl;
  abl.threads = threads;
  auto* abl_cmd = app.add_subcommand("ablate", "Run the records x epochs x sdti-epochs grid");
  abl_cmd->add_option("--manifest", abl.manifest, "Corpus manifest (JSON)")->required();
  abl_cmd->add_option("--out", abl.out, "Output directory (results.jsonl, results.csv)");
  abl_cmd->add_option("--budget", abl.budget, "Run only the first N configs");
  abl_cmd->add_flag("--resume", abl.resume, "Skip configs already in results.jsonl");
  abl_cmd->add_option("--seed", abl.seed, "Base seed");
  abl_cmd->add_option("--threads", abl.threads, "Configs run in parallel (default $SDTI_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  abl_cmd->add_option("--records", abl.records, "Restrict the records axis")->delimiter(',');
  abl_cmd->add_option("--epochs", abl.epochs, "Restrict the epochs axis")->delimiter(',');
  abl_cmd->add_option("--sdti-epochs", abl.sdti_epochs, "Restrict the sdti-epochs axis")->delimiter(',');
  abl_cmd->add_flag("--progress", abl.progress, "Print each finished config to stderr");

  ReportArgs rep;
  auto* rep_cmd = app.add_subcommand("report", "Cost statistics and variance tests over an ablation results file");
  rep_cmd->add_option("results", rep.results, "results.jsonl")->required();
  rep_cmd->add_option("--out", rep.out, "Output directory (report.json, stratified.csv)");
  rep_cmd->add_option("--sdti-epochs", rep.sdti_epochs, "Use only runs with this many sdti epochs");
  rep_cmd->add_option("--pooling", rep.pooling, "Costs pooled into the summary")->check(CLI::IsMember({"final", "all"}));
  rep_cmd->add_option("--alpha", rep.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*base_cmd) return cmd_baselines(base);
    if (*abl_cmd) return cmd_ablate(abl);
    if (*rep_cmd) return cmd_report(rep);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
