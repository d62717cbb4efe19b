#include "report.hpp"

#include <cmath>
#include <fstream>

#include "error.hpp"

namespace sdti {

using nlohmann::json;

Report build_report(const std::vector<AblationRecord>& records, const ReportOptions& options) {
  Report report;
  std::vector<AblationRecord> used;
  CostGroups finals;
  for (const auto& r : records) {
    if (r.status == RunStatus::Error) continue;
    if (options.sdti_epochs && r.config.sdti_epochs != *options.sdti_epochs) continue;
    for (const auto& row : r.final_costs) {
      for (std::size_t q = 0; q < row.size(); ++q) {
        if (!std::isfinite(row[q])) continue;
        (q / r.n_datasets == q % r.n_datasets ? finals.correct : finals.incorrect).push_back(row[q]);
      }
    }
    merge_stratified(report.stratified, r.stratified);
    used.push_back(r);
  }
  report.records_used = used.size();

  if (options.pooling == CostPooling::FinalOnly) {
    report.summary = summarize_groups(finals);
  } else {
    Moments c, i;
    for (const auto& s : report.stratified) {
      c.merge(s.correct);
      i.merge(s.incorrect);
    }
    report.summary = {c.mean, c.variance(), i.mean, i.variance(), c.count, i.count};
  }

  if (finals.correct.size() >= 2 && finals.incorrect.size() >= 2) {
    report.levene = levene_test(finals.correct, finals.incorrect, Center::Mean);
    report.brown_forsythe = levene_test(finals.correct, finals.incorrect, Center::Median);
    const auto& s = report.summary;
    report.direction_holds = report.levene->p_value < options.alpha && s.var_correct < s.var_incorrect &&
                             s.mean_correct < s.mean_incorrect;
  }

  for (const auto& g : comparison_groups()) {
    try {
      report.groups.push_back(summarize_runs(used, g.predicate, g.name));
    } catch (const Error&) {
      SummaryRow empty;
      empty.group = g.name;
      report.groups.push_back(empty);
    }
  }
  return report;
}

json to_json(const SummaryRow& row) {
  return {{"group", row.group}, {"count", row.count}, {"mean_f1", row.mean}, {"f1_std", row.std},
          {"min_f1", row.min},  {"p25_f1", row.p25},  {"p50_f1", row.p50},   {"p75_f1", row.p75},
          {"max_f1", row.max}};
}

json to_json(const VarianceSummary& v) {
  return {{"mean_correct", v.mean_correct},     {"var_correct", v.var_correct}, {"mean_incorrect", v.mean_incorrect},
          {"var_incorrect", v.var_incorrect},   {"n_correct", v.n_correct},     {"n_incorrect", v.n_incorrect}};
}

namespace {

json test_json(const std::optional<TestResult>& t) {
  if (!t) return {{"status", "insufficient samples"}};
  return {{"status", "ok"},
          {"statistic", std::isfinite(t->statistic) ? json(t->statistic) : json(nullptr)},
          {"p_value", t->p_value}};
}

}  // namespace

json to_json(const Report& r) {
  json groups = json::array();
  for (const auto& g : r.groups) groups.push_back(to_json(g));
  return {{"records_used", r.records_used},
          {"skipped_lines", r.skipped_lines},
          {"variance_summary", to_json(r.summary)},
          {"levene", test_json(r.levene)},
          {"brown_forsythe", test_json(r.brown_forsythe)},
          {"direction_holds", r.direction_holds},
          {"groups", groups},
          {"stratified_epochs", r.stratified.size()}};
}

void write_stratified_csv(const std::filesystem::path& path, const std::vector<StratifiedEpoch>& stratified) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << "sdti_epoch,group,count,mean,variance\n";
  const auto row = [&](std::size_t s, const char* group, const Moments& m) {
    out << s << ',' << group << ',' << m.count << ',' << json(m.mean).dump() << ',' << json(m.variance()).dump()
        << '\n';
  };
  for (std::size_t s = 0; s < stratified.size(); ++s) {
    row(s, "correct", stratified[s].correct);
    row(s, "incorrect", stratified[s].incorrect);
  }
}

}  // namespace sdti
