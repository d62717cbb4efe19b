#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "analysis.hpp"
#include "records.hpp"

namespace sdti {

struct ReportOptions {
  std::optional<std::size_t> sdti_epochs;  // keep only runs with this many SDTI epochs
  CostPooling pooling = CostPooling::FinalOnly;
  double alpha = 0.05;
};

struct Report {
  std::size_t records_used = 0;
  std::size_t skipped_lines = 0;
  VarianceSummary summary;
  // Absent when a group has fewer than 2 final costs.
  std::optional<TestResult> levene;
  std::optional<TestResult> brown_forsythe;
  // Correct pairs have lower mean and variance and Levene rejects at alpha.
  bool direction_holds = false;
  std::vector<SummaryRow> groups;
  std::vector<StratifiedEpoch> stratified;
};

// Homogeneity tests always use the pooled final costs; `pooling` selects
// whether the mean/variance summary uses final costs or every SDTI epoch.
Report build_report(const std::vector<AblationRecord>& records, const ReportOptions& options = {});

nlohmann::json to_json(const Report& report);
nlohmann::json to_json(const SummaryRow& row);
nlohmann::json to_json(const VarianceSummary& summary);

// Columns: sdti_epoch, group, count, mean, variance; one row per group and epoch.
void write_stratified_csv(const std::filesystem::path& path, const std::vector<StratifiedEpoch>& stratified);

}  // namespace sdti
