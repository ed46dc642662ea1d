#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "s5eval/manifest.hpp"
#include "s5eval/metrics.hpp"

namespace s5eval {

/// Metric family tokens accepted by --metrics. "pi-pen", "pi-pad" and
/// "ca-tp" expand to both the SDRi and SI-SDRi flavor of their family.
std::vector<std::string> metric_columns(const std::vector<std::string>& tokens);

struct EvalOptions {
  std::vector<std::string> metrics{"ca-sdri", "ca-si-sdri"};
  PenaltyConfig penalties;
  int jobs = 1;
};

struct MixtureScore {
  std::string mixture_id;
  int source_count = 0;    // K
  int estimate_count = 0;  // Khat
  bool exceeds_k_max = false;
  std::vector<std::string> tp, fn, fp;
  std::map<std::string, double> values;  // column -> dB
};

/// Per-mixture scores plus aggregate means, overall and grouped by source
/// count. Deliberately free of timestamps and absolute paths so identical
/// runs serialize to identical bytes.
struct EvalReport {
  std::string version;
  std::vector<std::string> metrics;  // requested tokens
  std::vector<std::string> columns;  // expanded column ids
  PenaltyConfig penalties;
  int k_max = 3;
  std::vector<MixtureScore> per_mixture;
  std::map<std::string, double> overall;
  std::map<int, std::map<std::string, double>> by_source_count;
  std::map<int, int> group_sizes;
};

/// Scores every dataset mixture against the estimates. Reference mixtures
/// absent from the estimate manifest evaluate as Khat = 0 (all labels FN).
/// Mixtures run on a pool of `jobs` workers and merge in manifest order, so
/// parallelism never changes the report.
EvalReport evaluate_dataset(const DatasetManifest& references,
                            const EstimateManifest& estimates,
                            const EvalOptions& options = {});

nlohmann::json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);
void save_report(const EvalReport& report, const std::filesystem::path& path);
EvalReport load_report(const std::filesystem::path& path);

/// Fixed-width table grouped by source count, one row per metric column.
std::string render_report_table(const EvalReport& report);

}  // namespace s5eval
