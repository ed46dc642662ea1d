#include "s5eval/evaluate.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "s5eval/errors.hpp"
#include "s5eval/parallel.hpp"
#include "s5eval/version.hpp"
#include "s5eval/wav.hpp"

namespace s5eval {

namespace {

using nlohmann::json;

const std::vector<std::string> kKnownTokens = {
    "ca-sdri", "ca-si-sdri", "pi-pen", "pi-pad", "ca-tp"};

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.rfind(prefix, 0) == 0;
}

// Reads a mono estimate or target and checks its shape against the mixture.
Waveform load_mono_checked(const std::filesystem::path& path,
                           const Waveform& mixture_ref) {
  MultichannelWaveform wave = read_wav(path);
  if (wave.channel_count() != 1) {
    throw AudioError(path.string() + ": expected a mono file");
  }
  if (wave.sample_rate() != mixture_ref.sample_rate) {
    throw AudioError(path.string() + ": sample rate differs from the mixture");
  }
  if (wave.frame_count() != mixture_ref.size()) {
    throw AudioError(path.string() + ": length differs from the mixture");
  }
  return std::move(wave.channels.front());
}

}  // namespace

std::vector<std::string> metric_columns(
    const std::vector<std::string>& tokens) {
  if (tokens.empty()) {
    throw std::invalid_argument("metrics: at least one metric is required");
  }
  std::vector<std::string> columns;
  auto add = [&](const std::string& col) {
    if (std::find(columns.begin(), columns.end(), col) == columns.end()) {
      columns.push_back(col);
    }
  };
  for (const std::string& token : tokens) {
    if (std::find(kKnownTokens.begin(), kKnownTokens.end(), token) ==
        kKnownTokens.end()) {
      throw std::invalid_argument(
          "metrics: unknown metric '" + token +
          "' (known: ca-sdri, ca-si-sdri, pi-pen, pi-pad, ca-tp)");
    }
    if (token == "ca-sdri" || token == "ca-si-sdri") {
      add(token);
    } else {
      add(token + "-sdri");
      add(token + "-si-sdri");
    }
  }
  return columns;
}

EvalReport evaluate_dataset(const DatasetManifest& references,
                            const EstimateManifest& estimates,
                            const EvalOptions& options) {
  const std::vector<std::string> columns = metric_columns(options.metrics);

  std::unordered_map<std::string, const DatasetMixture*> by_id;
  for (const DatasetMixture& mix : references.mixtures) {
    by_id.emplace(mix.mixture_id, &mix);
  }
  std::unordered_map<std::string, const EstimateMixture*> est_by_id;
  for (const EstimateMixture& mix : estimates.mixtures) {
    if (by_id.find(mix.mixture_id) == by_id.end()) {
      throw ManifestError("estimate mixture '" + mix.mixture_id +
                          "' does not exist in the dataset manifest");
    }
    est_by_id.emplace(mix.mixture_id, &mix);
  }

  const bool wants_ca_value =
      std::find(columns.begin(), columns.end(), "ca-sdri") != columns.end() ||
      std::find(columns.begin(), columns.end(), "ca-si-sdri") != columns.end();
  const bool wants_ca_tp =
      std::any_of(columns.begin(), columns.end(),
                  [](const std::string& c) { return starts_with(c, "ca-tp-"); });
  const bool wants_pen =
      std::any_of(columns.begin(), columns.end(), [](const std::string& c) {
        return starts_with(c, "pi-pen-");
      });
  const bool wants_pad =
      std::any_of(columns.begin(), columns.end(), [](const std::string& c) {
        return starts_with(c, "pi-pad-");
      });

  EvalReport report;
  report.version = kVersion;
  report.metrics = options.metrics;
  report.columns = columns;
  report.penalties = options.penalties;
  report.k_max = references.k_max;
  report.per_mixture.resize(references.mixtures.size());

  parallel_for(options.jobs, static_cast<int>(references.mixtures.size()),
               [&](int index) {
    const DatasetMixture& mix = references.mixtures[static_cast<std::size_t>(index)];
    MixtureScore score;
    score.mixture_id = mix.mixture_id;

    const std::filesystem::path mixture_path =
        references.resolve(mix.mixture_path);
    MultichannelWaveform mixture = read_wav(mixture_path);
    if (mix.ref_channel >= static_cast<int>(mixture.channel_count())) {
      throw AudioError(mixture_path.string() +
                       ": reference channel out of range");
    }
    const Waveform& mix_ref =
        mixture.channel(static_cast<std::size_t>(mix.ref_channel));

    LabeledSources refs{Role::Reference, {}};
    for (const SourceRef& source : mix.sources) {
      refs.entries.emplace_back(
          source.label,
          load_mono_checked(references.resolve(source.target_path), mix_ref));
    }

    LabeledSources ests{Role::Estimate, {}};
    auto est_it = est_by_id.find(mix.mixture_id);
    if (est_it != est_by_id.end()) {
      for (const EstimateRef& est : est_it->second->estimates) {
        if (est.path.empty()) {
          throw ManifestError("mixture '" + mix.mixture_id + "': estimate '" +
                              est.label.name +
                              "' has no waveform path; the manifest is a "
                              "label-only skeleton");
        }
        ests.entries.emplace_back(
            est.label,
            load_mono_checked(estimates.resolve(est.path), mix_ref));
      }
    }

    score.source_count = static_cast<int>(refs.entries.size());
    score.estimate_count = static_cast<int>(ests.entries.size());
    score.exceeds_k_max = score.estimate_count > references.k_max;

    {
      std::set<std::string> ref_labels, est_labels;
      for (const auto& [label, wave] : refs.entries) ref_labels.insert(label.name);
      for (const auto& [label, wave] : ests.entries) est_labels.insert(label.name);
      for (const std::string& name : ref_labels) {
        (est_labels.count(name) ? score.tp : score.fn).push_back(name);
      }
      for (const std::string& name : est_labels) {
        if (!ref_labels.count(name)) score.fp.push_back(name);
      }
    }

    std::vector<Waveform> ref_waves, est_waves;
    if (wants_pen || wants_pad) {
      for (const auto& [label, wave] : refs.entries) ref_waves.push_back(wave);
      for (const auto& [label, wave] : ests.entries) est_waves.push_back(wave);
    }

    for (MetricKind kind : {MetricKind::Sdri, MetricKind::SiSdri}) {
      const std::string suffix = kind == MetricKind::Sdri ? "sdri" : "si-sdri";
      const std::string ca_column = "ca-" + suffix;
      const bool column_requested =
          std::find(columns.begin(), columns.end(), ca_column) != columns.end();
      if ((wants_ca_value && column_requested) || wants_ca_tp) {
        const CaResult ca =
            ca_metric(ests, refs, mix_ref, kind, options.penalties);
        if (column_requested) score.values[ca_column] = ca.value_db;
        if (wants_ca_tp) score.values["ca-tp-" + suffix] = ca.tp_mean_db();
      }
      if (wants_pen) {
        score.values["pi-pen-" + suffix] = pi_penalized_metric(
            est_waves, ref_waves, mix_ref, kind, options.penalties);
      }
      if (wants_pad) {
        score.values["pi-pad-" + suffix] =
            pi_padded_metric(est_waves, ref_waves, mix_ref, kind);
      }
    }

    report.per_mixture[static_cast<std::size_t>(index)] = std::move(score);
  });

  std::map<std::string, double> overall_sum;
  std::map<int, std::map<std::string, double>> group_sum;
  for (const MixtureScore& score : report.per_mixture) {
    report.group_sizes[score.source_count] += 1;
    for (const std::string& col : columns) {
      overall_sum[col] += score.values.at(col);
      group_sum[score.source_count][col] += score.values.at(col);
    }
  }
  if (!report.per_mixture.empty()) {
    for (const std::string& col : columns) {
      report.overall[col] =
          overall_sum[col] / static_cast<double>(report.per_mixture.size());
    }
    for (const auto& [k, sums] : group_sum) {
      for (const std::string& col : columns) {
        report.by_source_count[k][col] =
            sums.at(col) / static_cast<double>(report.group_sizes.at(k));
      }
    }
  }
  return report;
}

json report_to_json(const EvalReport& report) {
  json j;
  j["version"] = report.version;
  j["metrics"] = report.metrics;
  j["columns"] = report.columns;
  j["k_max"] = report.k_max;
  j["penalties"] = {{"p_fn", report.penalties.p_fn},
                    {"p_fp", report.penalties.p_fp},
                    {"p_ref", report.penalties.p_ref}};
  // Conventions echoed so independent implementations can diff their setup.
  j["config"] = {
      {"epsilon_energy", kEpsilonEnergy},
      {"clamp_db", kClampDb},
      {"improvement_rule", "clamp(raw_metric(estimate) - raw_metric(mixture))"},
      {"pi_pen_normalization", "max(K, Khat)"},
      {"pi_pad_rule", "zero-pad estimates up to K; subset search when Khat > K"},
      {"direct_path_window_ms", {{"pre", 6.0}, {"post", 50.0}}},
      {"direct_path_peak", "global max of |h| on the reference channel"},
      {"label_tie_break", "vocabulary order"},
  };

  json per_mixture = json::array();
  for (const MixtureScore& score : report.per_mixture) {
    json m;
    m["mixture_id"] = score.mixture_id;
    m["source_count"] = score.source_count;
    m["estimate_count"] = score.estimate_count;
    m["exceeds_k_max"] = score.exceeds_k_max;
    m["tp"] = score.tp;
    m["fn"] = score.fn;
    m["fp"] = score.fp;
    m["values"] = score.values;
    per_mixture.push_back(std::move(m));
  }
  j["per_mixture"] = std::move(per_mixture);
  j["overall"] = report.overall;

  json groups = json::object();
  for (const auto& [k, means] : report.by_source_count) {
    groups[std::to_string(k)] = means;
  }
  j["by_source_count"] = std::move(groups);
  json sizes = json::object();
  for (const auto& [k, n] : report.group_sizes) {
    sizes[std::to_string(k)] = n;
  }
  j["group_sizes"] = std::move(sizes);
  return j;
}

EvalReport report_from_json(const json& j) {
  EvalReport report;
  report.version = j.at("version").get<std::string>();
  report.metrics = j.at("metrics").get<std::vector<std::string>>();
  report.columns = j.at("columns").get<std::vector<std::string>>();
  report.k_max = j.at("k_max").get<int>();
  report.penalties.p_fn = j.at("penalties").at("p_fn").get<double>();
  report.penalties.p_fp = j.at("penalties").at("p_fp").get<double>();
  report.penalties.p_ref = j.at("penalties").at("p_ref").get<double>();
  for (const json& m : j.at("per_mixture")) {
    MixtureScore score;
    score.mixture_id = m.at("mixture_id").get<std::string>();
    score.source_count = m.at("source_count").get<int>();
    score.estimate_count = m.at("estimate_count").get<int>();
    score.exceeds_k_max = m.at("exceeds_k_max").get<bool>();
    score.tp = m.at("tp").get<std::vector<std::string>>();
    score.fn = m.at("fn").get<std::vector<std::string>>();
    score.fp = m.at("fp").get<std::vector<std::string>>();
    score.values = m.at("values").get<std::map<std::string, double>>();
    report.per_mixture.push_back(std::move(score));
  }
  report.overall = j.at("overall").get<std::map<std::string, double>>();
  for (const auto& [key, means] : j.at("by_source_count").items()) {
    report.by_source_count[std::stoi(key)] =
        means.get<std::map<std::string, double>>();
  }
  for (const auto& [key, n] : j.at("group_sizes").items()) {
    report.group_sizes[std::stoi(key)] = n.get<int>();
  }
  return report;
}

void save_report(const EvalReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw ManifestError(path.string() + ": cannot open report for writing");
  }
  out << report_to_json(report).dump(2) << '\n';
  if (!out) {
    throw ManifestError(path.string() + ": report write failed");
  }
}

EvalReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ManifestError(path.string() + ": cannot open report");
  }
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) {
    throw ManifestError(path.string() + ": not well-formed JSON");
  }
  try {
    return report_from_json(doc);
  } catch (const json::exception& e) {
    throw ManifestError(path.string() + ": " + e.what());
  }
}

std::string render_report_table(const EvalReport& report) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3);

  std::vector<int> groups;
  for (const auto& [k, means] : report.by_source_count) groups.push_back(k);

  const int label_width = 16;
  const int cell_width = 12;
  out << std::left << std::setw(label_width) << "metric" << std::right;
  for (int k : groups) {
    out << std::setw(cell_width) << ("K=" + std::to_string(k));
  }
  out << std::setw(cell_width) << "overall" << '\n';

  out << std::left << std::setw(label_width) << "mixtures" << std::right;
  for (int k : groups) {
    out << std::setw(cell_width) << report.group_sizes.at(k);
  }
  out << std::setw(cell_width) << report.per_mixture.size() << '\n';

  for (const std::string& col : report.columns) {
    out << std::left << std::setw(label_width) << col << std::right;
    for (int k : groups) {
      out << std::setw(cell_width) << report.by_source_count.at(k).at(col);
    }
    if (report.overall.count(col)) {
      out << std::setw(cell_width) << report.overall.at(col);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace s5eval
