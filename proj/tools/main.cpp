#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "s5eval/errors.hpp"
#include "s5eval/evaluate.hpp"
#include "s5eval/manifest.hpp"
#include "s5eval/pipeline.hpp"
#include "s5eval/version.hpp"

namespace {

std::vector<std::string> split_csv(const std::string& list) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(list);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void check_jobs(int jobs) {
  if (jobs < 1) throw s5eval::ConfigError("--jobs must be at least 1");
}

struct EvaluateArgs {
  std::string ref, est, out;
  std::string metrics = "ca-sdri,ca-si-sdri";
  double pfn = 0.0, pfp = 0.0, pref = 0.0;
  int jobs = 1;
};

struct SynthArgs {
  std::string catalog, out;
  std::string prefix = "scene_";
  int count = 0;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool stems = false;
};

struct LabelsArgs {
  std::string probs, ref, out;
  double gamma = 0.5;
  int k_max = 3;
};

void run_evaluate(const EvaluateArgs& args) {
  check_jobs(args.jobs);
  const s5eval::DatasetManifest references =
      s5eval::load_dataset_manifest(args.ref);
  const s5eval::EstimateManifest estimates =
      s5eval::load_estimate_manifest(args.est);

  s5eval::EvalOptions options;
  options.metrics = split_csv(args.metrics);
  options.penalties = s5eval::PenaltyConfig{args.pfn, args.pfp, args.pref};
  options.jobs = args.jobs;

  const s5eval::EvalReport report =
      s5eval::evaluate_dataset(references, estimates, options);
  std::cout << s5eval::render_report_table(report);
  if (!args.out.empty()) s5eval::save_report(report, args.out);
}

void run_synth_cmd(const SynthArgs& args) {
  check_jobs(args.jobs);
  const s5eval::Catalog catalog = s5eval::load_catalog(args.catalog);
  const s5eval::FileAssetResolver assets(s5eval::asset_root_for(args.catalog));

  s5eval::SynthRunOptions options;
  options.count = args.count;
  options.seed = args.seed;
  options.out_dir = args.out;
  options.jobs = args.jobs;
  options.write_stems = args.stems;
  options.id_prefix = args.prefix;

  const s5eval::DatasetManifest manifest =
      s5eval::run_synth(catalog, assets, options);
  std::cout << "wrote " << manifest.mixtures.size() << " scenes under "
            << args.out << '\n';
}

void run_labels_cmd(const LabelsArgs& args, bool k_max_given) {
  const s5eval::ProbabilityTable table =
      s5eval::load_probability_csv(args.probs);

  s5eval::Vocabulary vocabulary;
  int k_max = args.k_max;
  if (!args.ref.empty()) {
    const s5eval::DatasetManifest references =
        s5eval::load_dataset_manifest(args.ref);
    vocabulary = references.vocabulary;
    if (!k_max_given) k_max = references.k_max;
  } else {
    vocabulary = s5eval::Vocabulary(table.classes);
  }

  const s5eval::EstimateManifest manifest =
      s5eval::run_labels(table, vocabulary, args.gamma, k_max);
  s5eval::save_estimate_manifest(manifest, args.out);
  std::cout << "wrote label sets for " << manifest.mixtures.size()
            << " mixtures to " << args.out << '\n';
}

void run_report_cmd(const std::string& in) {
  std::cout << s5eval::render_report_table(s5eval::load_report(in));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(s5eval::kToolName) +
               ": class-aware separation metrics and spatial scene synthesis"};
  app.set_version_flag("--version", std::string(s5eval::kVersion));
  app.require_subcommand(1);

  EvaluateArgs eval_args;
  CLI::App* eval = app.add_subcommand(
      "evaluate", "score an estimate manifest against a dataset manifest");
  eval->add_option("--ref", eval_args.ref, "dataset manifest JSON")->required();
  eval->add_option("--est", eval_args.est, "estimate manifest JSON")->required();
  eval->add_option("--metrics", eval_args.metrics,
                   "comma list: ca-sdri, ca-si-sdri, pi-pen, pi-pad, ca-tp");
  eval->add_option("--pfn", eval_args.pfn, "false-negative penalty in dB");
  eval->add_option("--pfp", eval_args.pfp, "false-positive penalty in dB");
  eval->add_option("--pref", eval_args.pref,
                   "count-mismatch penalty in dB (pi-pen)");
  eval->add_option("--jobs", eval_args.jobs, "worker threads");
  eval->add_option("--out", eval_args.out, "write the JSON report here");
  eval->callback([&] { run_evaluate(eval_args); });

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand(
      "synth", "render a synthetic dataset from a catalog of assets");
  synth->add_option("--catalog", synth_args.catalog, "catalog JSON")->required();
  synth->add_option("--count", synth_args.count, "number of scenes")->required();
  synth->add_option("--seed", synth_args.seed, "RNG seed");
  synth->add_option("--jobs", synth_args.jobs, "worker threads");
  synth->add_option("--prefix", synth_args.prefix, "mixture id prefix");
  synth->add_flag("--stems", synth_args.stems,
                  "also write per-event wet stems and the noise cut");
  synth->add_option("--out", synth_args.out, "output directory")->required();
  synth->callback([&] { run_synth_cmd(synth_args); });

  LabelsArgs labels_args;
  CLI::App* labels = app.add_subcommand(
      "labels", "turn per-class probabilities into an estimate skeleton");
  labels->add_option("--probs", labels_args.probs,
                     "CSV: mixture_id,<class>,...")->required();
  labels->add_option("--ref", labels_args.ref,
                     "dataset manifest fixing vocabulary and k_max");
  labels->add_option("--gamma", labels_args.gamma, "detection threshold");
  CLI::Option* kmax_opt =
      labels->add_option("--kmax", labels_args.k_max, "maximum labels kept");
  labels->add_option("--out", labels_args.out, "estimate manifest path")
      ->required();
  labels->callback(
      [&] { run_labels_cmd(labels_args, kmax_opt->count() > 0); });

  std::string report_in;
  CLI::App* report = app.add_subcommand(
      "report", "re-render a saved JSON report as a table");
  report->add_option("--in", report_in, "report JSON path")->required();
  report->callback([&] { run_report_cmd(report_in); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 4;
  } catch (const s5eval::ManifestError& e) {
    std::cerr << "manifest error: " << e.what() << '\n';
    return 2;
  } catch (const s5eval::AudioError& e) {
    std::cerr << "audio error: " << e.what() << '\n';
    return 3;
  } catch (const s5eval::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
