#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "s5eval/manifest.hpp"
#include "s5eval/scene.hpp"

namespace s5eval {

/// Directory that relative asset paths in a catalog resolve against:
/// S5EVAL_ASSET_ROOT when set, else the catalog's own directory.
std::filesystem::path asset_root_for(const std::filesystem::path& catalog_path);

/// Loads a synthesis catalog. Asset path strings are kept as written (the
/// resolver applies the root), but every asset header is probed up front so
/// durations and sample rates are known and missing files fail early.
Catalog load_catalog(const std::filesystem::path& path);

struct SynthRunOptions {
  int count = 0;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
  int jobs = 1;
  bool write_stems = false;  // also emit per-event wet stems and the noise cut
  std::string id_prefix = "scene_";
};

/// Samples and renders `count` scenes, balanced round-robin over the source
/// counts 1..k_max, and writes per-scene directories (mixture.wav,
/// targets/<label>.wav, scene.json) plus dataset.json at the root.
/// Byte-deterministic for a given (catalog, count, seed).
DatasetManifest run_synth(const Catalog& catalog, const AssetResolver& assets,
                          const SynthRunOptions& options);

/// Applies the label decision rule to every row of a probability table and
/// returns the estimate-manifest skeleton (paths left empty for the
/// separation stage to fill). The table columns must match the vocabulary.
EstimateManifest run_labels(const ProbabilityTable& table,
                            const Vocabulary& vocabulary, double gamma,
                            int k_max);

}  // namespace s5eval
