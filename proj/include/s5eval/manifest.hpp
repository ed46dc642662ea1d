#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "s5eval/labels.hpp"

namespace s5eval {

struct SourceRef {
  ClassLabel label;
  std::string target_path;
};

struct DatasetMixture {
  std::string mixture_id;
  std::string mixture_path;
  int ref_channel = 0;
  std::vector<SourceRef> sources;
};

/// Ground-truth side of an evaluation: the vocabulary plus, per mixture, the
/// recorded mixture and its labeled direct-path targets. Paths are stored
/// relative to the manifest location.
struct DatasetManifest {
  Vocabulary vocabulary;
  int k_max = 3;
  std::vector<DatasetMixture> mixtures;
  std::filesystem::path base_dir;  // set on load; not serialized

  std::filesystem::path resolve(const std::string& path) const;
};

struct EstimateRef {
  ClassLabel label;
  std::string path;  // empty in skeletons awaiting separator output
};

struct EstimateMixture {
  std::string mixture_id;
  std::vector<EstimateRef> estimates;
};

/// System side of an evaluation: per mixture, the predicted labels and their
/// separated waveforms. Mixture ids must exist in the dataset manifest.
struct EstimateManifest {
  std::vector<EstimateMixture> mixtures;
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const std::string& path) const;
};

DatasetManifest load_dataset_manifest(const std::filesystem::path& path);
EstimateManifest load_estimate_manifest(const std::filesystem::path& path);
void save_dataset_manifest(const DatasetManifest& manifest,
                           const std::filesystem::path& path);
void save_estimate_manifest(const EstimateManifest& manifest,
                            const std::filesystem::path& path);

/// Per-class probabilities, one row per mixture. Header layout:
/// mixture_id,<class>,<class>,...
struct ProbabilityTable {
  struct Row {
    std::string mixture_id;
    std::vector<double> probs;  // aligned with `classes`
  };
  std::vector<std::string> classes;
  std::vector<Row> rows;
};

ProbabilityTable load_probability_csv(const std::filesystem::path& path);

}  // namespace s5eval
