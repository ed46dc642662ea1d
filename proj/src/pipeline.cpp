#include "s5eval/pipeline.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "s5eval/errors.hpp"
#include "s5eval/parallel.hpp"
#include "s5eval/rng.hpp"
#include "s5eval/tagging.hpp"
#include "s5eval/wav.hpp"

namespace s5eval {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::filesystem::path& path,
                               const std::string& why) {
  throw ManifestError(path.string() + ": " + why);
}

std::string require_string(const json& obj, const char* field,
                           const std::filesystem::path& path,
                           const std::string& where) {
  if (!obj.is_object() || !obj.contains(field) || !obj.at(field).is_string()) {
    schema_error(path, where + ": missing string field '" + field + "'");
  }
  return obj.at(field).get<std::string>();
}

// Probes one asset header, enforcing the catalog-wide sample rate.
WavInfo probe_asset(const std::filesystem::path& root, const std::string& path,
                    int sample_rate) {
  std::filesystem::path full(path);
  if (!full.is_absolute()) full = root / full;
  WavInfo info = wav_info(full);
  if (info.sample_rate != sample_rate) {
    throw AudioError(full.string() + ": sample rate " +
                     std::to_string(info.sample_rate) +
                     " differs from the catalog rate " +
                     std::to_string(sample_rate));
  }
  return info;
}

std::string scene_id(const std::string& prefix, int index) {
  std::ostringstream s;
  s << prefix << std::setw(4) << std::setfill('0') << index;
  return s.str();
}

json scene_to_json(const SceneSpec& spec, const SceneOutput& output) {
  json j;
  j["mixture_id"] = spec.mixture_id;
  j["duration_s"] = spec.duration_s;
  j["sample_rate"] = spec.sample_rate;
  j["seed"] = spec.seed;
  j["ref_channel"] = spec.ref_channel;
  json events = json::array();
  for (std::size_t i = 0; i < spec.events.size(); ++i) {
    const SceneEvent& event = spec.events[i];
    json e;
    e["label"] = event.label.name;
    e["source_path"] = event.source_path;
    e["rir_path"] = event.rir_path;
    e["onset_s"] = event.onset_s;
    e["snr_db"] = event.snr_db;
    e["gain"] = output.gains[i];
    events.push_back(std::move(e));
  }
  j["events"] = std::move(events);
  if (spec.noise) {
    j["noise"] = {{"path", spec.noise->path},
                  {"offset_s", spec.noise->offset_s},
                  {"gain", 1.0}};
  } else {
    j["noise"] = nullptr;
  }
  j["conventions"] = {
      {"direct_path_window_ms", {{"pre", 6.0}, {"post", 50.0}}},
      {"direct_path_peak", "global max of |h| on the reference channel"},
      {"event_scaling", "one gain per event, shared by all channels and the "
                        "direct target"},
  };
  return j;
}

}  // namespace

std::filesystem::path asset_root_for(
    const std::filesystem::path& catalog_path) {
  if (const char* env = std::getenv("S5EVAL_ASSET_ROOT");
      env != nullptr && *env != '\0') {
    return std::filesystem::path(env);
  }
  return catalog_path.has_parent_path() ? catalog_path.parent_path()
                                        : std::filesystem::path(".");
}

Catalog load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ManifestError(path.string() + ": cannot open catalog");
  }
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) {
    throw ManifestError(path.string() + ": not well-formed JSON");
  }

  Catalog catalog;
  if (!doc.contains("vocabulary") || !doc.at("vocabulary").is_array() ||
      doc.at("vocabulary").empty()) {
    schema_error(path, "'vocabulary' must be a non-empty array");
  }
  std::vector<std::string> names;
  for (const json& v : doc.at("vocabulary")) {
    if (!v.is_string()) schema_error(path, "'vocabulary' entries must be strings");
    names.push_back(v.get<std::string>());
  }
  try {
    catalog.vocabulary = Vocabulary(std::move(names));
  } catch (const std::invalid_argument& e) {
    schema_error(path, e.what());
  }

  auto read_number = [&](const char* field, double fallback) {
    if (!doc.contains(field)) return fallback;
    if (!doc.at(field).is_number()) {
      schema_error(path, std::string("'") + field + "' must be a number");
    }
    return doc.at(field).get<double>();
  };
  catalog.config.sample_rate =
      static_cast<int>(read_number("sample_rate", 32000));
  catalog.config.duration_s = read_number("duration_s", 10.0);
  catalog.config.k_max = static_cast<int>(read_number("k_max", 3));
  if (catalog.config.sample_rate <= 0 || catalog.config.duration_s <= 0.0 ||
      catalog.config.k_max < 1) {
    schema_error(path, "sample_rate, duration_s and k_max must be positive");
  }
  if (doc.contains("snr_range_db")) {
    const json& range = doc.at("snr_range_db");
    if (!range.is_array() || range.size() != 2 || !range[0].is_number() ||
        !range[1].is_number()) {
      schema_error(path, "'snr_range_db' must be [min, max]");
    }
    catalog.config.snr_min_db = range[0].get<double>();
    catalog.config.snr_max_db = range[1].get<double>();
    if (catalog.config.snr_min_db > catalog.config.snr_max_db) {
      schema_error(path, "'snr_range_db' min exceeds max");
    }
  }

  const std::filesystem::path root = asset_root_for(path);

  if (!doc.contains("sources") || !doc.at("sources").is_array() ||
      doc.at("sources").empty()) {
    schema_error(path, "'sources' must be a non-empty array");
  }
  for (const json& s : doc.at("sources")) {
    SourceEntry entry;
    entry.label.name = require_string(s, "label", path, "source");
    entry.path = require_string(s, "path", path, "source");
    if (!catalog.vocabulary.contains(entry.label)) {
      schema_error(path, "source label '" + entry.label.name +
                             "' not in vocabulary");
    }
    WavInfo info = probe_asset(root, entry.path, catalog.config.sample_rate);
    if (info.channels != 1) {
      throw AudioError(entry.path + ": dry sources must be mono");
    }
    entry.duration_s =
        static_cast<double>(info.frames) / catalog.config.sample_rate;
    catalog.sources.push_back(std::move(entry));
  }

  if (!doc.contains("rooms") || !doc.at("rooms").is_array() ||
      doc.at("rooms").empty()) {
    schema_error(path, "'rooms' must be a non-empty array");
  }
  std::set<std::string> room_names;
  for (const json& r : doc.at("rooms")) {
    RoomEntry room;
    room.name = require_string(r, "name", path, "room");
    if (!room_names.insert(room.name).second) {
      schema_error(path, "duplicate room name '" + room.name + "'");
    }
    const std::string where = "room '" + room.name + "'";
    if (!r.contains("rirs") || !r.at("rirs").is_array() || r.at("rirs").empty()) {
      schema_error(path, where + ": 'rirs' must be a non-empty array");
    }
    int channels = 0;
    for (const json& p : r.at("rirs")) {
      if (!p.is_string()) schema_error(path, where + ": 'rirs' entries must be strings");
      std::string rir_path = p.get<std::string>();
      WavInfo info = probe_asset(root, rir_path, catalog.config.sample_rate);
      if (channels == 0) {
        channels = info.channels;
      } else if (info.channels != channels) {
        throw AudioError(rir_path + ": channel count differs within " + where);
      }
      room.rir_paths.push_back(std::move(rir_path));
    }
    if (r.contains("noise") && !r.at("noise").is_null()) {
      room.noise_path = require_string(r, "noise", path, where);
      WavInfo info = probe_asset(root, room.noise_path,
                                 catalog.config.sample_rate);
      if (info.channels != channels) {
        throw AudioError(room.noise_path + ": channel count differs from the " +
                         where + " RIRs");
      }
      room.noise_duration_s =
          static_cast<double>(info.frames) / catalog.config.sample_rate;
    }
    catalog.rooms.push_back(std::move(room));
  }
  return catalog;
}

DatasetManifest run_synth(const Catalog& catalog, const AssetResolver& assets,
                          const SynthRunOptions& options) {
  if (options.count < 1) {
    throw ConfigError("synth: scene count must be at least 1");
  }
  if (options.out_dir.empty()) {
    throw ConfigError("synth: output directory is required");
  }
  std::filesystem::create_directories(options.out_dir);

  // Scene seeds come from one sequential stream so job count cannot change
  // any output.
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(options.count));
  std::uint64_t state = options.seed;
  for (std::uint64_t& s : seeds) s = splitmix64(state);

  DatasetManifest manifest;
  manifest.vocabulary = catalog.vocabulary;
  manifest.k_max = catalog.config.k_max;
  manifest.base_dir = options.out_dir;
  manifest.mixtures.resize(static_cast<std::size_t>(options.count));

  parallel_for(options.jobs, options.count, [&](int index) {
    const std::string id = scene_id(options.id_prefix, index);
    const int forced_k = index % catalog.config.k_max + 1;
    const SceneSpec spec =
        sample_scene_spec(seeds[static_cast<std::size_t>(index)], catalog,
                          catalog.config, id, forced_k);
    const SceneOutput output = synthesize_scene(spec, assets, catalog.config);

    const std::filesystem::path scene_dir = options.out_dir / id;
    std::filesystem::create_directories(scene_dir / "targets");
    write_wav(scene_dir / "mixture.wav", output.mixture);

    DatasetMixture entry;
    entry.mixture_id = id;
    entry.mixture_path = id + "/mixture.wav";
    entry.ref_channel = spec.ref_channel;
    for (std::size_t i = 0; i < output.labels.size(); ++i) {
      const std::string name = output.labels[i].name;
      write_wav(scene_dir / "targets" / (name + ".wav"),
                output.direct_targets[i]);
      entry.sources.push_back(SourceRef{output.labels[i],
                                        id + "/targets/" + name + ".wav"});
    }

    if (options.write_stems) {
      std::filesystem::create_directories(scene_dir / "stems");
      for (std::size_t i = 0; i < output.labels.size(); ++i) {
        write_wav(scene_dir / "stems" / (output.labels[i].name + ".wav"),
                  output.wet_sources[i]);
      }
      if (output.noise) {
        write_wav(scene_dir / "stems" / "noise.wav", *output.noise);
      }
    }

    std::ofstream scene_file(scene_dir / "scene.json", std::ios::trunc);
    if (!scene_file) {
      throw ManifestError((scene_dir / "scene.json").string() +
                          ": cannot open for writing");
    }
    scene_file << scene_to_json(spec, output).dump(2) << '\n';

    manifest.mixtures[static_cast<std::size_t>(index)] = std::move(entry);
  });

  save_dataset_manifest(manifest, options.out_dir / "dataset.json");
  return manifest;
}

EstimateManifest run_labels(const ProbabilityTable& table,
                            const Vocabulary& vocabulary, double gamma,
                            int k_max) {
  if (table.classes != vocabulary.names()) {
    throw ManifestError(
        "probability CSV columns do not match the vocabulary (order matters)");
  }
  EstimateManifest manifest;
  std::set<std::string> seen;
  for (const ProbabilityTable::Row& row : table.rows) {
    if (!seen.insert(row.mixture_id).second) {
      throw ManifestError("probability CSV: duplicate mixture_id '" +
                          row.mixture_id + "'");
    }
    ClassProbabilities input{vocabulary, row.probs, gamma, k_max};
    EstimateMixture mix;
    mix.mixture_id = row.mixture_id;
    for (const ClassLabel& label : select_labels(input)) {
      mix.estimates.push_back(EstimateRef{label, ""});
    }
    manifest.mixtures.push_back(std::move(mix));
  }
  return manifest;
}

}  // namespace s5eval
