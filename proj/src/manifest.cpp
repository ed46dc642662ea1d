#include "s5eval/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "s5eval/errors.hpp"

namespace s5eval {

namespace {

using nlohmann::json;

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ManifestError(path.string() + ": cannot open manifest");
  }
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) {
    throw ManifestError(path.string() + ": not well-formed JSON");
  }
  return doc;
}

void write_file(const json& doc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw ManifestError(path.string() + ": cannot open manifest for writing");
  }
  out << doc.dump(2) << '\n';
  if (!out) {
    throw ManifestError(path.string() + ": manifest write failed");
  }
}

[[noreturn]] void schema_error(const std::filesystem::path& path,
                               const std::string& why) {
  throw ManifestError(path.string() + ": " + why);
}

const json& require_field(const json& obj, const char* field,
                          const std::filesystem::path& path,
                          const std::string& where) {
  if (!obj.is_object() || !obj.contains(field)) {
    schema_error(path, where + ": missing field '" + field + "'");
  }
  return obj.at(field);
}

std::string require_string(const json& obj, const char* field,
                           const std::filesystem::path& path,
                           const std::string& where) {
  const json& v = require_field(obj, field, path, where);
  if (!v.is_string()) {
    schema_error(path, where + ": field '" + field + "' must be a string");
  }
  return v.get<std::string>();
}

std::filesystem::path resolve_against(const std::filesystem::path& base,
                                      const std::string& path) {
  std::filesystem::path p(path);
  return p.is_absolute() ? p : base / p;
}

}  // namespace

std::filesystem::path DatasetManifest::resolve(const std::string& path) const {
  return resolve_against(base_dir, path);
}

std::filesystem::path EstimateManifest::resolve(const std::string& path) const {
  return resolve_against(base_dir, path);
}

DatasetManifest load_dataset_manifest(const std::filesystem::path& path) {
  const json doc = parse_file(path);
  DatasetManifest manifest;
  manifest.base_dir = path.has_parent_path() ? path.parent_path()
                                             : std::filesystem::path(".");

  const json& vocab = require_field(doc, "vocabulary", path, "manifest");
  if (!vocab.is_array() || vocab.empty()) {
    schema_error(path, "'vocabulary' must be a non-empty array");
  }
  std::vector<std::string> names;
  for (const json& v : vocab) {
    if (!v.is_string()) schema_error(path, "'vocabulary' entries must be strings");
    names.push_back(v.get<std::string>());
  }
  try {
    manifest.vocabulary = Vocabulary(std::move(names));
  } catch (const std::invalid_argument& e) {
    schema_error(path, e.what());
  }

  if (doc.contains("k_max")) {
    if (!doc.at("k_max").is_number_integer() || doc.at("k_max").get<int>() < 1) {
      schema_error(path, "'k_max' must be a positive integer");
    }
    manifest.k_max = doc.at("k_max").get<int>();
  }

  const json& mixtures = require_field(doc, "mixtures", path, "manifest");
  if (!mixtures.is_array()) schema_error(path, "'mixtures' must be an array");

  std::set<std::string> seen_ids;
  for (const json& m : mixtures) {
    DatasetMixture mix;
    mix.mixture_id = require_string(m, "mixture_id", path, "mixture");
    const std::string where = "mixture '" + mix.mixture_id + "'";
    if (!seen_ids.insert(mix.mixture_id).second) {
      schema_error(path, "duplicate mixture_id '" + mix.mixture_id + "'");
    }
    mix.mixture_path = require_string(m, "mixture_path", path, where);
    if (m.contains("ref_channel")) {
      if (!m.at("ref_channel").is_number_integer() ||
          m.at("ref_channel").get<int>() < 0) {
        schema_error(path, where + ": 'ref_channel' must be a non-negative integer");
      }
      mix.ref_channel = m.at("ref_channel").get<int>();
    }
    const json& sources = require_field(m, "sources", path, where);
    if (!sources.is_array() || sources.empty()) {
      schema_error(path, where + ": 'sources' must be a non-empty array");
    }
    if (sources.size() > static_cast<std::size_t>(manifest.k_max)) {
      schema_error(path, where + ": more than k_max sources");
    }
    std::set<std::string> labels;
    for (const json& s : sources) {
      SourceRef ref;
      ref.label.name = require_string(s, "label", path, where);
      ref.target_path = require_string(s, "target_path", path, where);
      if (!manifest.vocabulary.contains(ref.label)) {
        schema_error(path, where + ": label '" + ref.label.name +
                               "' not in vocabulary");
      }
      if (!labels.insert(ref.label.name).second) {
        schema_error(path, where + ": duplicate label '" + ref.label.name + "'");
      }
      mix.sources.push_back(std::move(ref));
    }
    manifest.mixtures.push_back(std::move(mix));
  }
  return manifest;
}

EstimateManifest load_estimate_manifest(const std::filesystem::path& path) {
  const json doc = parse_file(path);
  EstimateManifest manifest;
  manifest.base_dir = path.has_parent_path() ? path.parent_path()
                                             : std::filesystem::path(".");

  const json& mixtures = require_field(doc, "mixtures", path, "manifest");
  if (!mixtures.is_array()) schema_error(path, "'mixtures' must be an array");

  std::set<std::string> seen_ids;
  for (const json& m : mixtures) {
    EstimateMixture mix;
    mix.mixture_id = require_string(m, "mixture_id", path, "mixture");
    const std::string where = "mixture '" + mix.mixture_id + "'";
    if (!seen_ids.insert(mix.mixture_id).second) {
      schema_error(path, "duplicate mixture_id '" + mix.mixture_id + "'");
    }
    const json& estimates = require_field(m, "estimates", path, where);
    if (!estimates.is_array()) {
      schema_error(path, where + ": 'estimates' must be an array");
    }
    std::set<std::string> labels;
    for (const json& e : estimates) {
      EstimateRef ref;
      ref.label.name = require_string(e, "label", path, where);
      if (e.contains("path")) {
        if (!e.at("path").is_string()) {
          schema_error(path, where + ": 'path' must be a string");
        }
        ref.path = e.at("path").get<std::string>();
      }
      if (ref.label.name.empty()) {
        schema_error(path, where + ": empty label");
      }
      if (!labels.insert(ref.label.name).second) {
        schema_error(path, where + ": duplicate label '" + ref.label.name + "'");
      }
      mix.estimates.push_back(std::move(ref));
    }
    manifest.mixtures.push_back(std::move(mix));
  }
  return manifest;
}

void save_dataset_manifest(const DatasetManifest& manifest,
                           const std::filesystem::path& path) {
  json doc;
  doc["vocabulary"] = manifest.vocabulary.names();
  doc["k_max"] = manifest.k_max;
  json mixtures = json::array();
  for (const DatasetMixture& mix : manifest.mixtures) {
    json m;
    m["mixture_id"] = mix.mixture_id;
    m["mixture_path"] = mix.mixture_path;
    m["ref_channel"] = mix.ref_channel;
    json sources = json::array();
    for (const SourceRef& s : mix.sources) {
      sources.push_back({{"label", s.label.name}, {"target_path", s.target_path}});
    }
    m["sources"] = std::move(sources);
    mixtures.push_back(std::move(m));
  }
  doc["mixtures"] = std::move(mixtures);
  write_file(doc, path);
}

void save_estimate_manifest(const EstimateManifest& manifest,
                            const std::filesystem::path& path) {
  json doc;
  json mixtures = json::array();
  for (const EstimateMixture& mix : manifest.mixtures) {
    json m;
    m["mixture_id"] = mix.mixture_id;
    json estimates = json::array();
    for (const EstimateRef& e : mix.estimates) {
      json entry;
      entry["label"] = e.label.name;
      entry["path"] = e.path;
      estimates.push_back(std::move(entry));
    }
    m["estimates"] = std::move(estimates);
    mixtures.push_back(std::move(m));
  }
  doc["mixtures"] = std::move(mixtures);
  write_file(doc, path);
}

ProbabilityTable load_probability_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ManifestError(path.string() + ": cannot open CSV");
  }

  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream row(line);
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
  };

  std::string line;
  if (!std::getline(in, line)) {
    throw ManifestError(path.string() + ": empty CSV");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split(line);
  if (header.size() < 2 || header[0] != "mixture_id") {
    throw ManifestError(path.string() +
                        ": header must be mixture_id,<class>,...");
  }

  ProbabilityTable table;
  table.classes.assign(header.begin() + 1, header.end());

  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells = split(line);
    if (cells.size() != header.size()) {
      throw ManifestError(path.string() + ": line " + std::to_string(lineno) +
                          ": expected " + std::to_string(header.size()) +
                          " columns, got " + std::to_string(cells.size()));
    }
    ProbabilityTable::Row row;
    row.mixture_id = cells[0];
    for (std::size_t i = 1; i < cells.size(); ++i) {
      try {
        std::size_t used = 0;
        double v = std::stod(cells[i], &used);
        if (used != cells[i].size()) throw std::invalid_argument(cells[i]);
        row.probs.push_back(v);
      } catch (const std::exception&) {
        throw ManifestError(path.string() + ": line " + std::to_string(lineno) +
                            ": '" + cells[i] + "' is not a number");
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace s5eval
