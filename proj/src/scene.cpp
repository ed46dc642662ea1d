#include "s5eval/scene.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

#include "s5eval/dsp.hpp"
#include "s5eval/errors.hpp"
#include "s5eval/rng.hpp"
#include "s5eval/wav.hpp"

namespace s5eval {

namespace {

std::size_t seconds_to_frames(double seconds, int sample_rate) {
  return static_cast<std::size_t>(
      std::lround(seconds * static_cast<double>(sample_rate)));
}

void scale_in_place(Waveform& wave, double gain) {
  for (double& x : wave.samples) x *= gain;
}

}  // namespace

FileAssetResolver::FileAssetResolver(std::filesystem::path root)
    : root_(std::move(root)) {}

MultichannelWaveform FileAssetResolver::load(const std::string& path) const {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(path);
    if (it != cache_.end()) return it->second;
  }
  std::filesystem::path full(path);
  if (!full.is_absolute() && !root_.empty()) full = root_ / full;
  MultichannelWaveform wave = read_wav(full);
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.emplace(path, std::move(wave)).first->second;
}

MultichannelWaveform extract_direct_path_rir(const MultichannelWaveform& rir,
                                             double pre_ms, double post_ms,
                                             int ref_channel) {
  require_valid(rir, "extract_direct_path_rir: rir");
  if (pre_ms < 0.0 || post_ms < 0.0) {
    throw std::invalid_argument(
        "extract_direct_path_rir: window extents must be non-negative");
  }
  if (ref_channel < 0 ||
      static_cast<std::size_t>(ref_channel) >= rir.channel_count()) {
    throw std::invalid_argument(
        "extract_direct_path_rir: reference channel out of range");
  }

  const Waveform& ref = rir.channel(static_cast<std::size_t>(ref_channel));
  std::size_t peak = 0;
  double peak_abs = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double a = std::abs(ref.samples[i]);
    if (a > peak_abs) {
      peak_abs = a;
      peak = i;
    }
  }
  if (peak_abs == 0.0) {
    throw std::invalid_argument(
        "extract_direct_path_rir: reference channel is all zero");
  }

  const int fs = rir.sample_rate();
  const auto pre = static_cast<std::size_t>(std::lround(pre_ms * fs / 1000.0));
  const auto post = static_cast<std::size_t>(std::lround(post_ms * fs / 1000.0));
  const std::size_t lo = peak > pre ? peak - pre : 0;
  const std::size_t hi = std::min(peak + post, ref.size() - 1);  // inclusive

  MultichannelWaveform out = rir;
  for (Waveform& ch : out.channels) {
    std::fill(ch.samples.begin(), ch.samples.begin() + lo, 0.0);
    std::fill(ch.samples.begin() + hi + 1, ch.samples.end(), 0.0);
  }
  return out;
}

RenderedEvent render_event(const Waveform& source,
                           const MultichannelWaveform& rir, double onset_s,
                           double duration_s, int ref_channel) {
  require_valid(source, "render_event: source");
  require_valid(rir, "render_event: rir");
  if (source.sample_rate != rir.sample_rate()) {
    throw std::invalid_argument("render_event: sample-rate mismatch");
  }
  if (duration_s <= 0.0) {
    throw std::invalid_argument("render_event: duration must be positive");
  }
  if (onset_s < 0.0) {
    throw std::invalid_argument("render_event: onset must be non-negative");
  }
  const int fs = source.sample_rate;
  const std::size_t frames = seconds_to_frames(duration_s, fs);
  const std::size_t onset = seconds_to_frames(onset_s, fs);
  if (onset >= frames) {
    throw std::invalid_argument("render_event: onset at or past the scene end");
  }

  Waveform placed = Waveform::zeros(frames, fs);
  const std::size_t copy = std::min(source.size(), frames - onset);
  std::copy_n(source.samples.begin(), copy, placed.samples.begin() + onset);

  // One batch shares the forward transform of the placed source across the
  // M full-RIR channels and the windowed reference channel.
  const MultichannelWaveform direct =
      extract_direct_path_rir(rir, 6.0, 50.0, ref_channel);
  std::vector<Waveform> kernels;
  kernels.reserve(rir.channel_count() + 1);
  for (const Waveform& ch : rir.channels) kernels.push_back(ch);
  kernels.push_back(direct.channel(static_cast<std::size_t>(ref_channel)));

  std::vector<Waveform> outputs = convolve_batch(placed, kernels);

  RenderedEvent event;
  event.direct_ref = std::move(outputs.back());
  outputs.pop_back();
  event.wet.channels = std::move(outputs);
  return event;
}

void validate_scene_spec(const SceneSpec& spec, const SynthConfig& config) {
  if (spec.mixture_id.empty()) {
    throw std::invalid_argument("scene spec: empty mixture_id");
  }
  if (spec.duration_s <= 0.0) {
    throw std::invalid_argument("scene spec: duration must be positive");
  }
  if (spec.sample_rate <= 0) {
    throw std::invalid_argument("scene spec: sample rate must be positive");
  }
  if (spec.ref_channel < 0) {
    throw std::invalid_argument("scene spec: reference channel must be >= 0");
  }
  if (spec.events.empty() ||
      spec.events.size() > static_cast<std::size_t>(config.k_max)) {
    throw std::invalid_argument(
        "scene spec: event count must lie in [1, k_max]");
  }
  std::set<ClassLabel> labels;
  for (const SceneEvent& event : spec.events) {
    if (event.label.name.empty()) {
      throw std::invalid_argument("scene spec: empty event label");
    }
    if (!labels.insert(event.label).second) {
      throw std::invalid_argument("scene spec: duplicate event label '" +
                                  event.label.name + "'");
    }
    if (event.snr_db < config.snr_min_db || event.snr_db > config.snr_max_db) {
      throw std::invalid_argument("scene spec: event '" + event.label.name +
                                  "' SNR outside the configured range");
    }
    if (event.onset_s < 0.0 || event.onset_s >= spec.duration_s) {
      throw std::invalid_argument("scene spec: event '" + event.label.name +
                                  "' onset outside [0, T)");
    }
  }
  if (spec.noise && spec.noise->offset_s < 0.0) {
    throw std::invalid_argument("scene spec: negative noise offset");
  }
}

SceneOutput synthesize_scene(const SceneSpec& spec, const AssetResolver& assets,
                             const SynthConfig& config) {
  validate_scene_spec(spec, config);
  const int fs = spec.sample_rate;
  const std::size_t frames = seconds_to_frames(spec.duration_s, fs);

  // The noise segment fixes the channel count expectation when present;
  // otherwise the first RIR does.
  std::optional<MultichannelWaveform> noise_segment;
  if (spec.noise) {
    const MultichannelWaveform noise = assets.load(spec.noise->path);
    if (noise.sample_rate() != fs) {
      throw AudioError(spec.noise->path + ": sample rate differs from scene");
    }
    const std::size_t start = seconds_to_frames(spec.noise->offset_s, fs);
    if (start + frames > noise.frame_count()) {
      throw std::invalid_argument("scene spec: noise segment [" +
                                  std::to_string(start) + ", " +
                                  std::to_string(start + frames) +
                                  ") exceeds the recording");
    }
    MultichannelWaveform segment =
        MultichannelWaveform::zeros(noise.channel_count(), frames, fs);
    for (std::size_t ch = 0; ch < noise.channel_count(); ++ch) {
      std::copy_n(noise.channels[ch].samples.begin() + start, frames,
                  segment.channels[ch].samples.begin());
    }
    noise_segment = std::move(segment);
  }

  SceneOutput out;
  std::size_t channels = noise_segment ? noise_segment->channel_count() : 0;

  for (const SceneEvent& event : spec.events) {
    const MultichannelWaveform source_file = assets.load(event.source_path);
    if (source_file.channel_count() != 1) {
      throw AudioError(event.source_path + ": dry sources must be mono");
    }
    if (source_file.sample_rate() != fs) {
      throw AudioError(event.source_path + ": sample rate differs from scene");
    }
    const MultichannelWaveform rir = assets.load(event.rir_path);
    if (rir.sample_rate() != fs) {
      throw AudioError(event.rir_path + ": sample rate differs from scene");
    }
    if (channels == 0) {
      channels = rir.channel_count();
    } else if (rir.channel_count() != channels) {
      throw AudioError(event.rir_path + ": channel count differs from scene");
    }
    if (spec.ref_channel >= static_cast<int>(channels)) {
      throw std::invalid_argument(
          "scene spec: reference channel out of range for the scene assets");
    }

    RenderedEvent rendered =
        render_event(source_file.channel(0), rir, event.onset_s,
                     spec.duration_s, spec.ref_channel);

    double gain = 1.0;
    if (noise_segment) {
      const Waveform& noise_ref =
          noise_segment->channel(static_cast<std::size_t>(spec.ref_channel));
      gain = scale_to_snr(
                 rendered.wet.channel(static_cast<std::size_t>(spec.ref_channel)),
                 noise_ref, event.snr_db)
                 .gain;
    }
    for (Waveform& ch : rendered.wet.channels) scale_in_place(ch, gain);
    scale_in_place(rendered.direct_ref, gain);

    out.labels.push_back(event.label);
    out.gains.push_back(gain);
    out.wet_sources.push_back(std::move(rendered.wet));
    out.direct_targets.push_back(std::move(rendered.direct_ref));
  }

  out.mixture = MultichannelWaveform::zeros(channels, frames, fs);
  for (const MultichannelWaveform& wet : out.wet_sources) {
    for (std::size_t ch = 0; ch < channels; ++ch) {
      for (std::size_t i = 0; i < frames; ++i) {
        out.mixture.channels[ch].samples[i] += wet.channels[ch].samples[i];
      }
    }
  }
  if (noise_segment) {
    for (std::size_t ch = 0; ch < channels; ++ch) {
      for (std::size_t i = 0; i < frames; ++i) {
        out.mixture.channels[ch].samples[i] +=
            noise_segment->channels[ch].samples[i];
      }
    }
    out.noise = std::move(noise_segment);
  }
  return out;
}

SceneSpec sample_scene_spec(std::uint64_t seed, const Catalog& catalog,
                            const SynthConfig& config,
                            const std::string& mixture_id,
                            int forced_source_count) {
  if (catalog.vocabulary.empty() || catalog.sources.empty() ||
      catalog.rooms.empty()) {
    throw ConfigError("scene sampling: catalog is empty");
  }

  // Labels usable for sampling, in vocabulary order so draws are stable
  // against source-list reordering.
  std::map<int, std::vector<std::size_t>> sources_by_label;
  for (std::size_t i = 0; i < catalog.sources.size(); ++i) {
    const int idx = catalog.vocabulary.index_of(catalog.sources[i].label.name);
    if (idx < 0) {
      throw ConfigError("scene sampling: source label '" +
                        catalog.sources[i].label.name + "' not in vocabulary");
    }
    sources_by_label[idx].push_back(i);
  }
  std::vector<int> usable_labels;
  for (const auto& [idx, files] : sources_by_label) usable_labels.push_back(idx);

  std::uint64_t state = seed;
  std::mt19937_64 rng(splitmix64(state));

  int k = forced_source_count;
  if (k <= 0) {
    k = 1 + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(
                                                    config.k_max)));
  }
  if (k > config.k_max) {
    throw ConfigError("scene sampling: forced source count exceeds k_max");
  }
  if (static_cast<std::size_t>(k) > usable_labels.size()) {
    throw ConfigError(
        "scene sampling: fewer labels with sources than requested events");
  }

  SceneSpec spec;
  spec.mixture_id = mixture_id;
  spec.duration_s = config.duration_s;
  spec.sample_rate = config.sample_rate;
  spec.seed = seed;

  std::vector<std::size_t> label_picks =
      sample_distinct(rng, usable_labels.size(), static_cast<std::size_t>(k));
  std::vector<const SourceEntry*> picked_sources;
  for (std::size_t pick : label_picks) {
    const std::vector<std::size_t>& files =
        sources_by_label.at(usable_labels[pick]);
    picked_sources.push_back(
        &catalog.sources[files[uniform_index(rng, files.size())]]);
  }

  const RoomEntry& room =
      catalog.rooms[uniform_index(rng, catalog.rooms.size())];
  if (room.rir_paths.size() < static_cast<std::size_t>(k)) {
    throw ConfigError("scene sampling: room '" + room.name +
                      "' has fewer positions than events");
  }
  std::vector<std::size_t> positions =
      sample_distinct(rng, room.rir_paths.size(), static_cast<std::size_t>(k));

  for (int i = 0; i < k; ++i) {
    SceneEvent event;
    event.label = picked_sources[static_cast<std::size_t>(i)]->label;
    event.source_path = picked_sources[static_cast<std::size_t>(i)]->path;
    event.rir_path = room.rir_paths[positions[static_cast<std::size_t>(i)]];
    event.snr_db = uniform_real(rng, config.snr_min_db, config.snr_max_db);
    spec.events.push_back(std::move(event));
  }
  for (int i = 0; i < k; ++i) {
    const double source_len =
        picked_sources[static_cast<std::size_t>(i)]->duration_s;
    const double upper =
        config.duration_s - std::min(source_len, config.min_audible_s);
    spec.events[static_cast<std::size_t>(i)].onset_s =
        upper <= 0.0 ? 0.0 : uniform_real(rng, 0.0, upper);
  }

  if (!room.noise_path.empty()) {
    if (room.noise_duration_s < config.duration_s) {
      throw ConfigError("scene sampling: room '" + room.name +
                        "' noise recording is shorter than the scene");
    }
    NoiseSelection noise;
    noise.path = room.noise_path;
    const double slack = room.noise_duration_s - config.duration_s;
    noise.offset_s = slack <= 0.0 ? 0.0 : uniform_real(rng, 0.0, slack);
    spec.noise = std::move(noise);
  }

  validate_scene_spec(spec, config);
  return spec;
}

}  // namespace s5eval
