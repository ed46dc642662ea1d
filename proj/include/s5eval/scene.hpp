#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "s5eval/labels.hpp"
#include "s5eval/waveform.hpp"

namespace s5eval {

struct SceneEvent {
  ClassLabel label;
  std::string source_path;
  std::string rir_path;
  double onset_s = 0.0;
  double snr_db = 0.0;
};

struct NoiseSelection {
  std::string path;
  double offset_s = 0.0;
};

/// Full recipe for one synthetic mixture. Rendering is a pure function of
/// the recipe; the seed it was sampled from is carried for provenance.
struct SceneSpec {
  std::string mixture_id;
  double duration_s = 10.0;
  int sample_rate = 32000;
  std::vector<SceneEvent> events;
  std::optional<NoiseSelection> noise;  // absent = noiseless scene, unit gains
  std::uint64_t seed = 0;
  int ref_channel = 0;
};

/// Everything a rendered scene produces. The mixture equals the sum of the
/// scaled wet sources plus the noise segment, sample for sample.
struct SceneOutput {
  MultichannelWaveform mixture;
  std::vector<MultichannelWaveform> wet_sources;
  std::vector<Waveform> direct_targets;  // reference-channel direct paths
  std::vector<ClassLabel> labels;
  std::vector<double> gains;
  std::optional<MultichannelWaveform> noise;  // segment added to the mixture
};

/// Resolves asset paths to decoded audio. File-backed in production;
/// in-memory resolvers keep tests hermetic.
class AssetResolver {
 public:
  virtual ~AssetResolver() = default;
  virtual MultichannelWaveform load(const std::string& path) const = 0;
};

/// Reads WAV assets relative to a root directory, with a small cache since
/// RIR and noise recordings repeat across scenes.
class FileAssetResolver final : public AssetResolver {
 public:
  explicit FileAssetResolver(std::filesystem::path root = {});
  MultichannelWaveform load(const std::string& path) const override;

 private:
  std::filesystem::path root_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::string, MultichannelWaveform> cache_;
};

/// Zeroes the impulse response outside [peak - pre_ms, peak + post_ms],
/// where the peak is the global maximum of |h| on the reference channel.
/// One shared window is applied to every channel so inter-channel alignment
/// within the retained region is preserved. Extraction is idempotent.
MultichannelWaveform extract_direct_path_rir(const MultichannelWaveform& rir,
                                             double pre_ms = 6.0,
                                             double post_ms = 50.0,
                                             int ref_channel = 0);

struct RenderedEvent {
  MultichannelWaveform wet;  // onset-shifted source through the full RIR
  Waveform direct_ref;       // reference channel through the windowed RIR
};

/// Places the source at `onset_s`, truncates at `duration_s`, and convolves
/// with the RIR (full and direct-path-windowed). Both outputs have length T.
RenderedEvent render_event(const Waveform& source,
                           const MultichannelWaveform& rir, double onset_s,
                           double duration_s, int ref_channel = 0);

struct SynthConfig {
  int k_max = 3;
  double snr_min_db = 5.0;
  double snr_max_db = 20.0;
  double duration_s = 10.0;
  int sample_rate = 32000;
  double min_audible_s = 1.0;  // onset leaves at least this much event inside T
};

/// Scene-spec sanity: 1..k_max events, distinct labels, SNRs inside the
/// configured range. Throws std::invalid_argument.
void validate_scene_spec(const SceneSpec& spec, const SynthConfig& config = {});

/// Renders every event, scales each wet source (all channels by one gain) so
/// its reference-channel SNR against the selected noise segment matches the
/// spec, and sums events plus unit-gain noise into the mixture. Direct
/// targets carry the same per-event gains. Deterministic given the recipe.
SceneOutput synthesize_scene(const SceneSpec& spec,
                             const AssetResolver& assets,
                             const SynthConfig& config = {});

struct SourceEntry {
  ClassLabel label;
  std::string path;
  double duration_s = 0.0;
};

struct RoomEntry {
  std::string name;
  std::vector<std::string> rir_paths;  // one per measured position
  std::string noise_path;
  double noise_duration_s = 0.0;
};

/// Asset inventory scene sampling draws from.
struct Catalog {
  Vocabulary vocabulary;
  std::vector<SourceEntry> sources;
  std::vector<RoomEntry> rooms;
  SynthConfig config;
};

/// Draws one scene recipe: K (uniform in [1, k_max] unless forced), K
/// distinct labels, one source file per label, a room, K distinct positions
/// in it, per-event SNRs, onsets, and a noise segment offset from the same
/// room. Deterministic for a given seed.
SceneSpec sample_scene_spec(std::uint64_t seed, const Catalog& catalog,
                            const SynthConfig& config,
                            const std::string& mixture_id,
                            int forced_source_count = 0);

}  // namespace s5eval
