#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "s5eval/dsp.hpp"
#include "s5eval/errors.hpp"
#include "s5eval/rng.hpp"
#include "s5eval/scene.hpp"
#include "test_util.hpp"

using namespace s5eval;
using testutil::MapAssetResolver;
using testutil::random_waveform;
using testutil::rng_stream;

namespace {

constexpr int kRate = 32000;

MultichannelWaveform impulse_rir(std::size_t length, std::size_t at,
                                 std::size_t channels = 1, int rate = kRate) {
  MultichannelWaveform rir = MultichannelWaveform::zeros(channels, length, rate);
  for (auto& ch : rir.channels) ch.samples[at] = 1.0;
  return rir;
}

// RIR with a dominant direct spike and a decaying random tail; channels get
// slightly offset copies so inter-channel structure exists.
MultichannelWaveform synthetic_rir(std::mt19937_64& rng, std::size_t length,
                                   std::size_t peak_at, std::size_t channels,
                                   int rate = kRate) {
  MultichannelWaveform rir = MultichannelWaveform::zeros(channels, length, rate);
  for (std::size_t c = 0; c < channels; ++c) {
    auto& s = rir.channels[c].samples;
    const std::size_t p = peak_at + c;  // small inter-channel offset
    s[p] = 1.0;
    for (std::size_t i = p + 1; i < length; ++i) {
      const double decay =
          std::exp(-5.0 * static_cast<double>(i - p) / length);
      s[i] = 0.3 * decay * uniform_real(rng, -1.0, 1.0);
    }
  }
  return rir;
}

}  // namespace

TEST_CASE("an isolated impulse survives its own direct-path window") {
  MultichannelWaveform rir = impulse_rir(4000, 1000);
  const MultichannelWaveform out = extract_direct_path_rir(rir);
  for (std::size_t i = 0; i < 4000; ++i) {
    CHECK(out.channels[0].samples[i] == rir.channels[0].samples[i]);
  }
}

TEST_CASE("window [peak-192, peak+1600] at 32 kHz is sample-exact") {
  MultichannelWaveform rir = impulse_rir(4000, 1000);
  rir.channels[0].samples[3000] = 0.5;  // late tap, outside the window
  rir.channels[0].samples[808] = 0.25;  // exactly on the left edge
  rir.channels[0].samples[2600] = 0.25;  // exactly on the right edge
  rir.channels[0].samples[807] = 0.75;  // one sample outside on the left
  rir.channels[0].samples[2601] = 0.75;  // one sample outside on the right

  const MultichannelWaveform out = extract_direct_path_rir(rir);
  CHECK(out.channels[0].samples[1000] == 1.0);
  CHECK(out.channels[0].samples[808] == 0.25);
  CHECK(out.channels[0].samples[2600] == 0.25);
  CHECK(out.channels[0].samples[807] == 0.0);
  CHECK(out.channels[0].samples[2601] == 0.0);
  CHECK(out.channels[0].samples[3000] == 0.0);
}

TEST_CASE("direct plus residual RIR partitions the energy") {
  auto rng = rng_stream(60);
  const MultichannelWaveform rir = synthetic_rir(rng, 6000, 900, 2);
  const MultichannelWaveform direct = extract_direct_path_rir(rir);
  for (std::size_t c = 0; c < 2; ++c) {
    const double total = energy(rir.channels[c]);
    double direct_e = 0.0, residual_e = 0.0;
    for (std::size_t i = 0; i < 6000; ++i) {
      const double d = direct.channels[c].samples[i];
      const double r = rir.channels[c].samples[i] - d;
      direct_e += d * d;
      residual_e += r * r;
      // The mask never mixes: each sample is kept or zeroed.
      CHECK((d == rir.channels[c].samples[i] || d == 0.0));
    }
    CHECK(direct_e + residual_e == doctest::Approx(total).epsilon(1e-9));
  }
}

TEST_CASE("direct-path extraction is idempotent") {
  auto rng = rng_stream(61);
  const MultichannelWaveform rir = synthetic_rir(rng, 5000, 700, 4);
  const MultichannelWaveform once = extract_direct_path_rir(rir);
  const MultichannelWaveform twice = extract_direct_path_rir(once);
  for (std::size_t c = 0; c < 4; ++c) {
    for (std::size_t i = 0; i < 5000; ++i) {
      CHECK(twice.channels[c].samples[i] == once.channels[c].samples[i]);
    }
  }
}

TEST_CASE("one shared window is taken from the reference channel") {
  MultichannelWaveform rir = impulse_rir(4000, 1000, 2);
  // Channel 1 has an early tap that a per-channel window would keep.
  rir.channels[1].samples[500] = 0.9;
  const MultichannelWaveform out = extract_direct_path_rir(rir);
  CHECK(out.channels[1].samples[500] == 0.0);
  CHECK(out.channels[1].samples[1000] == 1.0);

  // Reference channel choice matters: with ref_channel 1 the peak is still
  // at 1000 (abs 1.0 > 0.9) so the same window results.
  const MultichannelWaveform alt = extract_direct_path_rir(rir, 6.0, 50.0, 1);
  CHECK(alt.channels[1].samples[500] == 0.0);
}

TEST_CASE("all-zero reference channel is rejected") {
  MultichannelWaveform rir = MultichannelWaveform::zeros(1, 100, kRate);
  CHECK_THROWS_AS(extract_direct_path_rir(rir), std::invalid_argument);
}

TEST_CASE("render_event through a pure delay shifts the source") {
  auto rng = rng_stream(62);
  const Waveform source = random_waveform(rng, 8000, kRate, 0.5);
  const MultichannelWaveform rir = impulse_rir(2000, 250);
  const double onset_s = 0.25;  // 8000 samples
  const RenderedEvent ev = render_event(source, rir, onset_s, 1.0);

  REQUIRE(ev.wet.frame_count() == 32000);
  for (std::size_t i = 0; i < 32000; ++i) {
    const std::size_t shift = 8000 + 250;
    const double want =
        i >= shift && i - shift < source.size() ? source.samples[i - shift] : 0.0;
    CHECK(ev.wet.channels[0].samples[i] ==
          doctest::Approx(want).epsilon(1e-12));
    // The delay impulse lies inside its own window, so the direct path is
    // the full wet signal.
    CHECK(ev.direct_ref.samples[i] ==
          doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("render_event matches the brute-force convolution oracle") {
  auto rng = rng_stream(63);
  const Waveform source = random_waveform(rng, 3000, kRate, 0.5);
  const MultichannelWaveform rir = synthetic_rir(rng, 2500, 300, 3);
  const RenderedEvent ev = render_event(source, rir, 0.05, 0.5);

  const std::size_t frames = 16000;
  Waveform placed = Waveform::zeros(frames, kRate);
  std::copy(source.samples.begin(), source.samples.end(),
            placed.samples.begin() + 1600);

  for (std::size_t c = 0; c < 3; ++c) {
    const Waveform want = testutil::brute_convolve(placed, rir.channels[c]);
    for (std::size_t i = 0; i < frames; ++i) {
      CHECK(std::abs(ev.wet.channels[c].samples[i] - want.samples[i]) < 1e-9);
    }
  }

  // Linearity: wet minus direct equals convolution with the residual RIR.
  const MultichannelWaveform direct = extract_direct_path_rir(rir);
  Waveform residual_kernel = rir.channels[0];
  for (std::size_t i = 0; i < residual_kernel.size(); ++i) {
    residual_kernel.samples[i] -= direct.channels[0].samples[i];
  }
  const Waveform residual = testutil::brute_convolve(placed, residual_kernel);
  for (std::size_t i = 0; i < frames; ++i) {
    CHECK(std::abs((ev.wet.channels[0].samples[i] - ev.direct_ref.samples[i]) -
                   residual.samples[i]) < 1e-9);
  }
}

TEST_CASE("render_event validates rates and onsets") {
  auto rng = rng_stream(64);
  const Waveform source = random_waveform(rng, 100, 16000, 0.5);
  const MultichannelWaveform rir = impulse_rir(64, 10, 1, kRate);
  CHECK_THROWS_AS(render_event(source, rir, 0.0, 1.0), std::invalid_argument);
  const Waveform ok = random_waveform(rng, 100, kRate, 0.5);
  CHECK_THROWS_AS(render_event(ok, rir, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("noiseless single-event scene is exactly the wet source") {
  auto rng = rng_stream(65);
  MapAssetResolver assets;
  assets.put("src.wav", random_waveform(rng, 16000, kRate, 0.4));
  assets.put("rir.wav", synthetic_rir(rng, 2000, 120, 4));

  SceneSpec spec;
  spec.mixture_id = "solo";
  spec.duration_s = 1.0;
  spec.sample_rate = kRate;
  spec.events.push_back(SceneEvent{ClassLabel{"a"}, "src.wav", "rir.wav", 0.1, 10.0});

  const SceneOutput out = synthesize_scene(spec, assets);
  CHECK(out.gains == std::vector<double>{1.0});
  REQUIRE(out.wet_sources.size() == 1);
  for (std::size_t c = 0; c < 4; ++c) {
    for (std::size_t i = 0; i < out.mixture.frame_count(); ++i) {
      CHECK(out.mixture.channels[c].samples[i] ==
            out.wet_sources[0].channels[c].samples[i]);
    }
  }
}

TEST_CASE("two disjoint impulse-RIR events sum with the noise sample-wise") {
  auto rng = rng_stream(66);
  MapAssetResolver assets;
  const Waveform src_a = random_waveform(rng, 3000, kRate, 0.4);
  const Waveform src_b = random_waveform(rng, 3000, kRate, 0.4);
  const MultichannelWaveform noise =
      testutil::random_multichannel(rng, 1, 2 * kRate, kRate, 0.05);
  assets.put("a.wav", src_a);
  assets.put("b.wav", src_b);
  assets.put("rir.wav", impulse_rir(100, 0));
  assets.put("noise.wav", noise);

  SceneSpec spec;
  spec.mixture_id = "pair";
  spec.duration_s = 1.0;
  spec.sample_rate = kRate;
  spec.events.push_back(SceneEvent{ClassLabel{"a"}, "a.wav", "rir.wav", 0.0, 8.0});
  spec.events.push_back(SceneEvent{ClassLabel{"b"}, "b.wav", "rir.wav", 0.5, 12.0});
  spec.noise = NoiseSelection{"noise.wav", 0.25};

  const SceneOutput out = synthesize_scene(spec, assets);
  const std::size_t offset = 8000;  // noise segment start: 0.25 s
  for (std::size_t i = 0; i < 32000; ++i) {
    double want = noise.channels[0].samples[offset + i];
    if (i < 3000) want += out.gains[0] * src_a.samples[i];
    if (i >= 16000 && i < 19000) want += out.gains[1] * src_b.samples[i - 16000];
    CHECK(out.mixture.channels[0].samples[i] ==
          doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("per-event SNR against the noise segment is met exactly") {
  auto rng = rng_stream(67);
  MapAssetResolver assets;
  assets.put("a.wav", random_waveform(rng, 20000, kRate, 0.4));
  assets.put("b.wav", random_waveform(rng, 20000, kRate, 0.3));
  assets.put("rir.wav", synthetic_rir(rng, 1500, 90, 2));
  assets.put("noise.wav",
             testutil::random_multichannel(rng, 2, 3 * kRate, kRate, 0.05));

  SceneSpec spec;
  spec.mixture_id = "snr";
  spec.duration_s = 1.0;
  spec.sample_rate = kRate;
  spec.events.push_back(SceneEvent{ClassLabel{"a"}, "a.wav", "rir.wav", 0.0, 6.5});
  spec.events.push_back(SceneEvent{ClassLabel{"b"}, "b.wav", "rir.wav", 0.2, 17.25});
  spec.noise = NoiseSelection{"noise.wav", 1.0};

  const SceneOutput out = synthesize_scene(spec, assets);
  REQUIRE(out.noise.has_value());
  const Waveform& noise_ref = out.noise->channels[0];
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(measure_snr_db(out.wet_sources[k].channels[0], noise_ref) ==
          doctest::Approx(spec.events[k].snr_db).epsilon(1e-12));
  }

  // Mixture additivity at float64.
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t i = 0; i < 32000; ++i) {
      const double sum = out.wet_sources[0].channels[c].samples[i] +
                         out.wet_sources[1].channels[c].samples[i] +
                         out.noise->channels[c].samples[i];
      CHECK(std::abs(out.mixture.channels[c].samples[i] - sum) < 1e-9);
    }
  }

  // Direct targets carry the same gain as their wet sources.
  const RenderedEvent raw = render_event(
      assets.load("a.wav").channel(0), assets.load("rir.wav"), 0.0, 1.0);
  for (std::size_t i = 0; i < 32000; ++i) {
    CHECK(out.direct_targets[0].samples[i] ==
          doctest::Approx(raw.direct_ref.samples[i] * out.gains[0])
              .epsilon(1e-12));
  }
}

TEST_CASE("scene synthesis is deterministic") {
  auto rng = rng_stream(68);
  MapAssetResolver assets;
  assets.put("a.wav", random_waveform(rng, 16000, kRate, 0.4));
  assets.put("rir.wav", synthetic_rir(rng, 1000, 50, 2));
  assets.put("noise.wav",
             testutil::random_multichannel(rng, 2, 2 * kRate, kRate, 0.05));

  SceneSpec spec;
  spec.mixture_id = "det";
  spec.duration_s = 1.0;
  spec.sample_rate = kRate;
  spec.events.push_back(SceneEvent{ClassLabel{"a"}, "a.wav", "rir.wav", 0.31, 9.0});
  spec.noise = NoiseSelection{"noise.wav", 0.5};

  const SceneOutput first = synthesize_scene(spec, assets);
  const SceneOutput second = synthesize_scene(spec, assets);
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t i = 0; i < 32000; ++i) {
      CHECK(first.mixture.channels[c].samples[i] ==
            second.mixture.channels[c].samples[i]);
    }
  }
}

TEST_CASE("scene spec validation rejects bad recipes") {
  SynthConfig config;
  SceneSpec spec;
  spec.mixture_id = "v";
  spec.duration_s = 10.0;
  spec.sample_rate = kRate;
  CHECK_THROWS_AS(validate_scene_spec(spec, config), std::invalid_argument);

  SceneEvent e{ClassLabel{"a"}, "s.wav", "r.wav", 0.0, 10.0};
  spec.events = {e, e};  // duplicate label
  CHECK_THROWS_AS(validate_scene_spec(spec, config), std::invalid_argument);

  spec.events = {e};
  spec.events[0].snr_db = 42.0;  // outside [5, 20]
  CHECK_THROWS_AS(validate_scene_spec(spec, config), std::invalid_argument);

  spec.events[0].snr_db = 10.0;
  spec.events[0].onset_s = 10.0;  // at T
  CHECK_THROWS_AS(validate_scene_spec(spec, config), std::invalid_argument);

  spec.events[0].onset_s = 1.0;
  validate_scene_spec(spec, config);  // now valid

  spec.events = {e, e, e, e};  // K > k_max
  CHECK_THROWS_AS(validate_scene_spec(spec, config), std::invalid_argument);
}

namespace {

Catalog tiny_catalog() {
  Catalog catalog;
  catalog.vocabulary = Vocabulary({"a", "b", "c", "d"});
  catalog.config.duration_s = 2.0;
  catalog.config.sample_rate = kRate;
  for (const char* name : {"a", "b", "c", "d"}) {
    for (int i = 0; i < 2; ++i) {
      catalog.sources.push_back(SourceEntry{
          ClassLabel{name},
          std::string(name) + "_" + std::to_string(i) + ".wav", 1.5});
    }
  }
  catalog.rooms.push_back(RoomEntry{
      "room0", {"r0_p0.wav", "r0_p1.wav", "r0_p2.wav", "r0_p3.wav"},
      "r0_noise.wav", 30.0});
  catalog.rooms.push_back(RoomEntry{
      "room1", {"r1_p0.wav", "r1_p1.wav", "r1_p2.wav"}, "r1_noise.wav", 30.0});
  return catalog;
}

}  // namespace

TEST_CASE("sampled scene specs are deterministic and well-formed") {
  const Catalog catalog = tiny_catalog();
  SynthConfig config = catalog.config;

  const SceneSpec a = sample_scene_spec(777, catalog, config, "m0");
  const SceneSpec b = sample_scene_spec(777, catalog, config, "m0");
  REQUIRE(a.events.size() == b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    CHECK(a.events[i].label == b.events[i].label);
    CHECK(a.events[i].source_path == b.events[i].source_path);
    CHECK(a.events[i].rir_path == b.events[i].rir_path);
    CHECK(a.events[i].onset_s == b.events[i].onset_s);
    CHECK(a.events[i].snr_db == b.events[i].snr_db);
  }
  REQUIRE(a.noise.has_value());
  REQUIRE(b.noise.has_value());
  CHECK(a.noise->path == b.noise->path);
  CHECK(a.noise->offset_s == b.noise->offset_s);

  const SceneSpec c = sample_scene_spec(778, catalog, config, "m1");
  validate_scene_spec(c, config);

  // RIR positions within one scene never repeat.
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const SceneSpec s = sample_scene_spec(seed, catalog, config, "m");
    std::set<std::string> rirs;
    for (const SceneEvent& ev : s.events) rirs.insert(ev.rir_path);
    CHECK(rirs.size() == s.events.size());
    for (const SceneEvent& ev : s.events) {
      CHECK(ev.onset_s >= 0.0);
      CHECK(ev.onset_s <= config.duration_s - 1.0);  // min audible second
      CHECK(ev.snr_db >= config.snr_min_db);
      CHECK(ev.snr_db <= config.snr_max_db);
    }
  }
}

TEST_CASE("forced and free source counts behave as configured") {
  const Catalog catalog = tiny_catalog();
  SynthConfig config = catalog.config;

  for (int k = 1; k <= 3; ++k) {
    const SceneSpec s = sample_scene_spec(42, catalog, config, "m", k);
    CHECK(s.events.size() == static_cast<std::size_t>(k));
  }

  SynthConfig solo = config;
  solo.k_max = 1;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CHECK(sample_scene_spec(seed, catalog, solo, "m").events.size() == 1);
  }

  // K is uniform over {1, 2, 3}: 10,000 draws stay within 3 sigma.
  std::map<std::size_t, int> histogram;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    histogram[sample_scene_spec(seed, catalog, config, "m").events.size()]++;
  }
  const double expect = 10000.0 / 3.0;
  const double sigma = std::sqrt(10000.0 * (1.0 / 3.0) * (2.0 / 3.0));
  for (std::size_t k = 1; k <= 3; ++k) {
    CHECK(std::abs(histogram[k] - expect) < 3.0 * sigma);
  }
}

TEST_CASE("catalogs too small for distinct sampling are rejected") {
  Catalog catalog = tiny_catalog();
  SynthConfig config = catalog.config;

  Catalog one_room = catalog;
  one_room.rooms = {RoomEntry{"tight", {"p0.wav"}, "n.wav", 30.0}};
  CHECK_THROWS_AS(sample_scene_spec(1, one_room, config, "m", 3), ConfigError);

  Catalog one_label = catalog;
  one_label.sources = {SourceEntry{ClassLabel{"a"}, "a.wav", 1.0}};
  CHECK_THROWS_AS(sample_scene_spec(1, one_label, config, "m", 2), ConfigError);

  Catalog short_noise = catalog;
  short_noise.rooms = {RoomEntry{"short", {"p0.wav", "p1.wav", "p2.wav"},
                                 "n.wav", 1.0}};
  CHECK_THROWS_AS(sample_scene_spec(1, short_noise, config, "m"), ConfigError);
}
