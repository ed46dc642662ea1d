#pragma once

#include <cstdint>
#include <filesystem>

#include "s5eval/waveform.hpp"

namespace s5eval {

enum class WavEncoding { Float32, Pcm16, Pcm24 };

struct WavInfo {
  int channels = 0;
  int sample_rate = 0;
  std::uint64_t frames = 0;
  WavEncoding encoding = WavEncoding::Float32;
};

/// Header-only probe; does not decode samples.
WavInfo wav_info(const std::filesystem::path& path);

/// Reads a RIFF/WAVE file: 16/24-bit PCM or 32-bit IEEE float. Integer
/// samples map to [-1, 1) by the symmetric divisor (2^15 or 2^23, so the
/// full-scale negative peak reads exactly -1.0); floats pass through as
/// float64. Throws AudioError on unsupported or truncated input.
MultichannelWaveform read_wav(const std::filesystem::path& path);

/// Writes a RIFF/WAVE file. Float32 is the default so write-then-read
/// round-trips are bit exact. Integer encodings reject samples outside
/// [-1, 1] instead of clipping.
void write_wav(const std::filesystem::path& path,
               const MultichannelWaveform& wave,
               WavEncoding encoding = WavEncoding::Float32);
void write_wav(const std::filesystem::path& path, const Waveform& wave,
               WavEncoding encoding = WavEncoding::Float32);

}  // namespace s5eval
