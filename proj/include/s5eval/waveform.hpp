#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace s5eval {

/// Single-channel sampled signal. Samples are dimensionless amplitudes,
/// full-scale +-1.0 nominal, kept as float64 regardless of file encoding.
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 0;

  static Waveform zeros(std::size_t length, int sample_rate);

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate
                           : 0.0;
  }
};

/// M-channel signal. All channels share one length and sample rate.
struct MultichannelWaveform {
  std::vector<Waveform> channels;

  static MultichannelWaveform zeros(std::size_t channel_count,
                                    std::size_t length, int sample_rate);

  std::size_t channel_count() const { return channels.size(); }
  std::size_t frame_count() const {
    return channels.empty() ? 0 : channels.front().size();
  }
  int sample_rate() const {
    return channels.empty() ? 0 : channels.front().sample_rate;
  }
  const Waveform& channel(std::size_t i) const { return channels.at(i); }
  Waveform& channel(std::size_t i) { return channels.at(i); }
};

/// Shape checks; throw std::invalid_argument naming `what` on violation.
/// Finite-sample scans are separate because they cost a full pass.
void require_valid(const Waveform& w, const std::string& what);
void require_valid(const MultichannelWaveform& w, const std::string& what);
void require_finite(const Waveform& w, const std::string& what);
void require_finite(const MultichannelWaveform& w, const std::string& what);

}  // namespace s5eval
