#include "s5eval/waveform.hpp"

#include <cmath>
#include <stdexcept>

namespace s5eval {

Waveform Waveform::zeros(std::size_t length, int sample_rate) {
  return Waveform{std::vector<double>(length, 0.0), sample_rate};
}

MultichannelWaveform MultichannelWaveform::zeros(std::size_t channel_count,
                                                 std::size_t length,
                                                 int sample_rate) {
  MultichannelWaveform out;
  out.channels.assign(channel_count, Waveform::zeros(length, sample_rate));
  return out;
}

void require_valid(const Waveform& w, const std::string& what) {
  if (w.samples.empty()) {
    throw std::invalid_argument(what + ": empty waveform");
  }
  if (w.sample_rate <= 0) {
    throw std::invalid_argument(what + ": sample rate must be positive");
  }
}

void require_valid(const MultichannelWaveform& w, const std::string& what) {
  if (w.channels.empty()) {
    throw std::invalid_argument(what + ": no channels");
  }
  require_valid(w.channels.front(), what);
  for (std::size_t i = 1; i < w.channels.size(); ++i) {
    if (w.channels[i].size() != w.frame_count()) {
      throw std::invalid_argument(what + ": channel length mismatch");
    }
    if (w.channels[i].sample_rate != w.sample_rate()) {
      throw std::invalid_argument(what + ": channel sample-rate mismatch");
    }
  }
}

void require_finite(const Waveform& w, const std::string& what) {
  for (double v : w.samples) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument(what + ": non-finite sample");
    }
  }
}

void require_finite(const MultichannelWaveform& w, const std::string& what) {
  for (const auto& ch : w.channels) require_finite(ch, what);
}

}  // namespace s5eval
