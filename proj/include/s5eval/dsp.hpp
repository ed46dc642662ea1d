#pragma once

#include <vector>

#include "s5eval/waveform.hpp"

namespace s5eval {

/// Linear convolution truncated to the signal length T:
///   out[t] = sum_tau kernel[tau] * signal[t - tau],  t in [0, T).
/// Small products run the direct sum; large ones go through an FFT.
Waveform convolve(const Waveform& signal, const Waveform& kernel);

/// Convolves one signal against several kernels, sharing the forward
/// transform of the signal. Each output is truncated to the signal length.
std::vector<Waveform> convolve_batch(const Waveform& signal,
                                     const std::vector<Waveform>& kernels);

/// Sum of squared samples.
double energy(const std::vector<double>& x);
double energy(const Waveform& x);

double dot(const std::vector<double>& a, const std::vector<double>& b);

struct ScaledSignal {
  Waveform signal;
  double gain = 1.0;
};

/// Scales `target` by the gain g > 0 that makes
///   10*log10(energy(g*target) / energy(noise_ref)) == snr_db.
/// Both inputs must have nonzero energy.
ScaledSignal scale_to_snr(const Waveform& target, const Waveform& noise_ref,
                          double snr_db);

/// Energy ratio of target over noise_ref in dB.
double measure_snr_db(const Waveform& target, const Waveform& noise_ref);

}  // namespace s5eval
