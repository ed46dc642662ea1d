#include "s5eval/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "s5eval/fft.hpp"

namespace s5eval {

namespace {

// Below this work estimate the direct sum beats transform setup.
constexpr double kDirectWorkLimit = 1 << 21;

std::vector<double> convolve_direct(const std::vector<double>& signal,
                                    const std::vector<double>& kernel) {
  const std::size_t t_len = signal.size();
  const std::size_t h_len = kernel.size();
  std::vector<double> out(t_len, 0.0);
  for (std::size_t t = 0; t < t_len; ++t) {
    const std::size_t tau_end = std::min(h_len - 1, t);
    double acc = 0.0;
    for (std::size_t tau = 0; tau <= tau_end; ++tau) {
      acc += kernel[tau] * signal[t - tau];
    }
    out[t] = acc;
  }
  return out;
}

void check_convolve_args(const Waveform& signal, const Waveform& kernel) {
  require_valid(signal, "convolve: signal");
  require_valid(kernel, "convolve: kernel");
  if (signal.sample_rate != kernel.sample_rate) {
    throw std::invalid_argument("convolve: sample-rate mismatch");
  }
}

}  // namespace

std::vector<Waveform> convolve_batch(const Waveform& signal,
                                     const std::vector<Waveform>& kernels) {
  std::vector<Waveform> out;
  out.reserve(kernels.size());
  if (kernels.empty()) return out;

  std::size_t longest = 0;
  for (const auto& k : kernels) {
    check_convolve_args(signal, k);
    longest = std::max(longest, k.size());
  }

  const std::size_t t_len = signal.size();
  if (static_cast<double>(t_len) * static_cast<double>(longest) <=
      kDirectWorkLimit) {
    for (const auto& k : kernels) {
      out.push_back(
          Waveform{convolve_direct(signal.samples, k.samples),
                   signal.sample_rate});
    }
    return out;
  }

  // One forward transform of the signal serves every kernel.
  const std::size_t n = detail::next_pow2(t_len + longest - 1);
  std::vector<std::complex<double>> sig_fd(n);
  for (std::size_t i = 0; i < t_len; ++i) sig_fd[i] = signal.samples[i];
  detail::fft(sig_fd, false);

  std::vector<std::complex<double>> work(n);
  for (const auto& k : kernels) {
    std::fill(work.begin(), work.end(), std::complex<double>{});
    for (std::size_t i = 0; i < k.size(); ++i) work[i] = k.samples[i];
    detail::fft(work, false);
    for (std::size_t i = 0; i < n; ++i) work[i] *= sig_fd[i];
    detail::fft(work, true);

    std::vector<double> res(t_len);
    for (std::size_t i = 0; i < t_len; ++i) res[i] = work[i].real();
    out.push_back(Waveform{std::move(res), signal.sample_rate});
  }
  return out;
}

Waveform convolve(const Waveform& signal, const Waveform& kernel) {
  return std::move(convolve_batch(signal, {kernel}).front());
}

double energy(const std::vector<double>& x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc;
}

double energy(const Waveform& x) { return energy(x.samples); }

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("dot: length mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

ScaledSignal scale_to_snr(const Waveform& target, const Waveform& noise_ref,
                          double snr_db) {
  require_valid(target, "scale_to_snr: target");
  require_valid(noise_ref, "scale_to_snr: noise");
  const double target_energy = energy(target);
  const double noise_energy = energy(noise_ref);
  if (target_energy <= 0.0) {
    throw std::invalid_argument("scale_to_snr: zero-energy target");
  }
  if (noise_energy <= 0.0) {
    throw std::invalid_argument("scale_to_snr: zero-energy noise");
  }
  const double gain =
      std::sqrt(std::pow(10.0, snr_db / 10.0) * noise_energy / target_energy);
  ScaledSignal out{target, gain};
  for (double& v : out.signal.samples) v *= gain;
  return out;
}

double measure_snr_db(const Waveform& target, const Waveform& noise_ref) {
  const double target_energy = energy(target);
  const double noise_energy = energy(noise_ref);
  if (target_energy <= 0.0 || noise_energy <= 0.0) {
    throw std::invalid_argument("measure_snr_db: zero-energy input");
  }
  return 10.0 * std::log10(target_energy / noise_energy);
}

}  // namespace s5eval
