#pragma once

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "s5eval/scene.hpp"
#include "s5eval/waveform.hpp"

namespace testutil {

inline std::mt19937_64 rng_stream(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

inline s5eval::Waveform random_waveform(std::mt19937_64& rng, std::size_t n,
                                        int sample_rate, double amplitude) {
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  s5eval::Waveform w = s5eval::Waveform::zeros(n, sample_rate);
  for (double& x : w.samples) x = dist(rng);
  return w;
}

inline s5eval::MultichannelWaveform random_multichannel(
    std::mt19937_64& rng, std::size_t channels, std::size_t n, int sample_rate,
    double amplitude) {
  s5eval::MultichannelWaveform w;
  for (std::size_t c = 0; c < channels; ++c) {
    w.channels.push_back(random_waveform(rng, n, sample_rate, amplitude));
  }
  return w;
}

/// O(T*H) reference convolution, truncated to the signal length.
inline s5eval::Waveform brute_convolve(const s5eval::Waveform& signal,
                                       const s5eval::Waveform& kernel) {
  s5eval::Waveform out =
      s5eval::Waveform::zeros(signal.size(), signal.sample_rate);
  for (std::size_t t = 0; t < signal.size(); ++t) {
    double acc = 0.0;
    const std::size_t tau_max = std::min(t, kernel.size() - 1);
    for (std::size_t tau = 0; tau <= tau_max; ++tau) {
      acc += kernel.samples[tau] * signal.samples[t - tau];
    }
    out.samples[t] = acc;
  }
  return out;
}

inline long double energy_long_double(const std::vector<double>& x) {
  long double acc = 0.0L;
  for (double v : x) acc += static_cast<long double>(v) * v;
  return acc;
}

/// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::ostringstream name;
    name << "s5eval_test_" << ::getpid() << "_"
         << counter.fetch_add(1, std::memory_order_relaxed);
    path_ = std::filesystem::temp_directory_path() / name.str();
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Asset resolver backed by an in-memory map, keeping synthesis tests
/// hermetic.
class MapAssetResolver final : public s5eval::AssetResolver {
 public:
  void put(const std::string& path, s5eval::MultichannelWaveform wave) {
    assets_[path] = std::move(wave);
  }
  void put(const std::string& path, const s5eval::Waveform& wave) {
    s5eval::MultichannelWaveform mc;
    mc.channels.push_back(wave);
    assets_[path] = std::move(mc);
  }
  s5eval::MultichannelWaveform load(const std::string& path) const override {
    auto it = assets_.find(path);
    if (it == assets_.end()) {
      throw std::runtime_error("MapAssetResolver: unknown asset " + path);
    }
    return it->second;
  }

 private:
  std::unordered_map<std::string, s5eval::MultichannelWaveform> assets_;
};

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

/// Runs the installed CLI binary (path from S5EVAL_BIN) with the given
/// argument string. Returns exit code -1 when the binary is unavailable.
inline CliResult run_cli(const std::string& args,
                         const std::filesystem::path& scratch) {
  const char* bin = std::getenv("S5EVAL_BIN");
  if (bin == nullptr || *bin == '\0') return {};

  const std::filesystem::path log = scratch / "cli_output.log";
  const std::string command =
      std::string("\"") + bin + "\" " + args + " > \"" + log.string() +
      "\" 2>&1";
  const int status = std::system(command.c_str());

  CliResult result;
  if (status >= 0) {
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::ifstream in(log);
  std::ostringstream text;
  text << in.rdbuf();
  result.output = text.str();
  std::error_code ec;
  std::filesystem::remove(log, ec);
  return result;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

}  // namespace testutil
