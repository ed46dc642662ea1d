#pragma once

#include <stdexcept>

namespace s5eval {

/// Malformed or inconsistent manifests, catalogs or CSV inputs (CLI exit 2).
struct ManifestError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Unreadable, unsupported or mismatched audio files (CLI exit 3).
struct AudioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid tool configuration: flags, metric names, penalty values (CLI exit 4).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace s5eval
