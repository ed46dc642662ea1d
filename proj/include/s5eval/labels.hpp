#pragma once

#include <compare>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "s5eval/waveform.hpp"

namespace s5eval {

/// A sound event class name. Valid labels belong to some Vocabulary; the
/// wrapper keeps label-keyed and path-keyed strings from mixing up.
struct ClassLabel {
  std::string name;

  auto operator<=>(const ClassLabel&) const = default;
};

/// Ordered list of the N class names. Order is preserved verbatim from the
/// manifest or catalog because probability tie-breaking depends on it.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> names);

  /// Index in declaration order, or -1 when absent.
  int index_of(const std::string& name) const;
  bool contains(const std::string& name) const { return index_of(name) >= 0; }
  bool contains(const ClassLabel& label) const { return contains(label.name); }

  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }
  bool empty() const { return names_.empty(); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
};

enum class Role { Reference, Estimate };

/// Label->waveform pairs for one mixture: either the ground-truth targets or
/// a system's estimates. Labels must be pairwise distinct; all waveforms
/// share one sample rate and length.
struct LabeledSources {
  Role role = Role::Reference;
  std::vector<std::pair<ClassLabel, Waveform>> entries;

  std::size_t size() const { return entries.size(); }
  std::vector<ClassLabel> labels() const;
  const Waveform* find(const ClassLabel& label) const;
};

}  // namespace s5eval
