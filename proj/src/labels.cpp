#include "s5eval/labels.hpp"

#include <stdexcept>

namespace s5eval {

Vocabulary::Vocabulary(std::vector<std::string> names)
    : names_(std::move(names)) {
  if (names_.empty()) {
    throw std::invalid_argument("vocabulary: must contain at least one class");
  }
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) {
      throw std::invalid_argument("vocabulary: empty class name");
    }
    auto [it, inserted] = index_.emplace(names_[i], static_cast<int>(i));
    if (!inserted) {
      throw std::invalid_argument("vocabulary: duplicate class '" + names_[i] +
                                  "'");
    }
  }
}

int Vocabulary::index_of(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

std::vector<ClassLabel> LabeledSources::labels() const {
  std::vector<ClassLabel> out;
  out.reserve(entries.size());
  for (const auto& [label, wave] : entries) out.push_back(label);
  return out;
}

const Waveform* LabeledSources::find(const ClassLabel& label) const {
  for (const auto& [l, wave] : entries) {
    if (l == label) return &wave;
  }
  return nullptr;
}

}  // namespace s5eval
