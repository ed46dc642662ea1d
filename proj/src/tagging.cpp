#include "s5eval/tagging.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace s5eval {

std::vector<ClassLabel> select_labels(const ClassProbabilities& input) {
  const std::size_t n = input.vocabulary.size();
  if (input.probs.size() != n) {
    throw std::invalid_argument(
        "select_labels: probability count does not match vocabulary size");
  }
  if (!(input.gamma >= 0.0 && input.gamma <= 1.0)) {
    throw std::invalid_argument("select_labels: gamma must lie in [0, 1]");
  }
  if (input.k_max < 1) {
    throw std::invalid_argument("select_labels: k_max must be at least 1");
  }
  for (double p : input.probs) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw std::invalid_argument(
          "select_labels: probabilities must lie in [0, 1]");
    }
  }

  // Sort indices by descending probability; stable sort keeps vocabulary
  // order as the tie-break and fixes the output ordering in one pass.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return input.probs[a] > input.probs[b];
                   });

  std::vector<std::size_t> picked;
  for (std::size_t idx : order) {
    if (input.probs[idx] >= input.gamma) picked.push_back(idx);
  }
  if (picked.empty()) picked.push_back(order.front());
  if (picked.size() > static_cast<std::size_t>(input.k_max)) {
    picked.resize(static_cast<std::size_t>(input.k_max));
  }

  std::vector<ClassLabel> out;
  out.reserve(picked.size());
  for (std::size_t idx : picked) {
    out.push_back(ClassLabel{input.vocabulary.names()[idx]});
  }
  return out;
}

}  // namespace s5eval
