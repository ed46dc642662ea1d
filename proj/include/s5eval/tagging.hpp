#pragma once

#include <vector>

#include "s5eval/labels.hpp"

namespace s5eval {

/// One mixture's per-class probabilities, aligned with the vocabulary, plus
/// the decision rule parameters.
struct ClassProbabilities {
  Vocabulary vocabulary;
  std::vector<double> probs;  // probs[i] belongs to vocabulary.names()[i]
  double gamma = 0.5;         // detection threshold, in (0, 1)
  int k_max = 3;
};

/// Decision rule turning probabilities into the predicted label set:
/// keep every class with prob >= gamma; if none passes, keep the single
/// argmax class; if more than k_max pass, keep the top k_max. Ties break by
/// vocabulary order, and the result is ordered by descending probability.
/// The output size is always in [1, k_max].
std::vector<ClassLabel> select_labels(const ClassProbabilities& p);

}  // namespace s5eval
