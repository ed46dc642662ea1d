#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "s5eval/rng.hpp"
#include "s5eval/tagging.hpp"
#include "test_util.hpp"

using namespace s5eval;

namespace {

const Vocabulary kVocab({"a", "b", "c", "d"});

std::vector<std::string> names(const std::vector<ClassLabel>& labels) {
  std::vector<std::string> out;
  for (const ClassLabel& l : labels) out.push_back(l.name);
  return out;
}

// Independent restatement of the decision rule, structured as filter /
// fallback / cap with an explicit comparator instead of one stable sort.
std::vector<std::string> reference_rule(const std::vector<double>& probs,
                                        const Vocabulary& vocab, double gamma,
                                        int k_max) {
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] >= gamma) kept.push_back(i);
  }
  if (kept.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < probs.size(); ++i) {
      if (probs[i] > probs[best]) best = i;
    }
    kept.push_back(best);
  }
  std::sort(kept.begin(), kept.end(), [&](std::size_t x, std::size_t y) {
    if (probs[x] != probs[y]) return probs[x] > probs[y];
    return x < y;
  });
  if (kept.size() > static_cast<std::size_t>(k_max)) {
    kept.resize(static_cast<std::size_t>(k_max));
  }
  std::vector<std::string> out;
  for (std::size_t i : kept) out.push_back(vocab.names()[i]);
  return out;
}

}  // namespace

TEST_CASE("threshold keeps exactly the classes at or above gamma") {
  ClassProbabilities p{kVocab, {0.7, 0.6, 0.4, 0.2}, 0.5, 3};
  CHECK(names(select_labels(p)) == std::vector<std::string>{"a", "b"});
}

TEST_CASE("threshold comparison is inclusive") {
  ClassProbabilities p{kVocab, {0.5, 0.2, 0.1, 0.0}, 0.5, 3};
  CHECK(names(select_labels(p)) == std::vector<std::string>{"a"});
}

TEST_CASE("all-below-threshold input falls back to the argmax class") {
  ClassProbabilities p{kVocab, {0.1, 0.2, 0.45, 0.3}, 0.5, 3};
  CHECK(names(select_labels(p)) == std::vector<std::string>{"c"});
}

TEST_CASE("more passing classes than k_max keeps the top k_max") {
  ClassProbabilities p{kVocab, {0.9, 0.8, 0.7, 0.6}, 0.5, 3};
  CHECK(names(select_labels(p)) == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("ties at the k_max boundary break by vocabulary order") {
  ClassProbabilities p{kVocab, {0.6, 0.9, 0.6, 0.6}, 0.5, 3};
  // b leads; a, c, d tie at 0.6 and a, c win by vocabulary position.
  CHECK(names(select_labels(p)) == std::vector<std::string>{"b", "a", "c"});
}

TEST_CASE("output is ordered by descending probability") {
  ClassProbabilities p{kVocab, {0.55, 0.95, 0.75, 0.1}, 0.5, 3};
  CHECK(names(select_labels(p)) == std::vector<std::string>{"b", "c", "a"});
}

TEST_CASE("argmax fallback ties break by vocabulary order") {
  ClassProbabilities p{kVocab, {0.3, 0.3, 0.3, 0.3}, 0.5, 3};
  CHECK(names(select_labels(p)) == std::vector<std::string>{"a"});
}

TEST_CASE("select_labels validates its inputs") {
  CHECK_THROWS_AS(select_labels({kVocab, {0.5, 0.5}, 0.5, 3}),
                  std::invalid_argument);
  CHECK_THROWS_AS(select_labels({kVocab, {0.5, 0.5, 0.5, 1.5}, 0.5, 3}),
                  std::invalid_argument);
  CHECK_THROWS_AS(select_labels({kVocab, {0.5, 0.5, 0.5, 0.5}, 1.5, 3}),
                  std::invalid_argument);
  CHECK_THROWS_AS(select_labels({kVocab, {0.5, 0.5, 0.5, 0.5}, 0.5, 0}),
                  std::invalid_argument);
}

TEST_CASE("rule agrees with an independent re-implementation on random input") {
  auto rng = testutil::rng_stream(99);
  const Vocabulary vocab({"v0", "v1", "v2", "v3", "v4", "v5", "v6", "v7"});
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> probs(vocab.size());
    for (double& v : probs) v = uniform_real(rng, 0.0, 1.0);
    // Inject exact ties regularly so the tie-break path is exercised.
    if (trial % 3 == 0) {
      probs[2] = probs[5];
      probs[1] = probs[6];
    }
    if (trial % 7 == 0) {
      std::fill(probs.begin(), probs.end(), 0.25);
    }
    const double gamma = uniform_real(rng, 0.05, 0.95);
    const int k_max = 1 + static_cast<int>(uniform_index(rng, 4));

    const auto got = names(select_labels({vocab, probs, gamma, k_max}));
    CHECK(got == reference_rule(probs, vocab, gamma, k_max));
    CHECK(got.size() >= 1);
    CHECK(got.size() <= static_cast<std::size_t>(k_max));
  }
}

TEST_CASE("raising a selected class's probability never drops it") {
  auto rng = testutil::rng_stream(100);
  const Vocabulary vocab({"v0", "v1", "v2", "v3", "v4"});
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> probs(vocab.size());
    for (double& v : probs) v = uniform_real(rng, 0.0, 1.0);
    const ClassProbabilities base{vocab, probs, 0.5, 3};
    const auto before = select_labels(base);
    const ClassLabel& keep = before[uniform_index(rng, before.size())];
    const int idx = vocab.index_of(keep.name);
    std::vector<double> raised = probs;
    raised[static_cast<std::size_t>(idx)] =
        std::min(1.0, raised[static_cast<std::size_t>(idx)] + 0.2);
    const auto after = select_labels({vocab, raised, 0.5, 3});
    CHECK(std::find(after.begin(), after.end(), keep) != after.end());
  }
}
