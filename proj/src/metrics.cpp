#include "s5eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <stdexcept>

#include "s5eval/dsp.hpp"

namespace s5eval {

namespace detail {

double clamp_db(double value) {
  return std::clamp(value, -kClampDb, kClampDb);
}

namespace {

void check_pair(const Waveform& estimate, const Waveform& reference,
                const char* who) {
  require_valid(estimate, std::string(who) + ": estimate");
  require_valid(reference, std::string(who) + ": reference");
  if (estimate.size() != reference.size()) {
    throw std::invalid_argument(std::string(who) + ": length mismatch");
  }
  if (estimate.sample_rate != reference.sample_rate) {
    throw std::invalid_argument(std::string(who) + ": sample-rate mismatch");
  }
}

}  // namespace

double raw_sdr(const Waveform& estimate, const Waveform& reference) {
  check_pair(estimate, reference, "sdr");
  const double ref_energy = energy(reference);
  if (ref_energy <= 0.0) {
    throw std::invalid_argument("sdr: zero-energy reference");
  }
  double err_energy = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double d = reference.samples[i] - estimate.samples[i];
    err_energy += d * d;
  }
  return 10.0 *
         std::log10((ref_energy + kEpsilonEnergy) /
                    (err_energy + kEpsilonEnergy));
}

double raw_si_sdr(const Waveform& estimate, const Waveform& reference) {
  check_pair(estimate, reference, "si_sdr");
  const double ref_energy = energy(reference);
  if (ref_energy <= 0.0) {
    throw std::invalid_argument("si_sdr: zero-energy reference");
  }
  const double alpha = dot(estimate.samples, reference.samples) / ref_energy;
  const double scaled_energy = alpha * alpha * ref_energy;
  double err_energy = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double d = alpha * reference.samples[i] - estimate.samples[i];
    err_energy += d * d;
  }
  return 10.0 *
         std::log10((scaled_energy + kEpsilonEnergy) /
                    (err_energy + kEpsilonEnergy));
}

}  // namespace detail

int CaResult::count(LabelStatus status) const {
  int n = 0;
  for (const auto& [label, comp] : per_label) {
    if (comp.status == status) ++n;
  }
  return n;
}

double CaResult::tp_mean_db() const {
  double sum = 0.0;
  int n = 0;
  for (const auto& [label, comp] : per_label) {
    if (comp.status == LabelStatus::TruePositive) {
      sum += comp.component_db;
      ++n;
    }
  }
  return n == 0 ? 0.0 : sum / n;
}

double sdr(const Waveform& estimate, const Waveform& reference) {
  return detail::clamp_db(detail::raw_sdr(estimate, reference));
}

double sdri(const Waveform& estimate, const Waveform& reference,
            const Waveform& mixture) {
  // The clamp is applied once, to the reported improvement; the two terms
  // stay raw so an exact estimate lands on the clamp regardless of how well
  // the mixture already matches the reference.
  return detail::clamp_db(detail::raw_sdr(estimate, reference) -
                          detail::raw_sdr(mixture, reference));
}

double si_sdr(const Waveform& estimate, const Waveform& reference) {
  return detail::clamp_db(detail::raw_si_sdr(estimate, reference));
}

double si_sdri(const Waveform& estimate, const Waveform& reference,
               const Waveform& mixture) {
  return detail::clamp_db(detail::raw_si_sdr(estimate, reference) -
                          detail::raw_si_sdr(mixture, reference));
}

double improvement(MetricKind kind, const Waveform& estimate,
                   const Waveform& reference, const Waveform& mixture) {
  return kind == MetricKind::Sdri ? sdri(estimate, reference, mixture)
                                  : si_sdri(estimate, reference, mixture);
}

namespace {

void check_penalties(const PenaltyConfig& penalties) {
  if (!std::isfinite(penalties.p_fn) || !std::isfinite(penalties.p_fp) ||
      !std::isfinite(penalties.p_ref)) {
    throw std::invalid_argument("penalties must be finite");
  }
}

void check_distinct_labels(const LabeledSources& side, const char* who) {
  std::set<ClassLabel> seen;
  for (const auto& [label, wave] : side.entries) {
    if (label.name.empty()) {
      throw std::invalid_argument(std::string(who) + ": empty label");
    }
    if (!seen.insert(label).second) {
      throw std::invalid_argument(std::string(who) + ": duplicate label '" +
                                  label.name + "'");
    }
  }
}

void check_against_mixture(const Waveform& wave, const Waveform& mixture,
                           const std::string& what) {
  if (wave.size() != mixture.size()) {
    throw std::invalid_argument(what + ": length differs from mixture");
  }
  if (wave.sample_rate != mixture.sample_rate) {
    throw std::invalid_argument(what + ": sample rate differs from mixture");
  }
}

// Exhaustively enumerates injective maps rows -> columns in lexicographic
// order of the assignment vector and keeps the first one attaining the best
// total, which pins the tie-break deterministically.
struct AssignmentSearch {
  const std::vector<std::vector<double>>& pair_value;  // rows x cols
  std::size_t cols;
  std::vector<int> current, best;
  std::vector<char> used;
  double best_total = -std::numeric_limits<double>::infinity();

  AssignmentSearch(const std::vector<std::vector<double>>& values,
                   std::size_t column_count)
      : pair_value(values), cols(column_count) {}

  void run() {
    current.assign(pair_value.size(), -1);
    used.assign(cols, 0);
    descend(0, 0.0);
  }

  void descend(std::size_t row, double total) {
    if (row == pair_value.size()) {
      if (total > best_total) {
        best_total = total;
        best = current;
      }
      return;
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (used[c]) continue;
      used[c] = 1;
      current[row] = static_cast<int>(c);
      descend(row + 1, total + pair_value[row][c]);
      used[c] = 0;
    }
  }
};

void check_assignment_ceiling(std::size_t k, std::size_t k_hat, int ceiling) {
  if (static_cast<int>(std::max(k, k_hat)) > ceiling) {
    throw std::invalid_argument(
        "assignment search refused: max(K, Khat) exceeds the exhaustive "
        "enumeration ceiling of " +
        std::to_string(ceiling));
  }
}

}  // namespace

CaResult ca_metric(const LabeledSources& estimates,
                   const LabeledSources& references, const Waveform& mixture,
                   MetricKind kind, const PenaltyConfig& penalties) {
  check_penalties(penalties);
  check_distinct_labels(estimates, "ca_metric: estimates");
  check_distinct_labels(references, "ca_metric: references");
  if (references.entries.empty()) {
    throw std::invalid_argument("ca_metric: no references");
  }
  require_valid(mixture, "ca_metric: mixture");
  for (const auto& [label, wave] : references.entries) {
    check_against_mixture(wave, mixture, "ca_metric: reference '" + label.name + "'");
  }
  for (const auto& [label, wave] : estimates.entries) {
    check_against_mixture(wave, mixture, "ca_metric: estimate '" + label.name + "'");
  }

  CaResult result;
  for (const auto& [label, wave] : references.entries) {
    const Waveform* est = estimates.find(label);
    if (est != nullptr) {
      result.per_label[label] = CaComponent{
          LabelStatus::TruePositive, improvement(kind, *est, wave, mixture)};
    } else {
      result.per_label[label] =
          CaComponent{LabelStatus::FalseNegative, penalties.p_fn};
    }
  }
  for (const auto& [label, wave] : estimates.entries) {
    if (references.find(label) == nullptr) {
      result.per_label[label] =
          CaComponent{LabelStatus::FalsePositive, penalties.p_fp};
    }
  }

  result.union_size = static_cast<int>(result.per_label.size());
  double sum = 0.0;
  for (const auto& [label, comp] : result.per_label) sum += comp.component_db;
  result.value_db = sum / result.union_size;
  return result;
}

double pi_padded_metric(const std::vector<Waveform>& estimates,
                        const std::vector<Waveform>& references,
                        const Waveform& mixture, MetricKind kind,
                        int assignment_ceiling) {
  if (references.empty()) {
    throw std::invalid_argument("pi_padded_metric: empty references");
  }
  require_valid(mixture, "pi_padded_metric: mixture");
  const std::size_t k = references.size();
  const std::size_t k_hat = estimates.size();
  check_assignment_ceiling(k, k_hat, assignment_ceiling);

  // Pad with silence up to K when under-counted; over-counted estimates are
  // handled by letting the injective search skip columns.
  const std::size_t cols = std::max(k, k_hat);
  const Waveform silence = Waveform::zeros(mixture.size(), mixture.sample_rate);

  std::vector<std::vector<double>> pair_value(k, std::vector<double>(cols));
  for (std::size_t i = 0; i < k; ++i) {
    check_against_mixture(references[i], mixture,
                          "pi_padded_metric: reference");
    for (std::size_t j = 0; j < cols; ++j) {
      const Waveform& est = j < k_hat ? estimates[j] : silence;
      if (j < k_hat) {
        check_against_mixture(est, mixture, "pi_padded_metric: estimate");
      }
      pair_value[i][j] = improvement(kind, est, references[i], mixture);
    }
  }

  AssignmentSearch search{pair_value, cols};
  search.run();
  return search.best_total / static_cast<double>(k);
}

double pi_penalized_metric(const std::vector<Waveform>& estimates,
                           const std::vector<Waveform>& references,
                           const Waveform& mixture, MetricKind kind,
                           const PenaltyConfig& penalties,
                           int assignment_ceiling) {
  check_penalties(penalties);
  if (references.empty()) {
    throw std::invalid_argument("pi_penalized_metric: empty references");
  }
  require_valid(mixture, "pi_penalized_metric: mixture");
  const std::size_t k = references.size();
  const std::size_t k_hat = estimates.size();
  check_assignment_ceiling(k, k_hat, assignment_ceiling);

  for (const auto& r : references) {
    check_against_mixture(r, mixture, "pi_penalized_metric: reference");
  }
  for (const auto& e : estimates) {
    check_against_mixture(e, mixture, "pi_penalized_metric: estimate");
  }

  const double count_penalty =
      std::abs(static_cast<double>(k) - static_cast<double>(k_hat)) *
      penalties.p_ref;
  const double norm = static_cast<double>(std::max(k, k_hat));
  if (std::min(k, k_hat) == 0) return count_penalty / norm;

  // The smaller side indexes the rows so the search stays injective.
  const bool estimates_small = k_hat <= k;
  const std::size_t rows = estimates_small ? k_hat : k;
  const std::size_t cols = estimates_small ? k : k_hat;
  std::vector<std::vector<double>> pair_value(rows, std::vector<double>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const Waveform& est = estimates_small ? estimates[i] : estimates[j];
      const Waveform& ref = estimates_small ? references[j] : references[i];
      pair_value[i][j] = improvement(kind, est, ref, mixture);
    }
  }

  AssignmentSearch search{pair_value, cols};
  search.run();
  return (search.best_total + count_penalty) / norm;
}

}  // namespace s5eval
