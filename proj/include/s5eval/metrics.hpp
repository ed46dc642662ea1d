#pragma once

#include <map>
#include <vector>

#include "s5eval/labels.hpp"
#include "s5eval/waveform.hpp"

namespace s5eval {

/// Absolute guard added to both energies of every log ratio, so exact
/// estimates produce a large finite value instead of a division by zero.
inline constexpr double kEpsilonEnergy = 1e-12;

/// Reported metric values (SDR, SI-SDR and every improvement component) are
/// clamped to +-kClampDb so aggregates stay finite.
inline constexpr double kClampDb = 100.0;

/// Assignment search is exhaustive; instances larger than this are refused.
inline constexpr int kDefaultAssignmentCeiling = 8;

/// Penalty values, in dB, credited to mispredicted labels. The defaults make
/// wrong labels contribute nothing to the class-aware mean; p_ref is the
/// per-count-deviation penalty of the penalized permutation-invariant metric.
struct PenaltyConfig {
  double p_fn = 0.0;
  double p_fp = 0.0;
  double p_ref = 0.0;
};

/// Which per-pair improvement the set-level metrics aggregate.
enum class MetricKind { Sdri, SiSdri };

enum class LabelStatus { TruePositive, FalseNegative, FalsePositive };

struct CaComponent {
  LabelStatus status = LabelStatus::TruePositive;
  double component_db = 0.0;
};

/// Class-aware metric outcome for one mixture: the headline value plus the
/// per-label breakdown over the union of reference and estimated labels.
struct CaResult {
  double value_db = 0.0;
  std::map<ClassLabel, CaComponent> per_label;
  int union_size = 0;

  int count(LabelStatus status) const;
  /// Mean of the true-positive components alone (0.0 when there is none).
  double tp_mean_db() const;
};

/// 10*log10((|x|^2 + eps) / (|x - xhat|^2 + eps)), clamped for reporting.
/// A zero-energy reference is an error, never a clamped value.
double sdr(const Waveform& estimate, const Waveform& reference);

/// sdr(estimate, reference) - sdr(mixture, reference), computed on the raw
/// guarded ratios and clamped once on the difference. The mixture itself as
/// the estimate scores exactly 0.
double sdri(const Waveform& estimate, const Waveform& reference,
            const Waveform& mixture);

/// Scale-invariant SDR: the reference is rescaled by a = <xhat,x>/|x|^2
/// before the ratio. Clamped for reporting.
double si_sdr(const Waveform& estimate, const Waveform& reference);

double si_sdri(const Waveform& estimate, const Waveform& reference,
               const Waveform& mixture);

/// Per-pair improvement selected by `kind`.
double improvement(MetricKind kind, const Waveform& estimate,
                   const Waveform& reference, const Waveform& mixture);

namespace detail {
// Unclamped guarded ratios; building blocks for the clamped-on-report ops.
double raw_sdr(const Waveform& estimate, const Waveform& reference);
double raw_si_sdr(const Waveform& estimate, const Waveform& reference);
double clamp_db(double value);
}  // namespace detail

/// Class-aware metric: estimates and references are aligned by label over
/// C u Chat. A label present on both sides contributes its improvement
/// against the mixture reference channel; a reference-only label contributes
/// p_fn, an estimate-only label p_fp. The value is the mean over |C u Chat|.
/// Duplicate labels on either side are rejected.
CaResult ca_metric(const LabeledSources& estimates,
                   const LabeledSources& references, const Waveform& mixture,
                   MetricKind kind, const PenaltyConfig& penalties = {});

/// Conventional permutation-invariant metric, zero-padding flavor: missing
/// estimates are padded with silence, surplus estimates are dropped by
/// searching size-K subsets; the mean per-pair improvement is maximized over
/// all injective assignments. Ties resolve to the lexicographically first
/// assignment.
double pi_padded_metric(const std::vector<Waveform>& estimates,
                        const std::vector<Waveform>& references,
                        const Waveform& mixture, MetricKind kind,
                        int assignment_ceiling = kDefaultAssignmentCeiling);

/// Conventional permutation-invariant metric, count-penalty flavor:
///   (best sum over min(K, Khat) pairs + |K - Khat| * p_ref) / max(K, Khat).
double pi_penalized_metric(const std::vector<Waveform>& estimates,
                           const std::vector<Waveform>& references,
                           const Waveform& mixture, MetricKind kind,
                           const PenaltyConfig& penalties = {},
                           int assignment_ceiling = kDefaultAssignmentCeiling);

}  // namespace s5eval
