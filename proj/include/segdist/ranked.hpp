#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace segdist {

/// Sorted region ids of one segment.
using Segment = std::vector<int>;
/// Segments of one segmentation, each sorted, ordered by their lowest id.
using Segmentation = std::vector<Segment>;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(sum(exp(x))) with the usual max shift; -inf for an empty input.
double log_sum_exp(std::span<const double> logs);
/// log(e^a + e^b)
double log_add(double a, double b);

template <class Hypothesis>
struct RankedEntry {
  Hypothesis hypothesis;
  double log_prob = kNegInf;
};

/// Ground events discovered by a best-first search, most probable first.
///
/// `entries` holds every ground event found (ties ordered lexicographically by
/// region ids); `residual_log_mass` is the mass still inside unrefined events.
/// `guaranteed` means the first `requested` entries are provably the most
/// probable hypotheses of the whole space.
template <class Hypothesis>
struct RankedDistribution {
  std::vector<RankedEntry<Hypothesis>> entries;
  double residual_log_mass = kNegInf;
  bool guaranteed = false;
  std::size_t requested = 0;
  std::size_t refinements = 0;

  double explicit_log_mass() const {
    std::vector<double> logs;
    logs.reserve(entries.size());
    for (const auto& e : entries) logs.push_back(e.log_prob);
    return log_sum_exp(logs);
  }
};

struct EntropyReport {
  double explicit_entropy_bits = 0.0;
  double residual_mass = 0.0;
};

/// Shannon entropy (bits) of the renormalised entry masses; residual reported separately.
/// Throws InputError when there are no entries.
EntropyReport entropy(std::span<const double> entry_log_probs, double residual_log_mass);

template <class Hypothesis>
EntropyReport entropy(const RankedDistribution<Hypothesis>& dist) {
  std::vector<double> logs;
  logs.reserve(dist.entries.size());
  for (const auto& e : dist.entries) logs.push_back(e.log_prob);
  return entropy(logs, dist.residual_log_mass);
}

}  // namespace segdist
