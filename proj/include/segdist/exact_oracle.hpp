#pragma once

#include "segdist/membership.hpp"
#include "segdist/ranked.hpp"
#include "segdist/region_graph.hpp"

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace segdist {

inline constexpr std::size_t kSegmentEnumerationCap = 16;
inline constexpr std::size_t kSegmentationEnumerationCap = 12;

/// Every connected region set containing `base` (within `universe`, default all regions).
/// Sorted lexicographically. Throws SizeError above kSegmentEnumerationCap regions.
std::vector<Segment> enumerate_segments(int base, const RegionGraph& graph,
                                        const std::optional<RegionSet>& universe = std::nullopt);

/// Every partition of the regions into connected segments, sorted lexicographically.
/// Throws SizeError above kSegmentationEnumerationCap regions.
std::vector<Segmentation> enumerate_segmentations(const RegionGraph& graph);

enum class PriorScheme { membership, segmentation_uniform, segment_uniform };
std::string_view to_string(PriorScheme scheme);

template <class Hypothesis>
struct ExactEntry {
  Hypothesis hypothesis;
  double log_prob = kNegInf;
};

/// A fully enumerated distribution, in enumeration order.
template <class Hypothesis>
struct ExactDistribution {
  std::vector<ExactEntry<Hypothesis>> hypotheses;
  PriorScheme scheme = PriorScheme::membership;
  double raw_log_total = 0.0;  // before any normalisation
  bool normalized = false;     // set only when the raw total missed 1 by more than 1e-9
};

/// Product-formula masses of every segmentation under pairwise membership with
/// canonical (lowest uncovered id) bases:
///   P(S) = prod_T [ prod_{R in T - b_T} p(b_T, R) * prod_{R in dT} (1 - p(b_T, R)) ]
/// where dT is T's frontier among regions not in earlier segments.
/// Throws InputError for aggregate mode (its masses are order-relative).
ExactDistribution<Segmentation> exact_masses(const RegionGraph& graph, MembershipSource& source,
                                             MembershipMode mode = MembershipMode::pairwise);

/// Same product formula over the segments of one base region.
ExactDistribution<Segment> exact_segment_masses(int base, const RegionGraph& graph, MembershipSource& source);

/// 1/|Pi| for every segmentation.
ExactDistribution<Segmentation> segmentation_uniform_masses(const RegionGraph& graph);
/// Each segment gets 1/|Theta| within its own canonical segment space, combined by the product rule.
ExactDistribution<Segmentation> segment_uniform_masses(const RegionGraph& graph);
/// Every membership decision at 1/2.
ExactDistribution<Segmentation> membership_uniform_masses(const RegionGraph& graph);

/// Total variation distance between two distributions over the same enumeration.
double total_variation(const ExactDistribution<Segmentation>& a, const ExactDistribution<Segmentation>& b);

struct PriorComparison {
  ExactDistribution<Segmentation> segmentation_uniform;
  ExactDistribution<Segmentation> segment_uniform;
  ExactDistribution<Segmentation> membership_uniform;
  double tv_membership_vs_segmentation = 0.0;
  double tv_segment_vs_segmentation = 0.0;
  double tv_membership_vs_segment = 0.0;
};

PriorComparison prior_comparison(const RegionGraph& graph);

}  // namespace segdist
