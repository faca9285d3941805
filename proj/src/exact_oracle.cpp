#include "segdist/exact_oracle.hpp"

#include "segdist/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace segdist {

std::string_view to_string(PriorScheme scheme) {
  switch (scheme) {
    case PriorScheme::membership: return "membership";
    case PriorScheme::segmentation_uniform: return "segmentation-uniform";
    case PriorScheme::segment_uniform: return "segment-uniform";
  }
  return "?";
}

std::vector<Segment> enumerate_segments(int base, const RegionGraph& graph, const std::optional<RegionSet>& universe) {
  if (graph.size() > kSegmentEnumerationCap)
    throw SizeError("segment enumeration is capped at " + std::to_string(kSegmentEnumerationCap) + " regions, graph has " +
                    std::to_string(graph.size()));
  const RegionSet space = universe.value_or(graph.all());
  if (!space.contains(base)) throw InputError("base region " + std::to_string(base) + " not in universe");

  // Grow connected sets one adjacent region at a time; `seen` removes duplicates.
  std::unordered_set<RegionSet, RegionSetHash> seen;
  RegionSet start = graph.empty_set();
  start.insert(base);
  std::vector<RegionSet> stack{start};
  seen.insert(start);
  while (!stack.empty()) {
    const RegionSet current = std::move(stack.back());
    stack.pop_back();
    current.for_each([&](int r) {
      for (int nb : graph.neighbors(r)) {
        if (!space.contains(nb) || current.contains(nb)) continue;
        RegionSet grown = current;
        grown.insert(nb);
        if (seen.insert(grown).second) stack.push_back(std::move(grown));
      }
    });
  }
  std::vector<Segment> out;
  out.reserve(seen.size());
  for (const RegionSet& s : seen) out.push_back(s.ids());
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

void partitions_of(const RegionSet& remaining, const RegionGraph& graph, Segmentation& prefix,
                   std::vector<Segmentation>& out) {
  if (remaining.empty()) {
    out.push_back(prefix);
    return;
  }
  for (Segment& seg : enumerate_segments(remaining.first(), graph, remaining)) {
    RegionSet rest = remaining - RegionSet::from_ids(graph.size(), seg);
    prefix.push_back(std::move(seg));
    partitions_of(rest, graph, prefix, out);
    prefix.pop_back();
  }
}

void check_partition_cap(const RegionGraph& graph) {
  if (graph.size() > kSegmentationEnumerationCap)
    throw SizeError("segmentation enumeration is capped at " + std::to_string(kSegmentationEnumerationCap) +
                    " regions, graph has " + std::to_string(graph.size()));
}

// Log mass of segment `seg` grown from its lowest region inside `universe`.
double product_log_mass(const Segment& seg, const RegionSet& universe, const RegionGraph& graph,
                        MembershipSource& source) {
  const int base = seg.front();
  const RegionSet members = RegionSet::from_ids(graph.size(), seg);
  double total = 0.0;
  for (int r : seg)
    if (r != base) total += source.pairwise(base, r).log_include();
  RegionSet boundary = graph.empty_set();
  for (int r : seg)
    for (int nb : graph.neighbors(r))
      if (universe.contains(nb) && !members.contains(nb)) boundary.insert(nb);
  boundary.for_each([&](int r) { total += source.pairwise(base, r).log_exclude(); });
  return total;
}

template <class H>
void finish(ExactDistribution<H>& dist) {
  std::vector<double> logs;
  logs.reserve(dist.hypotheses.size());
  for (const auto& h : dist.hypotheses) logs.push_back(h.log_prob);
  dist.raw_log_total = log_sum_exp(logs);
  if (std::abs(std::expm1(dist.raw_log_total)) > 1e-9) {
    dist.normalized = true;
    for (auto& h : dist.hypotheses) h.log_prob -= dist.raw_log_total;
  }
}

template <class SegmentMass>
ExactDistribution<Segmentation> by_canonical_segments(const RegionGraph& graph, PriorScheme scheme,
                                                      SegmentMass&& segment_mass) {
  ExactDistribution<Segmentation> dist;
  dist.scheme = scheme;
  for (Segmentation& s : enumerate_segmentations(graph)) {
    // Lowest-id order is the canonical rebase order.
    RegionSet universe = graph.all();
    double total = 0.0;
    for (const Segment& seg : s) {
      total += segment_mass(seg, universe);
      for (int r : seg) universe.erase(r);
    }
    dist.hypotheses.push_back({std::move(s), total});
  }
  finish(dist);
  return dist;
}

}  // namespace

std::vector<Segmentation> enumerate_segmentations(const RegionGraph& graph) {
  check_partition_cap(graph);
  std::vector<Segmentation> out;
  Segmentation prefix;
  partitions_of(graph.all(), graph, prefix, out);
  std::sort(out.begin(), out.end());
  return out;
}

ExactDistribution<Segmentation> exact_masses(const RegionGraph& graph, MembershipSource& source,
                                             MembershipMode mode) {
  if (mode != MembershipMode::pairwise)
    throw InputError("exact masses are defined for pairwise membership only");
  check_partition_cap(graph);
  return by_canonical_segments(graph, PriorScheme::membership, [&](const Segment& seg, const RegionSet& universe) {
    return product_log_mass(seg, universe, graph, source);
  });
}

ExactDistribution<Segment> exact_segment_masses(int base, const RegionGraph& graph, MembershipSource& source) {
  ExactDistribution<Segment> dist;
  for (Segment& seg : enumerate_segments(base, graph)) {
    // The product formula grows from `base`, which need not be the lowest id here.
    const RegionSet members = RegionSet::from_ids(graph.size(), seg);
    double total = 0.0;
    for (int r : seg)
      if (r != base) total += source.pairwise(base, r).log_include();
    RegionSet boundary = graph.empty_set();
    for (int r : seg)
      for (int nb : graph.neighbors(r))
        if (!members.contains(nb)) boundary.insert(nb);
    boundary.for_each([&](int r) { total += source.pairwise(base, r).log_exclude(); });
    dist.hypotheses.push_back({std::move(seg), total});
  }
  finish(dist);
  return dist;
}

ExactDistribution<Segmentation> segmentation_uniform_masses(const RegionGraph& graph) {
  ExactDistribution<Segmentation> dist;
  dist.scheme = PriorScheme::segmentation_uniform;
  auto all = enumerate_segmentations(graph);
  const double log_p = -std::log(static_cast<double>(all.size()));
  for (Segmentation& s : all) dist.hypotheses.push_back({std::move(s), log_p});
  finish(dist);
  return dist;
}

ExactDistribution<Segmentation> segment_uniform_masses(const RegionGraph& graph) {
  std::unordered_map<RegionSet, double, RegionSetHash> space_sizes;
  return by_canonical_segments(graph, PriorScheme::segment_uniform, [&](const Segment& seg, const RegionSet& universe) {
    auto it = space_sizes.find(universe);
    if (it == space_sizes.end())
      it = space_sizes.emplace(universe, static_cast<double>(enumerate_segments(seg.front(), graph, universe).size()))
               .first;
    return -std::log(it->second);
  });
}

ExactDistribution<Segmentation> membership_uniform_masses(const RegionGraph& graph) {
  FixedMembership half(0.5);
  return by_canonical_segments(graph, PriorScheme::membership, [&](const Segment& seg, const RegionSet& universe) {
    return product_log_mass(seg, universe, graph, half);
  });
}

double total_variation(const ExactDistribution<Segmentation>& a, const ExactDistribution<Segmentation>& b) {
  if (a.hypotheses.size() != b.hypotheses.size()) throw InputError("distributions cover different spaces");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.hypotheses.size(); ++i) {
    if (a.hypotheses[i].hypothesis != b.hypotheses[i].hypothesis)
      throw InputError("distributions enumerate hypotheses in different orders");
    sum += std::abs(std::exp(a.hypotheses[i].log_prob) - std::exp(b.hypotheses[i].log_prob));
  }
  return 0.5 * sum;
}

PriorComparison prior_comparison(const RegionGraph& graph) {
  PriorComparison c;
  c.segmentation_uniform = segmentation_uniform_masses(graph);
  c.segment_uniform = segment_uniform_masses(graph);
  c.membership_uniform = membership_uniform_masses(graph);
  c.tv_membership_vs_segmentation = total_variation(c.membership_uniform, c.segmentation_uniform);
  c.tv_segment_vs_segmentation = total_variation(c.segment_uniform, c.segmentation_uniform);
  c.tv_membership_vs_segment = total_variation(c.membership_uniform, c.segment_uniform);
  return c;
}

}  // namespace segdist
