#pragma once

#include "segdist/membership.hpp"
#include "segdist/ranked.hpp"
#include "segdist/region_graph.hpp"
#include "segdist/segment_space.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <set>
#include <unordered_map>
#include <utility>
#include <vector>

namespace segdist {

/// All segmentations that contain every segment of `finalized` and whose
/// segment through `base` includes `include` and avoids `exclude`.
///
/// The segment space currently being refined is built over `uncovered`, the
/// regions not claimed by a finalized segment. Masses factor as
///   log_prob = theta_log_prob + sum(finalized_log_masses).
struct SEvent {
  std::vector<RegionSet> finalized;
  std::vector<double> finalized_log_masses;
  int base = 0;
  RegionSet include;
  RegionSet exclude;
  RegionSet uncovered;
  double theta_log_prob = 0.0;
  double log_prob = 0.0;
};

struct SCover {
  std::vector<SEvent> events;
  double total_log_mass() const;
};

/// Start of every segmentation search: no finalized segments, base = region 0, mass 1.
/// Throws InputError when the graph is not connected.
SCover init_scover(const RegionGraph& graph);

/// The segment-space part of the event pins one segment.
bool theta_ground(const SEvent& event, const RegionGraph& graph);
/// The event names exactly one segmentation.
bool is_s_ground(const SEvent& event, const RegionGraph& graph);
/// finalized + {include}, ordered by lowest region id.
Segmentation ground_segmentation(const SEvent& event);

bool s_refines_before(const SEvent& a, const SEvent& b);

std::pair<SEvent, SEvent> split_sevent(const SEvent& event, int region, MembershipOdds odds);

/// Splits cover.events[event_index] on `region`.
/// Throws GroundEventError when the event's segment part is ground (rebase instead)
/// and InputError when `region` is not on the frontier within the uncovered regions.
SCover s_refine(SCover cover, std::size_t event_index, int region, MembershipOdds odds, const RegionGraph& graph);

/// Picks the refinement region (and its membership) for an event given its frontier.
using RegionChooser = std::function<std::optional<RegionChoice>(const SEvent&, const RegionSet& frontier)>;

/// Moves the ground segment into `finalized`, re-bases on the lowest uncovered
/// region and applies that space's first refinement. Isolated new bases are
/// finalized in turn. Returns one S-ground event or the two refined events.
/// Throws InputError if the segment part is not ground and ExhaustedError for an S-ground event.
std::vector<SEvent> rebase_event(const SEvent& event, const RegionGraph& graph, const RegionChooser& chooser);
SCover s_rebase(SCover cover, std::size_t event_index, const RegionGraph& graph, const RegionChooser& chooser);

using SegmentLogMasses = std::unordered_map<RegionSet, double, RegionSetHash>;

/// log P_theta(tau(I, E)) + sum over finalized T of log P_theta({T}).
/// Throws ConsistencyError when a finalized segment has no recorded mass.
double s_event_log_probability(const SEvent& event, const SegmentLogMasses& segment_masses);
double s_event_probability(const SEvent& event, const SegmentLogMasses& segment_masses);

/// Best-first construction of a segmentation-space cover.
class SegmentationSearch {
 public:
  struct Step {
    enum class Kind { refine, rebase };
    Kind kind = Kind::refine;
    SEvent parent;
    std::vector<SEvent> children;
  };
  using Observer = std::function<void(const Step&)>;

  SegmentationSearch(const RegionGraph& graph, MembershipSource& source, MembershipMode mode);

  void set_observer(Observer observer) { observer_ = std::move(observer); }

  bool step();
  bool exhausted() const noexcept { return open_.empty(); }
  bool satisfied(std::size_t n) const;

  RankedDistribution<Segmentation> run(std::size_t n);
  RankedDistribution<Segmentation> run_to_exhaustion();
  RankedDistribution<Segmentation> result(std::size_t n) const;

  SCover cover() const;
  double total_log_mass() const;
  std::size_t refinements() const noexcept { return refinements_; }

 private:
  std::optional<RegionChoice> choose(const SEvent& event, const RegionSet& candidates);
  void push(SEvent event);

  const RegionGraph* graph_;
  MembershipSource* source_;
  MembershipMode mode_;
  std::vector<SEvent> open_;  // heap under s_refines_before
  std::vector<SEvent> ground_;
  std::multiset<double, std::greater<>> ground_masses_;
  std::size_t refinements_ = 0;
  Observer observer_;
};

/// The n most probable segmentations of the graph by best-first refinement.
RankedDistribution<Segmentation> top_n_segmentations(const RegionGraph& graph, MembershipSource& source,
                                                     std::size_t n, MembershipMode mode);

}  // namespace segdist
