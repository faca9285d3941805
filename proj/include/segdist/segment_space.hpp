#pragma once

#include "segdist/evidence.hpp"
#include "segdist/membership.hpp"
#include "segdist/ranked.hpp"
#include "segdist/region_graph.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace segdist {

/// The set of all connected segments containing `base` that include every
/// region of `include` and none of `exclude`, with its probability mass.
struct TEvent {
  int base = 0;
  RegionSet include;
  RegionSet exclude;
  double log_prob = 0.0;
};

/// Disjoint events partitioning the segments of `base` within `universe`.
struct TCover {
  int base = 0;
  RegionSet universe;
  std::vector<TEvent> events;

  double total_log_mass() const;
};

/// True when no further region can join the include set: the event is the single segment `include`.
bool is_ground(const TEvent& event, const RegionGraph& graph, const RegionSet& universe);

/// Best-first order on open events: larger mass, then smaller include set, then
/// lexicographically smaller include ids, then exclude ids.
bool refines_before(const TEvent& a, const TEvent& b);

/// Cover holding the single event "every segment of base" with mass 1.
/// Throws InputError unless base is in the universe and the universe is connected.
TCover init_cover(int base, const RegionGraph& graph, const RegionSet& universe);
TCover init_cover(int base, const RegionGraph& graph);

/// Splits `event` on `region` into (include branch, exclude branch). No validation.
std::pair<TEvent, TEvent> split_event(const TEvent& event, int region, MembershipOdds odds);

/// Replaces cover.events[event_index] by its two refined events.
/// Throws GroundEventError for a ground event and InputError when `region` is not on its frontier.
TCover t_refine(TCover cover, std::size_t event_index, int region, MembershipOdds odds, const RegionGraph& graph);
TCover t_refine(TCover cover, std::size_t event_index, int region, double p_include, const RegionGraph& graph);

struct RegionChoice {
  int region = -1;
  MembershipOdds odds;
};

/// Candidate whose membership is farthest from 1/2; ties go to the lowest id. Empty candidates give nullopt.
std::optional<RegionChoice> choose_region(const RegionSet& candidates, int base, const RegionSet& include,
                                          MembershipSource& source, MembershipMode mode);

struct RefinementChoice {
  std::size_t event_index = 0;
  int region = -1;
  MembershipOdds odds;
};

/// Most probable non-ground event of the cover and its refinement region; nullopt when every event is ground.
std::optional<RefinementChoice> select_refinement(const TCover& cover, const RegionGraph& graph,
                                                  MembershipSource& source, MembershipMode mode);

/// Best-first construction of a segment-space cover for one base region.
class SegmentSearch {
 public:
  struct Step {
    TEvent parent;
    TEvent included;
    TEvent excluded;
  };
  using Observer = std::function<void(const Step&)>;

  SegmentSearch(int base, const RegionGraph& graph, MembershipSource& source, MembershipMode mode);
  SegmentSearch(int base, const RegionGraph& graph, const RegionSet& universe, MembershipSource& source,
                MembershipMode mode);

  void set_observer(Observer observer) { observer_ = std::move(observer); }

  /// Refines the most probable open event once. Returns false when nothing is left to refine.
  bool step();
  bool exhausted() const noexcept { return open_.empty(); }
  /// The n most probable ground events are known and none can be beaten by an open event.
  bool satisfied(std::size_t n) const;

  RankedDistribution<Segment> run(std::size_t n);
  RankedDistribution<Segment> run_to_exhaustion();
  RankedDistribution<Segment> result(std::size_t n) const;

  TCover cover() const;
  std::size_t refinements() const noexcept { return refinements_; }

 private:
  const RegionGraph* graph_;
  MembershipSource* source_;
  MembershipMode mode_;
  int base_;
  RegionSet universe_;
  std::vector<TEvent> open_;  // heap under refines_before
  std::vector<TEvent> ground_;
  std::multiset<double, std::greater<>> ground_masses_;
  std::size_t refinements_ = 0;
  Observer observer_;

  void push(TEvent event);
};

/// The n most probable segments containing `base`, by best-first refinement.
RankedDistribution<Segment> top_n_segments(int base, const RegionGraph& graph, MembershipSource& source,
                                           std::size_t n, MembershipMode mode);

}  // namespace segdist
