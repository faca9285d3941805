#include "segdist/segment_space.hpp"

#include "segdist/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <string>

namespace segdist {

double TCover::total_log_mass() const {
  std::vector<double> logs;
  logs.reserve(events.size());
  for (const TEvent& e : events) logs.push_back(e.log_prob);
  return log_sum_exp(logs);
}

bool is_ground(const TEvent& event, const RegionGraph& graph, const RegionSet& universe) {
  return frontier(event.include, event.exclude, graph, universe).empty();
}

bool refines_before(const TEvent& a, const TEvent& b) {
  if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
  const std::size_t na = a.include.size();
  const std::size_t nb = b.include.size();
  if (na != nb) return na < nb;
  if (auto c = compare_ids(a.include, b.include); c != 0) return c < 0;
  return compare_ids(a.exclude, b.exclude) < 0;
}

TCover init_cover(int base, const RegionGraph& graph, const RegionSet& universe) {
  if (universe.capacity() != graph.size()) throw InputError("universe does not match graph size");
  if (!universe.contains(base)) throw InputError("base region " + std::to_string(base) + " not in universe");
  if (!is_connected(universe, graph)) throw InputError("universe is not connected");
  TCover cover{base, universe, {}};
  TEvent root{base, graph.empty_set(), graph.empty_set(), 0.0};
  root.include.insert(base);
  cover.events.push_back(std::move(root));
  return cover;
}

TCover init_cover(int base, const RegionGraph& graph) { return init_cover(base, graph, graph.all()); }

std::pair<TEvent, TEvent> split_event(const TEvent& event, int region, MembershipOdds odds) {
  TEvent in = event;
  in.include.insert(region);
  in.log_prob = event.log_prob + odds.log_include();
  TEvent out = event;
  out.exclude.insert(region);
  out.log_prob = event.log_prob + odds.log_exclude();
  return {std::move(in), std::move(out)};
}

TCover t_refine(TCover cover, std::size_t event_index, int region, MembershipOdds odds, const RegionGraph& graph) {
  if (event_index >= cover.events.size()) throw InputError("event index out of range");
  const TEvent& event = cover.events[event_index];
  const RegionSet candidates = frontier(event.include, event.exclude, graph, cover.universe);
  if (candidates.empty()) throw GroundEventError("cannot refine a ground segment event");
  if (!candidates.contains(region))
    throw InputError("region " + std::to_string(region) + " is not on the event's frontier");
  auto [in, out] = split_event(event, region, odds);
  cover.events[event_index] = std::move(in);
  cover.events.insert(cover.events.begin() + static_cast<std::ptrdiff_t>(event_index) + 1, std::move(out));
  return cover;
}

TCover t_refine(TCover cover, std::size_t event_index, int region, double p_include, const RegionGraph& graph) {
  return t_refine(std::move(cover), event_index, region, MembershipOdds::from_probability(p_include), graph);
}

std::optional<RegionChoice> choose_region(const RegionSet& candidates, int base, const RegionSet& include,
                                          MembershipSource& source, MembershipMode mode) {
  std::optional<RegionChoice> best;
  candidates.for_each([&](int r) {
    const MembershipOdds odds = source.evaluate(mode, base, include, r);
    // Strict comparison keeps the lowest id on ties (ids arrive ascending).
    if (!best || odds.decisiveness() > best->odds.decisiveness()) best = RegionChoice{r, odds};
  });
  return best;
}

std::optional<RefinementChoice> select_refinement(const TCover& cover, const RegionGraph& graph,
                                                  MembershipSource& source, MembershipMode mode) {
  std::optional<std::size_t> pick;
  for (std::size_t i = 0; i < cover.events.size(); ++i) {
    if (is_ground(cover.events[i], graph, cover.universe)) continue;
    if (!pick || refines_before(cover.events[i], cover.events[*pick])) pick = i;
  }
  if (!pick) return std::nullopt;
  const TEvent& e = cover.events[*pick];
  const auto choice =
      choose_region(frontier(e.include, e.exclude, graph, cover.universe), e.base, e.include, source, mode);
  return RefinementChoice{*pick, choice->region, choice->odds};
}

namespace {

bool heap_less(const TEvent& a, const TEvent& b) { return refines_before(b, a); }

bool ranks_before(const RankedEntry<Segment>& a, const RankedEntry<Segment>& b) {
  if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
  return a.hypothesis < b.hypothesis;
}

}  // namespace

SegmentSearch::SegmentSearch(int base, const RegionGraph& graph, MembershipSource& source, MembershipMode mode)
    : SegmentSearch(base, graph, graph.all(), source, mode) {}

SegmentSearch::SegmentSearch(int base, const RegionGraph& graph, const RegionSet& universe,
                             MembershipSource& source, MembershipMode mode)
    : graph_(&graph), source_(&source), mode_(mode), base_(base), universe_(universe) {
  TCover start = init_cover(base, graph, universe);
  push(std::move(start.events.front()));
}

void SegmentSearch::push(TEvent event) {
  if (is_ground(event, *graph_, universe_)) {
    ground_masses_.insert(event.log_prob);
    ground_.push_back(std::move(event));
  } else {
    open_.push_back(std::move(event));
    std::push_heap(open_.begin(), open_.end(), heap_less);
  }
}

bool SegmentSearch::step() {
  if (open_.empty()) return false;
  std::pop_heap(open_.begin(), open_.end(), heap_less);
  TEvent event = std::move(open_.back());
  open_.pop_back();

  const auto choice = choose_region(frontier(event.include, event.exclude, *graph_, universe_), event.base,
                                    event.include, *source_, mode_);
  auto [in, out] = split_event(event, choice->region, choice->odds);
  ++refinements_;
  if (observer_) observer_(Step{event, in, out});
  push(std::move(in));
  push(std::move(out));
  return true;
}

bool SegmentSearch::satisfied(std::size_t n) const {
  if (open_.empty()) return true;
  if (n == 0 || ground_masses_.size() < n) return false;
  const double nth = *std::next(ground_masses_.begin(), static_cast<std::ptrdiff_t>(n - 1));
  return nth >= open_.front().log_prob;
}

RankedDistribution<Segment> SegmentSearch::run(std::size_t n) {
  if (n < 1) throw InputError("n must be >= 1");
  while (!satisfied(n)) step();
  return result(n);
}

RankedDistribution<Segment> SegmentSearch::run_to_exhaustion() {
  while (step()) {
  }
  return result(ground_.size());
}

RankedDistribution<Segment> SegmentSearch::result(std::size_t n) const {
  RankedDistribution<Segment> dist;
  dist.entries.reserve(ground_.size());
  for (const TEvent& g : ground_) dist.entries.push_back({g.include.ids(), g.log_prob});
  std::sort(dist.entries.begin(), dist.entries.end(), ranks_before);
  std::vector<double> logs;
  logs.reserve(open_.size());
  for (const TEvent& e : open_) logs.push_back(e.log_prob);
  dist.residual_log_mass = log_sum_exp(logs);
  dist.guaranteed = satisfied(n);
  dist.requested = n;
  dist.refinements = refinements_;
  return dist;
}

TCover SegmentSearch::cover() const {
  TCover c{base_, universe_, {}};
  c.events.reserve(ground_.size() + open_.size());
  c.events.insert(c.events.end(), ground_.begin(), ground_.end());
  c.events.insert(c.events.end(), open_.begin(), open_.end());
  return c;
}

RankedDistribution<Segment> top_n_segments(int base, const RegionGraph& graph, MembershipSource& source,
                                           std::size_t n, MembershipMode mode) {
  SegmentSearch search(base, graph, source, mode);
  return search.run(n);
}

}  // namespace segdist
