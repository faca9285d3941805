#include "segdist/segmentation_space.hpp"

#include "segdist/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <string>

namespace segdist {

double SCover::total_log_mass() const {
  std::vector<double> logs;
  logs.reserve(events.size());
  for (const SEvent& e : events) logs.push_back(e.log_prob);
  return log_sum_exp(logs);
}

SCover init_scover(const RegionGraph& graph) {
  if (!is_connected(graph.all(), graph)) throw InputError("region graph is not connected");
  SEvent root;
  root.base = 0;
  root.include = graph.empty_set();
  root.include.insert(0);
  root.exclude = graph.empty_set();
  root.uncovered = graph.all();
  return SCover{{std::move(root)}};
}

namespace {

RegionSet event_frontier(const SEvent& e, const RegionGraph& graph) {
  return frontier(e.include, e.exclude, graph, e.uncovered);
}

}  // namespace

bool theta_ground(const SEvent& event, const RegionGraph& graph) { return event_frontier(event, graph).empty(); }

bool is_s_ground(const SEvent& event, const RegionGraph& graph) {
  return event.uncovered == event.include && theta_ground(event, graph);
}

Segmentation ground_segmentation(const SEvent& event) {
  Segmentation s;
  s.reserve(event.finalized.size() + 1);
  for (const RegionSet& t : event.finalized) s.push_back(t.ids());
  s.push_back(event.include.ids());
  std::sort(s.begin(), s.end());
  return s;
}

bool s_refines_before(const SEvent& a, const SEvent& b) {
  if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
  if (a.finalized.size() != b.finalized.size()) return a.finalized.size() < b.finalized.size();
  for (std::size_t i = 0; i < a.finalized.size(); ++i)
    if (auto c = compare_ids(a.finalized[i], b.finalized[i]); c != 0) return c < 0;
  if (a.include.size() != b.include.size()) return a.include.size() < b.include.size();
  if (auto c = compare_ids(a.include, b.include); c != 0) return c < 0;
  return compare_ids(a.exclude, b.exclude) < 0;
}

std::pair<SEvent, SEvent> split_sevent(const SEvent& event, int region, MembershipOdds odds) {
  SEvent in = event;
  in.include.insert(region);
  in.theta_log_prob = event.theta_log_prob + odds.log_include();
  in.log_prob = event.log_prob + odds.log_include();
  SEvent out = event;
  out.exclude.insert(region);
  out.theta_log_prob = event.theta_log_prob + odds.log_exclude();
  out.log_prob = event.log_prob + odds.log_exclude();
  return {std::move(in), std::move(out)};
}

SCover s_refine(SCover cover, std::size_t event_index, int region, MembershipOdds odds, const RegionGraph& graph) {
  if (event_index >= cover.events.size()) throw InputError("event index out of range");
  const SEvent& event = cover.events[event_index];
  const RegionSet candidates = event_frontier(event, graph);
  if (candidates.empty()) throw GroundEventError("segment part of the event is ground; rebase instead");
  if (!candidates.contains(region))
    throw InputError("region " + std::to_string(region) + " is not on the event's frontier");
  auto [in, out] = split_sevent(event, region, odds);
  cover.events[event_index] = std::move(in);
  cover.events.insert(cover.events.begin() + static_cast<std::ptrdiff_t>(event_index) + 1, std::move(out));
  return cover;
}

std::vector<SEvent> rebase_event(const SEvent& event, const RegionGraph& graph, const RegionChooser& chooser) {
  if (!theta_ground(event, graph)) throw InputError("rebase requires a ground segment part");
  if (is_s_ground(event, graph)) throw ExhaustedError("event already names a single segmentation");

  SEvent cur = event;
  for (;;) {
    // sigma(F, I, E) = sigma(F + {I}, {R_j}, {}) for the lowest uncovered R_j.
    cur.finalized.push_back(cur.include);
    cur.finalized_log_masses.push_back(cur.theta_log_prob);
    cur.uncovered -= cur.include;
    const int next_base = cur.uncovered.first();
    cur.base = next_base;
    cur.include = graph.empty_set();
    cur.include.insert(next_base);
    cur.exclude = graph.empty_set();
    cur.theta_log_prob = 0.0;

    const RegionSet candidates = event_frontier(cur, graph);
    if (!candidates.empty()) {
      const auto choice = chooser(cur, candidates);
      if (!choice || !candidates.contains(choice->region))
        throw ConsistencyError("region chooser returned no frontier region");
      auto [in, out] = split_sevent(cur, choice->region, choice->odds);
      return {std::move(in), std::move(out)};
    }
    // New base is isolated within the uncovered regions: its segment is {R_j}.
    if (cur.uncovered == cur.include) return {std::move(cur)};
  }
}

SCover s_rebase(SCover cover, std::size_t event_index, const RegionGraph& graph, const RegionChooser& chooser) {
  if (event_index >= cover.events.size()) throw InputError("event index out of range");
  std::vector<SEvent> replaced = rebase_event(cover.events[event_index], graph, chooser);
  cover.events[event_index] = std::move(replaced.front());
  if (replaced.size() == 2)
    cover.events.insert(cover.events.begin() + static_cast<std::ptrdiff_t>(event_index) + 1,
                        std::move(replaced.back()));
  return cover;
}

double s_event_log_probability(const SEvent& event, const SegmentLogMasses& segment_masses) {
  double total = event.theta_log_prob;
  for (const RegionSet& t : event.finalized) {
    const auto it = segment_masses.find(t);
    if (it == segment_masses.end()) throw ConsistencyError("no recorded mass for a finalized segment");
    total += it->second;
  }
  return total;
}

double s_event_probability(const SEvent& event, const SegmentLogMasses& segment_masses) {
  return std::exp(s_event_log_probability(event, segment_masses));
}

namespace {

bool heap_less(const SEvent& a, const SEvent& b) { return s_refines_before(b, a); }

bool ranks_before(const RankedEntry<Segmentation>& a, const RankedEntry<Segmentation>& b) {
  if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
  return a.hypothesis < b.hypothesis;
}

}  // namespace

SegmentationSearch::SegmentationSearch(const RegionGraph& graph, MembershipSource& source, MembershipMode mode)
    : graph_(&graph), source_(&source), mode_(mode) {
  SCover start = init_scover(graph);
  push(std::move(start.events.front()));
}

std::optional<RegionChoice> SegmentationSearch::choose(const SEvent& event, const RegionSet& candidates) {
  return choose_region(candidates, event.base, event.include, *source_, mode_);
}

void SegmentationSearch::push(SEvent event) {
  if (is_s_ground(event, *graph_)) {
    ground_masses_.insert(event.log_prob);
    ground_.push_back(std::move(event));
  } else {
    open_.push_back(std::move(event));
    std::push_heap(open_.begin(), open_.end(), heap_less);
  }
}

bool SegmentationSearch::step() {
  if (open_.empty()) return false;
  std::pop_heap(open_.begin(), open_.end(), heap_less);
  SEvent event = std::move(open_.back());
  open_.pop_back();

  Step record;
  const RegionSet candidates = event_frontier(event, *graph_);
  if (candidates.empty()) {
    record.kind = Step::Kind::rebase;
    record.children =
        rebase_event(event, *graph_, [this](const SEvent& e, const RegionSet& c) { return choose(e, c); });
  } else {
    const auto choice = choose(event, candidates);
    auto [in, out] = split_sevent(event, choice->region, choice->odds);
    record.children.push_back(std::move(in));
    record.children.push_back(std::move(out));
  }
  ++refinements_;
  if (observer_) {
    record.parent = event;
    observer_(record);
  }
  for (SEvent& child : record.children) push(std::move(child));
  return true;
}

bool SegmentationSearch::satisfied(std::size_t n) const {
  if (open_.empty()) return true;
  if (n == 0 || ground_masses_.size() < n) return false;
  const double nth = *std::next(ground_masses_.begin(), static_cast<std::ptrdiff_t>(n - 1));
  return nth >= open_.front().log_prob;
}

RankedDistribution<Segmentation> SegmentationSearch::run(std::size_t n) {
  if (n < 1) throw InputError("n must be >= 1");
  while (!satisfied(n)) step();
  return result(n);
}

RankedDistribution<Segmentation> SegmentationSearch::run_to_exhaustion() {
  while (step()) {
  }
  return result(ground_.size());
}

RankedDistribution<Segmentation> SegmentationSearch::result(std::size_t n) const {
  RankedDistribution<Segmentation> dist;
  dist.entries.reserve(ground_.size());
  for (const SEvent& g : ground_) dist.entries.push_back({ground_segmentation(g), g.log_prob});
  std::sort(dist.entries.begin(), dist.entries.end(), ranks_before);
  std::vector<double> logs;
  logs.reserve(open_.size());
  for (const SEvent& e : open_) logs.push_back(e.log_prob);
  dist.residual_log_mass = log_sum_exp(logs);
  dist.guaranteed = satisfied(n);
  dist.requested = n;
  dist.refinements = refinements_;
  return dist;
}

SCover SegmentationSearch::cover() const {
  SCover c;
  c.events.reserve(ground_.size() + open_.size());
  c.events.insert(c.events.end(), ground_.begin(), ground_.end());
  c.events.insert(c.events.end(), open_.begin(), open_.end());
  return c;
}

double SegmentationSearch::total_log_mass() const {
  std::vector<double> logs;
  logs.reserve(ground_.size() + open_.size());
  for (const SEvent& e : ground_) logs.push_back(e.log_prob);
  for (const SEvent& e : open_) logs.push_back(e.log_prob);
  return log_sum_exp(logs);
}

RankedDistribution<Segmentation> top_n_segmentations(const RegionGraph& graph, MembershipSource& source,
                                                     std::size_t n, MembershipMode mode) {
  SegmentationSearch search(graph, source, mode);
  return search.run(n);
}

}  // namespace segdist
