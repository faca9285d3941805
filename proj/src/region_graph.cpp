#include "segdist/region_graph.hpp"

#include "segdist/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

namespace segdist {

ImageGrid::ImageGrid(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (width < 1 || height < 1)
    throw InputError("image dimensions must be positive, got " + std::to_string(width) + "x" + std::to_string(height));
  if (values_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw InputError("image has " + std::to_string(values_.size()) + " values, expected " +
                     std::to_string(static_cast<std::size_t>(width) * static_cast<std::size_t>(height)));
}

namespace {

template <class Fn>
void for_each_element_neighbor(int row, int col, int width, int height, ElementAdjacency adjacency, Fn&& fn) {
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      if (dr == 0 && dc == 0) continue;
      if (adjacency == ElementAdjacency::four && dr != 0 && dc != 0) continue;
      const int r = row + dr;
      const int c = col + dc;
      if (r >= 0 && r < height && c >= 0 && c < width) fn(r, c);
    }
  }
}

}  // namespace

RegionGraph RegionGraph::from_regions(std::vector<Region> regions, int width, int height,
                                      ElementAdjacency adjacency) {
  if (width < 1 || height < 1) throw InputError("grid dimensions must be positive");
  RegionGraph g;
  g.width_ = width;
  g.height_ = height;
  g.label_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), -1);

  for (std::size_t i = 0; i < regions.size(); ++i) {
    const Region& reg = regions[i];
    if (reg.id != static_cast<int>(i))
      throw InputError("region ids must be 0..n-1 in order; found " + std::to_string(reg.id) + " at position " +
                       std::to_string(i));
    if (reg.elements.empty()) throw InputError("region " + std::to_string(reg.id) + " is empty");
    for (const Element& e : reg.elements) {
      if (e.row < 0 || e.row >= height || e.col < 0 || e.col >= width)
        throw InputError("region " + std::to_string(reg.id) + " has an element outside the grid");
      int& slot = g.label_[static_cast<std::size_t>(e.row) * width + e.col];
      if (slot != -1)
        throw InputError("element (" + std::to_string(e.row) + "," + std::to_string(e.col) +
                         ") belongs to two regions");
      slot = reg.id;
    }
  }
  if (std::find(g.label_.begin(), g.label_.end(), -1) != g.label_.end())
    throw InputError("regions do not cover every element of the grid");

  // Each region must be internally connected.
  std::vector<char> seen(g.label_.size(), 0);
  for (const Region& reg : regions) {
    std::deque<Element> queue{reg.elements.front()};
    seen[static_cast<std::size_t>(reg.elements.front().row) * width + reg.elements.front().col] = 1;
    std::size_t reached = 0;
    while (!queue.empty()) {
      const Element e = queue.front();
      queue.pop_front();
      ++reached;
      for_each_element_neighbor(e.row, e.col, width, height, adjacency, [&](int r, int c) {
        const auto k = static_cast<std::size_t>(r) * width + c;
        if (!seen[k] && g.label_[k] == reg.id) {
          seen[k] = 1;
          queue.push_back({r, c});
        }
      });
    }
    if (reached != reg.elements.size()) throw InputError("region " + std::to_string(reg.id) + " is not connected");
  }

  g.neighbors_.assign(regions.size(), {});
  for (int row = 0; row < height; ++row) {
    for (int col = 0; col < width; ++col) {
      const int a = g.label_[static_cast<std::size_t>(row) * width + col];
      for_each_element_neighbor(row, col, width, height, adjacency, [&](int r, int c) {
        const int b = g.label_[static_cast<std::size_t>(r) * width + c];
        if (a != b) g.neighbors_[a].push_back(b);
      });
    }
  }
  for (auto& nb : g.neighbors_) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  g.regions_ = std::move(regions);
  return g;
}

RegionGraph RegionGraph::from_edges(int count, std::span<const std::pair<int, int>> edges) {
  if (count < 1) throw InputError("graph needs at least one region");
  RegionGraph g;
  g.neighbors_.assign(static_cast<std::size_t>(count), {});
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= count || b >= count)
      throw InputError("edge (" + std::to_string(a) + "," + std::to_string(b) + ") out of range");
    if (a == b) throw InputError("self-loop on region " + std::to_string(a));
    g.neighbors_[a].push_back(b);
    g.neighbors_[b].push_back(a);
  }
  for (auto& nb : g.neighbors_) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  g.regions_.resize(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) g.regions_[i].id = i;
  return g;
}

void RegionGraph::check_id(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= neighbors_.size())
    throw InputError("region id " + std::to_string(id) + " out of range [0, " + std::to_string(neighbors_.size()) +
                     ")");
}

const Region& RegionGraph::region(int id) const {
  check_id(id);
  return regions_[id];
}

std::span<const int> RegionGraph::neighbors(int id) const {
  check_id(id);
  return neighbors_[id];
}

bool RegionGraph::adjacent(int a, int b) const {
  check_id(a);
  check_id(b);
  return std::binary_search(neighbors_[a].begin(), neighbors_[a].end(), b);
}

int RegionGraph::region_at(int row, int col) const {
  if (label_.empty()) throw InputError("graph has no element map");
  if (row < 0 || row >= height_ || col < 0 || col >= width_) throw InputError("element outside the grid");
  return label_[static_cast<std::size_t>(row) * width_ + col];
}

RegionGraph partition_grid(const ImageGrid& image, int block_size, ElementAdjacency adjacency) {
  if (block_size < 1) throw InputError("block size must be >= 1, got " + std::to_string(block_size));
  const int w = image.width();
  const int h = image.height();
  const int cols = (w + block_size - 1) / block_size;
  const int rows = (h + block_size - 1) / block_size;
  std::vector<Region> regions;
  regions.reserve(static_cast<std::size_t>(rows) * cols);
  for (int br = 0; br < rows; ++br) {
    for (int bc = 0; bc < cols; ++bc) {
      Region reg;
      reg.id = static_cast<int>(regions.size());
      for (int r = br * block_size; r < std::min(h, (br + 1) * block_size); ++r)
        for (int c = bc * block_size; c < std::min(w, (bc + 1) * block_size); ++c) reg.elements.push_back({r, c});
      regions.push_back(std::move(reg));
    }
  }
  return RegionGraph::from_regions(std::move(regions), w, h, adjacency);
}

RegionSet component_of(int seed, const RegionSet& universe, const RegionGraph& graph) {
  if (universe.capacity() != graph.size()) throw InputError("universe does not match graph size");
  if (!universe.contains(seed)) throw InputError("seed region " + std::to_string(seed) + " not in universe");
  RegionSet reached = graph.empty_set();
  reached.insert(seed);
  std::vector<int> stack{seed};
  while (!stack.empty()) {
    const int r = stack.back();
    stack.pop_back();
    for (int nb : graph.neighbors(r)) {
      if (universe.contains(nb) && !reached.contains(nb)) {
        reached.insert(nb);
        stack.push_back(nb);
      }
    }
  }
  return reached;
}

bool is_connected(const RegionSet& regions, const RegionGraph& graph) {
  if (regions.capacity() != graph.size()) throw InputError("region set does not match graph size");
  if (regions.size() <= 1) return true;
  return component_of(regions.first(), regions, graph) == regions;
}

RegionSet frontier(const RegionSet& include, const RegionSet& exclude, const RegionGraph& graph,
                   const RegionSet& universe) {
  if (include.capacity() != graph.size() || exclude.capacity() != graph.size() ||
      universe.capacity() != graph.size())
    throw InputError("frontier: region sets do not match graph size");
  if (include.empty()) throw InputError("frontier: include set is empty");
  if (!include.is_subset_of(universe) || !exclude.is_subset_of(universe))
    throw InputError("frontier: include/exclude not contained in the universe");
  if (include.intersects(exclude)) throw InputError("frontier: include and exclude overlap");

  RegionSet out = graph.empty_set();
  include.for_each([&](int r) {
    for (int nb : graph.neighbors(r))
      if (universe.contains(nb) && !include.contains(nb) && !exclude.contains(nb)) out.insert(nb);
  });
  return out;
}

}  // namespace segdist
