#pragma once

#include "segdist/region_set.hpp"

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace segdist {

/// Dense row-major range image: one height value per element.
///
/// Element (row, col) sits at x1 = col, x2 = row, x3 = value.
class ImageGrid {
 public:
  ImageGrid() = default;
  /// Throws InputError unless width, height >= 1 and values.size() == width * height.
  ImageGrid(int width, int height, std::vector<double> values);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }

  double at(int row, int col) const { return values_[index(row, col)]; }
  double& at(int row, int col) { return values_[index(row, col)]; }
  std::span<const double> values() const noexcept { return values_; }

  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(col);
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> values_;
};

struct Element {
  int row = 0;
  int col = 0;
  friend bool operator==(const Element&, const Element&) = default;
};

struct Region {
  int id = 0;
  std::vector<Element> elements;
};

/// Element neighbourhood used when deciding region connectivity and adjacency.
enum class ElementAdjacency { four, eight };

/// The initial partition of an image into regions plus the region adjacency relation.
///
/// Immutable after construction. Graphs built with `from_edges` carry no
/// elements and exist for purely combinatorial work.
class RegionGraph {
 public:
  /// Validates that `regions` partition the width x height grid, that ids are
  /// 0..n-1 in order, and that every region is connected.
  static RegionGraph from_regions(std::vector<Region> regions, int width, int height,
                                  ElementAdjacency adjacency = ElementAdjacency::four);

  /// Abstract graph on `count` regions. Self-loops and out-of-range ids are rejected.
  static RegionGraph from_edges(int count, std::span<const std::pair<int, int>> edges);

  std::size_t size() const noexcept { return neighbors_.size(); }
  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool has_elements() const noexcept { return !label_.empty(); }

  const Region& region(int id) const;
  std::span<const Region> regions() const noexcept { return regions_; }
  std::span<const int> neighbors(int id) const;
  bool adjacent(int a, int b) const;

  /// Region owning the element; only valid when has_elements().
  int region_at(int row, int col) const;

  RegionSet empty_set() const { return RegionSet(size()); }
  RegionSet all() const { return RegionSet::full(size()); }

 private:
  RegionGraph() = default;
  void check_id(int id) const;

  int width_ = 0;
  int height_ = 0;
  std::vector<Region> regions_;
  std::vector<std::vector<int>> neighbors_;  // sorted
  std::vector<int> label_;                   // row-major region id per element
};

/// Tiles the image with block_size x block_size squares, row-major ids.
/// Edge blocks shrink when block_size does not divide the image.
RegionGraph partition_grid(const ImageGrid& image, int block_size,
                           ElementAdjacency adjacency = ElementAdjacency::four);

/// True iff the induced subgraph on `regions` is connected. Empty and singleton sets are connected.
bool is_connected(const RegionSet& regions, const RegionGraph& graph);

/// Connected component of `seed` inside `universe`.
RegionSet component_of(int seed, const RegionSet& universe, const RegionGraph& graph);

/// Regions of `universe` outside include and exclude that touch some member of `include`.
///
/// Throws InputError when include is empty, include or exclude leave the
/// universe, or include and exclude overlap.
RegionSet frontier(const RegionSet& include, const RegionSet& exclude, const RegionGraph& graph,
                   const RegionSet& universe);

}  // namespace segdist
