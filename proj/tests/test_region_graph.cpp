#include "segdist/errors.hpp"
#include "segdist/region_graph.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <random>

using namespace segdist;

namespace {

ImageGrid flat(int w, int h) { return ImageGrid(w, h, std::vector<double>(static_cast<std::size_t>(w) * h, 0.0)); }

RegionSet set_of(const RegionGraph& g, std::initializer_list<int> ids) { return RegionSet::from_ids(g.size(), ids); }

}  // namespace

TEST_CASE("image grid validates its shape") {
  CHECK_THROWS_AS(ImageGrid(0, 3, {}), InputError);
  CHECK_THROWS_AS(ImageGrid(2, 2, {1.0, 2.0, 3.0}), InputError);
  ImageGrid g(3, 2, {0, 1, 2, 3, 4, 5});
  CHECK(g.at(1, 0) == 3.0);
  CHECK(g.index(1, 2) == 5);
}

TEST_CASE("partition_grid on 100x100 with blocks of 10") {
  const RegionGraph g = partition_grid(flat(100, 100), 10);
  REQUIRE(g.size() == 100);
  for (const Region& r : g.regions()) CHECK(r.elements.size() == 100);
  CHECK(g.neighbors(55).size() == 4);
  CHECK(g.neighbors(0).size() == 2);
  CHECK(g.neighbors(5).size() == 3);
  CHECK(g.region_at(0, 0) == 0);
  CHECK(g.region_at(99, 99) == 99);
  CHECK(g.region_at(15, 37) == 13);
}

TEST_CASE("partition_grid keeps smaller edge blocks") {
  const RegionGraph g = partition_grid(flat(5, 5), 2);
  REQUIRE(g.size() == 9);
  std::vector<std::size_t> sizes;
  for (const Region& r : g.regions()) sizes.push_back(r.elements.size());
  CHECK(sizes == std::vector<std::size_t>{4, 4, 2, 4, 4, 2, 2, 2, 1});
  CHECK_THROWS_AS(partition_grid(flat(5, 5), 0), InputError);
}

TEST_CASE("partition_grid with block 1 gives one region per element") {
  const RegionGraph g = partition_grid(flat(3, 4), 1);
  CHECK(g.size() == 12);
  const auto nb = g.neighbors(4);
  CHECK(std::vector<int>(nb.begin(), nb.end()) == std::vector<int>{1, 3, 5, 7});
}

TEST_CASE("partition property and adjacency symmetry on assorted tilings") {
  for (int w : {1, 3, 7, 10}) {
    for (int h : {1, 4, 9}) {
      for (int b : {1, 2, 3, 5}) {
        const RegionGraph g = partition_grid(flat(w, h), b);
        std::vector<int> hits(static_cast<std::size_t>(w) * h, 0);
        for (const Region& r : g.regions())
          for (const Element& e : r.elements) ++hits[static_cast<std::size_t>(e.row) * w + e.col];
        for (int count : hits) CHECK(count == 1);
        for (std::size_t a = 0; a < g.size(); ++a) {
          for (int nb : g.neighbors(static_cast<int>(a))) {
            CHECK(nb != static_cast<int>(a));
            CHECK(g.adjacent(nb, static_cast<int>(a)));
          }
        }
      }
    }
  }
}

TEST_CASE("adjacency follows element 4-adjacency exactly") {
  // Regions: L-shape {0}, and the rest; diagonal-only contact must not count.
  std::vector<Region> regions{
      {0, {{0, 0}}},
      {1, {{0, 1}, {1, 1}}},
      {2, {{1, 0}}},
  };
  const RegionGraph g = RegionGraph::from_regions(regions, 2, 2);
  CHECK(g.adjacent(0, 1));
  CHECK(g.adjacent(0, 2));
  CHECK(g.adjacent(1, 2));

  std::vector<Region> diag{{0, {{0, 0}}}, {1, {{0, 1}}}, {2, {{1, 1}}}, {3, {{1, 0}}}};
  const RegionGraph d = RegionGraph::from_regions(diag, 2, 2);
  CHECK_FALSE(d.adjacent(0, 2));
  CHECK_FALSE(d.adjacent(1, 3));
  const RegionGraph d8 = RegionGraph::from_regions(diag, 2, 2, ElementAdjacency::eight);
  CHECK(d8.adjacent(0, 2));
}

TEST_CASE("from_regions rejects broken partitions") {
  CHECK_THROWS_AS(RegionGraph::from_regions({{0, {{0, 0}}}}, 2, 1), InputError);
  CHECK_THROWS_AS(RegionGraph::from_regions({{0, {{0, 0}, {0, 1}}}, {1, {{0, 1}}}}, 2, 1), InputError);
  CHECK_THROWS_AS(RegionGraph::from_regions({{1, {{0, 0}}}, {0, {{0, 1}}}}, 2, 1), InputError);
  CHECK_THROWS_AS(RegionGraph::from_regions({{0, {{0, 0}, {0, 2}}}, {1, {{0, 1}}}}, 3, 1), InputError);
  CHECK_THROWS_AS(RegionGraph::from_regions({{0, {{0, 0}, {0, 5}}}}, 2, 1), InputError);
}

TEST_CASE("from_edges rejects self loops and bad ids") {
  const std::vector<std::pair<int, int>> loop{{1, 1}};
  CHECK_THROWS_AS(RegionGraph::from_edges(2, loop), InputError);
  const std::vector<std::pair<int, int>> out{{0, 2}};
  CHECK_THROWS_AS(RegionGraph::from_edges(2, out), InputError);
  const RegionGraph g = RegionGraph::from_edges(1, {});
  CHECK(g.size() == 1);
  CHECK_FALSE(g.has_elements());
}

TEST_CASE("is_connected on the 3-path") {
  const RegionGraph g = oracle::from_edges(3, {{0, 1}, {1, 2}}).build();
  CHECK(is_connected(g.empty_set(), g));
  CHECK(is_connected(set_of(g, {1}), g));
  CHECK_FALSE(is_connected(set_of(g, {0, 2}), g));
  CHECK(is_connected(set_of(g, {0, 1, 2}), g));
  CHECK_THROWS_AS(set_of(g, {3}), InputError);
  CHECK_THROWS_AS(is_connected(RegionSet(4), g), InputError);
}

TEST_CASE("frontier examples") {
  const RegionGraph path = oracle::from_edges(3, {{0, 1}, {1, 2}}).build();
  CHECK(frontier(set_of(path, {1}), path.empty_set(), path, path.all()).ids() == std::vector<int>{0, 2});
  CHECK(frontier(set_of(path, {1}), set_of(path, {0, 2}), path, path.all()).empty());

  // 2x2 cycle a-b, b-d, d-c, c-a with a=0, b=1, c=2, d=3.
  const RegionGraph cycle = oracle::from_edges(4, {{0, 1}, {1, 3}, {3, 2}, {2, 0}}).build();
  CHECK(frontier(set_of(cycle, {0}), set_of(cycle, {1}), cycle, cycle.all()).ids() == std::vector<int>{2});

  CHECK(frontier(set_of(path, {1}), path.empty_set(), path, set_of(path, {1, 2})).ids() == std::vector<int>{2});
}

TEST_CASE("frontier precondition violations") {
  const RegionGraph g = oracle::from_edges(3, {{0, 1}, {1, 2}}).build();
  CHECK_THROWS_AS(frontier(g.empty_set(), g.empty_set(), g, g.all()), InputError);
  CHECK_THROWS_AS(frontier(set_of(g, {1}), set_of(g, {1}), g, g.all()), InputError);
  CHECK_THROWS_AS(frontier(set_of(g, {0}), g.empty_set(), g, set_of(g, {1, 2})), InputError);
  CHECK_THROWS_AS(frontier(set_of(g, {1}), set_of(g, {0}), g, set_of(g, {1, 2})), InputError);
}

TEST_CASE("frontier properties on random graphs") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 10)(rng);
    const oracle::Graph og = oracle::random_connected(n, 0.2, rng);
    const RegionGraph g = og.build();
    const oracle::Mask universe_mask = static_cast<oracle::Mask>(rng()) & oracle::all(og);
    if (universe_mask == 0) continue;
    const int base = oracle::ids(universe_mask).front();
    const auto segs = oracle::segments(base, og, universe_mask);
    const oracle::Mask inc = segs[std::uniform_int_distribution<std::size_t>(0, segs.size() - 1)(rng)];
    const oracle::Mask exc = static_cast<oracle::Mask>(rng()) & universe_mask & ~inc;
    const RegionSet I = RegionSet::from_ids(g.size(), oracle::ids(inc));
    const RegionSet E = RegionSet::from_ids(g.size(), oracle::ids(exc));
    const RegionSet U = RegionSet::from_ids(g.size(), oracle::ids(universe_mask));
    const RegionSet f = frontier(I, E, g, U);
    CHECK_FALSE(f.intersects(I | E));
    CHECK(oracle::mask(f.ids()) == (oracle::neighbours(inc, og) & universe_mask & ~exc));
    f.for_each([&](int r) {
      RegionSet grown = I;
      grown.insert(r);
      CHECK(is_connected(grown, g));
    });
  }
}

TEST_CASE("is_connected and component_of agree with the brute-force check") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 12)(rng);
    const oracle::Graph og = oracle::random_connected(n, 0.1, rng);
    const RegionGraph g = og.build();
    const oracle::Mask m = static_cast<oracle::Mask>(rng()) & oracle::all(og);
    const RegionSet s = RegionSet::from_ids(g.size(), oracle::ids(m));
    CHECK(is_connected(s, g) == oracle::connected(m, og));
    if (m != 0) {
      const RegionSet comp = component_of(s.first(), s, g);
      CHECK(is_connected(comp, g));
      CHECK(comp.is_subset_of(s));
      CHECK((oracle::neighbours(oracle::mask(comp.ids()), og) & m) == 0u);
    }
  }
}
