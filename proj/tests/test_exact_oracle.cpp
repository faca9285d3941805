#include "segdist/errors.hpp"
#include "segdist/evidence.hpp"
#include "segdist/exact_oracle.hpp"
#include "segdist/segment_space.hpp"
#include "segdist/segmentation_space.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

using namespace segdist;

namespace {

double total_mass(const ExactDistribution<Segmentation>& d) {
  std::vector<double> logs;
  for (const auto& h : d.hypotheses) logs.push_back(h.log_prob);
  return std::exp(log_sum_exp(logs));
}

oracle::Graph complete(int n) {
  oracle::Graph g{n, std::vector<oracle::Mask>(n, 0)};
  for (int a = 0; a < n; ++a) g.adj[a] = oracle::all(g) & ~(1u << a);
  return g;
}

}  // namespace

TEST_CASE("segment enumeration examples") {
  const RegionGraph path = oracle::from_edges(3, {{0, 1}, {1, 2}}).build();
  CHECK(enumerate_segments(1, path).size() == 4);
  CHECK(enumerate_segments(0, path).size() == 3);
  CHECK(enumerate_segments(0, RegionGraph::from_edges(1, {})).size() == 1);
  const RegionGraph k4 = complete(4).build();
  for (int b = 0; b < 4; ++b) CHECK(enumerate_segments(b, k4).size() == 8);
  CHECK_THROWS_AS(enumerate_segments(3, path, RegionSet::from_ids(3, {0, 1})), InputError);
}

TEST_CASE("segmentation enumeration examples") {
  CHECK(enumerate_segmentations(oracle::from_edges(3, {{0, 1}, {1, 2}}).build()).size() == 4);
  CHECK(enumerate_segmentations(oracle::from_edges(4, {{0, 1}, {1, 3}, {3, 2}, {2, 0}}).build()).size() == 12);
  CHECK(enumerate_segmentations(RegionGraph::from_edges(1, {})).size() == 1);
  const RegionGraph path4 = oracle::from_edges(4, {{0, 1}, {1, 2}, {2, 3}}).build();
  const auto all = enumerate_segmentations(path4);
  CHECK(all.size() == 8);
  CHECK(std::find(all.begin(), all.end(), Segmentation{{0}, {1}, {2}, {3}}) != all.end());
  CHECK(std::find(all.begin(), all.end(), Segmentation{{0, 1, 2, 3}}) != all.end());
  CHECK(std::is_sorted(all.begin(), all.end()));
}

TEST_CASE("enumeration caps") {
  CHECK_THROWS_AS(enumerate_segments(0, oracle::grid(1, 17).build()), SizeError);
  CHECK_NOTHROW(enumerate_segments(0, oracle::grid(1, 16).build()));
  CHECK_THROWS_AS(enumerate_segmentations(oracle::grid(1, 13).build()), SizeError);
  CHECK_NOTHROW(enumerate_segmentations(oracle::grid(3, 4).build()));
  FixedMembership even(0.5);
  CHECK_THROWS_AS(exact_masses(oracle::grid(1, 13).build(), even), SizeError);
  CHECK_THROWS_AS(prior_comparison(oracle::grid(1, 13).build()), SizeError);
}

TEST_CASE("enumerations match brute-force subset and partition scans") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 9)(rng);
    const oracle::Graph og = oracle::random_connected(n, 0.2, rng);
    const RegionGraph g = og.build();
    for (int base = 0; base < n; ++base) {
      std::vector<Segment> expected;
      for (oracle::Mask m : oracle::segments(base, og, oracle::all(og))) expected.push_back(oracle::ids(m));
      std::sort(expected.begin(), expected.end());
      CHECK(enumerate_segments(base, g) == expected);
    }
    std::vector<Segmentation> expected;
    for (const auto& p : oracle::segmentations(og)) expected.push_back(oracle::to_segmentation(p));
    std::sort(expected.begin(), expected.end());
    const auto got = enumerate_segmentations(g);
    CHECK(got == expected);
    CHECK(enumerate_segmentations(g) == got);
  }
}

TEST_CASE("exact masses on the 3-path with even memberships") {
  const RegionGraph path = oracle::from_edges(3, {{0, 1}, {1, 2}}).build();
  FixedMembership even(0.5);
  const auto d = exact_masses(path, even);
  REQUIRE(d.hypotheses.size() == 4);
  for (const auto& h : d.hypotheses) CHECK(std::exp(h.log_prob) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_FALSE(d.normalized);
  CHECK(std::abs(d.raw_log_total) < 1e-15);
  CHECK_THROWS_AS(exact_masses(path, even, MembershipMode::aggregate), InputError);
}

TEST_CASE("exact masses equal the independent product formula and sum to one") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 8)(rng);
    const oracle::Graph og = oracle::random_connected(n, 0.3, rng);
    const oracle::Table table = oracle::random_table(n, rng);
    oracle::TableSource source(table);
    const auto d = exact_masses(og.build(), source);
    CHECK_FALSE(d.normalized);
    CHECK(std::abs(std::expm1(d.raw_log_total)) < 1e-9);
    for (const auto& h : d.hypotheses) {
      std::vector<oracle::Mask> parts;
      for (const Segment& seg : h.hypothesis) parts.push_back(oracle::mask(seg));
      CHECK(std::abs(std::exp(h.log_prob) / oracle::segmentation_mass(parts, og, table) - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("exact segment masses match exhaustive segment search") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 10)(rng);
    const oracle::Graph og = oracle::random_connected(n, 0.2, rng);
    const RegionGraph g = og.build();
    oracle::TableSource source(oracle::random_table(n, rng));
    const int base = static_cast<int>(rng() % n);
    const auto exact = exact_segment_masses(base, g, source);
    SegmentSearch search(base, g, source, MembershipMode::pairwise);
    const auto found = search.run_to_exhaustion();
    REQUIRE(found.entries.size() == exact.hypotheses.size());
    std::map<Segment, double> by;
    for (const auto& e : found.entries) by[e.hypothesis] = e.log_prob;
    for (const auto& h : exact.hypotheses) CHECK(std::abs(std::expm1(by.at(h.hypothesis) - h.log_prob)) < 1e-9);
  }
}

TEST_CASE("two-plane 6-region scene: the ground-truth partition has the largest mass") {
  // 2x3 regions of 4x4 elements; left column of regions on one plane, the rest on another.
  std::mt19937_64 rng(6);
  std::normal_distribution<double> noise(0.0, 0.1);
  std::vector<double> z;
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 12; ++c) z.push_back((c < 4 ? 0.5 * c + 1.0 : -0.3 * r + 0.2 * c) + noise(rng));
  const ImageGrid img(12, 8, z);
  const RegionGraph g = partition_grid(img, 4);
  auto model = std::make_shared<const PlanarEvidence>(PlanarGaussianModel{0.01, 1e4}, g, img);
  EvidenceMembership source({model}, PriorSpec::uniform());
  const auto d = exact_masses(g, source);
  const auto best = std::max_element(d.hypotheses.begin(), d.hypotheses.end(),
                                     [](const auto& a, const auto& b) { return a.log_prob < b.log_prob; });
  const Segmentation truth{{0, 3}, {1, 2, 4, 5}};
  CHECK(best->hypothesis == truth);
  const auto top = top_n_segmentations(g, source, 1, MembershipMode::pairwise);
  CHECK(top.entries.front().hypothesis == truth);
  CHECK(std::abs(std::expm1(top.entries.front().log_prob - best->log_prob)) < 1e-9);
}

TEST_CASE("uniform prior schemes") {
  const RegionGraph cycle = oracle::from_edges(4, {{0, 1}, {1, 3}, {3, 2}, {2, 0}}).build();
  const auto u = segmentation_uniform_masses(cycle);
  REQUIRE(u.hypotheses.size() == 12);
  for (const auto& h : u.hypotheses) CHECK(std::exp(h.log_prob) == doctest::Approx(1.0 / 12).epsilon(1e-14));
  CHECK(u.scheme == PriorScheme::segmentation_uniform);
  CHECK(to_string(PriorScheme::segment_uniform) == "segment-uniform");
}

TEST_CASE("prior comparison on the 3-path") {
  const RegionGraph path = oracle::from_edges(3, {{0, 1}, {1, 2}}).build();
  const PriorComparison c = prior_comparison(path);
  // Hand-derived: segment uniformity gives {012}=1/3, {01}{2}=1/3, {0}{12}=1/6, {0}{1}{2}=1/6.
  std::map<Segmentation, double> seg;
  for (const auto& h : c.segment_uniform.hypotheses) seg[h.hypothesis] = std::exp(h.log_prob);
  CHECK(seg.at({{0, 1, 2}}) == doctest::Approx(1.0 / 3));
  CHECK(seg.at({{0, 1}, {2}}) == doctest::Approx(1.0 / 3));
  CHECK(seg.at({{0}, {1, 2}}) == doctest::Approx(1.0 / 6));
  CHECK(seg.at({{0}, {1}, {2}}) == doctest::Approx(1.0 / 6));
  CHECK(c.tv_membership_vs_segmentation == doctest::Approx(0.0));
  CHECK(c.tv_segment_vs_segmentation == doctest::Approx(1.0 / 6));
  CHECK(c.tv_membership_vs_segment == doctest::Approx(1.0 / 6));
}

TEST_CASE("prior comparison coincides on a single region and always normalises") {
  const PriorComparison one = prior_comparison(RegionGraph::from_edges(1, {}));
  CHECK(one.tv_membership_vs_segmentation == 0.0);
  CHECK(one.tv_segment_vs_segmentation == 0.0);
  CHECK(one.tv_membership_vs_segment == 0.0);

  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 8)(rng);
    const PriorComparison c = prior_comparison(oracle::random_connected(n, 0.3, rng).build());
    CHECK(std::abs(total_mass(c.segmentation_uniform) - 1.0) < 1e-12);
    CHECK(std::abs(total_mass(c.segment_uniform) - 1.0) < 1e-12);
    CHECK(std::abs(total_mass(c.membership_uniform) - 1.0) < 1e-12);
  }
}

TEST_CASE("total variation requires matching enumerations") {
  const auto a = segmentation_uniform_masses(oracle::from_edges(3, {{0, 1}, {1, 2}}).build());
  const auto b = segmentation_uniform_masses(oracle::from_edges(4, {{0, 1}, {1, 2}, {2, 3}}).build());
  CHECK_THROWS_AS(total_variation(a, b), InputError);
  CHECK(total_variation(a, a) == 0.0);
}
