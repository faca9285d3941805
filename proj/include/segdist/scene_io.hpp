#pragma once

#include "segdist/ranked.hpp"
#include "segdist/region_graph.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace segdist {

/// Square-based pyramid on a flat background plane x3 = 0.
///
/// The apex sits on element (height/2, width/2). The base is an axis-aligned
/// square of half-width base_fraction * min(width, height) / 2, so
/// base_fraction = 1 fills the inscribed square.
struct SceneSpec {
  int width = 100;
  int height = 100;
  double pyramid_height = 12.0;
  double noise_variance = 0.1;
  std::uint64_t seed = 1;
  double base_fraction = 0.6;

  void validate() const;
};

/// Surface indices used for ground-truth labels.
enum Surface : int { background = 0, face_top = 1, face_right = 2, face_bottom = 3, face_left = 4 };
inline constexpr int kSurfaceCount = 5;

/// Noiseless pyramid plus i.i.d. N(0, noise_variance) noise drawn row-major from GaussianStream(seed).
ImageGrid generate_scene(const SceneSpec& spec);
ImageGrid noiseless_scene(const SceneSpec& spec);

/// Height of surface `s` extended as an infinite plane, at element (row, col).
double surface_height(const SceneSpec& spec, Surface s, int row, int col);

/// Per element, bit k set when the element lies in the closed patch of surface k.
std::vector<std::uint8_t> surface_membership(const SceneSpec& spec);
/// Per element, the lowest-index surface whose closed patch contains it.
std::vector<int> ground_truth_labels(const SceneSpec& spec);

/// Small grid scene for oracle checks: rows x cols blocks of block x block
/// elements, each block drawn on one of up to three random planes, plus noise.
ImageGrid random_planar_scene(int rows, int cols, int block, double noise_variance, std::uint64_t seed);

// Range image text format: "width height" then `height` rows of `width` values.
ImageGrid parse_range_image(std::istream& in);
ImageGrid read_range_image(const std::filesystem::path& path);
void format_range_image(std::ostream& out, const ImageGrid& image);
void write_range_image(const ImageGrid& image, const std::filesystem::path& path);

/// Per-element integer labels with the same dimensions as an image.
struct LabelMap {
  int width = 0;
  int height = 0;
  std::vector<int> labels;
};

LabelMap region_labels(const RegionGraph& graph);
/// Each element labelled with the lowest region id of its segment.
LabelMap segmentation_labels(const RegionGraph& graph, const Segmentation& segmentation);

LabelMap parse_label_map(std::istream& in);
LabelMap read_label_map(const std::filesystem::path& path);
void format_label_map(std::ostream& out, const LabelMap& map);
void write_label_map(const LabelMap& map, const std::filesystem::path& path);

/// Deterministic colour for a label.
struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};
Rgb label_color(int label);

/// Binary P6 portmap, one colour per distinct label.
void format_render(std::ostream& out, const LabelMap& map);
void write_render(const LabelMap& map, const std::filesystem::path& path);

/// A ranked distribution as stored on disk (masses as natural logs in memory, log2 on disk).
struct StoredDistribution {
  std::string kind;  // "segments" or "segmentations"
  std::map<std::string, std::string> attributes;
  std::vector<RankedEntry<Segmentation>> entries;
  double residual_log_mass = kNegInf;
  double unlisted_log_mass = kNegInf;
  bool guaranteed = false;
};

/// Keeps the first `n` entries and folds the rest into unlisted_log_mass.
StoredDistribution to_stored(const RankedDistribution<Segment>& dist, std::size_t n,
                             std::map<std::string, std::string> attributes = {});
StoredDistribution to_stored(const RankedDistribution<Segmentation>& dist, std::size_t n,
                             std::map<std::string, std::string> attributes = {});

void format_distribution(std::ostream& out, const StoredDistribution& dist);
void write_distribution(const StoredDistribution& dist, const std::filesystem::path& path);
StoredDistribution parse_distribution(std::istream& in);
StoredDistribution read_distribution(const std::filesystem::path& path);

}  // namespace segdist
