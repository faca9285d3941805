#include "segdist/scene_io.hpp"

#include "segdist/errors.hpp"
#include "segdist/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

namespace segdist {

namespace {

struct Geometry {
  double cx, cy, half_width;
};

Geometry geometry(const SceneSpec& spec) {
  return {static_cast<double>(spec.width / 2), static_cast<double>(spec.height / 2),
          spec.base_fraction * std::min(spec.width, spec.height) / 2.0};
}

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <class T>
T parse_number(std::string_view token, int line, std::string_view what) {
  T value{};
  const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || end != token.data() + token.size())
    throw ParseError("invalid " + std::string(what) + " '" + std::string(token) + "'", line);
  return value;
}

std::pair<int, int> parse_header(std::istream& in, int& line_no) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing 'width height' header", 1);
  line_no = 1;
  const auto t = tokens(line);
  if (t.size() != 2) throw ParseError("header must be 'width height'", line_no);
  const int w = parse_number<int>(t[0], line_no, "width");
  const int h = parse_number<int>(t[1], line_no, "height");
  if (w < 1 || h < 1) throw ParseError("width and height must be positive", line_no);
  return {w, h};
}

template <class T>
std::vector<T> parse_rows(std::istream& in, int w, int h, int& line_no, std::string_view what) {
  std::vector<T> values;
  values.reserve(static_cast<std::size_t>(w) * h);
  std::string line;
  for (int row = 0; row < h; ++row) {
    ++line_no;
    if (!std::getline(in, line))
      throw ParseError("expected " + std::to_string(h) + " rows, file ends after " + std::to_string(row), line_no);
    const auto t = tokens(line);
    if (static_cast<int>(t.size()) != w)
      throw ParseError("expected " + std::to_string(w) + " values, found " + std::to_string(t.size()), line_no);
    for (auto tok : t) values.push_back(parse_number<T>(tok, line_no, what));
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!tokens(line).empty()) throw ParseError("unexpected content after the last row", line_no);
  }
  return values;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary | std::ios::out : std::ios::out);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return in;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void SceneSpec::validate() const {
  if (width < 4 || height < 4) throw InputError("scene must be at least 4x4");
  if (!std::isfinite(pyramid_height)) throw InputError("pyramid height must be finite");
  if (!(std::isfinite(noise_variance) && noise_variance >= 0.0)) throw InputError("noise variance must be >= 0");
  if (!(base_fraction > 0.0 && base_fraction <= 1.0)) throw InputError("base fraction must lie in (0, 1]");
}

double surface_height(const SceneSpec& spec, Surface s, int row, int col) {
  const Geometry g = geometry(spec);
  const double dx = col - g.cx;
  const double dy = row - g.cy;
  const double h = spec.pyramid_height;
  switch (s) {
    case background: return 0.0;
    case face_top: return h * (1.0 + dy / g.half_width);
    case face_right: return h * (1.0 - dx / g.half_width);
    case face_bottom: return h * (1.0 - dy / g.half_width);
    case face_left: return h * (1.0 + dx / g.half_width);
  }
  return 0.0;
}

ImageGrid noiseless_scene(const SceneSpec& spec) {
  spec.validate();
  const Geometry g = geometry(spec);
  std::vector<double> values(static_cast<std::size_t>(spec.width) * spec.height);
  for (int row = 0; row < spec.height; ++row) {
    for (int col = 0; col < spec.width; ++col) {
      const double d = std::max(std::abs(col - g.cx), std::abs(row - g.cy)) / g.half_width;
      values[static_cast<std::size_t>(row) * spec.width + col] = std::max(0.0, spec.pyramid_height * (1.0 - d));
    }
  }
  return ImageGrid(spec.width, spec.height, std::move(values));
}

ImageGrid generate_scene(const SceneSpec& spec) {
  ImageGrid image = noiseless_scene(spec);
  if (spec.noise_variance > 0.0) {
    GaussianStream noise(spec.seed);
    const double sd = std::sqrt(spec.noise_variance);
    for (int row = 0; row < image.height(); ++row)
      for (int col = 0; col < image.width(); ++col) image.at(row, col) += sd * noise.next();
  }
  return image;
}

std::vector<std::uint8_t> surface_membership(const SceneSpec& spec) {
  spec.validate();
  const Geometry g = geometry(spec);
  std::vector<std::uint8_t> out(static_cast<std::size_t>(spec.width) * spec.height, 0);
  for (int row = 0; row < spec.height; ++row) {
    for (int col = 0; col < spec.width; ++col) {
      const double dx = col - g.cx;
      const double dy = row - g.cy;
      const double d = std::max(std::abs(dx), std::abs(dy));
      std::uint8_t bits = 0;
      if (d >= g.half_width) bits |= 1u << background;
      if (d <= g.half_width) {
        if (-dy >= std::abs(dx)) bits |= 1u << face_top;
        if (dx >= std::abs(dy)) bits |= 1u << face_right;
        if (dy >= std::abs(dx)) bits |= 1u << face_bottom;
        if (-dx >= std::abs(dy)) bits |= 1u << face_left;
      }
      out[static_cast<std::size_t>(row) * spec.width + col] = bits;
    }
  }
  return out;
}

std::vector<int> ground_truth_labels(const SceneSpec& spec) {
  const auto bits = surface_membership(spec);
  std::vector<int> labels(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    int k = 0;
    while (k < kSurfaceCount && !(bits[i] & (1u << k))) ++k;
    labels[i] = k;
  }
  return labels;
}

ImageGrid random_planar_scene(int rows, int cols, int block, double noise_variance, std::uint64_t seed) {
  if (rows < 1 || cols < 1 || block < 1) throw InputError("random scene needs positive rows, cols and block");
  if (!(std::isfinite(noise_variance) && noise_variance >= 0.0)) throw InputError("noise variance must be >= 0");
  GaussianStream rng(seed);
  const int plane_count = 1 + static_cast<int>(rng.uniform() * 3.0 - 1e-12);
  struct Plane {
    double a, b, c;
  };
  std::vector<Plane> planes;
  for (int k = 0; k < plane_count; ++k)
    planes.push_back({2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0, 8.0 * rng.uniform() - 4.0});
  std::vector<int> assignment(static_cast<std::size_t>(rows) * cols);
  for (int& a : assignment) a = std::min(plane_count - 1, static_cast<int>(rng.uniform() * plane_count));

  const int w = cols * block;
  const int h = rows * block;
  const double sd = std::sqrt(noise_variance);
  std::vector<double> values(static_cast<std::size_t>(w) * h);
  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      const Plane& p = planes[assignment[static_cast<std::size_t>(row / block) * cols + col / block]];
      values[static_cast<std::size_t>(row) * w + col] = p.a * col + p.b * row + p.c + sd * rng.next();
    }
  }
  return ImageGrid(w, h, std::move(values));
}

ImageGrid parse_range_image(std::istream& in) {
  int line_no = 0;
  const auto [w, h] = parse_header(in, line_no);
  const int first_row_line = line_no + 1;
  std::vector<double> values = parse_rows<double>(in, w, h, line_no, "number");
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!std::isfinite(values[i]))
      throw ParseError("non-finite value in range image", first_row_line + static_cast<int>(i / w));
  return ImageGrid(w, h, std::move(values));
}

ImageGrid read_range_image(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_range_image(in);
}

void format_range_image(std::ostream& out, const ImageGrid& image) {
  out << image.width() << ' ' << image.height() << '\n';
  for (int row = 0; row < image.height(); ++row) {
    for (int col = 0; col < image.width(); ++col) {
      if (col) out << ' ';
      out << fmt::format("{}", image.at(row, col));
    }
    out << '\n';
  }
}

void write_range_image(const ImageGrid& image, const std::filesystem::path& path) {
  auto out = open_out(path);
  format_range_image(out, image);
}

LabelMap region_labels(const RegionGraph& graph) {
  if (!graph.has_elements()) throw InputError("graph has no element map");
  LabelMap map{graph.width(), graph.height(), {}};
  map.labels.resize(static_cast<std::size_t>(map.width) * map.height);
  for (int row = 0; row < map.height; ++row)
    for (int col = 0; col < map.width; ++col)
      map.labels[static_cast<std::size_t>(row) * map.width + col] = graph.region_at(row, col);
  return map;
}

LabelMap segmentation_labels(const RegionGraph& graph, const Segmentation& segmentation) {
  std::vector<int> owner(graph.size(), -1);
  for (const Segment& seg : segmentation) {
    if (seg.empty()) throw InputError("empty segment in segmentation");
    const int label = *std::min_element(seg.begin(), seg.end());
    for (int r : seg) {
      if (r < 0 || static_cast<std::size_t>(r) >= graph.size()) throw InputError("segment region out of range");
      if (owner[r] != -1) throw InputError("segmentation segments overlap");
      owner[r] = label;
    }
  }
  if (std::find(owner.begin(), owner.end(), -1) != owner.end())
    throw InputError("segmentation does not cover every region");
  LabelMap map = region_labels(graph);
  for (int& l : map.labels) l = owner[l];
  return map;
}

LabelMap parse_label_map(std::istream& in) {
  int line_no = 0;
  const auto [w, h] = parse_header(in, line_no);
  return {w, h, parse_rows<int>(in, w, h, line_no, "label")};
}

LabelMap read_label_map(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_label_map(in);
}

void format_label_map(std::ostream& out, const LabelMap& map) {
  out << map.width << ' ' << map.height << '\n';
  for (int row = 0; row < map.height; ++row) {
    for (int col = 0; col < map.width; ++col) {
      if (col) out << ' ';
      out << map.labels[static_cast<std::size_t>(row) * map.width + col];
    }
    out << '\n';
  }
}

void write_label_map(const LabelMap& map, const std::filesystem::path& path) {
  auto out = open_out(path);
  format_label_map(out, map);
}

Rgb label_color(int label) {
  const std::uint64_t h = splitmix64(static_cast<std::uint64_t>(static_cast<std::uint32_t>(label)));
  // Keep channels away from black so segments stay visible.
  return {static_cast<std::uint8_t>(64 + (h & 0xff) % 192), static_cast<std::uint8_t>(64 + ((h >> 8) & 0xff) % 192),
          static_cast<std::uint8_t>(64 + ((h >> 16) & 0xff) % 192)};
}

void format_render(std::ostream& out, const LabelMap& map) {
  out << "P6\n" << map.width << ' ' << map.height << "\n255\n";
  std::string row(static_cast<std::size_t>(map.width) * 3, '\0');
  for (int r = 0; r < map.height; ++r) {
    for (int c = 0; c < map.width; ++c) {
      const Rgb rgb = label_color(map.labels[static_cast<std::size_t>(r) * map.width + c]);
      row[3 * c] = static_cast<char>(rgb.r);
      row[3 * c + 1] = static_cast<char>(rgb.g);
      row[3 * c + 2] = static_cast<char>(rgb.b);
    }
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

void write_render(const LabelMap& map, const std::filesystem::path& path) {
  auto out = open_out(path, true);
  format_render(out, map);
}

namespace {

template <class H>
StoredDistribution stored_from(const RankedDistribution<H>& dist, std::size_t n, std::string kind,
                               std::map<std::string, std::string> attributes, auto&& as_segmentation) {
  StoredDistribution out;
  out.kind = std::move(kind);
  out.attributes = std::move(attributes);
  const std::size_t keep = std::min(n, dist.entries.size());
  std::vector<double> rest;
  for (std::size_t i = 0; i < dist.entries.size(); ++i) {
    if (i < keep)
      out.entries.push_back({as_segmentation(dist.entries[i].hypothesis), dist.entries[i].log_prob});
    else
      rest.push_back(dist.entries[i].log_prob);
  }
  out.unlisted_log_mass = log_sum_exp(rest);
  out.residual_log_mass = dist.residual_log_mass;
  out.guaranteed = dist.guaranteed;
  return out;
}

std::string format_log2(double natural_log) { return fmt::format("{}", natural_log / std::log(2.0)); }

double parse_log2(std::string_view token, int line) {
  return parse_number<double>(token, line, "log2 probability") * std::log(2.0);
}

}  // namespace

StoredDistribution to_stored(const RankedDistribution<Segment>& dist, std::size_t n,
                             std::map<std::string, std::string> attributes) {
  return stored_from(dist, n, "segments", std::move(attributes), [](const Segment& s) { return Segmentation{s}; });
}

StoredDistribution to_stored(const RankedDistribution<Segmentation>& dist, std::size_t n,
                             std::map<std::string, std::string> attributes) {
  return stored_from(dist, n, "segmentations", std::move(attributes), [](const Segmentation& s) { return s; });
}

void format_distribution(std::ostream& out, const StoredDistribution& dist) {
  out << "# segdist kind=" << dist.kind;
  for (const auto& [k, v] : dist.attributes) out << ' ' << k << '=' << v;
  out << '\n';
  for (std::size_t i = 0; i < dist.entries.size(); ++i) {
    out << (i + 1) << ' ' << format_log2(dist.entries[i].log_prob) << ' ';
    const Segmentation& s = dist.entries[i].hypothesis;
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (k) out << '|';
      for (std::size_t j = 0; j < s[k].size(); ++j) out << (j ? "," : "") << s[k][j];
    }
    out << '\n';
  }
  out << "residual_log2 " << format_log2(dist.residual_log_mass) << '\n';
  out << "unlisted_log2 " << format_log2(dist.unlisted_log_mass) << '\n';
  out << "guaranteed " << (dist.guaranteed ? "true" : "false") << '\n';
}

void write_distribution(const StoredDistribution& dist, const std::filesystem::path& path) {
  auto out = open_out(path);
  format_distribution(out, dist);
}

StoredDistribution parse_distribution(std::istream& in) {
  StoredDistribution dist;
  std::string line;
  int line_no = 1;
  if (!std::getline(in, line)) throw ParseError("empty distribution file", 1);
  {
    const auto t = tokens(line);
    if (t.size() < 2 || t[0] != "#" || t[1] != "segdist") throw ParseError("missing '# segdist' header", line_no);
    for (std::size_t i = 2; i < t.size(); ++i) {
      const auto eq = t[i].find('=');
      if (eq == std::string_view::npos) throw ParseError("header attribute without '='", line_no);
      const std::string key(t[i].substr(0, eq));
      const std::string value(t[i].substr(eq + 1));
      if (key == "kind")
        dist.kind = value;
      else
        dist.attributes[key] = value;
    }
    if (dist.kind != "segments" && dist.kind != "segmentations")
      throw ParseError("unknown distribution kind '" + dist.kind + "'", line_no);
  }
  bool seen_residual = false, seen_unlisted = false, seen_guaranteed = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = tokens(line);
    if (t.empty()) continue;
    if (t[0] == "residual_log2" || t[0] == "unlisted_log2" || t[0] == "guaranteed") {
      if (t.size() != 2) throw ParseError("footer line needs one value", line_no);
      if (t[0] == "residual_log2") {
        dist.residual_log_mass = parse_log2(t[1], line_no);
        seen_residual = true;
      } else if (t[0] == "unlisted_log2") {
        dist.unlisted_log_mass = parse_log2(t[1], line_no);
        seen_unlisted = true;
      } else {
        if (t[1] != "true" && t[1] != "false") throw ParseError("guaranteed must be true or false", line_no);
        dist.guaranteed = t[1] == "true";
        seen_guaranteed = true;
      }
      continue;
    }
    if (seen_residual || seen_unlisted || seen_guaranteed) throw ParseError("entry after footer", line_no);
    if (t.size() != 3) throw ParseError("entry must be 'rank log2 segments'", line_no);
    const auto rank = parse_number<std::size_t>(t[0], line_no, "rank");
    if (rank != dist.entries.size() + 1) throw ParseError("ranks must be consecutive from 1", line_no);
    RankedEntry<Segmentation> entry;
    entry.log_prob = parse_log2(t[1], line_no);
    std::string_view groups = t[2];
    while (true) {
      const auto bar = groups.find('|');
      std::string_view group = groups.substr(0, bar);
      Segment seg;
      while (true) {
        const auto comma = group.find(',');
        seg.push_back(parse_number<int>(group.substr(0, comma), line_no, "region id"));
        if (comma == std::string_view::npos) break;
        group.remove_prefix(comma + 1);
      }
      entry.hypothesis.push_back(std::move(seg));
      if (bar == std::string_view::npos) break;
      groups.remove_prefix(bar + 1);
    }
    dist.entries.push_back(std::move(entry));
  }
  if (!seen_residual || !seen_unlisted || !seen_guaranteed) throw ParseError("missing footer lines", line_no);
  return dist;
}

StoredDistribution read_distribution(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_distribution(in);
}

}  // namespace segdist
