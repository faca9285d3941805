#include "segdist/errors.hpp"
#include "segdist/evidence.hpp"
#include "segdist/exact_oracle.hpp"
#include "segdist/membership.hpp"
#include "segdist/model_config.hpp"
#include "segdist/region_graph.hpp"
#include "segdist/scene_io.hpp"
#include "segdist/segment_space.hpp"
#include "segdist/segmentation_space.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace segdist;

namespace {

enum ExitCode { ok = 0, internal = 1, input = 2, size = 3, consistency = 4 };

/// A library error annotated with the flag or file it came from.
struct Failure {
  int code;
  std::string message;
};

template <class F>
auto guarded(const std::string& origin, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const SizeError& e) {
    throw Failure{size, origin + ": " + e.what()};
  } catch (const ConsistencyError& e) {
    throw Failure{consistency, origin + ": " + e.what()};
  } catch (const InputError& e) {
    throw Failure{input, origin + ": " + e.what()};
  }
}

std::string num(double v) { return fmt::format("{}", v); }

struct ModelFlags {
  std::optional<double> sigma2;
  std::optional<double> tau2;
  std::optional<double> p0;
  std::string config;
};

struct SearchFlags {
  std::string input;
  std::string out;
  int block = 10;
  std::size_t n = 20;
  std::string mode = "pairwise";
  std::string adjacency = "four";
};

void add_model_flags(CLI::App* app, ModelFlags& m) {
  app->add_option("--sigma2", m.sigma2, "Noise variance of the planar model (overrides the first config block)");
  app->add_option("--tau2", m.tau2, "Prior variance of the plane parameters (overrides the first config block)");
  app->add_option("--p0", m.p0, "Prior membership probability in (0, 1)");
  app->add_option("--config", m.config, "key=value model configuration file")->check(CLI::ExistingFile);
}

void add_search_flags(CLI::App* app, SearchFlags& s) {
  app->add_option("--input", s.input, "Range image file")->required();
  app->add_option("--out", s.out, "Distribution file (default: stdout)");
  app->add_option("--block", s.block, "Side of the square initial regions, in elements");
  app->add_option("--n", s.n, "Number of hypotheses to rank");
  app->add_option("--mode", s.mode, "Membership conditioning")->check(CLI::IsMember({"pairwise", "aggregate"}));
  app->add_option("--adjacency", s.adjacency, "Element adjacency for region connectivity")
      ->check(CLI::IsMember({"four", "eight"}));
}

/// Applies non-model keys of the config file to flags that were not given on the command line.
void apply_config_options(CLI::App* app, const ModelConfig& config) {
  for (const auto& [key, value] : config.options) {
    CLI::Option* opt = app->get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config") throw InputError("unknown configuration key '" + key + "'");
    if (opt->count() == 0) {
      opt->add_result(value);
      opt->run_callback();
    }
  }
}

struct Model {
  std::vector<PlanarGaussianModel> models;
  PriorSpec prior;
};

Model resolve_model(CLI::App* app, const ModelFlags& flags) {
  ModelConfig config;
  if (!flags.config.empty()) config = guarded("--config " + flags.config, [&] { return read_model_config(flags.config); });
  guarded("--config " + flags.config, [&] {
    apply_config_options(app, config);
    return 0;
  });
  if (config.models.empty()) config.models.emplace_back();
  if (flags.sigma2) config.models.front().noise_variance = *flags.sigma2;
  if (flags.tau2) config.models.front().prior_scale = *flags.tau2;
  if (flags.p0) config.p0 = *flags.p0;
  for (std::size_t i = 0; i < config.models.size(); ++i) {
    const std::string origin = i == 0 ? "--sigma2/--tau2" : "--config model block " + std::to_string(i + 1);
    guarded(origin, [&] {
      config.models[i].validate();
      return 0;
    });
  }
  Model m;
  m.models = config.models;
  m.prior = guarded("--p0", [&] { return config.prior(); });
  return m;
}

std::map<std::string, std::string> model_attributes(const Model& m) {
  std::map<std::string, std::string> attrs;
  attrs["p0"] = num(m.prior.p0);
  for (std::size_t i = 0; i < m.models.size(); ++i) {
    const std::string suffix = m.models.size() == 1 ? "" : "." + std::to_string(i + 1);
    attrs["sigma2" + suffix] = num(m.models[i].noise_variance);
    attrs["tau2" + suffix] = num(m.models[i].prior_scale);
  }
  return attrs;
}

struct Problem {
  ImageGrid image;
  std::unique_ptr<RegionGraph> graph;
  std::unique_ptr<EvidenceMembership> source;
};

Problem load_problem(const SearchFlags& s, const Model& m) {
  if (s.block < 1) throw Failure{input, "--block: must be >= 1"};
  if (s.n < 1) throw Failure{input, "--n: must be >= 1"};
  Problem p;
  p.image = guarded("--input " + s.input, [&] { return read_range_image(s.input); });
  const auto adjacency = s.adjacency == "eight" ? ElementAdjacency::eight : ElementAdjacency::four;
  p.graph = std::make_unique<RegionGraph>(
      guarded("--block", [&] { return partition_grid(p.image, s.block, adjacency); }));
  std::vector<std::shared_ptr<const EvidenceModel>> models;
  for (const PlanarGaussianModel& pm : m.models)
    models.push_back(guarded("--input " + s.input,
                             [&] { return std::make_shared<const PlanarEvidence>(pm, *p.graph, p.image); }));
  p.source = std::make_unique<EvidenceMembership>(std::move(models), m.prior);
  return p;
}

void emit_distribution(const StoredDistribution& stored, const std::string& out) {
  if (out.empty()) {
    format_distribution(std::cout, stored);
    return;
  }
  guarded("--out " + out, [&] {
    write_distribution(stored, out);
    return 0;
  });
}

void print_summary(std::ostream& os, const StoredDistribution& stored, std::size_t refinements) {
  fmt::print(os, "rank  probability          segments\n");
  for (std::size_t i = 0; i < stored.entries.size(); ++i)
    fmt::print(os, "{:>4}  {:<20.12g} {}\n", i + 1, std::exp(stored.entries[i].log_prob),
               stored.entries[i].hypothesis.size());
  fmt::print(os, "residual mass {:.6g}, unlisted mass {:.6g}, guaranteed {}, refinements {}\n",
             std::exp(stored.residual_log_mass), std::exp(stored.unlisted_log_mass), stored.guaranteed, refinements);
}

// gen --------------------------------------------------------------------------------------------

struct GenFlags {
  SceneSpec spec;
  std::optional<int> size;
  std::string out;
  std::string truth;
};

int cmd_gen(const GenFlags& g) {
  SceneSpec spec = g.spec;
  if (g.size) spec.width = spec.height = *g.size;
  guarded("scene flags", [&] {
    spec.validate();
    return 0;
  });
  const ImageGrid image = generate_scene(spec);
  guarded("--out " + g.out, [&] {
    write_range_image(image, g.out);
    return 0;
  });
  if (!g.truth.empty()) {
    LabelMap truth{spec.width, spec.height, ground_truth_labels(spec)};
    guarded("--truth " + g.truth, [&] {
      write_label_map(truth, g.truth);
      return 0;
    });
  }
  return ok;
}

// topn-segments ----------------------------------------------------------------------------------

int cmd_topn_segments(CLI::App* app, const SearchFlags& s, const ModelFlags& mf, int base) {
  const Model m = resolve_model(app, mf);
  Problem p = load_problem(s, m);
  if (base < 0 || static_cast<std::size_t>(base) >= p.graph->size())
    throw Failure{input, fmt::format("--base: region {} out of range [0, {})", base, p.graph->size())};
  const MembershipMode mode = parse_membership_mode(s.mode);
  const auto dist = guarded("search", [&] { return top_n_segments(base, *p.graph, *p.source, s.n, mode); });
  auto attrs = model_attributes(m);
  attrs["base"] = std::to_string(base);
  attrs["block"] = std::to_string(s.block);
  attrs["mode"] = s.mode;
  attrs["n"] = std::to_string(s.n);
  const StoredDistribution stored = to_stored(dist, s.n, attrs);
  emit_distribution(stored, s.out);
  if (!s.out.empty()) print_summary(std::cout, stored, dist.refinements);
  return ok;
}

// topn-segmentations -----------------------------------------------------------------------------

int cmd_topn_segmentations(CLI::App* app, const SearchFlags& s, const ModelFlags& mf, const std::string& render_dir,
                           const std::string& region_map) {
  const Model m = resolve_model(app, mf);
  Problem p = load_problem(s, m);
  const MembershipMode mode = parse_membership_mode(s.mode);
  const auto dist = guarded("search", [&] { return top_n_segmentations(*p.graph, *p.source, s.n, mode); });
  auto attrs = model_attributes(m);
  attrs["block"] = std::to_string(s.block);
  attrs["mode"] = s.mode;
  attrs["n"] = std::to_string(s.n);
  const StoredDistribution stored = to_stored(dist, s.n, attrs);
  emit_distribution(stored, s.out);

  if (!region_map.empty())
    guarded("--region-map " + region_map, [&] {
      write_label_map(region_labels(*p.graph), region_map);
      return 0;
    });
  if (!render_dir.empty()) {
    guarded("--render-dir " + render_dir, [&] {
      std::error_code ec;
      fs::create_directories(render_dir, ec);
      if (ec) throw InputError("cannot create directory: " + ec.message());
      for (std::size_t i = 0; i < stored.entries.size(); ++i)
        write_render(segmentation_labels(*p.graph, stored.entries[i].hypothesis),
                     fs::path(render_dir) / fmt::format("rank_{:02}.ppm", i + 1));
      return 0;
    });
  }
  if (!s.out.empty()) print_summary(std::cout, stored, dist.refinements);
  return ok;
}

// oracle -----------------------------------------------------------------------------------------

struct OracleFlags {
  int regions = 9;
  int trials = 50;
  std::uint64_t seed = 1;
  int block = 4;
  double tolerance = 1e-9;
};

std::pair<int, int> grid_shape(int regions) {
  int rows = 1;
  for (int r = 1; r * r <= regions; ++r)
    if (regions % r == 0) rows = r;
  return {rows, regions / rows};
}

/// Largest |expm1(search - exact)| over all segmentations; +inf when the supports differ.
double oracle_deviation(const RegionGraph& graph, MembershipSource& source) {
  const auto exact = exact_masses(graph, source);
  SegmentationSearch search(graph, source, MembershipMode::pairwise);
  const auto found = search.run_to_exhaustion();
  if (found.entries.size() != exact.hypotheses.size()) return INFINITY;
  std::map<Segmentation, double> by_hypothesis;
  for (const auto& e : found.entries) by_hypothesis.emplace(e.hypothesis, e.log_prob);
  double worst = 0.0;
  for (const auto& h : exact.hypotheses) {
    const auto it = by_hypothesis.find(h.hypothesis);
    if (it == by_hypothesis.end()) return INFINITY;
    if (it->second == h.log_prob) continue;
    worst = std::max(worst, std::abs(std::expm1(it->second - h.log_prob)));
  }
  return worst;
}

int cmd_oracle(CLI::App* app, const OracleFlags& o, const ModelFlags& mf) {
  if (o.regions < 1) throw Failure{input, "--regions: must be >= 1"};
  if (o.trials < 1) throw Failure{input, "--trials: must be >= 1"};
  if (static_cast<std::size_t>(o.regions) > kSegmentationEnumerationCap)
    throw Failure{size, fmt::format("--regions: exact enumeration is capped at {} regions", kSegmentationEnumerationCap)};
  Model m = resolve_model(app, mf);
  const auto [rows, cols] = grid_shape(o.regions);
  const PlanarGaussianModel& pm = m.models.front();

  int agree = 0;
  double worst = 0.0;
  for (int t = 0; t < o.trials; ++t) {
    const ImageGrid image = random_planar_scene(rows, cols, o.block, pm.noise_variance, o.seed + t);
    const RegionGraph graph = partition_grid(image, o.block);
    std::vector<std::shared_ptr<const EvidenceModel>> models;
    for (const PlanarGaussianModel& each : m.models)
      models.push_back(std::make_shared<const PlanarEvidence>(each, graph, image));
    EvidenceMembership source(std::move(models), m.prior);
    const double dev = guarded("oracle", [&] { return oracle_deviation(graph, source); });
    worst = std::max(worst, dev);
    if (dev <= o.tolerance) ++agree;
  }
  fmt::print("{} instances of {}x{} regions, sigma2={} tau2={} p0={} seed={}\n", o.trials, rows, cols,
             num(pm.noise_variance), num(pm.prior_scale), num(m.prior.p0), o.seed);
  fmt::print("{}/{} agree ≤ {} (max relative deviation {:.3g})\n", agree, o.trials, num(o.tolerance), worst);

  RegionGraph shape = [&] {
    std::vector<std::pair<int, int>> edges;
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) {
        if (c + 1 < cols) edges.emplace_back(r * cols + c, r * cols + c + 1);
        if (r + 1 < rows) edges.emplace_back(r * cols + c, (r + 1) * cols + c);
      }
    return RegionGraph::from_edges(o.regions, edges);
  }();
  const PriorComparison c = prior_comparison(shape);
  fmt::print("prior comparison over {} segmentations:\n", c.segmentation_uniform.hypotheses.size());
  fmt::print("  TV(membership-uniform, segmentation-uniform) = {:.6f}\n", c.tv_membership_vs_segmentation);
  fmt::print("  TV(segment-uniform, segmentation-uniform)    = {:.6f}\n", c.tv_segment_vs_segmentation);
  fmt::print("  TV(membership-uniform, segment-uniform)      = {:.6f}\n", c.tv_membership_vs_segment);
  return agree == o.trials ? ok : consistency;
}

// entropy ----------------------------------------------------------------------------------------

int cmd_entropy(const std::string& input) {
  const StoredDistribution d = guarded("--input " + input, [&] { return read_distribution(input); });
  std::vector<double> logs;
  for (const auto& e : d.entries) logs.push_back(e.log_prob);
  const EntropyReport r = guarded("--input " + input, [&] { return entropy(logs, d.residual_log_mass); });
  fmt::print("entries {}\n", d.entries.size());
  fmt::print("entropy_bits {:.6f}\n", r.explicit_entropy_bits);
  fmt::print("residual_mass {:.6g}\n", r.residual_mass);
  fmt::print("unlisted_mass {:.6g}\n", std::exp(d.unlisted_log_mass));
  fmt::print("guaranteed {}\n", d.guaranteed);
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ranked probabilistic segmentations of range images"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  GenFlags gen_flags;
  CLI::App* gen = app.add_subcommand("gen", "Generate the synthetic pyramid range image");
  gen->add_option("--size", gen_flags.size, "Width and height in elements");
  gen->add_option("--width", gen_flags.spec.width, "Width in elements")->excludes("--size");
  gen->add_option("--height", gen_flags.spec.height, "Height in elements")->excludes("--size");
  gen->add_option("--pyramid-height", gen_flags.spec.pyramid_height, "Apex height above the background");
  gen->add_option("--sigma2", gen_flags.spec.noise_variance, "Variance of the additive Gaussian noise");
  gen->add_option("--seed", gen_flags.spec.seed, "Noise seed");
  gen->add_option("--base-fraction", gen_flags.spec.base_fraction,
                  "Pyramid base side as a fraction of the shorter image side");
  gen->add_option("--out", gen_flags.out, "Range image file to write")->required();
  gen->add_option("--truth", gen_flags.truth, "Also write the per-element ground-truth surface labels");

  SearchFlags seg_flags;
  ModelFlags seg_model;
  int base = 0;
  CLI::App* segs = app.add_subcommand("topn-segments", "Rank the most probable segments through one region");
  add_search_flags(segs, seg_flags);
  add_model_flags(segs, seg_model);
  segs->add_option("--base", base, "Base region id");

  SearchFlags part_flags;
  ModelFlags part_model;
  std::string render_dir, region_map;
  CLI::App* parts = app.add_subcommand("topn-segmentations", "Rank the most probable segmentations");
  add_search_flags(parts, part_flags);
  add_model_flags(parts, part_model);
  parts->add_option("--render-dir", render_dir, "Directory for one PPM render per ranked segmentation");
  parts->add_option("--region-map", region_map, "Write the initial region label map");

  OracleFlags oracle_flags;
  ModelFlags oracle_model;
  CLI::App* oracle = app.add_subcommand("oracle", "Check best-first search against exhaustive enumeration");
  oracle->add_option("--regions", oracle_flags.regions, "Regions per random instance");
  oracle->add_option("--trials", oracle_flags.trials, "Number of random instances");
  oracle->add_option("--seed", oracle_flags.seed, "Seed of the first instance");
  oracle->add_option("--block", oracle_flags.block, "Elements per region side");
  oracle->add_option("--tolerance", oracle_flags.tolerance, "Relative mass tolerance");
  add_model_flags(oracle, oracle_model);

  std::string entropy_input;
  CLI::App* ent = app.add_subcommand("entropy", "Entropy and residual mass of a stored distribution");
  ent->add_option("--input", entropy_input, "Distribution file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : input;
  }

  try {
    if (*gen) return cmd_gen(gen_flags);
    if (*segs) return cmd_topn_segments(segs, seg_flags, seg_model, base);
    if (*parts) return cmd_topn_segmentations(parts, part_flags, part_model, render_dir, region_map);
    if (*oracle) return cmd_oracle(oracle, oracle_flags, oracle_model);
    if (*ent) return cmd_entropy(entropy_input);
  } catch (const Failure& f) {
    fmt::print(stderr, "segdist: error: {}\n", f.message);
    return f.code;
  } catch (const CLI::ParseError& e) {
    fmt::print(stderr, "segdist: error: {}\n", e.what());
    return input;
  } catch (const InputError& e) {
    fmt::print(stderr, "segdist: error: {}\n", e.what());
    return input;
  } catch (const SizeError& e) {
    fmt::print(stderr, "segdist: error: {}\n", e.what());
    return size;
  } catch (const ConsistencyError& e) {
    fmt::print(stderr, "segdist: error: {}\n", e.what());
    return consistency;
  } catch (const std::exception& e) {
    fmt::print(stderr, "segdist: internal error: {}\n", e.what());
    return internal;
  }
  return internal;
}
