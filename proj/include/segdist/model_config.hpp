#pragma once

#include "segdist/evidence.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace segdist {

/// Parsed key=value configuration.
///
///   # comment
///   model=planar      starts a new model block
///   sigma2=0.1        noise variance of the current block
///   tau2=1e4          prior scale of the current block
///   p0=0.5            prior membership probability (global)
///
/// sigma2/tau2 before any `model=` line open an implicit planar block.
/// Any other key is kept in `options` for the command line to consume.
struct ModelConfig {
  std::vector<PlanarGaussianModel> models;
  std::optional<double> p0;
  std::map<std::string, std::string> options;

  PriorSpec prior() const;
};

ModelConfig parse_model_config(std::istream& in);
ModelConfig read_model_config(const std::filesystem::path& path);

}  // namespace segdist
