#include "segdist/model_config.hpp"

#include "segdist/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <string_view>

namespace segdist {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_real(std::string_view text, std::string_view key, int line) {
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(value))
    throw ParseError(std::string(key) + " expects a finite number, got '" + std::string(text) + "'", line);
  return value;
}

}  // namespace

PriorSpec ModelConfig::prior() const {
  if (!p0 || *p0 == 0.5) return PriorSpec::uniform();
  return PriorSpec::fixed(*p0);
}

ModelConfig parse_model_config(std::istream& in) {
  ModelConfig config;
  std::set<std::string> block_keys;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key=value", line_no);
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", line_no);
    if (value.empty()) throw ParseError("empty value for '" + key + "'", line_no);

    if (key == "model") {
      if (value != "planar") throw ParseError("unknown model kind '" + std::string(value) + "'", line_no);
      config.models.emplace_back();
      block_keys.clear();
    } else if (key == "sigma2" || key == "tau2") {
      if (config.models.empty()) config.models.emplace_back();
      if (!block_keys.insert(key).second) throw ParseError("duplicate key '" + key + "' in model block", line_no);
      const double v = parse_real(value, key, line_no);
      if (v <= 0.0) throw ParseError(key + " must be positive", line_no);
      (key == "sigma2" ? config.models.back().noise_variance : config.models.back().prior_scale) = v;
    } else if (key == "p0") {
      if (config.p0) throw ParseError("duplicate key 'p0'", line_no);
      const double v = parse_real(value, key, line_no);
      if (!(v > 0.0 && v < 1.0)) throw ParseError("p0 must lie in (0, 1)", line_no);
      config.p0 = v;
    } else {
      if (!config.options.emplace(key, std::string(value)).second)
        throw ParseError("duplicate key '" + key + "'", line_no);
    }
  }
  return config;
}

ModelConfig read_model_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return parse_model_config(in);
}

}  // namespace segdist
