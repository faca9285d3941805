#include "segdist/ranked.hpp"

#include "segdist/errors.hpp"

#include <algorithm>
#include <cmath>

namespace segdist {

double log_sum_exp(std::span<const double> logs) {
  if (logs.empty()) return kNegInf;
  const double peak = *std::max_element(logs.begin(), logs.end());
  if (peak == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double l : logs) sum += std::exp(l - peak);
  return peak + std::log(sum);
}

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kNegInf) return a;
  return a + std::log1p(std::exp(b - a));
}

EntropyReport entropy(std::span<const double> entry_log_probs, double residual_log_mass) {
  if (entry_log_probs.empty()) throw InputError("entropy of an empty distribution");
  const double total = log_sum_exp(entry_log_probs);
  if (total == kNegInf) throw InputError("entropy: entries carry no mass");
  double bits = 0.0;
  for (double l : entry_log_probs) {
    const double ln_p = l - total;
    if (ln_p == kNegInf) continue;
    bits -= std::exp(ln_p) * ln_p;
  }
  return {bits / std::log(2.0), std::exp(residual_log_mass)};
}

}  // namespace segdist
