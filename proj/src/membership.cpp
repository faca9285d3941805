#include "segdist/membership.hpp"

#include "segdist/errors.hpp"

#include <string>

namespace segdist {

std::string_view to_string(MembershipMode mode) {
  return mode == MembershipMode::pairwise ? "pairwise" : "aggregate";
}

MembershipMode parse_membership_mode(std::string_view text) {
  if (text == "pairwise") return MembershipMode::pairwise;
  if (text == "aggregate") return MembershipMode::aggregate;
  throw InputError("unknown membership mode '" + std::string(text) + "' (expected pairwise or aggregate)");
}

EvidenceMembership::EvidenceMembership(std::vector<std::shared_ptr<const EvidenceModel>> models, PriorSpec prior)
    : models_(std::move(models)), prior_(prior) {
  prior_.validate();
  if (models_.empty()) throw InputError("at least one evidence model is required");
  region_count_ = models_.front()->graph().size();
  for (const auto& m : models_)
    if (!m || &m->graph() != &models_.front()->graph())
      throw InputError("all evidence models must be bound to the same region graph");
}

MembershipOdds EvidenceMembership::compute(const RegionSet& a, const RegionSet& b) {
  ++evaluations_;
  std::vector<double> logs;
  logs.reserve(models_.size());
  for (const auto& m : models_) logs.push_back(log_lambda1(*m, a, b));
  return membership_odds(prior_, logs);
}

MembershipOdds EvidenceMembership::pairwise(int base, int region) {
  const std::uint64_t key = static_cast<std::uint64_t>(base) * region_count_ + static_cast<std::uint64_t>(region);
  if (auto it = pair_cache_.find(key); it != pair_cache_.end()) return it->second;
  const MembershipOdds odds =
      compute(RegionSet::from_ids(region_count_, {base}), RegionSet::from_ids(region_count_, {region}));
  pair_cache_.emplace(key, odds);
  return odds;
}

MembershipOdds EvidenceMembership::aggregate(const RegionSet& include, int region) {
  AggregateKey key{include, region};
  if (auto it = aggregate_cache_.find(key); it != aggregate_cache_.end()) return it->second;
  const MembershipOdds odds = compute(include, RegionSet::from_ids(region_count_, {region}));
  aggregate_cache_.emplace(std::move(key), odds);
  return odds;
}

}  // namespace segdist
