#pragma once

#include "segdist/evidence.hpp"
#include "segdist/region_set.hpp"

#include <cstdint>
#include <memory>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace segdist {

/// How the membership of a candidate region is conditioned.
///  - pairwise: evidence ratio between the base region and the candidate only.
///  - aggregate: evidence ratio between the whole current include set and the candidate.
enum class MembershipMode { pairwise, aggregate };

std::string_view to_string(MembershipMode mode);
/// Throws InputError for anything other than "pairwise" / "aggregate".
MembershipMode parse_membership_mode(std::string_view text);

/// Supplies refinement membership probabilities to the searches and the oracle.
class MembershipSource {
 public:
  virtual ~MembershipSource() = default;
  virtual MembershipOdds pairwise(int base, int region) = 0;
  virtual MembershipOdds aggregate(const RegionSet& include, int region) = 0;

  MembershipOdds evaluate(MembershipMode mode, int base, const RegionSet& include, int region) {
    return mode == MembershipMode::pairwise ? pairwise(base, region) : aggregate(include, region);
  }
};

/// The same probability for every decision.
class FixedMembership final : public MembershipSource {
 public:
  explicit FixedMembership(double p_include) : odds_(MembershipOdds::from_probability(p_include)) {}
  MembershipOdds pairwise(int, int) override { return odds_; }
  MembershipOdds aggregate(const RegionSet&, int) override { return odds_; }

 private:
  MembershipOdds odds_;
};

/// Membership from one or more independent evidence models and a prior, memoised.
class EvidenceMembership final : public MembershipSource {
 public:
  /// Models must all be bound to the same graph. Throws InputError otherwise or when empty.
  EvidenceMembership(std::vector<std::shared_ptr<const EvidenceModel>> models, PriorSpec prior);

  MembershipOdds pairwise(int base, int region) override;
  MembershipOdds aggregate(const RegionSet& include, int region) override;

  std::size_t evaluations() const noexcept { return evaluations_; }

 private:
  MembershipOdds compute(const RegionSet& a, const RegionSet& b);

  struct AggregateKey {
    RegionSet include;
    int region;
    friend bool operator==(const AggregateKey&, const AggregateKey&) = default;
  };
  struct AggregateKeyHash {
    std::size_t operator()(const AggregateKey& k) const noexcept {
      return static_cast<std::size_t>(k.include.stable_hash() * 0x9e3779b97f4a7c15ULL + static_cast<unsigned>(k.region));
    }
  };

  std::vector<std::shared_ptr<const EvidenceModel>> models_;
  PriorSpec prior_;
  std::size_t region_count_;
  std::unordered_map<std::uint64_t, MembershipOdds> pair_cache_;
  std::unordered_map<AggregateKey, MembershipOdds, AggregateKeyHash> aggregate_cache_;
  std::size_t evaluations_ = 0;
};

}  // namespace segdist
