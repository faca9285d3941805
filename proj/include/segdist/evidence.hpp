#pragma once

#include "segdist/region_graph.hpp"
#include "segdist/region_set.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace segdist {

struct Point2 {
  double x1 = 0.0;  // column
  double x2 = 0.0;  // row
};

/// Additive sufficient statistics of (x1, x2, z) samples for a plane fit.
///
/// Coordinates are stored relative to a fixed reference point so that
/// re-centering stays well conditioned on large images.
struct PlaneMoments {
  double n = 0.0;
  double s1 = 0.0, s2 = 0.0;
  double s11 = 0.0, s22 = 0.0, s12 = 0.0;
  double sz = 0.0, s1z = 0.0, s2z = 0.0, szz = 0.0;

  void add(double x1, double x2, double z);
  PlaneMoments& operator+=(const PlaneMoments& o);
  friend PlaneMoments operator+(PlaneMoments a, const PlaneMoments& b) { return a += b; }
};

/// Plane z = a (x1 - o1) + b (x2 - o2) + c with i.i.d. Gaussian noise and a
/// zero-mean isotropic Gaussian prior on (a, b, c).
struct PlanarGaussianModel {
  double noise_variance = 0.1;  // sigma^2
  double prior_scale = 1.0e4;   // tau^2

  /// Throws InputError unless both variances are finite and positive.
  void validate() const;
};

/// Prior probability that a candidate region belongs to the segment.
struct PriorSpec {
  enum class Mode { membership_uniform, membership_fixed };
  Mode mode = Mode::membership_uniform;
  double p0 = 0.5;

  static PriorSpec uniform() { return {}; }
  /// Throws InputError unless 0 < p0 < 1.
  static PriorSpec fixed(double p0);

  void validate() const;
  /// log((1 - p0) / p0)
  double log_lambda0() const;
};

/// Posterior membership held as the log odds of exclusion, log(lambda0 * prod lambda).
///
/// Keeping the odds rather than the probability lets both branch masses stay
/// finite in log space even when the probability rounds to 0 or 1.
struct MembershipOdds {
  double log_odds_exclude = 0.0;

  static MembershipOdds from_probability(double p_include);
  double log_include() const;   // log P_I
  double log_exclude() const;   // log (1 - P_I)
  double probability() const;   // P_I
  /// Monotone in |P_I - 1/2|.
  double decisiveness() const;
};

struct McEstimate {
  double log_estimate = 0.0;
  double standard_error = 0.0;  // of log_estimate
};

/// A statistical image model bound to one graph and image.
class EvidenceModel {
 public:
  virtual ~EvidenceModel() = default;

  virtual std::string describe() const = 0;
  virtual const RegionGraph& graph() const = 0;

  /// Centroid of the elements covered by `regions`.
  virtual Point2 centroid(const RegionSet& regions) const = 0;

  /// log of the integral of p(y_R | u) p(u) du, parameters centred at `origin`.
  virtual double log_evidence_at(const RegionSet& regions, Point2 origin) const = 0;

  /// Prior-sampling Monte-Carlo estimate of the same integral, centred at the region centroid.
  virtual McEstimate mc_log_evidence(const RegionSet& regions, int sample_count, std::uint64_t seed) const = 0;
};

class PlanarEvidence final : public EvidenceModel {
 public:
  /// Throws InputError on non-finite data, invalid parameters or a graph without elements.
  PlanarEvidence(PlanarGaussianModel model, const RegionGraph& graph, const ImageGrid& image);

  std::string describe() const override;
  const RegionGraph& graph() const override { return *graph_; }
  const PlanarGaussianModel& parameters() const noexcept { return model_; }

  Point2 centroid(const RegionSet& regions) const override;
  double log_evidence_at(const RegionSet& regions, Point2 origin) const override;
  McEstimate mc_log_evidence(const RegionSet& regions, int sample_count, std::uint64_t seed) const override;

  PlaneMoments moments(const RegionSet& regions) const;
  double log_evidence_of(const PlaneMoments& m, Point2 origin) const;

 private:
  Point2 centroid_of(const PlaneMoments& m) const;

  PlanarGaussianModel model_;
  const RegionGraph* graph_;
  Point2 reference_;
  std::vector<PlaneMoments> region_moments_;
};

/// Log evidence with parameters centred at the region set's own centroid.
double log_evidence(const EvidenceModel& model, const RegionSet& regions);

/// log lambda1 = log E(a) + log E(b) - log E(a u b), all three centred at the union centroid.
double log_lambda1(const EvidenceModel& model, const RegionSet& set_a, const RegionSet& set_b);
double lambda1(const EvidenceModel& model, const RegionSet& set_a, const RegionSet& set_b);

/// 1 / (1 + lambda0 * prod lambda_l). Throws InputError for empty, non-positive or non-finite lambdas.
double membership_probability(const PriorSpec& prior, std::span<const double> lambdas);
/// Same combination from log lambdas; never overflows.
MembershipOdds membership_odds(const PriorSpec& prior, std::span<const double> log_lambdas);

McEstimate mc_log_evidence(const EvidenceModel& model, const RegionSet& regions, int sample_count,
                           std::uint64_t seed);

}  // namespace segdist
