#include "segdist/evidence.hpp"

#include "segdist/errors.hpp"
#include "segdist/random.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace segdist {

namespace {

// log(1 + e^x) without overflow.
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

struct CenteredSystem {
  Eigen::Matrix3d gram;   // A^T A
  Eigen::Vector3d cross;  // A^T y
  double yy = 0.0;
  double n = 0.0;
};

CenteredSystem center(const PlaneMoments& m, double o1, double o2) {
  CenteredSystem c;
  const double d1 = m.s1 - m.n * o1;
  const double d2 = m.s2 - m.n * o2;
  const double d11 = m.s11 - 2.0 * o1 * m.s1 + m.n * o1 * o1;
  const double d22 = m.s22 - 2.0 * o2 * m.s2 + m.n * o2 * o2;
  const double d12 = m.s12 - o1 * m.s2 - o2 * m.s1 + m.n * o1 * o2;
  c.gram << d11, d12, d1,
            d12, d22, d2,
            d1,  d2,  m.n;
  c.cross << m.s1z - o1 * m.sz, m.s2z - o2 * m.sz, m.sz;
  c.yy = m.szz;
  c.n = m.n;
  return c;
}

}  // namespace

void PlaneMoments::add(double x1, double x2, double z) {
  n += 1.0;
  s1 += x1;
  s2 += x2;
  s11 += x1 * x1;
  s22 += x2 * x2;
  s12 += x1 * x2;
  sz += z;
  s1z += x1 * z;
  s2z += x2 * z;
  szz += z * z;
}

PlaneMoments& PlaneMoments::operator+=(const PlaneMoments& o) {
  n += o.n;
  s1 += o.s1;
  s2 += o.s2;
  s11 += o.s11;
  s22 += o.s22;
  s12 += o.s12;
  sz += o.sz;
  s1z += o.s1z;
  s2z += o.s2z;
  szz += o.szz;
  return *this;
}

void PlanarGaussianModel::validate() const {
  if (!(std::isfinite(noise_variance) && noise_variance > 0.0))
    throw InputError("sigma2 must be finite and > 0, got " + std::to_string(noise_variance));
  if (!(std::isfinite(prior_scale) && prior_scale > 0.0))
    throw InputError("tau2 must be finite and > 0, got " + std::to_string(prior_scale));
}

PriorSpec PriorSpec::fixed(double p0) {
  PriorSpec p{Mode::membership_fixed, p0};
  p.validate();
  return p;
}

void PriorSpec::validate() const {
  if (!(p0 > 0.0 && p0 < 1.0)) throw InputError("p0 must lie in (0, 1), got " + std::to_string(p0));
  if (mode == Mode::membership_uniform && p0 != 0.5) throw InputError("membership-uniform prior requires p0 = 0.5");
}

double PriorSpec::log_lambda0() const {
  validate();
  return std::log1p(-p0) - std::log(p0);
}

MembershipOdds MembershipOdds::from_probability(double p_include) {
  if (!(p_include > 0.0 && p_include < 1.0))
    throw InputError("membership probability must lie in (0, 1), got " + std::to_string(p_include));
  return {std::log1p(-p_include) - std::log(p_include)};
}

double MembershipOdds::log_include() const { return -softplus(log_odds_exclude); }
double MembershipOdds::log_exclude() const { return -softplus(-log_odds_exclude); }
double MembershipOdds::probability() const { return std::exp(log_include()); }
double MembershipOdds::decisiveness() const { return std::abs(log_odds_exclude); }

PlanarEvidence::PlanarEvidence(PlanarGaussianModel model, const RegionGraph& graph, const ImageGrid& image)
    : model_(model), graph_(&graph) {
  model_.validate();
  if (!graph.has_elements()) throw InputError("planar model needs a graph built from an image");
  if (graph.width() != image.width() || graph.height() != image.height())
    throw InputError("graph and image dimensions differ");
  for (double v : image.values())
    if (!std::isfinite(v)) throw InputError("image contains non-finite values");

  reference_ = {0.5 * (image.width() - 1), 0.5 * (image.height() - 1)};
  region_moments_.resize(graph.size());
  for (const Region& reg : graph.regions()) {
    PlaneMoments& m = region_moments_[reg.id];
    for (const Element& e : reg.elements)
      m.add(e.col - reference_.x1, e.row - reference_.x2, image.at(e.row, e.col));
  }
}

std::string PlanarEvidence::describe() const {
  return "planar(sigma2=" + std::to_string(model_.noise_variance) + ", tau2=" + std::to_string(model_.prior_scale) +
         ")";
}

PlaneMoments PlanarEvidence::moments(const RegionSet& regions) const {
  if (regions.capacity() != graph_->size()) throw InputError("region set does not match graph size");
  if (regions.empty()) throw InputError("evidence of an empty region set");
  PlaneMoments m;
  regions.for_each([&](int r) { m += region_moments_[r]; });
  return m;
}

Point2 PlanarEvidence::centroid_of(const PlaneMoments& m) const {
  return {reference_.x1 + m.s1 / m.n, reference_.x2 + m.s2 / m.n};
}

Point2 PlanarEvidence::centroid(const RegionSet& regions) const { return centroid_of(moments(regions)); }

double PlanarEvidence::log_evidence_of(const PlaneMoments& m, Point2 origin) const {
  const double sigma2 = model_.noise_variance;
  const double ratio = model_.prior_scale / sigma2;
  const CenteredSystem sys = center(m, origin.x1 - reference_.x1, origin.x2 - reference_.x2);

  // Marginal y ~ N(0, sigma2 I + tau2 A A^T), evaluated through the 3x3 system
  // K = I + (tau2/sigma2) A^T A via the determinant lemma and Woodbury.
  const Eigen::Matrix3d k = Eigen::Matrix3d::Identity() + ratio * sys.gram;
  const Eigen::LLT<Eigen::Matrix3d> llt(k);
  if (llt.info() != Eigen::Success) throw ConsistencyError("planar evidence: factorisation failed");
  const Eigen::Matrix3d l = llt.matrixL();
  const double log_det = 2.0 * (std::log(l(0, 0)) + std::log(l(1, 1)) + std::log(l(2, 2)));
  const double q = sys.cross.dot(llt.solve(sys.cross));
  const double quad = (sys.yy - ratio * q) / sigma2;
  return -0.5 * sys.n * std::log(2.0 * std::numbers::pi * sigma2) - 0.5 * log_det - 0.5 * quad;
}

double PlanarEvidence::log_evidence_at(const RegionSet& regions, Point2 origin) const {
  return log_evidence_of(moments(regions), origin);
}

McEstimate PlanarEvidence::mc_log_evidence(const RegionSet& regions, int sample_count, std::uint64_t seed) const {
  if (sample_count < 2) throw InputError("sample_count must be >= 2, got " + std::to_string(sample_count));
  const PlaneMoments m = moments(regions);
  const Point2 origin = centroid_of(m);
  const CenteredSystem sys = center(m, origin.x1 - reference_.x1, origin.x2 - reference_.x2);
  const double sigma2 = model_.noise_variance;
  const double tau = std::sqrt(model_.prior_scale);
  const double log_norm = -0.5 * sys.n * std::log(2.0 * std::numbers::pi * sigma2);

  GaussianStream stream(seed, regions.stable_hash());
  std::vector<double> log_lik(static_cast<std::size_t>(sample_count));
  for (double& ll : log_lik) {
    Eigen::Vector3d u;
    u << tau * stream.next(), tau * stream.next(), tau * stream.next();
    const double ssr = sys.yy - 2.0 * u.dot(sys.cross) + u.dot(sys.gram * u);
    ll = log_norm - 0.5 * ssr / sigma2;
  }

  const double peak = *std::max_element(log_lik.begin(), log_lik.end());
  double mean = 0.0;
  for (double ll : log_lik) mean += std::exp(ll - peak);
  mean /= sample_count;
  double var = 0.0;
  for (double ll : log_lik) {
    const double d = std::exp(ll - peak) - mean;
    var += d * d;
  }
  var /= (sample_count - 1);
  // Delta method: se(log m) = se(m) / m.
  return {peak + std::log(mean), std::sqrt(var / sample_count) / mean};
}

double log_evidence(const EvidenceModel& model, const RegionSet& regions) {
  if (regions.empty()) throw InputError("evidence of an empty region set");
  return model.log_evidence_at(regions, model.centroid(regions));
}

double log_lambda1(const EvidenceModel& model, const RegionSet& set_a, const RegionSet& set_b) {
  if (set_a.empty() || set_b.empty()) throw InputError("lambda1 needs two non-empty region sets");
  if (set_a.intersects(set_b)) throw InputError("lambda1 region sets overlap");
  const RegionSet joint = set_a | set_b;
  const Point2 origin = model.centroid(joint);
  return model.log_evidence_at(set_a, origin) + model.log_evidence_at(set_b, origin) -
         model.log_evidence_at(joint, origin);
}

double lambda1(const EvidenceModel& model, const RegionSet& set_a, const RegionSet& set_b) {
  return std::exp(log_lambda1(model, set_a, set_b));
}

MembershipOdds membership_odds(const PriorSpec& prior, std::span<const double> log_lambdas) {
  if (log_lambdas.empty()) throw InputError("membership needs at least one model");
  double s = prior.log_lambda0();
  for (double l : log_lambdas) {
    if (std::isnan(l) || std::isinf(l)) throw InputError("log lambda must be finite");
    s += l;
  }
  return {s};
}

double membership_probability(const PriorSpec& prior, std::span<const double> lambdas) {
  std::vector<double> logs;
  logs.reserve(lambdas.size());
  for (double l : lambdas) {
    if (!(std::isfinite(l) && l > 0.0)) throw InputError("lambda must be finite and > 0, got " + std::to_string(l));
    logs.push_back(std::log(l));
  }
  return membership_odds(prior, logs).probability();
}

McEstimate mc_log_evidence(const EvidenceModel& model, const RegionSet& regions, int sample_count,
                           std::uint64_t seed) {
  return model.mc_log_evidence(regions, sample_count, seed);
}

}  // namespace segdist
