#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "hvi/convex_set.hpp"
#include "hvi/manifold.hpp"

namespace hvi {

/// Convex potential built from geodesic distances to anchor points. The
/// squared-distance kind is f(p) = 1/2 sum_i w_i d^2(p, a_i) (its gradient
/// field is -sum_i w_i log(p, a_i)); the plain-distance kind is
/// f(p) = sum_i w_i d(p, a_i), nonsmooth at the anchors.
struct ConvexPotential {
  enum class Kind { WeightedSquaredDistances, WeightedDistances };

  Kind kind = Kind::WeightedSquaredDistances;
  std::vector<Point> anchors;
  std::vector<double> weights;
  int sphere_directions = 32;  // generator resolution of the unit-ball term at anchors

  // For the smooth kind only: number of sampled directions of the certified
  // eps-subgradient ball of radius sqrt(2 W eps), W = sum of weights. The
  // default 0 keeps the enlargement at the exact gradient, which is the inner
  // approximation the solver consumes.
  int enlargement_directions = 0;

  // Negative weights destroy convexity; only the validation tooling builds
  // such potentials (to have something for the falsifier to refute).
  bool allow_nonconvex = false;

  void validate() const;
  const ManifoldDescriptor& manifold() const;
};

double potential_value(const ConvexPotential& f, const Point& p);

/// Generator list of the subdifferential at p: a singleton for the smooth
/// kind and off the anchors; at an anchor of the distance kind the unit-ball
/// term is represented by sphere_directions sampled directions.
std::vector<Tangent> potential_subgradients(const ConvexPotential& f, const Point& p);

/// Record of one enlargement generator: how far it is from being an exact
/// field value and which construction produced it.
struct EnlargementElement {
  enum class Witness { ExactFieldValue, EpsSubgradient, FixedPointSelection };
  Tangent vector;
  double epsilon = 0.0;
  Witness witness = Witness::ExactFieldValue;
};

/// Deterministic sampling instructions for membership checks: points
/// exp_p(r * dir) with quasi-random r <= radius, plus the field anchors.
struct SampleSpec {
  int count = 256;
  double radius = 2.0;
  uint64_t seed = 0;
};

struct CheckReport {
  bool refuted = false;
  double worst_margin = 0.0;
  int samples = 0;
  uint64_t seed = 0;
  std::string detail;
  std::vector<double> series;  // per-step values for sequence checks
};

/// A point-to-set monotone vector field with full domain; evaluation returns
/// a finite generator list whose convex hull is the (inner approximation of
/// the) field value.
class FieldOracle {
 public:
  struct GradientData {
    ConvexPotential potential;
  };
  struct SubdifferentialData {
    ConvexPotential potential;
  };
  struct CompositeData {
    std::vector<double> weights;
    std::vector<FieldOracle> members;
  };
  struct ConeAugmentedData {
    std::shared_ptr<const FieldOracle> inner;
    ConvexSet set;
  };
  using Data = std::variant<GradientData, SubdifferentialData, CompositeData, ConeAugmentedData>;

  static FieldOracle gradient(ConvexPotential potential);
  static FieldOracle subdifferential(ConvexPotential potential);
  static FieldOracle composite(std::vector<double> weights, std::vector<FieldOracle> members);

  const ManifoldDescriptor& manifold() const { return manifold_; }
  const Data& data() const { return *data_; }

  /// Anchors referenced by the field (used to localise deterministic
  /// sampling); may be empty for exotic compositions.
  std::vector<Point> anchors() const;

 private:
  FieldOracle(ManifoldDescriptor m, Data d);
  ManifoldDescriptor manifold_;
  std::shared_ptr<const Data> data_;
  friend FieldOracle add_normal_cone(const FieldOracle&, const ConvexSet&);
};

std::vector<Tangent> eval(const FieldOracle& field, const Point& p);

/// Inner approximation of the eps-enlargement at p, as a generator list.
/// eps = 0 returns eval(field, p) exactly. Every generator carries an exact
/// eps-subgradient certificate for potential-backed fields. The approximation
/// always contains the field value itself.
std::vector<Tangent> enlargement(const FieldOracle& field, const Point& p, double eps);
std::vector<EnlargementElement> enlargement_detailed(const FieldOracle& field, const Point& p,
                                                     double eps);

/// Sampling refutation test of u's membership in the eps-enlargement at p:
/// checks <P_{p q} u - v, log(q, p)> >= -eps - tol over sampled (q, v) and,
/// for potential-backed fields, the eps-subgradient inequality
/// f(q) >= f(p) + <u, log(p, q)> - eps. Worst margin is the slack against
/// -eps; refuted means conclusively not a member.
CheckReport membership_check(const FieldOracle& field, const Point& p, const Tangent& u,
                             double eps, const SampleSpec& sampler = {});

/// Deterministic search for a monotonicity violation over `trials` point
/// pairs and all generator pairs. Refuted iff some pair dips below
/// -tols::monotonicity_slack.
CheckReport monotonicity_falsifier(const FieldOracle& field, int trials, uint64_t seed);

/// The field p -> X(p) + N_Omega(p), represented by shifting every generator
/// along the active outward normals (the zero ray is always included). Used
/// by validation, never by the solver.
FieldOracle add_normal_cone(const FieldOracle& field, const ConvexSet& set);

/// Constructive lower-semicontinuity spot check at (pbar, ubar, eps): along
/// the convergent sequence, blends transported ubar with field values using a
/// halving theta until membership holds, and verifies that the transported
/// blends converge back to ubar.
CheckReport lsc_spotcheck(const FieldOracle& field, const Point& pbar, const Tangent& ubar,
                          double eps, const std::vector<Point>& sequence);

/// Estimate of sup { |u| : u in X(q), q in Omega } over a deterministic
/// sample of Omega.
double field_bound_estimate(const FieldOracle& field, const ConvexSet& omega, int samples,
                            uint64_t seed);

bool potential_backed(const FieldOracle& field);
double field_potential_value(const FieldOracle& field, const Point& p);

/// Distance from `target` to the convex hull of `generators` (Frank-Wolfe on
/// the simplex; deterministic).
double hull_distance(const std::vector<Tangent>& generators, const Tangent& target);

}  // namespace hvi
