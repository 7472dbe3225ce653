#pragma once

#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "hvi/manifold.hpp"
#include "hvi/sampling.hpp"

namespace hvi {

class ConvexSet;

/// Result of a metric projection. `residual` is a stationarity proxy: exactly
/// 0 for the closed-form variants, the last-sweep displacement for the cyclic
/// projection onto intersections.
struct ProjectionResult {
  Point point;
  double distance = 0.0;
  bool converged = true;
  double residual = 0.0;
};

/// Cyclic projection onto an intersection exhausted its sweep budget. Carries
/// the best iterate reached.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what_arg, ProjectionResult best)
      : Error(what_arg), best(std::move(best)) {}
  ProjectionResult best;
};

struct WholeManifoldSet {
  ManifoldDescriptor manifold;
};

struct GeodesicBallSet {
  Point center;
  double radius;
};

/// { x : <normal, log(anchor, x)> <= 0 }. Geodesically convex on both
/// supported manifolds; on the hyperboloid it coincides with the Minkowski
/// half-space { <<normal, x>> <= 0 }, which gives the closed-form projection.
struct LogHalfSpaceSet {
  Point anchor;
  Tangent normal;       // nonzero, tangent at anchor
  Eigen::VectorXd unit; // normal / |normal| in ambient coordinates
};

/// { x : a.x <= b } on a Euclidean manifold.
struct EuclideanHalfSpaceSet {
  ManifoldDescriptor manifold;
  Eigen::VectorXd a;
  double b;
};

struct IntersectionSet {
  std::vector<ConvexSet> members;
};

/// A closed geodesically convex subset of one of the supported manifolds.
class ConvexSet {
 public:
  using Data = std::variant<WholeManifoldSet, GeodesicBallSet, LogHalfSpaceSet,
                            EuclideanHalfSpaceSet, IntersectionSet>;

  static ConvexSet whole(const ManifoldDescriptor& m);
  static ConvexSet ball(Point center, double radius);
  static ConvexSet log_halfspace(Point anchor, Tangent normal);
  static ConvexSet euclidean_halfspace(const ManifoldDescriptor& m, Eigen::VectorXd a, double b);

  /// Builds an intersection and runs the feasibility probe (cyclic projection
  /// from the first member's anchor point); throws InfeasibleSet if the probe
  /// stalls above tolerance.
  static ConvexSet intersect(std::vector<ConvexSet> members);

  const ManifoldDescriptor& manifold() const { return manifold_; }
  const Data& data() const { return *data_; }

 private:
  ConvexSet(ManifoldDescriptor m, Data d);
  ManifoldDescriptor manifold_;
  std::shared_ptr<const Data> data_;
};

bool contains(const ConvexSet& set, const Point& p, double tol);

ProjectionResult project(const ConvexSet& set, const Point& p,
                         int max_sweeps = tols::intersection_max_sweeps);

double distance_to_set(const ConvexSet& set, const Point& p);

/// Sampling-based normal cone membership ("not refuted" semantics): true iff
/// <w, log(p,q)> <= tol for every q in a deterministic boundary-biased sample
/// of the set, enriched with probes around p. Requires p in the set.
bool normal_cone_contains(const ConvexSet& set, const Point& p, const Tangent& w, double tol,
                          int sample_count = 1000, uint64_t seed = 0);

/// A representative interior-ish point of the set (ball center, half-space
/// anchor, manifold origin for the whole manifold).
Point anchor_point(const ConvexSet& set);

/// Deterministic, boundary-biased sample of the set. `focus` localises the
/// sample for unbounded sets (defaults to the anchor point).
std::vector<Point> sample_set(const ConvexSet& set, int count, uint64_t seed,
                              const std::optional<Point>& focus = {});

/// Outward normal directions of the constraints active at p (empty when p is
/// interior), used to augment vector fields with normal-cone rays.
std::vector<Tangent> active_normals(const ConvexSet& set, const Point& p, double boundary_tol);

}  // namespace hvi
