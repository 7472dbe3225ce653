#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hvi/errors.hpp"
#include "hvi/tolerances.hpp"

namespace hvi {

enum class ManifoldKind { Euclidean, Hyperboloid };

/// One of the two supported Hadamard manifolds: flat R^n, or the upper sheet
/// of the hyperboloid H^n (constant curvature -1) embedded in Minkowski space
/// R^{n,1}. Hyperboloid points are stored as ambient (dim+1)-vectors x with
/// <<x,x>> = -1 and x_0 > 0.
struct ManifoldDescriptor {
  ManifoldKind kind = ManifoldKind::Euclidean;
  int dim = 1;

  int ambient_dim() const { return kind == ManifoldKind::Hyperboloid ? dim + 1 : dim; }
  bool operator==(const ManifoldDescriptor&) const = default;
  std::string name() const;
};

ManifoldDescriptor euclidean(int dim);
ManifoldDescriptor hyperboloid(int dim);

/// A manifold point in ambient coordinates.
struct Point {
  ManifoldDescriptor manifold;
  Eigen::VectorXd coords;
};

/// A tangent vector attached to a base point, in ambient coordinates.
struct Tangent {
  Point base;
  Eigen::VectorXd components;
};

/// Minkowski bilinear form <<a,b>> = -a0*b0 + sum_{i>0} ai*bi.
double minkowski(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Validating constructors. make_point checks the embedding constraint
/// (within tols::embedding); make_tangent checks tangency for hyperboloid
/// bases (within tols::tangency) and re-projects the tiny drift away.
Point make_point(const ManifoldDescriptor& m, Eigen::VectorXd coords);
Tangent make_tangent(const Point& base, Eigen::VectorXd components);
Tangent zero_tangent(const Point& base);

/// Origin of the manifold: 0 for R^n, (1,0,...,0) for H^n.
Point origin(const ManifoldDescriptor& m);

/// Lift spatial coordinates s in R^n to the hyperboloid point
/// (sqrt(1+|s|^2), s).
Point hyperboloid_lift(const ManifoldDescriptor& m, const Eigen::VectorXd& spatial);

bool same_point(const Point& a, const Point& b, double tol = tols::base_match);

/// Riemannian metric at the shared base point. For the hyperboloid this is
/// the Minkowski form restricted to the tangent space, where it is positive
/// definite. Throws BasePointMismatch when the bases differ by more than
/// tols::base_match in any coordinate.
double inner(const Tangent& u, const Tangent& v);
double norm(const Tangent& u);

/// Exponential map: follow the geodesic leaving p with velocity v for unit
/// time. Euclidean: p + v. Hyperboloid: cosh(|v|) p + sinh(|v|) v/|v|, with a
/// Taylor guard below tols::small_angle and a renormalisation of the
/// Minkowski constraint afterwards.
Point exp_map(const Point& p, const Tangent& v);

/// Inverse of the exponential map: the tangent at p pointing to q with
/// |log(p,q)| = dist(p,q).
Tangent log_map(const Point& p, const Point& q);

/// Geodesic distance. Hyperboloid: arccosh(-<<p,q>>) with the argument
/// clamped to >= 1 against roundoff.
double dist(const Point& p, const Point& q);

/// Parallel transport of u from T_p M to T_q M along the connecting geodesic.
Tangent transport(const Point& p, const Point& q, const Tangent& u);

/// Constant-speed geodesic point exp_p(t log(p,q)), t in [0,1].
Point geodesic_point(const Point& p, const Point& q, double t);

/// Tangent arithmetic (same base point required).
Tangent operator+(const Tangent& a, const Tangent& b);
Tangent operator-(const Tangent& a, const Tangent& b);
Tangent operator*(double s, const Tangent& a);
Tangent operator-(const Tangent& a);

/// Orthonormal basis of T_p M (dim vectors), deterministic.
std::vector<Tangent> tangent_basis(const Point& p);

}  // namespace hvi
