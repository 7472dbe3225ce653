#include "hvi/manifold.hpp"

#include <cmath>

namespace hvi {

namespace {

void require_same_manifold(const ManifoldDescriptor& a, const ManifoldDescriptor& b) {
  if (!(a == b)) {
    throw ManifoldMismatch("points live on different manifolds: " + a.name() + " vs " + b.name());
  }
}

void require_same_base(const Point& a, const Point& b) {
  require_same_manifold(a.manifold, b.manifold);
  if ((a.coords - b.coords).lpNorm<Eigen::Infinity>() > tols::base_match) {
    throw BasePointMismatch("tangent base points differ beyond tolerance");
  }
}

// Rescale an ambient vector back onto <<x,x>> = -1 to suppress drift.
Eigen::VectorXd renormalize_hyperboloid(Eigen::VectorXd x) {
  const double q = -minkowski(x, x);
  if (q <= 0.0) {
    throw InvalidArgument("vector cannot be normalised onto the hyperboloid");
  }
  x /= std::sqrt(q);
  if (x[0] < 0.0) x = -x;
  return x;
}

// Project an ambient vector onto the tangent space at hyperboloid point p.
Eigen::VectorXd project_tangent_hyp(const Eigen::VectorXd& p, const Eigen::VectorXd& w) {
  return w + minkowski(w, p) * p;
}

}  // namespace

std::string ManifoldDescriptor::name() const {
  const char* k = kind == ManifoldKind::Euclidean ? "euclidean" : "hyperboloid";
  return std::string(k) + "(" + std::to_string(dim) + ")";
}

ManifoldDescriptor euclidean(int dim) {
  if (dim < 1) throw InvalidArgument("manifold dimension must be >= 1");
  return {ManifoldKind::Euclidean, dim};
}

ManifoldDescriptor hyperboloid(int dim) {
  if (dim < 1) throw InvalidArgument("manifold dimension must be >= 1");
  return {ManifoldKind::Hyperboloid, dim};
}

double minkowski(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double s = -a[0] * b[0];
  for (Eigen::Index i = 1; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Point make_point(const ManifoldDescriptor& m, Eigen::VectorXd coords) {
  if (coords.size() != m.ambient_dim()) {
    throw InvalidArgument("point has " + std::to_string(coords.size()) +
                          " coordinates, expected " + std::to_string(m.ambient_dim()) + " on " +
                          m.name());
  }
  if (m.kind == ManifoldKind::Hyperboloid) {
    const double q = minkowski(coords, coords);
    if (std::abs(q + 1.0) > tols::embedding || coords[0] <= 0.0) {
      throw InvalidArgument("coordinates violate the hyperboloid constraint <<x,x>> = -1, x0 > 0");
    }
    coords = renormalize_hyperboloid(std::move(coords));
  }
  return Point{m, std::move(coords)};
}

Tangent make_tangent(const Point& base, Eigen::VectorXd components) {
  if (components.size() != base.manifold.ambient_dim()) {
    throw InvalidArgument("tangent dimension does not match the base manifold");
  }
  if (base.manifold.kind == ManifoldKind::Hyperboloid) {
    const double t = minkowski(components, base.coords);
    if (std::abs(t) > tols::tangency) {
      throw InvalidArgument("components are not tangent to the hyperboloid at the base point");
    }
    components = project_tangent_hyp(base.coords, components);
  }
  return Tangent{base, std::move(components)};
}

Tangent zero_tangent(const Point& base) {
  return Tangent{base, Eigen::VectorXd::Zero(base.manifold.ambient_dim())};
}

Point origin(const ManifoldDescriptor& m) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(m.ambient_dim());
  if (m.kind == ManifoldKind::Hyperboloid) c[0] = 1.0;
  return Point{m, std::move(c)};
}

Point hyperboloid_lift(const ManifoldDescriptor& m, const Eigen::VectorXd& spatial) {
  if (m.kind != ManifoldKind::Hyperboloid) {
    throw InvalidArgument("hyperboloid_lift requires a hyperboloid descriptor");
  }
  if (spatial.size() != m.dim) throw InvalidArgument("spatial part has wrong dimension");
  Eigen::VectorXd c(m.dim + 1);
  c[0] = std::sqrt(1.0 + spatial.squaredNorm());
  c.tail(m.dim) = spatial;
  return Point{m, std::move(c)};
}

bool same_point(const Point& a, const Point& b, double tol) {
  return a.manifold == b.manifold && (a.coords - b.coords).lpNorm<Eigen::Infinity>() <= tol;
}

double inner(const Tangent& u, const Tangent& v) {
  require_same_base(u.base, v.base);
  if (u.base.manifold.kind == ManifoldKind::Euclidean) {
    return u.components.dot(v.components);
  }
  return minkowski(u.components, v.components);
}

double norm(const Tangent& u) {
  double q;
  if (u.base.manifold.kind == ManifoldKind::Euclidean) {
    q = u.components.squaredNorm();
  } else {
    // Positive definite on the tangent space; clamp roundoff.
    q = std::max(0.0, minkowski(u.components, u.components));
  }
  return std::sqrt(q);
}

Point exp_map(const Point& p, const Tangent& v) {
  require_same_base(v.base, p);
  if (p.manifold.kind == ManifoldKind::Euclidean) {
    return Point{p.manifold, p.coords + v.components};
  }
  const double n = norm(v);
  Eigen::VectorXd x;
  if (n < tols::small_angle) {
    const double n2 = n * n;
    x = (1.0 + 0.5 * n2) * p.coords + (1.0 + n2 / 6.0) * v.components;
  } else {
    x = std::cosh(n) * p.coords + (std::sinh(n) / n) * v.components;
  }
  return Point{p.manifold, renormalize_hyperboloid(std::move(x))};
}

// cosh(d) - 1 evaluated without cancellation: <<q-p, q-p>> = 2 cosh(d) - 2.
static double cosh_dist_minus_one(const Point& p, const Point& q) {
  const Eigen::VectorXd diff = q.coords - p.coords;
  return std::max(0.0, 0.5 * minkowski(diff, diff));
}

Tangent log_map(const Point& p, const Point& q) {
  require_same_manifold(p.manifold, q.manifold);
  if (p.manifold.kind == ManifoldKind::Euclidean) {
    return Tangent{p, q.coords - p.coords};
  }
  const double x = cosh_dist_minus_one(p, q);   // cosh(d) - 1
  const double s = std::sqrt(x * (2.0 + x));    // sinh(d)
  Eigen::VectorXd u = (q.coords - p.coords) - x * p.coords;  // q - cosh(d) p, |u| = sinh(d)
  double factor;  // d / sinh(d)
  if (s < 1e-8) {
    factor = 1.0 - s * s / 6.0;
  } else {
    factor = std::asinh(s) / s;
  }
  u = project_tangent_hyp(p.coords, u * factor);
  return Tangent{p, std::move(u)};
}

double dist(const Point& p, const Point& q) {
  require_same_manifold(p.manifold, q.manifold);
  if (p.manifold.kind == ManifoldKind::Euclidean) {
    return (q.coords - p.coords).norm();
  }
  const double x = cosh_dist_minus_one(p, q);
  return std::asinh(std::sqrt(x * (2.0 + x)));
}

Tangent transport(const Point& p, const Point& q, const Tangent& u) {
  require_same_base(u.base, p);
  require_same_manifold(p.manifold, q.manifold);
  if (p.manifold.kind == ManifoldKind::Euclidean) {
    return Tangent{q, u.components};
  }
  if (same_point(p, q)) {
    return Tangent{q, u.components};
  }
  const double c = -minkowski(p.coords, q.coords);
  Eigen::VectorXd w =
      u.components + (minkowski(q.coords, u.components) / (1.0 + c)) * (p.coords + q.coords);
  w = project_tangent_hyp(q.coords, w);
  return Tangent{q, std::move(w)};
}

Point geodesic_point(const Point& p, const Point& q, double t) {
  require_same_manifold(p.manifold, q.manifold);
  if (t < 0.0 || t > 1.0) {
    throw TOutOfRange("geodesic parameter " + std::to_string(t) + " outside [0,1]");
  }
  if (p.manifold.kind == ManifoldKind::Euclidean) {
    return Point{p.manifold, p.coords + t * (q.coords - p.coords)};
  }
  return exp_map(p, t * log_map(p, q));
}

Tangent operator+(const Tangent& a, const Tangent& b) {
  require_same_base(a.base, b.base);
  return Tangent{a.base, a.components + b.components};
}

Tangent operator-(const Tangent& a, const Tangent& b) {
  require_same_base(a.base, b.base);
  return Tangent{a.base, a.components - b.components};
}

Tangent operator*(double s, const Tangent& a) { return Tangent{a.base, s * a.components}; }

Tangent operator-(const Tangent& a) { return Tangent{a.base, -a.components}; }

std::vector<Tangent> tangent_basis(const Point& p) {
  const int dim = p.manifold.dim;
  const int adim = p.manifold.ambient_dim();
  std::vector<Tangent> basis;
  basis.reserve(dim);
  if (p.manifold.kind == ManifoldKind::Euclidean) {
    for (int i = 0; i < dim; ++i) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
      e[i] = 1.0;
      basis.push_back(Tangent{p, std::move(e)});
    }
    return basis;
  }
  // Gram-Schmidt of the projected ambient basis under the (positive definite
  // on T_p) Minkowski form.
  for (int i = 0; i < adim && static_cast<int>(basis.size()) < dim; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(adim);
    e[i] = 1.0;
    Eigen::VectorXd v = project_tangent_hyp(p.coords, e);
    for (const Tangent& b : basis) {
      v -= minkowski(v, b.components) * b.components;
    }
    const double n = std::sqrt(std::max(0.0, minkowski(v, v)));
    if (n > 1e-10) {
      basis.push_back(Tangent{p, v / n});
    }
  }
  if (static_cast<int>(basis.size()) != dim) {
    throw InvalidArgument("failed to build a tangent basis");
  }
  return basis;
}

}  // namespace hvi
