#include "hvi/convex_set.hpp"

#include <algorithm>
#include <cmath>

namespace hvi {

namespace {

void require_on_manifold(const ConvexSet& set, const Point& p) {
  if (!(set.manifold() == p.manifold)) {
    throw ManifoldMismatch("point is not on the set's manifold");
  }
}

Eigen::VectorXd unit_ambient(const Tangent& v) {
  const double n = norm(v);
  if (n <= 0.0) throw InvalidArgument("half-space normal must be nonzero");
  return v.components / n;
}

// Closed-form projections -------------------------------------------------

ProjectionResult project_ball(const GeodesicBallSet& b, const Point& p) {
  const double d = dist(b.center, p);
  if (d <= b.radius) return {p, 0.0, true, 0.0};
  Point q = geodesic_point(b.center, p, b.radius / d);
  return {std::move(q), d - b.radius, true, 0.0};
}

ProjectionResult project_log_halfspace(const LogHalfSpaceSet& h, const Point& p) {
  if (p.manifold.kind == ManifoldKind::Euclidean) {
    const double s = h.unit.dot(p.coords - h.anchor.coords);
    if (s <= 0.0) return {p, 0.0, true, 0.0};
    return {Point{p.manifold, p.coords - s * h.unit}, s, true, 0.0};
  }
  // Hyperboloid: the set coincides with { <<a,x>> <= 0 } for the unit
  // spacelike vector a; the nearest point on { <<a,x>> = 0 } is
  // (p - s a)/sqrt(1+s^2) at distance arcsinh(s), s = <<a,p>>.
  const double s = minkowski(h.unit, p.coords);
  if (s <= 0.0) return {p, 0.0, true, 0.0};
  Eigen::VectorXd q = (p.coords - s * h.unit) / std::sqrt(1.0 + s * s);
  return {Point{p.manifold, std::move(q)}, std::asinh(s), true, 0.0};
}

ProjectionResult project_euclidean_halfspace(const EuclideanHalfSpaceSet& h, const Point& p) {
  const double an = h.a.norm();
  const double s = (h.a.dot(p.coords) - h.b) / an;
  if (s <= 0.0) return {p, 0.0, true, 0.0};
  return {Point{p.manifold, p.coords - (s / an) * h.a}, s, true, 0.0};
}

}  // namespace

ConvexSet::ConvexSet(ManifoldDescriptor m, Data d)
    : manifold_(m), data_(std::make_shared<const Data>(std::move(d))) {}

ConvexSet ConvexSet::whole(const ManifoldDescriptor& m) {
  return ConvexSet(m, WholeManifoldSet{m});
}

ConvexSet ConvexSet::ball(Point center, double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("geodesic ball radius must be positive");
  ManifoldDescriptor m = center.manifold;
  return ConvexSet(m, GeodesicBallSet{std::move(center), radius});
}

ConvexSet ConvexSet::log_halfspace(Point anchor, Tangent normal) {
  if (!same_point(normal.base, anchor)) {
    throw BasePointMismatch("half-space normal must be tangent at the anchor");
  }
  Eigen::VectorXd unit = unit_ambient(normal);
  ManifoldDescriptor m = anchor.manifold;
  return ConvexSet(m, LogHalfSpaceSet{std::move(anchor), std::move(normal), std::move(unit)});
}

ConvexSet ConvexSet::euclidean_halfspace(const ManifoldDescriptor& m, Eigen::VectorXd a,
                                         double b) {
  if (m.kind != ManifoldKind::Euclidean) {
    throw InvalidArgument("affine half-spaces are only defined on Euclidean manifolds");
  }
  if (a.size() != m.dim || a.norm() <= 0.0) {
    throw InvalidArgument("half-space needs a nonzero normal of matching dimension");
  }
  return ConvexSet(m, EuclideanHalfSpaceSet{m, std::move(a), b});
}

ConvexSet ConvexSet::intersect(std::vector<ConvexSet> members) {
  if (members.empty()) throw InvalidArgument("intersection needs at least one member");
  const ManifoldDescriptor m = members.front().manifold();
  for (const ConvexSet& s : members) {
    if (!(s.manifold() == m)) throw ManifoldMismatch("intersection members on different manifolds");
  }
  ConvexSet set(m, IntersectionSet{std::move(members)});
  // Feasibility probe: cyclic projection from the first member's anchor must
  // settle on a point that every member accepts.
  const auto& inter = std::get<IntersectionSet>(set.data());
  Point start = anchor_point(inter.members.front());
  ProjectionResult probe{start, 0, false, 0};
  try {
    probe = project(set, start);
  } catch (const NoConvergence& e) {
    throw InfeasibleSet("intersection feasibility probe did not converge (residual " +
                        std::to_string(e.best.residual) + ")");
  }
  for (const ConvexSet& s : inter.members) {
    if (!contains(s, probe.point, 1e-7)) {
      throw InfeasibleSet("intersection feasibility probe settled outside a member");
    }
  }
  return set;
}

bool contains(const ConvexSet& set, const Point& p, double tol) {
  require_on_manifold(set, p);
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, WholeManifoldSet>) {
          return true;
        } else if constexpr (std::is_same_v<T, GeodesicBallSet>) {
          return dist(s.center, p) <= s.radius + tol;
        } else if constexpr (std::is_same_v<T, LogHalfSpaceSet>) {
          Tangent unit{s.anchor, s.unit};
          return inner(unit, log_map(s.anchor, p)) <= tol;
        } else if constexpr (std::is_same_v<T, EuclideanHalfSpaceSet>) {
          return (s.a.dot(p.coords) - s.b) / s.a.norm() <= tol;
        } else {
          for (const ConvexSet& member : s.members) {
            if (!contains(member, p, tol)) return false;
          }
          return true;
        }
      },
      set.data());
}

ProjectionResult project(const ConvexSet& set, const Point& p, int max_sweeps) {
  require_on_manifold(set, p);
  return std::visit(
      [&](const auto& s) -> ProjectionResult {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, WholeManifoldSet>) {
          return {p, 0.0, true, 0.0};
        } else if constexpr (std::is_same_v<T, GeodesicBallSet>) {
          return project_ball(s, p);
        } else if constexpr (std::is_same_v<T, LogHalfSpaceSet>) {
          return project_log_halfspace(s, p);
        } else if constexpr (std::is_same_v<T, EuclideanHalfSpaceSet>) {
          return project_euclidean_halfspace(s, p);
        } else {
          // Cyclic projections. The iterate settles on a point of the
          // intersection; the per-sweep movement is reported as residual.
          Point x = p;
          double move = 0.0;
          for (int sweep = 0; sweep < max_sweeps; ++sweep) {
            Point before = x;
            for (const ConvexSet& member : s.members) {
              x = project(member, x, max_sweeps).point;
            }
            move = dist(before, x);
            if (move < tols::intersection_move) {
              return {x, dist(p, x), true, move};
            }
          }
          ProjectionResult best{x, dist(p, x), false, move};
          throw NoConvergence("cyclic projection exceeded " + std::to_string(max_sweeps) +
                                  " sweeps (movement " + std::to_string(move) + ")",
                              best);
        }
      },
      set.data());
}

double distance_to_set(const ConvexSet& set, const Point& p) {
  return dist(p, project(set, p).point);
}

Point anchor_point(const ConvexSet& set) {
  return std::visit(
      [&](const auto& s) -> Point {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, WholeManifoldSet>) {
          return origin(s.manifold);
        } else if constexpr (std::is_same_v<T, GeodesicBallSet>) {
          return s.center;
        } else if constexpr (std::is_same_v<T, LogHalfSpaceSet>) {
          return s.anchor;
        } else if constexpr (std::is_same_v<T, EuclideanHalfSpaceSet>) {
          const double an2 = s.a.squaredNorm();
          Eigen::VectorXd boundary = (s.b / an2) * s.a;
          return Point{s.manifold, boundary - s.a / std::sqrt(an2)};
        } else {
          return project(s.members.front(), anchor_point(s.members.front())).point;
        }
      },
      set.data());
}

std::vector<Point> sample_set(const ConvexSet& set, int count, uint64_t seed,
                              const std::optional<Point>& focus) {
  if (count <= 0) throw EmptySample("sample count must be positive");
  std::vector<Point> out;
  out.reserve(count + 32);

  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, WholeManifoldSet>) {
          Point center = focus.value_or(origin(s.manifold));
          out = sample_ball(center, 4.0, count, seed);
          out.push_back(center);
        } else if constexpr (std::is_same_v<T, GeodesicBallSet>) {
          const int dim = s.center.manifold.dim;
          QuasiRandom qr(dim + 1, seed);
          auto basis = tangent_basis(s.center);
          for (int i = 0; i < count; ++i) {
            auto u = qr.next();
            Eigen::VectorXd c(dim);
            for (int j = 0; j < dim; ++j) c[j] = u[j] - 0.5;
            if (c.norm() < 1e-12) c[0] = 1.0;
            c.normalize();
            const double r = (i % 2 == 0) ? s.radius : s.radius * std::sqrt(u[dim]);
            Tangent t = zero_tangent(s.center);
            for (int j = 0; j < dim; ++j) t = t + (r * c[j]) * basis[j];
            out.push_back(exp_map(s.center, t));
          }
          out.push_back(s.center);
        } else if constexpr (std::is_same_v<T, LogHalfSpaceSet> ||
                             std::is_same_v<T, EuclideanHalfSpaceSet>) {
          // Boundary points are exp_y(w) for w orthogonal to the normal at an
          // anchor y of the bounding hypersurface; interior points push a
          // nonnegative multiple of the inward normal on top.
          Point y = [&] {
            if constexpr (std::is_same_v<T, EuclideanHalfSpaceSet>) {
              return Point{s.manifold, (s.b / s.a.squaredNorm()) * s.a};
            } else {
              return s.anchor;
            }
          }();
          Tangent inward = [&] {
            if constexpr (std::is_same_v<T, EuclideanHalfSpaceSet>) {
              return Tangent{y, -s.a / s.a.norm()};
            } else {
              return Tangent{y, -s.unit};
            }
          }();
          auto basis = tangent_basis(y);
          // Orthogonalise the basis against the normal direction.
          std::vector<Tangent> tang;
          for (const Tangent& b : basis) {
            Tangent t = b - inner(b, inward) * inward;
            if (norm(t) > 1e-10) tang.push_back((1.0 / norm(t)) * t);
          }
          const double R = 3.0;
          const int dim = static_cast<int>(tang.size());
          QuasiRandom qr(dim + 1, seed);
          for (int i = 0; i < count; ++i) {
            auto u = qr.next();
            Tangent w = zero_tangent(y);
            for (int j = 0; j < dim; ++j) w = w + (R * (2.0 * u[j] - 1.0)) * tang[j];
            const double depth = (i % 2 == 0) ? 0.0 : R * u[dim];
            w = w + depth * inward;
            out.push_back(exp_map(y, w));
          }
          out.push_back(y);
        } else {
          // Intersection: draw batches from every member and project inward.
          const auto& members = s.members;
          const int m = static_cast<int>(members.size());
          const int per = (count + m - 1) / m;
          for (int i = 0; i < m; ++i) {
            for (const Point& cand : sample_set(members[i], per, seed + 1 + i, focus)) {
              out.push_back(project(set, cand).point);
            }
          }
          out.push_back(anchor_point(set));
        }
      },
      set.data());

  if (focus && !std::holds_alternative<WholeManifoldSet>(set.data())) {
    // A few projected probes around the focus improve local coverage.
    for (double r : {0.5, 1.0, 2.0}) {
      for (const Tangent& d : sphere_directions(*focus, 8, seed)) {
        out.push_back(project(set, exp_map(*focus, r * d)).point);
      }
    }
    out.push_back(project(set, *focus).point);
  }
  return out;
}

bool normal_cone_contains(const ConvexSet& set, const Point& p, const Tangent& w, double tol,
                          int sample_count, uint64_t seed) {
  require_on_manifold(set, p);
  if (!contains(set, p, tol)) {
    throw PointNotInSet("normal cone is only defined at points of the set");
  }
  const double wn = norm(w);
  if (wn == 0.0) return true;

  std::vector<Point> qs = sample_set(set, sample_count, seed, p);
  // Probes along w catch interior points: near an interior p the projection
  // is the identity and <w, log(p,q)> = s|w| > 0 refutes.
  Tangent what = (1.0 / wn) * w;
  for (double sc : {1e-3, 1e-2, 0.1, 0.5, 1.0}) {
    qs.push_back(project(set, exp_map(p, sc * what)).point);
  }
  for (const Point& q : qs) {
    if (inner(w, log_map(p, q)) > tol) return false;
  }
  return true;
}

std::vector<Tangent> active_normals(const ConvexSet& set, const Point& p, double boundary_tol) {
  require_on_manifold(set, p);
  std::vector<Tangent> normals;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, WholeManifoldSet>) {
          // no boundary
        } else if constexpr (std::is_same_v<T, GeodesicBallSet>) {
          const double d = dist(s.center, p);
          if (d >= s.radius - boundary_tol && d > 0.0) {
            Tangent inwards = log_map(p, s.center);
            normals.push_back((-1.0 / norm(inwards)) * inwards);
          }
        } else if constexpr (std::is_same_v<T, LogHalfSpaceSet>) {
          Tangent unit{s.anchor, s.unit};
          if (inner(unit, log_map(s.anchor, p)) >= -boundary_tol) {
            if (p.manifold.kind == ManifoldKind::Euclidean) {
              normals.push_back(Tangent{p, s.unit});
            } else {
              // Riemannian gradient of x -> <<a,x>>: tangent projection of a.
              Eigen::VectorXd g = s.unit + minkowski(s.unit, p.coords) * p.coords;
              Tangent t{p, std::move(g)};
              const double n = norm(t);
              if (n > 1e-12) normals.push_back((1.0 / n) * t);
            }
          }
        } else if constexpr (std::is_same_v<T, EuclideanHalfSpaceSet>) {
          if ((s.a.dot(p.coords) - s.b) / s.a.norm() >= -boundary_tol) {
            normals.push_back(Tangent{p, s.a / s.a.norm()});
          }
        } else {
          for (const ConvexSet& member : s.members) {
            auto sub = active_normals(member, p, boundary_tol);
            normals.insert(normals.end(), sub.begin(), sub.end());
          }
        }
      },
      set.data());
  return normals;
}

}  // namespace hvi
