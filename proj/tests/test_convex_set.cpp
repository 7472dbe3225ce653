#include <doctest.h>

#include <cmath>
#include <random>

#include "hvi/convex_set.hpp"
#include "support/oracles.hpp"

using namespace hvi;

namespace {

Point e2p(double x, double y) { return make_point(euclidean(2), Eigen::Vector2d(x, y)); }
const ManifoldDescriptor kH2 = hyperboloid(2);
const Point kO = origin(kH2);

ConvexSet interval_r1() {
  const auto e1 = euclidean(1);
  std::vector<ConvexSet> walls;
  walls.push_back(ConvexSet::euclidean_halfspace(e1, Eigen::VectorXd::Ones(1), 1.0));
  walls.push_back(ConvexSet::euclidean_halfspace(e1, -Eigen::VectorXd::Ones(1), 1.0));
  return ConvexSet::intersect(std::move(walls));
}

}  // namespace

TEST_CASE("membership basics") {
  const ConvexSet ball = ConvexSet::ball(e2p(0, 0), 1.0);
  CHECK(contains(ball, e2p(0, 0), 0.0));
  CHECK(contains(ball, e2p(1, 0), 1e-12));
  CHECK_FALSE(contains(ball, e2p(1.1, 0), 1e-9));

  const Point y = e2p(0.5, 0.5);
  const ConvexSet hs = ConvexSet::log_halfspace(y, make_tangent(y, Eigen::Vector2d(1, 0)));
  CHECK(contains(hs, y, 1e-12));  // <v, log(y,y)> = 0
  CHECK(contains(hs, e2p(-3, 7), 1e-12));
  CHECK_FALSE(contains(hs, e2p(2, 0), 1e-9));

  CHECK(contains(ConvexSet::whole(euclidean(2)), e2p(1e9, -1e9), 0.0));
  CHECK_THROWS_AS(contains(ball, make_point(euclidean(3), Eigen::Vector3d(0, 0, 0)), 1e-9),
                  ManifoldMismatch);
}

TEST_CASE("construction guards") {
  CHECK_THROWS_AS(ConvexSet::ball(e2p(0, 0), 0.0), InvalidArgument);
  CHECK_THROWS_AS(ConvexSet::ball(e2p(0, 0), -1.0), InvalidArgument);
  const Point y = e2p(0, 0);
  CHECK_THROWS_AS(ConvexSet::log_halfspace(y, make_tangent(y, Eigen::Vector2d(0, 0))),
                  InvalidArgument);
  CHECK_THROWS_AS(ConvexSet::euclidean_halfspace(kH2, Eigen::Vector2d(1, 0), 0.0),
                  InvalidArgument);
  CHECK_THROWS_AS(ConvexSet::intersect({}), InvalidArgument);
}

TEST_CASE("euclidean ball projection") {
  const ConvexSet ball = ConvexSet::ball(e2p(0, 0), 1.0);
  const auto inside = project(ball, e2p(0.5, 0.2));
  CHECK(same_point(inside.point, e2p(0.5, 0.2)));
  CHECK(inside.distance == 0.0);

  const auto out = project(ball, e2p(2, 0));
  CHECK((out.point.coords - Eigen::Vector2d(1, 0)).norm() < 1e-14);
  CHECK(out.distance == doctest::Approx(1.0));
}

TEST_CASE("hyperbolic ball projection moves along the connecting geodesic") {
  const Point c = exp_map(kO, 0.4 * tangent_basis(kO)[0]);
  const ConvexSet ball = ConvexSet::ball(c, 0.8);
  const Point p = exp_map(c, make_tangent(c, transport(kO, c, 1.7 * tangent_basis(kO)[1]).components));
  const double d = dist(c, p);
  REQUIRE(d > 0.8);
  const auto pr = project(ball, p);
  CHECK(dist(c, pr.point) == doctest::Approx(0.8).epsilon(1e-10));
  CHECK(pr.distance == doctest::Approx(d - 0.8).epsilon(1e-10));
  // Independent check: the boundary point reached by a dense sweep over the
  // boundary circle is no closer than the returned projection.
  const auto basis = tangent_basis(c);
  double best = 1e18;
  for (int i = 0; i < 20000; ++i) {
    const double a = 2 * M_PI * i / 20000.0;
    const Point b = exp_map(c, 0.8 * (std::cos(a) * basis[0] + std::sin(a) * basis[1]));
    best = std::min(best, dist(p, b));
  }
  CHECK(dist(p, pr.point) <= best + 1e-7);
}

TEST_CASE("hyperbolic half-space projection closed form") {
  // Unit spacelike normal a with <<a,a>> = 1; the set is { <<a,x>> <= 0 }.
  const auto basis = tangent_basis(kO);
  const Point anchor = exp_map(kO, 0.3 * basis[1]);
  const Tangent normal = transport(kO, anchor, basis[0]);
  const ConvexSet hs = ConvexSet::log_halfspace(anchor, normal);
  const Eigen::VectorXd a = normal.components / norm(normal);

  const Point p = exp_map(anchor, make_tangent(anchor, 1.2 * a));
  const double s = minkowski(a, p.coords);
  REQUIRE(s > 0.0);
  const auto pr = project(hs, p);
  CHECK(std::abs(minkowski(a, pr.point.coords)) < 1e-12);
  CHECK(pr.distance == doctest::Approx(std::asinh(s)).epsilon(1e-12));
  CHECK((pr.point.coords - (p.coords - s * a) / std::sqrt(1 + s * s)).norm() < 1e-12);

  // Independent check by direct minimisation over a chart of the boundary.
  const auto tb = tangent_basis(pr.point);
  std::vector<Tangent> boundary_dirs;
  for (const auto& b : tb) {
    Tangent t = b;
    const Tangent an{pr.point, a + minkowski(a, pr.point.coords) * pr.point.coords};
    t = t - (inner(t, an) / inner(an, an)) * an;
    if (norm(t) > 1e-8) boundary_dirs.push_back((1.0 / norm(t)) * t);
  }
  REQUIRE(boundary_dirs.size() == 1);
  double best = 1e18;
  for (int i = -20000; i <= 20000; ++i) {
    const Point b = exp_map(pr.point, (i / 10000.0) * boundary_dirs[0]);
    best = std::min(best, dist(p, b));
  }
  CHECK(pr.distance <= best + 1e-9);

  // Membership sign equivalence against the Minkowski form.
  std::mt19937_64 gen(3);
  auto u01 = [&] { return (gen() >> 11) * 0x1.0p-53; };
  for (int i = 0; i < 1000; ++i) {
    Tangent t = zero_tangent(anchor);
    const auto ab = tangent_basis(anchor);
    for (const auto& b : ab) t = t + (3.0 * (2 * u01() - 1)) * b;
    const Point x = exp_map(anchor, t);
    const double lhs = inner((1.0 / norm(normal)) * normal, log_map(anchor, x));
    const double rhs = minkowski(a, x.coords);
    if (std::min(std::abs(lhs), std::abs(rhs)) >= 1e-9) {
      CHECK(lhs * rhs > 0.0);
    }
    CHECK(contains(hs, x, 1e-9) == (rhs <= 1e-9));
  }
}

TEST_CASE("distance to set") {
  const auto e1 = euclidean(1);
  const ConvexSet hs = ConvexSet::euclidean_halfspace(euclidean(2), Eigen::Vector2d(1, 0), 0.0);
  CHECK(distance_to_set(hs, e2p(3, 4)) == doctest::Approx(3.0));
  CHECK(distance_to_set(hs, e2p(-1, 2)) == 0.0);

  const auto basis = tangent_basis(kO);
  const Point anchor = exp_map(kO, 0.2 * basis[1]);
  const ConvexSet hhs = ConvexSet::log_halfspace(anchor, transport(kO, anchor, basis[0]));
  const Eigen::VectorXd a =
      transport(kO, anchor, basis[0]).components / norm(transport(kO, anchor, basis[0]));
  // A point with <<a,p>> = 1 sits at arcsinh(1) from the boundary.
  const Point p = exp_map(anchor, make_tangent(anchor, std::asinh(1.0) * a));
  CHECK(minkowski(a, p.coords) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(distance_to_set(hhs, p) == doctest::Approx(std::asinh(1.0)).epsilon(1e-12));
  (void)e1;
}

TEST_CASE("projection variational inequality and nonexpansiveness") {
  std::mt19937_64 gen(17);
  auto u01 = [&] { return (gen() >> 11) * 0x1.0p-53; };
  std::vector<ConvexSet> sets;
  sets.push_back(ConvexSet::ball(e2p(0.2, -0.3), 1.1));
  sets.push_back(ConvexSet::euclidean_halfspace(euclidean(2), Eigen::Vector2d(2, -1), 0.4));
  sets.push_back(ConvexSet::ball(exp_map(kO, 0.3 * tangent_basis(kO)[0]), 0.9));
  sets.push_back(interval_r1());

  for (const ConvexSet& set : sets) {
    const Point base = anchor_point(set);
    auto rnd = [&] {
      Tangent t = zero_tangent(base);
      for (const auto& b : tangent_basis(base)) t = t + (3.0 * (2 * u01() - 1)) * b;
      return exp_map(base, t);
    };
    const auto qs = sample_set(set, 300, 99);
    for (int trial = 0; trial < 5; ++trial) {
      const Point p = rnd();
      const auto pr = project(set, p);
      CHECK(contains(set, pr.point, 1e-7));
      for (const Point& q : qs) {
        CHECK(inner(log_map(pr.point, q), log_map(pr.point, p)) <= 1e-7);
      }
      // Idempotence.
      CHECK(dist(project(set, pr.point).point, pr.point) < 1e-8);
    }
    for (int trial = 0; trial < 300; ++trial) {
      const Point p = rnd(), q = rnd();
      CHECK(dist(project(set, p).point, project(set, q).point) <= dist(p, q) + 1e-9);
    }
  }
}

TEST_CASE("box intersection projects like coordinate clamping") {
  std::vector<ConvexSet> walls;
  const auto e2 = euclidean(2);
  walls.push_back(ConvexSet::euclidean_halfspace(e2, Eigen::Vector2d(1, 0), 1.0));
  walls.push_back(ConvexSet::euclidean_halfspace(e2, Eigen::Vector2d(-1, 0), 1.0));
  walls.push_back(ConvexSet::euclidean_halfspace(e2, Eigen::Vector2d(0, 1), 1.0));
  walls.push_back(ConvexSet::euclidean_halfspace(e2, Eigen::Vector2d(0, -1), 1.0));
  const ConvexSet box = ConvexSet::intersect(std::move(walls));

  std::mt19937_64 gen(8);
  auto u01 = [&] { return (gen() >> 11) * 0x1.0p-53; };
  for (int i = 0; i < 200; ++i) {
    const Point p = e2p(6 * u01() - 3, 6 * u01() - 3);
    const auto pr = project(box, p);
    const Eigen::Vector2d clamped(std::clamp(p.coords[0], -1.0, 1.0),
                                  std::clamp(p.coords[1], -1.0, 1.0));
    CHECK((pr.point.coords - clamped).norm() < 1e-9);
    CHECK(pr.converged);
  }
}

TEST_CASE("intersection feasibility probe") {
  // Disjoint balls: infeasible.
  std::vector<ConvexSet> disjoint;
  disjoint.push_back(ConvexSet::ball(e2p(0, 0), 0.5));
  disjoint.push_back(ConvexSet::ball(e2p(3, 0), 0.5));
  CHECK_THROWS_AS(ConvexSet::intersect(std::move(disjoint)), InfeasibleSet);

  // Overlapping balls: fine.
  std::vector<ConvexSet> overlap;
  overlap.push_back(ConvexSet::ball(e2p(0, 0), 1.0));
  overlap.push_back(ConvexSet::ball(e2p(1, 0), 1.0));
  CHECK_NOTHROW(ConvexSet::intersect(std::move(overlap)));
}

TEST_CASE("cyclic projection sweep cap raises NoConvergence with the best iterate") {
  // A wedge that pinches far out: from beyond the pinch the alternating
  // projections zigzag toward it with per-sweep movement far above the stop
  // threshold, so a small sweep budget must fail loudly.
  const double theta = 0.01;
  std::vector<ConvexSet> members;
  const auto e2 = euclidean(2);
  members.push_back(ConvexSet::euclidean_halfspace(e2, Eigen::Vector2d(0, 1), 0.0));
  members.push_back(ConvexSet::euclidean_halfspace(
      e2, Eigen::Vector2d(std::sin(theta), -std::cos(theta)), 1.1 * std::cos(theta)));
  const ConvexSet wedge = ConvexSet::intersect(std::move(members));
  try {
    (void)project(wedge, e2p(500.0, 1.0), 2);
    FAIL("expected NoConvergence");
  } catch (const NoConvergence& e) {
    CHECK(e.best.converged == false);
    CHECK(e.best.residual > 1e-10);
  }
}

TEST_CASE("normal cone membership") {
  const ConvexSet ball = ConvexSet::ball(e2p(0, 0), 1.0);
  const Point interior = e2p(0.2, 0.1);
  CHECK(normal_cone_contains(ball, interior, zero_tangent(interior), 1e-9));
  CHECK_FALSE(normal_cone_contains(ball, interior, make_tangent(interior, Eigen::Vector2d(0.3, 0)),
                                   1e-9));

  const Point boundary = e2p(1, 0);
  CHECK(normal_cone_contains(ball, boundary, make_tangent(boundary, Eigen::Vector2d(2.5, 0)),
                             1e-9));
  CHECK_FALSE(normal_cone_contains(ball, boundary, make_tangent(boundary, Eigen::Vector2d(-1, 0)),
                                   1e-9));

  CHECK_THROWS_AS(
      normal_cone_contains(ball, e2p(2, 0), make_tangent(e2p(2, 0), Eigen::Vector2d(1, 0)), 1e-9),
      PointNotInSet);

  // Hyperbolic ball: the outward geodesic direction at a boundary point.
  const Point c = kO;
  const ConvexSet hball = ConvexSet::ball(c, 0.7);
  const Point bd = exp_map(c, 0.7 * tangent_basis(c)[0]);
  const Tangent outward = -1.0 * log_map(bd, c);
  CHECK(normal_cone_contains(hball, bd, 1.5 * outward, 1e-9));
  CHECK_FALSE(normal_cone_contains(hball, bd, transport(c, bd, tangent_basis(c)[1]), 1e-7));
}

TEST_CASE("every variant is geodesically convex on samples") {
  std::vector<ConvexSet> sets;
  sets.push_back(ConvexSet::ball(e2p(0.4, -0.1), 1.2));
  sets.push_back(ConvexSet::euclidean_halfspace(euclidean(2), Eigen::Vector2d(1, -2), 0.3));
  sets.push_back(ConvexSet::ball(exp_map(kO, 0.4 * tangent_basis(kO)[1]), 1.0));
  {
    const auto basis = tangent_basis(kO);
    const Point anchor = exp_map(kO, 0.3 * basis[0]);
    sets.push_back(ConvexSet::log_halfspace(anchor, transport(kO, anchor, basis[1])));
  }
  sets.push_back(interval_r1());

  for (const auto& set : sets) {
    const auto pts = sample_set(set, 60, 77);
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
      for (double t : {0.2, 0.5, 0.8}) {
        CHECK(contains(set, geodesic_point(pts[i], pts[i + 1], t), 1e-7));
      }
    }
  }
}

TEST_CASE("sampled points stay inside their set") {
  std::vector<ConvexSet> sets;
  sets.push_back(ConvexSet::ball(e2p(0.5, 0.5), 1.3));
  sets.push_back(ConvexSet::ball(exp_map(kO, 0.5 * tangent_basis(kO)[0]), 1.0));
  sets.push_back(interval_r1());
  const auto basis = tangent_basis(kO);
  sets.push_back(ConvexSet::log_halfspace(exp_map(kO, 0.1 * basis[1]),
                                          transport(kO, exp_map(kO, 0.1 * basis[1]), basis[0])));
  for (const auto& set : sets) {
    for (const Point& q : sample_set(set, 500, 31)) {
      CHECK(contains(set, q, 1e-7));
    }
  }
}
