#include <doctest.h>

#include <cmath>

#include "hvi/gap.hpp"
#include "hvi/solver.hpp"
#include "support/oracles.hpp"

using namespace hvi;

namespace {

const ManifoldDescriptor kE1 = euclidean(1);
const ManifoldDescriptor kE2 = euclidean(2);
const ManifoldDescriptor kH2 = hyperboloid(2);

Point e1p(double x) { return make_point(kE1, Eigen::VectorXd::Constant(1, x)); }
Point e2p(double x, double y) { return make_point(kE2, Eigen::Vector2d(x, y)); }

FieldOracle identity_field(const ManifoldDescriptor& m) {
  ConvexPotential pot;
  pot.anchors = {origin(m)};
  pot.weights = {1.0};
  return FieldOracle::gradient(pot);
}

ConvexSet interval_r1() {
  std::vector<ConvexSet> walls;
  walls.push_back(ConvexSet::euclidean_halfspace(kE1, Eigen::VectorXd::Ones(1), 1.0));
  walls.push_back(ConvexSet::euclidean_halfspace(kE1, -Eigen::VectorXd::Ones(1), 1.0));
  return ConvexSet::intersect(std::move(walls));
}

ConvexSet box_e2(double half) {
  std::vector<ConvexSet> walls;
  walls.push_back(ConvexSet::euclidean_halfspace(kE2, Eigen::Vector2d(1, 0), half));
  walls.push_back(ConvexSet::euclidean_halfspace(kE2, Eigen::Vector2d(-1, 0), half));
  walls.push_back(ConvexSet::euclidean_halfspace(kE2, Eigen::Vector2d(0, 1), half));
  walls.push_back(ConvexSet::euclidean_halfspace(kE2, Eigen::Vector2d(0, -1), half));
  return ConvexSet::intersect(std::move(walls));
}

}  // namespace

TEST_CASE("gap estimate on the box fixed point") {
  // X(p) = p over [-1,1]^2 at the solution 0: h(0) = sup <q, -q> = 0.
  const FieldOracle f = identity_field(kE2);
  const auto est = gap_estimate(f, box_e2(1.0), e2p(0, 0), 2000, 11);
  CHECK(est.value_lower_bound <= 0.0 + 1e-12);
  CHECK(est.value_lower_bound >= -1e-12);  // q = p contributes exactly 0
}

TEST_CASE("gap estimate approaches the closed form on R^1") {
  // X(x) = x over [-1,1] at p = 1: h(1) = sup q(1-q) = 1/4 at q = 1/2.
  const FieldOracle f = identity_field(kE1);
  const auto est = gap_estimate(f, interval_r1(), e1p(1.0), 4000, 11);
  CHECK(est.value_lower_bound <= 0.25 + 1e-12);
  CHECK(est.value_lower_bound >= 0.2499);
  CHECK(est.argmax_q.coords[0] == doctest::Approx(0.5).epsilon(1e-2));
}

TEST_CASE("gap estimates are monotone under nested refinement") {
  const FieldOracle f = identity_field(kE1);
  double prev = -1e18;
  for (int n : {100, 400, 1600}) {
    const double v = gap_estimate(f, interval_r1(), e1p(1.0), n, 11).value_lower_bound;
    CHECK(v >= prev - 1e-15);
    prev = v;
  }
}

TEST_CASE("eps-solution consistency and refutation") {
  const FieldOracle f = identity_field(kE1);
  const ConvexSet omega = interval_r1();

  // The true solution is consistent at eps = 0.
  CHECK_FALSE(eps_solution_check(f, omega, e1p(0.0), 0.0, 2000, 5).refuted);

  // Distance 1 from the solution: closed-form gap 0.25 > 0.01.
  const auto refuted = eps_solution_check(f, omega, e1p(1.0), 0.01, 2000, 5);
  CHECK(refuted.refuted);

  // Monotone in eps: consistent at a level stays consistent above it.
  CHECK_FALSE(eps_solution_check(f, omega, e1p(1.0), 0.3, 2000, 5).refuted);
  CHECK_FALSE(eps_solution_check(f, omega, e1p(1.0), 0.5, 2000, 5).refuted);
}

TEST_CASE("fixed point residual") {
  const FieldOracle f = identity_field(kE1);
  CHECK(fixed_point_residual(f, ConvexSet::whole(kE1), e1p(1.0), 1.0) == doctest::Approx(1.0));
  CHECK(fixed_point_residual(f, ConvexSet::whole(kE1), e1p(0.0), 1.0) < 1e-15);
  CHECK(fixed_point_residual(f, interval_r1(), e1p(0.0), 0.5) < 1e-15);
  // Away from the solution the residual equals alpha |X(p)| while unconstrained.
  CHECK(fixed_point_residual(f, ConvexSet::whole(kE1), e1p(0.4), 0.5) ==
        doctest::Approx(0.2).epsilon(1e-12));
  CHECK_THROWS_AS(fixed_point_residual(f, ConvexSet::whole(kE1), e1p(0.0), 0.0), InvalidArgument);
}

TEST_CASE("reference oracle: single anchor and symmetric pair") {
  ConvexPotential single;
  single.anchors = {e2p(0.3, -0.7)};
  single.weights = {1.0};
  const FieldOracle f = FieldOracle::gradient(single);
  const auto oracle = solve_reference_rgd(f, ConvexSet::whole(kE2), e2p(2, 2));
  CHECK(dist(oracle.result, e2p(0.3, -0.7)) < 1e-9);
  CHECK(oracle.residual <= 1e-10);

  // Symmetric two-anchor mean on H^2 is the geodesic midpoint.
  const Point o = origin(kH2);
  const auto basis = tangent_basis(o);
  const Point a = exp_map(o, 0.8 * basis[0]);
  const Point b = exp_map(o, -0.8 * basis[0]);
  ConvexPotential pair;
  pair.anchors = {a, b};
  pair.weights = {1.0, 1.0};
  const auto mid = solve_reference_rgd(FieldOracle::gradient(pair), ConvexSet::whole(kH2),
                                       exp_map(o, 0.3 * basis[1]));
  CHECK(std::abs(dist(mid.result, a) - dist(mid.result, b)) < 1e-9);
  CHECK(dist(mid.result, o) < 1e-8);
}

TEST_CASE("gradient descent and grid search agree on a hyperbolic mean") {
  const Point o = origin(kH2);
  const auto basis = tangent_basis(o);
  ConvexPotential pot;
  for (double angle : {0.0, 2.0, 4.2}) {
    pot.anchors.push_back(
        exp_map(o, 0.6 * (std::cos(angle) * basis[0] + std::sin(angle) * basis[1])));
  }
  pot.weights = {1.0, 1.3, 0.7};
  const FieldOracle f = FieldOracle::gradient(pot);
  const ConvexSet omega = ConvexSet::ball(o, 2.0);

  const auto rgd = solve_reference_rgd(f, omega, pot.anchors[0]);
  const auto grid = solve_reference_grid(f, omega, o, 1.5);
  CHECK(dist(rgd.result, grid.result) < 2e-3);
  CHECK(rgd.residual <= 1e-10);
}

TEST_CASE("oracle solutions have zero gap and zero fixed-point residual") {
  // Constrained problem with an active bound: X(p) = p over a shifted ball.
  const FieldOracle f = identity_field(kE2);
  const ConvexSet ball = ConvexSet::ball(e2p(2, 0), 1.0);
  const auto oracle = solve_reference_rgd(f, ball, e2p(2.5, 0.5));
  CHECK(dist(oracle.result, e2p(1, 0)) < 1e-9);

  const auto est = gap_estimate(f, ball, oracle.result, 3000, 9);
  CHECK(est.value_lower_bound <= 1e-6);
  for (double alpha : {0.1, 1.0, 2.0}) {
    CHECK(fixed_point_residual(f, ball, oracle.result, alpha) <= 1e-8);
  }
}

TEST_CASE("sampled non-solutions are refuted") {
  const FieldOracle f = identity_field(kE2);
  const ConvexSet box = box_e2(1.0);
  for (const auto& p : {e2p(1, 0), e2p(0.7, -0.7), e2p(-1, 1)}) {
    REQUIRE(fixed_point_residual(f, box, p, 1.0) > 0.1);
    const auto est = gap_estimate(f, box, p, 4000, 13);
    CHECK(est.value_lower_bound > 0.0);
  }

  // Same direction on a hyperbolic mean: points with a visible fixed-point
  // residual carry a strictly positive sampled gap.
  const Point o = origin(kH2);
  const auto basis = tangent_basis(o);
  ConvexPotential pot;
  pot.anchors = {exp_map(o, 0.6 * basis[0]), exp_map(o, -0.5 * basis[1])};
  pot.weights = {1.0, 2.0};
  const FieldOracle hf = FieldOracle::gradient(pot);
  const ConvexSet ball = ConvexSet::ball(o, 2.0);
  for (double off : {0.5, 1.0, 1.5}) {
    const Point p = exp_map(o, off * (0.8 * basis[0] + 0.6 * basis[1]));
    REQUIRE(fixed_point_residual(hf, ball, p, 1.0) > 0.1);
    CHECK(gap_estimate(hf, ball, p, 4000, 17).value_lower_bound > 0.0);
  }
}

TEST_CASE("oracle is unavailable for cone-augmented fields") {
  const FieldOracle f = identity_field(kE2);
  const ConvexSet ball = ConvexSet::ball(e2p(0, 0), 1.0);
  const FieldOracle augmented = add_normal_cone(f, ball);
  CHECK_THROWS_AS(solve_reference_rgd(augmented, ball, e2p(0.5, 0)), OracleNotAvailable);
}
