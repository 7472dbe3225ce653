#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hvi/solver.hpp"
#include "support/oracles.hpp"

using namespace hvi;

namespace {

const ManifoldDescriptor kE1 = euclidean(1);
const ManifoldDescriptor kE2 = euclidean(2);

Point e1p(double x) { return make_point(kE1, Eigen::VectorXd::Constant(1, x)); }
Point e2p(double x, double y) { return make_point(kE2, Eigen::Vector2d(x, y)); }

FieldOracle identity_field(const ManifoldDescriptor& m) {
  ConvexPotential pot;
  pot.anchors = {origin(m)};
  pot.weights = {1.0};
  return FieldOracle::gradient(pot);
}

SolverConfig worked_example_config() {
  SolverConfig c;
  c.epsilon0 = 1.0;
  c.delta_minus = 0.3;
  c.delta_plus = 0.9;
  c.alpha_minus = 0.5;
  c.alpha_plus = 1.0;
  c.beta = 0.5;
  c.max_iter = 60;
  return c;  // alpha_k = 1, beta_k = 1 by default
}

}  // namespace

TEST_CASE("solver config ordering") {
  SolverConfig c = worked_example_config();
  CHECK_NOTHROW(c.validate());
  c.delta_minus = 0.95;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = worked_example_config();
  c.epsilon0 = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = worked_example_config();
  c.alpha_minus = 1.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = worked_example_config();
  c.beta = 1.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = worked_example_config();
  c.alpha_schedule = Schedule::constant(2.0);  // outside [alpha-, alpha+]
  CHECK_THROWS_AS(c.alpha_at(0), InvalidArgument);
  c.alpha_schedule = Schedule::table({1.0, 0.75, 0.5});
  CHECK(c.alpha_at(0) == 1.0);
  CHECK(c.alpha_at(5) == 0.5);  // table tail repeats
}

TEST_CASE("selection on the identity field") {
  const FieldOracle f = identity_field(kE2);
  const ConvexSet omega = ConvexSet::whole(kE2);
  const Point p = e2p(1, 0);
  const auto sel = select_u(f, p, 1.0, 1.0, 0.9, omega);
  CHECK((sel.u.components - Eigen::Vector2d(1, 0)).norm() < 1e-14);
  CHECK((sel.z.coords - Eigen::Vector2d(0, 0)).norm() < 1e-14);
  // <u, p - z> = 1 >= 0.9 * 1 with slack 0.1.
  CHECK(sel.margin == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("selection at a solution is vacuous") {
  const FieldOracle f = identity_field(kE2);
  const ConvexSet omega = ConvexSet::whole(kE2);
  const auto sel = select_u(f, e2p(0, 0), 0.5, 1.0, 0.9, omega);
  CHECK(dist(sel.z, e2p(0, 0)) == 0.0);
  CHECK(sel.margin == 0.0);
}

TEST_CASE("selection over a two-generator hull") {
  // f = |x|, eps = 0.5 at p = 1: generators {0.5, 1}, Omega = [-2, 2].
  ConvexPotential pot;
  pot.kind = ConvexPotential::Kind::WeightedDistances;
  pot.anchors = {e1p(0.0)};
  pot.weights = {1.0};
  const FieldOracle f = FieldOracle::subdifferential(pot);
  std::vector<ConvexSet> walls;
  walls.push_back(ConvexSet::euclidean_halfspace(kE1, Eigen::VectorXd::Ones(1), 2.0));
  walls.push_back(ConvexSet::euclidean_halfspace(kE1, -Eigen::VectorXd::Ones(1), 2.0));
  const ConvexSet omega = ConvexSet::intersect(std::move(walls));

  for (double delta_plus : {0.5, 0.9}) {
    const auto sel = select_u(f, e1p(1.0), 0.5, 1.0, delta_plus, omega);
    CHECK(sel.margin >= -1e-9);
    // Verify the returned candidate against every hull element on a 1e-3 grid.
    const double u = sel.u.components[0];
    const double z = std::clamp(1.0 - u, -2.0, 2.0);
    const double d2 = (1.0 - z) * (1.0 - z);
    for (int i = 0; i <= 500; ++i) {
      const double w = 0.5 + 0.5 * i / 500.0;
      CHECK(w * (1.0 - z) >= delta_plus * d2 - 1e-9);
    }
    // And the candidate itself lies in the hull.
    CHECK(u >= 0.5 - 1e-12);
    CHECK(u <= 1.0 + 1e-12);
  }
}

TEST_CASE("stopping rule") {
  CHECK(check_stop(e2p(1, 1), e2p(1, 1), 0.0));
  CHECK_FALSE(check_stop(e2p(0, 0), e2p(1, 0), 1e-8));
  CHECK(check_stop(e2p(0, 0), e2p(5e-9, 0), 1e-8));
}

TEST_CASE("backtracking reproduces the worked example") {
  const FieldOracle f = identity_field(kE2);
  const Point p = e2p(1, 0);
  const Point z = e2p(0, 0);

  // delta_minus = 0.3: i=0 fails (v=0 at y=z), i=1 gives <(0.5,0),(-1,0)> = -0.5 <= -0.3.
  auto bt = backtrack(f, p, z, 1.0, 1.0, 0.3, 60);
  CHECK(bt.i_k == 1);
  CHECK(bt.lambda_k == 0.5);
  CHECK((bt.y.coords - Eigen::Vector2d(0.5, 0)).norm() == 0.0);
  CHECK((bt.v.components - Eigen::Vector2d(0.5, 0)).norm() == 0.0);

  // delta_minus = 0.6 pushes one level deeper.
  bt = backtrack(f, p, z, 1.0, 1.0, 0.6, 60);
  CHECK(bt.i_k == 2);
  CHECK(bt.lambda_k == 0.25);
  CHECK((bt.y.coords - Eigen::Vector2d(0.75, 0)).norm() == 0.0);

  // Small beta accepts immediately on R^1.
  const FieldOracle f1 = identity_field(kE1);
  auto bt1 = backtrack(f1, e1p(1.0), e1p(0.0), 1.0, 0.1, 0.3, 60);
  CHECK(bt1.i_k == 0);
  CHECK(bt1.lambda_k == doctest::Approx(0.1));

  // Brute-force cross-check over a few configurations.
  auto field_fn = [](const Eigen::VectorXd& x) { return x; };
  for (double dm : {0.1, 0.3, 0.6, 0.8}) {
    for (double beta : {1.0, 0.7}) {
      const int expect = testing::brute_force_backtrack_index(field_fn, Eigen::Vector2d(1, 0),
                                                              Eigen::Vector2d(0, 0), 1.0, beta,
                                                              dm, 60);
      const auto got = backtrack(f, p, z, 1.0, beta, dm, 60);
      CHECK(got.i_k == expect);
    }
  }
}

TEST_CASE("backtracking exhaustion is loud") {
  // z chosen sideways from the field direction: <v, gamma'> stays >= 0.
  const FieldOracle f = identity_field(kE2);
  CHECK_THROWS_AS(backtrack(f, e2p(1, 0), e2p(1, 1), 1.0, 1.0, 0.3, 40), BacktrackExhausted);
  CHECK_THROWS_AS(backtrack(f, e2p(1, 0), e2p(1, 0), 1.0, 1.0, 0.3, 40), InvalidArgument);
}

TEST_CASE("half-space update continues the worked example") {
  const Point p = e2p(1, 0);
  const Point y = e2p(0.5, 0);
  const Tangent v = make_tangent(y, Eigen::Vector2d(0.5, 0));
  const ConvexSet omega = ConvexSet::whole(kE2);
  const auto hs = halfspace_update(p, y, v, omega);
  CHECK((hs.q.coords - Eigen::Vector2d(0.5, 0)).norm() < 1e-15);
  CHECK((hs.p_next.coords - Eigen::Vector2d(0.5, 0)).norm() < 1e-15);

  // p already inside S_k projects to itself.
  const auto inside = halfspace_update(e2p(0.2, 0.7), y, v, omega);
  CHECK((inside.q.coords - Eigen::Vector2d(0.2, 0.7)).norm() == 0.0);

  CHECK_THROWS_AS(halfspace_update(p, y, zero_tangent(y), omega), ZeroVector);
}

TEST_CASE("identity benchmark halves the distance every iteration") {
  const FieldOracle f = identity_field(kE2);
  const ConvexSet omega = ConvexSet::whole(kE2);
  SolverConfig c = worked_example_config();
  c.max_iter = 40;
  c.stop_tol = 0.0;
  const Point ref = e2p(0, 0);
  const auto report = run(f, omega, c, e2p(1, 0), ref);

  REQUIRE(report.steps.size() >= 31);
  CHECK(report.monitor_violations == 0);
  // p^1 = (0.5, 0) and dist(p^k, 0) = 2^-k for the first 30 iterations.
  CHECK((report.steps[0].p_next.coords - Eigen::Vector2d(0.5, 0)).norm() == 0.0);
  for (int k = 0; k < 30; ++k) {
    CHECK(*report.steps[k].dist_to_reference <=
          std::ldexp(1.0, -(k + 1)) * (1.0 + 1e-9));
  }
}

TEST_CASE("iterates match the flat-space reference to 1e-12") {
  const FieldOracle f = identity_field(kE2);
  const ConvexSet omega = ConvexSet::whole(kE2);
  SolverConfig c = worked_example_config();
  c.max_iter = 30;
  c.stop_tol = 0.0;
  const auto report = run(f, omega, c, e2p(1, 0));

  testing::FlatExtragradient flat;
  flat.field = [](const Eigen::VectorXd& x) { return x; };
  flat.project = [](const Eigen::VectorXd& x) { return x; };
  flat.alpha = 1.0;
  flat.beta = 1.0;
  flat.delta_minus = 0.3;
  flat.delta_plus = 0.9;
  flat.stop_tol = 0.0;
  const auto iters = flat.iterates(Eigen::Vector2d(1, 0), 30);

  REQUIRE(iters.size() >= report.steps.size() + 1);
  for (std::size_t k = 0; k < report.steps.size(); ++k) {
    CHECK((report.steps[k].p_next.coords - iters[k + 1]).norm() < 1e-12);
  }
}

TEST_CASE("start at the solution stops immediately") {
  const FieldOracle f = identity_field(kE2);
  const ConvexSet omega = ConvexSet::whole(kE2);
  const auto report = run(f, omega, worked_example_config(), e2p(0, 0));
  CHECK(report.certificate.status == Certificate::Status::EpsSolution);
  REQUIRE(report.steps.size() == 1);
  CHECK(report.steps[0].stopped);
  CHECK(report.steps[0].k == 0);
}

TEST_CASE("run rejects starts outside Omega") {
  const FieldOracle f = identity_field(kE2);
  const ConvexSet ball = ConvexSet::ball(e2p(0, 0), 1.0);
  CHECK_THROWS_AS(run(f, ball, worked_example_config(), e2p(3, 0)), InvalidArgument);
}

TEST_CASE("eps recursion follows min(eps, d^2)") {
  const FieldOracle f = identity_field(kE2);
  const ConvexSet omega = ConvexSet::whole(kE2);
  SolverConfig c = worked_example_config();
  c.epsilon0 = 0.3;
  c.max_iter = 12;
  c.stop_tol = 0.0;
  const auto report = run(f, omega, c, e2p(1, 0));
  double eps = c.epsilon0;
  for (const auto& t : report.steps) {
    CHECK(t.eps_k == eps);
    const double expected = std::min(eps, t.dist_p_z * t.dist_p_z);
    CHECK(t.eps_next == expected);
    CHECK(t.eps_next <= t.eps_k);
    eps = t.eps_next;
  }
}

TEST_CASE("fejer monitor flags decreasing distance to any solution") {
  const FieldOracle f = identity_field(kE2);
  const ConvexSet omega = ConvexSet::whole(kE2);
  SolverConfig c = worked_example_config();
  c.max_iter = 25;
  c.stop_tol = 0.0;
  const auto report = run(f, omega, c, e2p(0.7, -0.4), e2p(0, 0));
  CHECK(report.monitor_violations == 0);
  for (const auto& t : report.steps) {
    REQUIRE(t.monitors.fejer_decrement.has_value());
    CHECK(*t.monitors.fejer_decrement >= -1e-7);
  }
}

TEST_CASE("constrained run stays inside Omega and respects the half-space") {
  const FieldOracle f = identity_field(kE2);
  const ConvexSet ball = ConvexSet::ball(e2p(2, 0), 1.5);  // solution at (0.5, 0)
  const Point solution = e2p(0.5, 0);
  SolverConfig c = worked_example_config();
  c.alpha_schedule = Schedule::constant(0.9);
  c.max_iter = 2000;
  c.stop_tol = 1e-11;
  const auto report = run(f, ball, c, e2p(3.2, 0.6), solution);
  CHECK(report.monitor_violations == 0);
  for (const auto& t : report.steps) {
    CHECK(contains(ball, t.p_next, 1e-7));
    if (t.S_k) {
      // q^k belongs to the cutting half-space.
      CHECK(contains(*t.S_k, *t.q, 1e-9));
    }
  }
  // The tangential error along the active boundary decays like 1/sqrt(k)
  // here, so only Fejer-monotone approach is asserted, not a fast rate.
  double prev = dist(e2p(3.2, 0.6), solution);
  for (const auto& t : report.steps) {
    REQUIRE(t.dist_to_reference.has_value());
    CHECK(*t.dist_to_reference <= prev + 1e-9);
    prev = *t.dist_to_reference;
  }
  CHECK(dist(report.final_point, solution) < 0.05);
}

TEST_CASE("cut distances vanish on non-terminating runs") {
  // Hyperbolic mean with an active half-space constraint: the iterates creep
  // tangentially and never trigger the stopping rule, but the cut steps
  // d(q^k, p^k) must still go to zero, with the last tenth of a
  // thousand-iteration run below 1e-5.
  const auto h2 = hyperboloid(2);
  const Point o = origin(h2);
  const double r = std::asinh(std::sqrt(2.0 * (std::cosh(1.0) - 1.0) / 3.0));
  ConvexPotential pot;
  for (int i = 0; i < 3; ++i) {
    const double th = M_PI / 2 + i * 2.0 * M_PI / 3.0;
    Eigen::Vector3d v(0.0, r * std::cos(th), r * std::sin(th));
    pot.anchors.push_back(exp_map(o, make_tangent(o, v)));
  }
  pot.weights = {1.0, 1.0, 1.0};
  const FieldOracle f = FieldOracle::gradient(pot);
  Eigen::Vector3d a(-0.05, std::sqrt(1.0025), 0.0);
  const double s = minkowski(a, o.coords);
  Eigen::Vector3d yc = (o.coords - s * a) / std::sqrt(1.0 + s * s);
  const Point y = make_point(h2, yc);
  const ConvexSet omega = ConvexSet::log_halfspace(y, make_tangent(y, a));
  const Point p0 = exp_map(y, make_tangent(y, -0.4 * a));

  SolverConfig c = worked_example_config();
  c.alpha_minus = 0.01;
  c.alpha_plus = 0.33;
  c.max_iter = 1000;
  const auto report = run(f, omega, c, p0);
  REQUIRE(report.steps.size() == 1000);
  Point prev = p0;
  double tail_max = 0.0;
  for (const auto& t : report.steps) {
    REQUIRE(t.q.has_value());
    // q^k lands in the cutting half-space: <<v,q>> <= 1e-9 on the hyperboloid.
    CHECK(contains(*t.S_k, *t.q, 1e-9));
    const double dqp = dist(*t.q, prev);
    if (t.k >= 900) tail_max = std::max(tail_max, dqp);
    prev = t.p_next;
  }
  CHECK(tail_max < 1e-5);
}

TEST_CASE("trace csv format") {
  const FieldOracle f = identity_field(kE2);
  const ConvexSet omega = ConvexSet::whole(kE2);
  SolverConfig c = worked_example_config();
  c.max_iter = 3;
  c.stop_tol = 0.0;
  const auto report = run(f, omega, c, e2p(1, 0), e2p(0, 0));
  std::ostringstream os;
  write_trace_csv(os, report);
  const std::string text = os.str();
  CHECK(text.find("# hvi-trace-schema 1") == 0);
  CHECK(text.find("k,eps_k,dist_p_z,i_k,lambda_k,selection_margin,backtrack_margin,"
                  "fejer_decrement,dist_to_reference") != std::string::npos);
  // Deterministic: a second run yields the identical byte stream.
  std::ostringstream os2;
  write_trace_csv(os2, run(f, omega, c, e2p(1, 0), e2p(0, 0)));
  CHECK(os.str() == os2.str());
}

TEST_CASE("selection failure surfaces in dimension 3 at a median anchor") {
  // At an anchor of a spread-out median field the hull contains no extreme
  // point satisfying the selection inequality, and the grid fallback is only
  // available in tangent dimension <= 2.
  const auto e3 = euclidean(3);
  ConvexPotential pot;
  pot.kind = ConvexPotential::Kind::WeightedDistances;
  pot.anchors = {make_point(e3, Eigen::Vector3d(0, 0, 0)),
                 make_point(e3, Eigen::Vector3d(1, 0, 0)),
                 make_point(e3, Eigen::Vector3d(0, 1, 0))};
  pot.weights = {1.0, 1.0, 1.0};
  const FieldOracle f = FieldOracle::subdifferential(pot);
  const ConvexSet omega = ConvexSet::whole(e3);
  CHECK_THROWS_AS(select_u(f, make_point(e3, Eigen::Vector3d(0, 0, 0)), 1e-8, 1.0, 0.9, omega),
                  SelectionFailure);
}
