#include "hvi/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace hvi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double uniform_bits(std::mt19937_64& gen) { return (gen() >> 11) * 0x1.0p-53; }

Point random_point(const ManifoldDescriptor& m, std::mt19937_64& gen, double radius) {
  const Point o = origin(m);
  const auto basis = tangent_basis(o);
  Tangent t = zero_tangent(o);
  for (const Tangent& b : basis) t = t + (radius * (2.0 * uniform_bits(gen) - 1.0)) * b;
  return exp_map(o, t);
}

Tangent random_tangent(const Point& p, std::mt19937_64& gen, double scale) {
  Tangent t = zero_tangent(p);
  for (const Tangent& b : tangent_basis(p)) {
    t = t + (scale * (2.0 * uniform_bits(gen) - 1.0)) * b;
  }
  return t;
}

struct Worst {
  double value = kInf;
  void fold(double margin) { value = std::min(value, margin); }
};

SuiteCheck finish(std::string name, const Worst& w, double tolerance, std::string detail = "") {
  SuiteCheck c;
  c.name = std::move(name);
  c.worst = w.value;
  c.pass = w.value >= -tolerance;
  c.detail = std::move(detail);
  return c;
}

}  // namespace

std::vector<SuiteCheck> geometry_suite(int triples, uint64_t seed) {
  std::vector<SuiteCheck> out;
  const ManifoldDescriptor manifolds[] = {euclidean(2), euclidean(3), hyperboloid(2),
                                          hyperboloid(3)};
  for (const auto& m : manifolds) {
    std::mt19937_64 gen(seed ^ (0x9e37u + m.dim + (m.kind == ManifoldKind::Hyperboloid ? 64 : 0)));
    Worst coslaw, coslaw2, isometry, round_trip, explog, lognorm, speed;
    for (int i = 0; i < triples; ++i) {
      const Point p1 = random_point(m, gen, 2.0);
      const Point p2 = random_point(m, gen, 2.0);
      const Point p3 = random_point(m, gen, 2.0);
      const double d12 = dist(p1, p2), d13 = dist(p1, p3), d23 = dist(p2, p3);

      coslaw.fold(d12 * d12 -
                  (d13 * d13 + d23 * d23 - 2.0 * inner(log_map(p3, p1), log_map(p3, p2))));
      coslaw2.fold(inner(log_map(p2, p1), log_map(p2, p3)) +
                   inner(log_map(p3, p1), log_map(p3, p2)) - d23 * d23);

      const Tangent u = random_tangent(p1, gen, 1.5);
      const Tangent pu = transport(p1, p2, u);
      isometry.fold(tols::transport_isometry - std::abs(norm(pu) - norm(u)));
      round_trip.fold(1e-9 - norm(transport(p2, p1, pu) - u));

      explog.fold(tols::log_roundtrip - dist(exp_map(p1, log_map(p1, p2)), p2));
      lognorm.fold(1e-10 - std::abs(norm(log_map(p1, p2)) - d12));

      const double t = uniform_bits(gen);
      speed.fold(1e-9 - std::abs(dist(p1, geodesic_point(p1, p2, t)) - t * d12));
    }
    const std::string tag = " [" + m.name() + "]";
    out.push_back(finish("geodesic cosine law" + tag, coslaw, 1e-8));
    out.push_back(finish("paired cosine law" + tag, coslaw2, 1e-8));
    out.push_back(finish("transport isometry" + tag, isometry, 0.0));
    out.push_back(finish("transport round trip" + tag, round_trip, 0.0));
    out.push_back(finish("exp/log round trip" + tag, explog, 0.0));
    out.push_back(finish("log norm equals distance" + tag, lognorm, 0.0));
    out.push_back(finish("constant geodesic speed" + tag, speed, 0.0));
  }
  return out;
}

std::vector<SuiteCheck> projection_suite(int samples, uint64_t seed) {
  std::vector<SuiteCheck> out;

  struct Instance {
    std::string name;
    ConvexSet set;
  };
  std::vector<Instance> instances;

  const auto e1 = euclidean(1);
  const auto e2 = euclidean(2);
  const auto h2 = hyperboloid(2);

  instances.push_back({"euclidean ball", ConvexSet::ball(make_point(e2, Eigen::Vector2d(0.3, -0.2)),
                                                         1.3)});
  instances.push_back(
      {"euclidean half-space",
       ConvexSet::euclidean_halfspace(e2, Eigen::Vector2d(1.0, 2.0), 0.5)});
  {
    Point anchor = make_point(e2, Eigen::Vector2d(0.5, 0.5));
    Tangent normal = make_tangent(anchor, Eigen::Vector2d(1.0, -1.0));
    instances.push_back({"euclidean log half-space", ConvexSet::log_halfspace(anchor, normal)});
  }
  {
    std::vector<ConvexSet> walls;
    walls.push_back(ConvexSet::euclidean_halfspace(e2, Eigen::Vector2d(1.0, 0.0), 1.0));
    walls.push_back(ConvexSet::euclidean_halfspace(e2, Eigen::Vector2d(-1.0, 0.0), 1.0));
    walls.push_back(ConvexSet::euclidean_halfspace(e2, Eigen::Vector2d(0.0, 1.0), 1.0));
    walls.push_back(ConvexSet::euclidean_halfspace(e2, Eigen::Vector2d(0.0, -1.0), 1.0));
    instances.push_back({"euclidean box", ConvexSet::intersect(std::move(walls))});
  }
  {
    std::vector<ConvexSet> walls;
    walls.push_back(ConvexSet::euclidean_halfspace(e1, Eigen::VectorXd::Ones(1), 1.0));
    walls.push_back(ConvexSet::euclidean_halfspace(e1, -Eigen::VectorXd::Ones(1), 1.0));
    instances.push_back({"interval", ConvexSet::intersect(std::move(walls))});
  }
  {
    const Point o = origin(h2);
    const auto basis = tangent_basis(o);
    instances.push_back({"hyperbolic ball", ConvexSet::ball(exp_map(o, 0.3 * basis[0]), 1.1)});
    Point anchor = exp_map(o, 0.2 * basis[0]);
    Tangent normal = transport(o, anchor, 0.7 * basis[0] + 0.4 * basis[1]);
    instances.push_back({"hyperbolic log half-space", ConvexSet::log_halfspace(anchor, normal)});
  }

  Worst vi, nonexp, idem, membership;
  for (const auto& [name, set] : instances) {
    std::mt19937_64 gen(seed ^ std::hash<std::string>{}(name));
    const Point base = anchor_point(set);
    const auto qs = sample_set(set, samples, seed + 1);

    for (int trial = 0; trial < 8; ++trial) {
      const Point p = exp_map(base, random_tangent(base, gen, 3.0));
      const ProjectionResult pr = project(set, p);
      membership.fold(contains(set, pr.point, 1e-7) ? 0.0 : -1.0);
      idem.fold(1e-8 - dist(project(set, pr.point).point, pr.point));
      for (const Point& q : qs) {
        vi.fold(tols::projection_vi - inner(log_map(pr.point, q), log_map(pr.point, p)));
      }
    }
    for (int trial = 0; trial < samples; ++trial) {
      const Point p = exp_map(base, random_tangent(base, gen, 3.0));
      const Point q = exp_map(base, random_tangent(base, gen, 3.0));
      nonexp.fold(dist(p, q) + 1e-9 - dist(project(set, p).point, project(set, q).point));
    }
  }
  out.push_back(finish("projection variational inequality", vi, 0.0));
  out.push_back(finish("projection membership", membership, 0.0));
  out.push_back(finish("projection idempotence", idem, 0.0));
  out.push_back(finish("projection nonexpansiveness", nonexp, 0.0));

  // Sign equivalence <v, log(y,p)> vs <<v,p>> for the hyperbolic half-space.
  {
    const Point o = origin(h2);
    const auto basis = tangent_basis(o);
    Point anchor = exp_map(o, 0.4 * basis[1]);
    Tangent normal = transport(o, anchor, basis[0] + 0.2 * basis[1]);
    const Eigen::VectorXd unit = normal.components / norm(normal);
    std::mt19937_64 gen(seed ^ 0xabcdu);
    Worst sign_eq;
    int disagreements = 0;
    for (int i = 0; i < samples; ++i) {
      const Point x = exp_map(anchor, random_tangent(anchor, gen, 3.0));
      const double lhs = inner(Tangent{anchor, unit}, log_map(anchor, x));
      const double rhs = minkowski(unit, x.coords);
      if (std::min(std::abs(lhs), std::abs(rhs)) >= 1e-9 && lhs * rhs <= 0.0) ++disagreements;
      sign_eq.fold(disagreements == 0 ? 0.0 : -1.0);
    }
    sign_eq.fold(0.0);
    out.push_back(finish("half-space sign equivalence", sign_eq, 0.0,
                         std::to_string(disagreements) + " disagreements"));
  }
  return out;
}

std::vector<SuiteCheck> enlargement_suite() {
  std::vector<SuiteCheck> out;
  const auto e1 = euclidean(1);
  const auto e2 = euclidean(2);
  const auto h2 = hyperboloid(2);

  // f = |x| as a single-anchor distance potential on R^1.
  ConvexPotential abs_pot;
  abs_pot.kind = ConvexPotential::Kind::WeightedDistances;
  abs_pot.anchors = {make_point(e1, Eigen::VectorXd::Zero(1))};
  abs_pot.weights = {1.0};
  const FieldOracle abs_field = FieldOracle::subdifferential(abs_pot);

  // Exactness at eps = 0 across field types.
  {
    Worst exact;
    std::vector<std::pair<FieldOracle, Point>> cases;
    cases.emplace_back(abs_field, make_point(e1, Eigen::VectorXd::Ones(1)));
    cases.emplace_back(abs_field, make_point(e1, Eigen::VectorXd::Zero(1)));
    ConvexPotential mean2;
    mean2.anchors = {make_point(e2, Eigen::Vector2d(1.0, 0.0)),
                     make_point(e2, Eigen::Vector2d(-1.0, 0.0))};
    mean2.weights = {1.0, 2.0};
    cases.emplace_back(FieldOracle::gradient(mean2), make_point(e2, Eigen::Vector2d(0.2, 0.7)));
    ConvexPotential meanh;
    meanh.anchors = {origin(h2), exp_map(origin(h2), 0.8 * tangent_basis(origin(h2))[0])};
    meanh.weights = {1.0, 1.0};
    cases.emplace_back(FieldOracle::gradient(meanh),
                       exp_map(origin(h2), 0.3 * tangent_basis(origin(h2))[1]));
    for (const auto& [field, p] : cases) {
      const auto base = eval(field, p);
      const auto enl = enlargement(field, p, 0.0);
      if (base.size() != enl.size()) {
        exact.fold(-1.0);
        continue;
      }
      for (std::size_t i = 0; i < base.size(); ++i) {
        exact.fold(-(base[i].components - enl[i].components).lpNorm<Eigen::Infinity>());
      }
    }
    out.push_back(finish("zero-eps enlargement equals the field", exact, 0.0));
  }

  // eps-subdifferential of |x| at p=1 is [1-eps, 1]; grid-checked.
  {
    Worst interval, certified, maximal;
    const Point p1 = make_point(e1, Eigen::VectorXd::Ones(1));
    auto grid_margin = [&](double u, double eps) {
      double worst = kInf;
      for (int i = 0; i <= 20000; ++i) {
        const double q = -10.0 + 20.0 * i / 20000.0;
        worst = std::min(worst, std::abs(q) - 1.0 - u * (q - 1.0) + eps);
      }
      return worst;
    };
    for (double eps : {0.1, 0.5, 1.0}) {
      const auto gens = enlargement(abs_field, p1, eps);
      double lo = kInf, hi = -kInf;
      for (const auto& g : gens) {
        lo = std::min(lo, g.components[0]);
        hi = std::max(hi, g.components[0]);
        certified.fold(grid_margin(g.components[0], eps));
      }
      interval.fold(1e-9 - std::abs(lo - std::max(-1.0, 1.0 - eps)));
      interval.fold(1e-9 - std::abs(hi - 1.0));
      // A candidate 1e-3 below the interval must fail the grid check.
      maximal.fold(grid_margin(std::max(-1.0, 1.0 - eps) - 1e-3, eps) < 0 ? 0.0 : -1.0);
    }
    out.push_back(finish("abs-value eps-subgradient interval", interval, 0.0));
    out.push_back(finish("eps-subgradient grid certificates", certified, 1e-12));
    out.push_back(finish("interval sharp to 1e-3", maximal, 0.0));
  }

  // Nesting: generators at the tighter level pass membership at looser ones.
  {
    Worst nesting;
    const Point p1 = make_point(e1, Eigen::VectorXd::Ones(1));
    for (const auto& g : enlargement(abs_field, p1, 0.1)) {
      const auto rep = membership_check(abs_field, p1, g, 0.2);
      nesting.fold(rep.refuted ? -1.0 : rep.worst_margin);
    }
    out.push_back(finish("enlargement nesting", nesting, 0.0));
  }

  // Boundedness on bounded sets, stable under refinement.
  {
    Worst bounded;
    ConvexPotential median2;
    median2.kind = ConvexPotential::Kind::WeightedDistances;
    median2.anchors = {make_point(e2, Eigen::Vector2d(0.0, 0.0)),
                       make_point(e2, Eigen::Vector2d(1.0, 0.0))};
    median2.weights = {1.0, 1.0};
    const FieldOracle f = FieldOracle::subdifferential(median2);
    const ConvexSet ball = ConvexSet::ball(make_point(e2, Eigen::Vector2d(0.5, 0.0)), 2.0);
    auto bound_at = [&](int n) {
      double b = 0.0;
      for (const Point& q : sample_set(ball, n, 7)) {
        for (const Tangent& g : enlargement(f, q, 0.5)) b = std::max(b, norm(g));
      }
      return b;
    };
    const double b1 = bound_at(400);
    const double b2 = bound_at(1600);
    bounded.fold(std::isfinite(b2) ? 0.05 * (1.0 + b1) - std::abs(b2 - b1) : -1.0);
    out.push_back(finish("enlargement bounded on bounded sets", bounded, 0.0,
                         "bounds " + std::to_string(b1) + " / " + std::to_string(b2)));
  }
  return out;
}

std::vector<SuiteCheck> trace_checks(const RunReport& report, const ConvexSet& omega,
                                     const SolverConfig& config) {
  std::vector<SuiteCheck> out;
  Worst eps_rec, eps_mono, lambda_rec, lambda_range, sel_margin, bt_margin, fejer, member;
  double running_min = config.epsilon0;
  double prev_eps_next = config.epsilon0;
  for (const StepTrace& t : report.steps) {
    eps_rec.fold(t.eps_k == prev_eps_next ? 0.0 : -1.0);
    if (!t.stopped) {
      const double expected = std::min(t.eps_k, t.dist_p_z * t.dist_p_z);
      eps_rec.fold(t.eps_next == expected ? 0.0 : -1.0);
      eps_mono.fold(t.eps_k - t.eps_next);
      running_min = std::min(running_min, t.dist_p_z * t.dist_p_z);

      const double beta_k = config.beta_at(t.k);
      lambda_rec.fold(t.lambda_k == std::ldexp(beta_k, -t.i_k) ? 0.0 : -1.0);
      lambda_range.fold(t.lambda_k > 0.0 && t.lambda_k <= 1.0 ? 0.0 : -1.0);
      bt_margin.fold(t.monitors.backtrack_margin);
      member.fold(contains(omega, t.p_next, tols::set_membership) ? 0.0 : -1.0);
    }
    sel_margin.fold(t.monitors.selection_margin + tols::selection_slack);
    if (t.monitors.fejer_decrement) fejer.fold(*t.monitors.fejer_decrement + tols::monitor_slack);
    prev_eps_next = t.eps_next;
  }
  // Lemma-of-minima bookkeeping: the final eps equals the running minimum of
  // epsilon0 and the recorded squared step sizes (the stopping step, if any,
  // happens before the eps update and does not contribute).
  eps_rec.fold(report.final_eps == running_min ? 0.0 : -1.0);

  out.push_back(finish("eps recursion", eps_rec, 0.0));
  out.push_back(finish("eps nonincreasing", eps_mono, 0.0));
  out.push_back(finish("lambda recomputation", lambda_rec, 0.0));
  out.push_back(finish("lambda in (0,1]", lambda_range, 0.0));
  out.push_back(finish("selection margins", sel_margin, 0.0));
  out.push_back(finish("backtracking margins", bt_margin, 1e-15));
  out.push_back(finish("Fejer decrements", fejer, 0.0));
  out.push_back(finish("iterates in Omega", member, 0.0));
  return out;
}

bool all_pass(const std::vector<SuiteCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const SuiteCheck& c) { return c.pass; });
}

}  // namespace hvi
