#include "hvi/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace hvi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct CandidateEval {
  Point z;
  double dist_p_z;
  double margin;  // min over generators of <w,-log(p,z)> - (delta_plus/alpha) d^2
};

// 2D convex hull (monotone chain), counter-clockwise.
std::vector<Eigen::Vector2d> convex_hull_2d(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const auto& a, const auto& b) { return (a - b).norm() < 1e-14; }),
            pts.end());
  const std::size_t n = pts.size();
  if (n <= 2) return pts;
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Eigen::Vector2d> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

bool inside_hull_2d(const std::vector<Eigen::Vector2d>& hull, const Eigen::Vector2d& p,
                    double tol) {
  if (hull.size() < 3) return false;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Eigen::Vector2d& a = hull[i];
    const Eigen::Vector2d& b = hull[(i + 1) % hull.size()];
    const double c = (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
    if (c < -tol) return false;
  }
  return true;
}

void fmt_double(std::string& row, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  row += buf;
}

}  // namespace

Schedule Schedule::constant(double v) {
  Schedule s;
  s.values_ = {v};
  return s;
}

Schedule Schedule::table(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("schedule table must be nonempty");
  Schedule s;
  s.values_ = std::move(values);
  return s;
}

double Schedule::at(int k) const {
  if (k < 0) throw InvalidArgument("schedule index must be nonnegative");
  const std::size_t i = std::min<std::size_t>(k, values_.size() - 1);
  return values_[i];
}

void SolverConfig::validate() const {
  if (!(epsilon0 > 0.0)) throw InvalidArgument("epsilon0 must be positive");
  if (!(0.0 < delta_minus && delta_minus < delta_plus && delta_plus < 1.0)) {
    throw InvalidArgument("constants must satisfy 0 < delta_minus < delta_plus < 1");
  }
  if (!(0.0 < alpha_minus && alpha_minus < alpha_plus)) {
    throw InvalidArgument("constants must satisfy 0 < alpha_minus < alpha_plus");
  }
  if (!(0.0 < beta && beta < 1.0)) throw InvalidArgument("beta must lie in (0,1)");
  if (max_iter < 1) throw InvalidArgument("max_iter must be >= 1");
  if (max_backtracks < 1) throw InvalidArgument("max_backtracks must be >= 1");
  if (stop_tol < 0.0) throw InvalidArgument("stop_tol must be nonnegative");
}

double SolverConfig::alpha_at(int k) const {
  const double a = alpha_schedule ? alpha_schedule->at(k) : alpha_plus;
  if (a < alpha_minus || a > alpha_plus) {
    throw InvalidArgument("alpha schedule left [alpha_minus, alpha_plus] at k=" +
                          std::to_string(k));
  }
  return a;
}

double SolverConfig::beta_at(int k) const {
  const double b = beta_schedule ? beta_schedule->at(k) : 1.0;
  if (b < beta || b > 1.0) {
    throw InvalidArgument("beta schedule left [beta, 1] at k=" + std::to_string(k));
  }
  return b;
}

SelectionResult select_u(const FieldOracle& field, const Point& p, double eps_k, double alpha_k,
                         double delta_plus, const ConvexSet& omega) {
  const std::vector<Tangent> gens = enlargement(field, p, eps_k);

  auto score = [&](const Tangent& u) -> CandidateEval {
    CandidateEval ce{project(omega, exp_map(p, -alpha_k * u)).point, 0.0, 0.0};
    ce.dist_p_z = dist(p, ce.z);
    const Tangent neg_log = -1.0 * log_map(p, ce.z);
    const double need = (delta_plus / alpha_k) * ce.dist_p_z * ce.dist_p_z;
    double lhs = kInf;
    for (const Tangent& w : gens) lhs = std::min(lhs, inner(w, neg_log));
    if (ce.dist_p_z == 0.0) lhs = 0.0;
    ce.margin = lhs - need;
    return ce;
  };

  if (gens.size() == 1) {
    // Singleton fast path: the inequality follows from the projection
    // characterisation and the comparison law, so it is asserted only.
    CandidateEval ce = score(gens.front());
    return {gens.front(), std::move(ce.z), ce.margin};
  }

  std::optional<Tangent> best_u;
  double best_margin = -kInf;

  // Fixed-point sweep over the generators.
  std::size_t cur = 0;
  std::vector<char> visited(gens.size(), 0);
  for (int round = 0; round < 100; ++round) {
    CandidateEval ce = score(gens[cur]);
    if (ce.margin > best_margin) {
      best_margin = ce.margin;
      best_u = gens[cur];
    }
    if (ce.margin >= -tols::selection_slack) {
      return {gens[cur], std::move(ce.z), ce.margin};
    }
    const Tangent neg_log = -1.0 * log_map(p, ce.z);
    std::size_t nxt = 0;
    double nxt_val = -kInf;
    for (std::size_t i = 0; i < gens.size(); ++i) {
      const double v = inner(gens[i], neg_log);
      if (v > nxt_val) {
        nxt_val = v;
        nxt = i;
      }
    }
    if (nxt == cur || visited[nxt]) break;
    visited[cur] = 1;
    cur = nxt;
  }

  // Deterministic hull-grid search; only available in tangent dimension <= 2.
  const int dim = p.manifold.dim;
  if (dim > 2) {
    throw SelectionFailure("selection fixed-point sweep failed and the hull grid is limited to "
                           "tangent dimension <= 2",
                           best_u, best_margin);
  }
  const auto basis = tangent_basis(p);

  auto try_grid = [&](const std::vector<Eigen::Vector2d>& candidates)
      -> std::optional<SelectionResult> {
    for (const auto& c : candidates) {
      Tangent u = c.x() * basis[0];
      if (dim == 2) u = u + c.y() * basis[1];
      CandidateEval ce = score(u);
      if (ce.margin > best_margin) {
        best_margin = ce.margin;
        best_u = u;
      }
      if (ce.margin >= -tols::selection_slack) {
        return SelectionResult{u, std::move(ce.z), ce.margin};
      }
    }
    return std::nullopt;
  };

  auto order_by_center = [](std::vector<Eigen::Vector2d>& cs, const Eigen::Vector2d& center) {
    std::stable_sort(cs.begin(), cs.end(), [&](const auto& a, const auto& b) {
      return (a - center).squaredNorm() < (b - center).squaredNorm();
    });
  };

  std::vector<Eigen::Vector2d> coords;
  coords.reserve(gens.size());
  for (const Tangent& g : gens) {
    coords.emplace_back(inner(g, basis[0]), dim == 2 ? inner(g, basis[1]) : 0.0);
  }

  std::vector<Eigen::Vector2d> candidates;
  const int n_grid = 61;
  if (dim == 1) {
    double lo = kInf, hi = -kInf;
    for (const auto& c : coords) {
      lo = std::min(lo, c.x());
      hi = std::max(hi, c.x());
    }
    for (int i = 0; i < n_grid; ++i) {
      candidates.emplace_back(lo + (hi - lo) * i / (n_grid - 1.0), 0.0);
    }
    order_by_center(candidates, Eigen::Vector2d((lo + hi) / 2.0, 0.0));
  } else {
    auto hull = convex_hull_2d(coords);
    Eigen::Vector2d lo(kInf, kInf), hi(-kInf, -kInf);
    Eigen::Vector2d centroid(0, 0);
    for (const auto& c : coords) {
      lo = lo.cwiseMin(c);
      hi = hi.cwiseMax(c);
      centroid += c;
    }
    centroid /= static_cast<double>(coords.size());
    if (hull.size() < 3) {
      // Collinear generators: search the segment.
      const Eigen::Vector2d a = hull.front();
      const Eigen::Vector2d b = hull.back();
      for (int i = 0; i < n_grid * n_grid / 4; ++i) {
        const double t = i / (n_grid * n_grid / 4 - 1.0);
        candidates.emplace_back(a + t * (b - a));
      }
    } else {
      const double tol = 1e-12 * (1.0 + (hi - lo).norm());
      for (int i = 0; i < n_grid; ++i) {
        for (int j = 0; j < n_grid; ++j) {
          Eigen::Vector2d c(lo.x() + (hi.x() - lo.x()) * i / (n_grid - 1.0),
                            lo.y() + (hi.y() - lo.y()) * j / (n_grid - 1.0));
          if (inside_hull_2d(hull, c, tol)) candidates.push_back(c);
        }
      }
    }
    order_by_center(candidates, centroid);
  }

  if (auto hit = try_grid(candidates)) return std::move(*hit);

  // One local refinement pass around the best coarse candidate.
  if (best_u) {
    Eigen::Vector2d bc(inner(*best_u, basis[0]), dim == 2 ? inner(*best_u, basis[1]) : 0.0);
    Eigen::Vector2d lo(kInf, kInf), hi(-kInf, -kInf);
    for (const auto& c : coords) {
      lo = lo.cwiseMin(c);
      hi = hi.cwiseMax(c);
    }
    const Eigen::Vector2d cell = (hi - lo) / (n_grid - 1.0);
    std::vector<Eigen::Vector2d> fine;
    const int nf = 21;
    for (int i = 0; i < nf; ++i) {
      for (int j = 0; j < (dim == 2 ? nf : 1); ++j) {
        Eigen::Vector2d c = bc + Eigen::Vector2d(cell.x() * (2.0 * i / (nf - 1.0) - 1.0),
                                                 dim == 2
                                                     ? cell.y() * (2.0 * j / (nf - 1.0) - 1.0)
                                                     : 0.0);
        fine.push_back(c);
      }
    }
    order_by_center(fine, bc);
    if (auto hit = try_grid(fine)) return std::move(*hit);
  }

  throw SelectionFailure("no enlargement element satisfied the selection inequality (best margin " +
                             std::to_string(best_margin) + ")",
                         best_u, best_margin);
}

bool check_stop(const Point& p, const Point& z, double stop_tol) {
  return dist(p, z) <= stop_tol;
}

BacktrackResult backtrack(const FieldOracle& field, const Point& p, const Point& z,
                          double alpha_k, double beta_k, double delta_minus, int max_backtracks) {
  const double dpz = dist(p, z);
  if (!(dpz > 0.0)) throw InvalidArgument("backtracking requires p != z");
  const double threshold = -(delta_minus / alpha_k) * dpz * dpz;
  const Tangent step = log_map(p, z);

  double closest = -kInf;
  for (int i = 0; i <= max_backtracks; ++i) {
    const double lambda = std::ldexp(beta_k, -i);
    const Point y = geodesic_point(p, z, lambda);
    const Tangent velocity = transport(p, y, step);
    // Cross-check gamma'(lambda) = -log(y,p)/lambda; skipped where the
    // inverse map is ill-conditioned (very short legs).
    double crosscheck = 0.0;
    if (lambda * dpz >= 1e-6) {
      const Tangent alt = (-1.0 / lambda) * log_map(y, p);
      crosscheck = norm(velocity - alt) / std::max(1.0, norm(velocity));
    }
    for (const Tangent& v : eval(field, y)) {
      const double val = inner(v, velocity);
      if (val <= threshold) {
        return {i, lambda, y, v, threshold - val, crosscheck};
      }
      closest = std::max(closest, threshold - val);
    }
  }
  throw BacktrackExhausted("backtracking exhausted after " + std::to_string(max_backtracks) +
                               " halvings (closest margin " + std::to_string(closest) + ")",
                           closest);
}

HalfspaceResult halfspace_update(const Point& p, const Point& y, const Tangent& v,
                                 const ConvexSet& omega) {
  if (norm(v) <= 0.0) throw ZeroVector("half-space update needs a nonzero v");
  ConvexSet S = ConvexSet::log_halfspace(y, v);
  Point q = project(S, p).point;
  Point p_next = project(omega, q).point;
  return {std::move(S), std::move(q), std::move(p_next)};
}

RunReport run(const FieldOracle& field, const ConvexSet& omega, const SolverConfig& config,
              const Point& p0, const std::optional<Point>& reference,
              const StepCallback& callback) {
  config.validate();
  if (!contains(omega, p0, tols::set_membership)) {
    throw InvalidArgument("initial point lies outside the constraint set");
  }

  RunReport report;
  report.min_dist_pz_sq = kInf;
  Point p = p0;
  double eps = config.epsilon0;

  auto finish = [&](Certificate cert) {
    report.certificate = std::move(cert);
    report.final_point = p;
    report.final_eps = eps;
    if (!std::isfinite(report.min_dist_pz_sq)) report.min_dist_pz_sq = 0.0;
    return report;
  };

  for (int k = 0; k < config.max_iter; ++k) {
    StepTrace t;
    t.k = k;
    t.eps_k = eps;
    // Schedule draws are validated lazily; a box violation is invalid input
    // and propagates, unlike step failures below.
    const double alpha = config.alpha_at(k);
    const double beta_k = config.beta_at(k);
    try {
      SelectionResult sel = select_u(field, p, eps, alpha, config.delta_plus, omega);
      t.u = sel.u;
      t.z = sel.z;
      t.dist_p_z = dist(p, sel.z);
      t.monitors.selection_margin = sel.margin;
      report.min_dist_pz_sq = std::min(report.min_dist_pz_sq, t.dist_p_z * t.dist_p_z);

      if (check_stop(p, sel.z, config.stop_tol)) {
        t.stopped = true;
        t.p_next = p;
        t.eps_next = eps;
        if (reference) t.dist_to_reference = dist(p, *reference);
        if (sel.margin < -tols::selection_slack) {
          t.monitors.flagged = true;
          t.monitors.flag_reason = "selection margin below tolerance";
          ++report.monitor_violations;
        }
        report.steps.push_back(t);
        if (callback) callback(report.steps.back());
        return finish({Certificate::Status::EpsSolution, eps, t.dist_p_z, "stopped at k=" +
                                                                               std::to_string(k)});
      }

      BacktrackResult bt =
          backtrack(field, p, sel.z, alpha, beta_k, config.delta_minus, config.max_backtracks);
      t.i_k = bt.i_k;
      t.lambda_k = bt.lambda_k;
      t.y = bt.y;
      t.v = bt.v;
      t.monitors.backtrack_margin = bt.margin;
      t.monitors.velocity_crosscheck = bt.velocity_crosscheck;

      HalfspaceResult hs = halfspace_update(p, bt.y, bt.v, omega);
      t.S_k = hs.S_k;
      t.q = hs.q;
      t.p_next = hs.p_next;
      t.eps_next = std::min(eps, t.dist_p_z * t.dist_p_z);

      // Monitors.
      std::string why;
      if (sel.margin < -tols::selection_slack) why = "selection margin below tolerance";
      if (bt.velocity_crosscheck > tols::velocity_crosscheck) {
        why = "velocity cross-check exceeded tolerance";
      }
      if (!contains(omega, t.p_next, tols::set_membership)) {
        why = "iterate left the constraint set";
      }
      if (reference) {
        const double before = dist(*reference, p);
        const double after = dist(*reference, t.p_next);
        const double dqp = dist(hs.q, p);
        t.monitors.fejer_decrement = before * before - after * after - dqp * dqp;
        if (*t.monitors.fejer_decrement < -tols::monitor_slack) {
          why = "Fejer decrement below tolerance";
        }
        t.dist_to_reference = after;
      }
      if (!why.empty()) {
        t.monitors.flagged = true;
        t.monitors.flag_reason = why;
        ++report.monitor_violations;
      }

      report.steps.push_back(t);
      if (callback) callback(report.steps.back());
      p = t.p_next;
      eps = t.eps_next;
    } catch (const Error& e) {
      return finish({Certificate::Status::Failure, eps, 0.0,
                     "iteration " + std::to_string(k) + ": " + e.what()});
    }
  }
  const double residual = report.steps.empty() ? 0.0 : report.steps.back().dist_p_z;
  return finish({Certificate::Status::MaxIter, eps, residual,
                 "reached max_iter=" + std::to_string(config.max_iter)});
}

void write_trace_csv(std::ostream& os, const RunReport& report) {
  os << "# hvi-trace-schema 1\n";
  os << "k,eps_k,dist_p_z,i_k,lambda_k,selection_margin,backtrack_margin,fejer_decrement,"
        "dist_to_reference\n";
  for (const StepTrace& t : report.steps) {
    std::string row = std::to_string(t.k);
    row += ',';
    fmt_double(row, t.eps_k);
    row += ',';
    fmt_double(row, t.dist_p_z);
    row += ',';
    if (!t.stopped) row += std::to_string(t.i_k);
    row += ',';
    if (!t.stopped) fmt_double(row, t.lambda_k);
    row += ',';
    fmt_double(row, t.monitors.selection_margin);
    row += ',';
    if (!t.stopped) fmt_double(row, t.monitors.backtrack_margin);
    row += ',';
    if (t.monitors.fejer_decrement) fmt_double(row, *t.monitors.fejer_decrement);
    row += ',';
    if (t.dist_to_reference) fmt_double(row, *t.dist_to_reference);
    row += '\n';
    os << row;
  }
}

}  // namespace hvi
