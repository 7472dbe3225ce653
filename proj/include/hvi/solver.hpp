#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hvi/convex_set.hpp"
#include "hvi/vector_field.hpp"

namespace hvi {

/// Step-size schedule: either a constant or a table whose last entry repeats.
class Schedule {
 public:
  static Schedule constant(double v);
  static Schedule table(std::vector<double> values);
  double at(int k) const;

 private:
  std::vector<double> values_;
};

/// The six exogenous constants of the extragradient iteration plus schedules
/// and run limits. Orderings are enforced by validate(); schedule draws are
/// validated lazily against their boxes.
struct SolverConfig {
  double epsilon0 = 1.0;
  double delta_minus = 0.3;
  double delta_plus = 0.9;
  double alpha_minus = 0.1;
  double alpha_plus = 1.0;
  double beta = 0.5;
  std::optional<Schedule> alpha_schedule;  // default: constant alpha_plus
  std::optional<Schedule> beta_schedule;   // default: constant 1
  int max_iter = 1000;
  int max_backtracks = 60;
  double stop_tol = tols::default_stop;

  void validate() const;
  double alpha_at(int k) const;
  double beta_at(int k) const;
};

/// The candidate search for u^k exhausted both the fixed-point rounds and the
/// hull grid. Carries the best candidate seen and its margin.
class SelectionFailure : public Error {
 public:
  SelectionFailure(const std::string& what_arg, std::optional<Tangent> best, double margin)
      : Error(what_arg), best(std::move(best)), margin(margin) {}
  std::optional<Tangent> best;
  double margin;
};

/// i(k) exceeded the cap: the field is not monotone or the tolerances are
/// misconfigured. Carries the closest margin reached.
class BacktrackExhausted : public Error {
 public:
  BacktrackExhausted(const std::string& what_arg, double last_margin)
      : Error(what_arg), last_margin(last_margin) {}
  double last_margin;
};

/// Monitored inequalities of a single step. Any violation beyond its
/// tolerance flags the step.
struct MonitorReport {
  std::optional<double> fejer_decrement;  // d2(p*,p) - d2(p*,p+) - d2(q,p), when p* known
  double selection_margin = 0.0;
  double backtrack_margin = 0.0;
  double velocity_crosscheck = 0.0;  // relative gap between the two velocity formulas
  bool flagged = false;
  std::string flag_reason;
};

struct StepTrace {
  int k = 0;
  double eps_k = 0.0;
  Tangent u;
  Point z;
  double dist_p_z = 0.0;
  bool stopped = false;
  int i_k = -1;
  double lambda_k = 0.0;
  std::optional<Point> y;
  std::optional<Tangent> v;
  std::optional<ConvexSet> S_k;
  std::optional<Point> q;
  Point p_next;
  double eps_next = 0.0;
  std::optional<double> dist_to_reference;
  MonitorReport monitors;
};

struct Certificate {
  enum class Status { EpsSolution, MaxIter, Failure };
  Status status = Status::MaxIter;
  double eps_k = 0.0;
  double residual = 0.0;
  std::string message;
};

struct RunReport {
  std::vector<StepTrace> steps;
  Certificate certificate;
  Point final_point;
  double final_eps = 0.0;
  int monitor_violations = 0;
  double min_dist_pz_sq = 0.0;  // driver of the eps updates
};

struct SelectionResult {
  Tangent u;
  Point z;
  double margin;
};

/// Step (a): find u in the enlargement generators' hull whose projected step
/// z = P_Omega(exp_p(-alpha u)) satisfies, for every generator w,
/// <w, -log(p,z)> >= (delta_plus/alpha) d^2(p,z) - slack. For a singleton
/// enlargement the inequality holds automatically and is only asserted;
/// otherwise a fixed-point sweep over the generators runs first and a
/// deterministic hull-grid search (tangent dimension <= 2) backs it up.
SelectionResult select_u(const FieldOracle& field, const Point& p, double eps_k, double alpha_k,
                         double delta_plus, const ConvexSet& omega);

/// Step (b).
bool check_stop(const Point& p, const Point& z, double stop_tol);

struct BacktrackResult {
  int i_k;
  double lambda_k;
  Point y;
  Tangent v;
  double margin;
  double velocity_crosscheck;
};

/// Step (c): smallest i such that some generator v of the field at
/// y = gamma(2^-i beta) satisfies <v, gamma'(2^-i beta)> <= -(delta_minus/alpha) d^2(p,z).
/// The geodesic velocity at y is computed as transport(p, y, log(p,z)) and
/// cross-checked against -log(y,p)/lambda.
BacktrackResult backtrack(const FieldOracle& field, const Point& p, const Point& z,
                          double alpha_k, double beta_k, double delta_minus, int max_backtracks);

struct HalfspaceResult {
  ConvexSet S_k;
  Point q;
  Point p_next;
};

/// Step (d): S_k = {x : <v, log(y,x)> <= 0}, q = P_{S_k}(p), p_next = P_Omega(q).
HalfspaceResult halfspace_update(const Point& p, const Point& y, const Tangent& v,
                                 const ConvexSet& omega);

using StepCallback = std::function<void(const StepTrace&)>;

RunReport run(const FieldOracle& field, const ConvexSet& omega, const SolverConfig& config,
              const Point& p0, const std::optional<Point>& reference = {},
              const StepCallback& callback = {});

/// One row per iteration, fixed column order, versioned header.
void write_trace_csv(std::ostream& os, const RunReport& report);

}  // namespace hvi
