#pragma once

#include <cstdint>

#include "hvi/problem.hpp"

namespace hvi {

/// Sampled lower bound of the gap value h(p) = sup_{q in Omega, v in X(q)}
/// <v, log(q, p)>. A refutation (estimate above a claimed level) is
/// conclusive; consistency is relative to the sample.
struct GapEstimate {
  double value_lower_bound = 0.0;
  Point argmax_q;
  Tangent argmax_v;
  int sample_size = 0;
  uint64_t seed = 0;
};

GapEstimate gap_estimate(const FieldOracle& field, const ConvexSet& omega, const Point& p,
                         int sample_size, uint64_t seed);

/// Consistency of "p is an eps-solution": gap estimate <= eps + slack.
CheckReport eps_solution_check(const FieldOracle& field, const ConvexSet& omega, const Point& p,
                               double eps, int sample_size, uint64_t seed);

/// min over u in X(p) of dist(p, P_Omega(exp_p(-alpha u))): zero exactly at
/// solutions (with respect to the evaluated generators).
double fixed_point_residual(const FieldOracle& field, const ConvexSet& omega, const Point& p,
                            double alpha);

/// Independent ground-truth solvers for potential-backed fields. These share
/// geometric primitives with the main solver but none of its step logic.
struct SolutionOracle {
  enum class Method { RiemannianGradientDescent, GridSearch };
  Method method = Method::RiemannianGradientDescent;
  Point result;
  double residual = 0.0;  // gradient residual, or grid cell diameter
  int iterations = 0;
};

SolutionOracle solve_reference_rgd(const FieldOracle& field, const ConvexSet& omega,
                                   const Point& start, double tol = 1e-10,
                                   int max_iter = 200000);

/// Nested zooming grid search over the exp chart at `center`; final
/// resolution ~1e-3, dimension <= 2 only.
SolutionOracle solve_reference_grid(const FieldOracle& field, const ConvexSet& omega,
                                    const Point& center, double radius);

SolutionOracle solve_reference(const ProblemSpec& problem);

}  // namespace hvi
