#pragma once

#include <optional>
#include <string>

#include "hvi/solver.hpp"

namespace hvi {

/// A fully specified benchmark instance: manifold, field, constraint set,
/// start point, solver configuration and optional reference solution.
struct ProblemSpec {
  std::string name;
  ManifoldDescriptor manifold;
  FieldOracle field;
  ConvexSet omega;
  Point p0;
  SolverConfig solver;
  std::optional<Point> reference;
  uint64_t seed = 0;

  /// Cross-checks dimensions, set membership of p0 and the solver constants.
  void validate() const;
};

}  // namespace hvi
