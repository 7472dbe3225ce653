#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hvi/gap.hpp"
#include "hvi/solver.hpp"

namespace hvi {

/// One verified invariant: name, verdict, and the worst margin observed
/// (sign convention: >= 0 means the inequality held with that much slack).
struct SuiteCheck {
  std::string name;
  bool pass = false;
  double worst = 0.0;
  std::string detail;
};

/// Comparison-law, transport and exp/log invariants on random triples over
/// the implemented manifold instances.
std::vector<SuiteCheck> geometry_suite(int triples, uint64_t seed);

/// Projection variational inequality, nonexpansiveness, idempotence and the
/// hyperboloid half-space sign equivalence over sampled sets.
std::vector<SuiteCheck> projection_suite(int samples, uint64_t seed);

/// Exactness at eps = 0, the eps-subdifferential interval of |x| against the
/// grid oracle, nesting, and boundedness of the enlargement.
std::vector<SuiteCheck> enlargement_suite();

/// Invariants recomputable from a finished run: eps recursion and
/// monotonicity, lambda recomputation from the beta schedule, margins, Fejer
/// decrement signs, iterate membership.
std::vector<SuiteCheck> trace_checks(const RunReport& report, const ConvexSet& omega,
                                     const SolverConfig& config);

bool all_pass(const std::vector<SuiteCheck>& checks);

}  // namespace hvi
