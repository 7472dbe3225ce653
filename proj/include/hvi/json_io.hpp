#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "hvi/gap.hpp"
#include "hvi/problem.hpp"

// JSON wire formats:
//   manifold   {"kind": "euclidean"|"hyperboloid", "dim": n}
//   point      array of ambient coordinates
//   set        {"type": "whole"} | {"type": "ball", "center": [...], "radius": r}
//              | {"type": "log_halfspace", "anchor": [...], "normal": [...]}
//              | {"type": "euclidean_halfspace", "a": [...], "b": b}
//              | {"type": "intersection", "members": [...]}
//   field      {"type": "frechet_mean"|"frechet_median", "anchors": [[...]],
//               "weights": [...]} (+ optional "sphere_directions",
//              "allow_nonconvex"), or {"type": "composite", "weights": [...],
//              "members": [...]}
//   problem    {"name", "manifold", "field", "omega", "p0", "solver",
//               "reference"?, "seed"?}

namespace hvi {

nlohmann::json to_json(const ManifoldDescriptor& m);
ManifoldDescriptor manifold_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Point& p);
Point point_from_json(const nlohmann::json& j, const ManifoldDescriptor& m);

nlohmann::json to_json(const ConvexSet& set);
ConvexSet set_from_json(const nlohmann::json& j, const ManifoldDescriptor& m);

nlohmann::json field_to_json(const FieldOracle& field);
FieldOracle field_from_json(const nlohmann::json& j, const ManifoldDescriptor& m);

nlohmann::json to_json(const SolverConfig& config);
SolverConfig solver_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ProblemSpec& problem);
ProblemSpec problem_from_json(const nlohmann::json& j, const std::string& name);

/// Parses and validates a problem file; throws hvi::Error subclasses on any
/// defect (missing keys, bad orderings, p0 outside Omega, ...).
ProblemSpec load_problem(const std::string& path);

nlohmann::json to_json(const Certificate& cert);
nlohmann::json to_json(const CheckReport& report);

}  // namespace hvi
