#include "hvi/json_io.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>

namespace hvi {

using nlohmann::json;

namespace {

Eigen::VectorXd vector_from_json(const json& j) {
  if (!j.is_array()) throw InvalidArgument("expected a JSON array of numbers");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InvalidArgument("expected a JSON array of numbers");
    v[i] = j[i].get<double>();
  }
  return v;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

const json& require(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw InvalidArgument(std::string("missing key '") + key + "'");
  return *it;
}

Schedule schedule_from_json(const json& j) {
  if (j.is_number()) return Schedule::constant(j.get<double>());
  if (j.is_array()) {
    std::vector<double> vals;
    for (const auto& v : j) vals.push_back(v.get<double>());
    return Schedule::table(std::move(vals));
  }
  throw InvalidArgument("schedule must be a number or an array of numbers");
}

}  // namespace

json to_json(const ManifoldDescriptor& m) {
  return json{{"kind", m.kind == ManifoldKind::Euclidean ? "euclidean" : "hyperboloid"},
              {"dim", m.dim}};
}

ManifoldDescriptor manifold_from_json(const json& j) {
  const std::string kind = require(j, "kind").get<std::string>();
  const int dim = require(j, "dim").get<int>();
  if (kind == "euclidean") return euclidean(dim);
  if (kind == "hyperboloid") return hyperboloid(dim);
  throw InvalidArgument("unknown manifold kind '" + kind + "'");
}

json to_json(const Point& p) { return vector_to_json(p.coords); }

Point point_from_json(const json& j, const ManifoldDescriptor& m) {
  return make_point(m, vector_from_json(j));
}

json to_json(const ConvexSet& set) {
  return std::visit(
      [&](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, WholeManifoldSet>) {
          return json{{"type", "whole"}};
        } else if constexpr (std::is_same_v<T, GeodesicBallSet>) {
          return json{{"type", "ball"}, {"center", to_json(s.center)}, {"radius", s.radius}};
        } else if constexpr (std::is_same_v<T, LogHalfSpaceSet>) {
          return json{{"type", "log_halfspace"},
                      {"anchor", to_json(s.anchor)},
                      {"normal", vector_to_json(s.normal.components)}};
        } else if constexpr (std::is_same_v<T, EuclideanHalfSpaceSet>) {
          return json{{"type", "euclidean_halfspace"}, {"a", vector_to_json(s.a)}, {"b", s.b}};
        } else {
          json members = json::array();
          for (const ConvexSet& member : s.members) members.push_back(to_json(member));
          return json{{"type", "intersection"}, {"members", members}};
        }
      },
      set.data());
}

ConvexSet set_from_json(const json& j, const ManifoldDescriptor& m) {
  const std::string type = require(j, "type").get<std::string>();
  if (type == "whole") return ConvexSet::whole(m);
  if (type == "ball") {
    Point center = point_from_json(require(j, "center"), m);
    return ConvexSet::ball(std::move(center), require(j, "radius").get<double>());
  }
  if (type == "log_halfspace") {
    Point anchor = point_from_json(require(j, "anchor"), m);
    Tangent normal = make_tangent(anchor, vector_from_json(require(j, "normal")));
    return ConvexSet::log_halfspace(std::move(anchor), std::move(normal));
  }
  if (type == "euclidean_halfspace") {
    return ConvexSet::euclidean_halfspace(m, vector_from_json(require(j, "a")),
                                          require(j, "b").get<double>());
  }
  if (type == "intersection") {
    std::vector<ConvexSet> members;
    for (const auto& mj : require(j, "members")) members.push_back(set_from_json(mj, m));
    return ConvexSet::intersect(std::move(members));
  }
  throw InvalidArgument("unknown set type '" + type + "'");
}

json field_to_json(const FieldOracle& field) {
  return std::visit(
      [&](const auto& d) -> json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, FieldOracle::GradientData> ||
                      std::is_same_v<T, FieldOracle::SubdifferentialData>) {
          const ConvexPotential& pot = d.potential;
          json anchors = json::array();
          for (const Point& a : pot.anchors) anchors.push_back(to_json(a));
          json out{{"type", std::is_same_v<T, FieldOracle::GradientData> ? "frechet_mean"
                                                                         : "frechet_median"},
                   {"anchors", anchors},
                   {"weights", pot.weights}};
          if (pot.sphere_directions != 32) out["sphere_directions"] = pot.sphere_directions;
          if (pot.allow_nonconvex) out["allow_nonconvex"] = true;
          return out;
        } else if constexpr (std::is_same_v<T, FieldOracle::CompositeData>) {
          json members = json::array();
          for (const FieldOracle& f : d.members) members.push_back(field_to_json(f));
          return json{{"type", "composite"}, {"weights", d.weights}, {"members", members}};
        } else {
          throw InvalidArgument("cone-augmented fields have no wire format");
        }
      },
      field.data());
}

FieldOracle field_from_json(const json& j, const ManifoldDescriptor& m) {
  const std::string type = require(j, "type").get<std::string>();
  if (type == "composite") {
    std::vector<double> weights = require(j, "weights").get<std::vector<double>>();
    std::vector<FieldOracle> members;
    for (const auto& mj : require(j, "members")) members.push_back(field_from_json(mj, m));
    return FieldOracle::composite(std::move(weights), std::move(members));
  }
  if (type != "frechet_mean" && type != "frechet_median") {
    throw InvalidArgument("unknown field type '" + type + "'");
  }
  ConvexPotential pot;
  pot.kind = type == "frechet_mean" ? ConvexPotential::Kind::WeightedSquaredDistances
                                    : ConvexPotential::Kind::WeightedDistances;
  for (const auto& aj : require(j, "anchors")) pot.anchors.push_back(point_from_json(aj, m));
  pot.weights = require(j, "weights").get<std::vector<double>>();
  if (j.contains("sphere_directions")) pot.sphere_directions = j["sphere_directions"].get<int>();
  if (j.contains("allow_nonconvex")) pot.allow_nonconvex = j["allow_nonconvex"].get<bool>();
  return pot.kind == ConvexPotential::Kind::WeightedSquaredDistances
             ? FieldOracle::gradient(std::move(pot))
             : FieldOracle::subdifferential(std::move(pot));
}

json to_json(const SolverConfig& config) {
  json out{{"epsilon0", config.epsilon0},   {"delta_minus", config.delta_minus},
           {"delta_plus", config.delta_plus}, {"alpha_minus", config.alpha_minus},
           {"alpha_plus", config.alpha_plus}, {"beta", config.beta},
           {"max_iter", config.max_iter},     {"max_backtracks", config.max_backtracks},
           {"stop_tol", config.stop_tol}};
  return out;
}

SolverConfig solver_config_from_json(const json& j) {
  SolverConfig c;
  c.epsilon0 = require(j, "epsilon0").get<double>();
  c.delta_minus = require(j, "delta_minus").get<double>();
  c.delta_plus = require(j, "delta_plus").get<double>();
  c.alpha_minus = require(j, "alpha_minus").get<double>();
  c.alpha_plus = require(j, "alpha_plus").get<double>();
  c.beta = require(j, "beta").get<double>();
  if (j.contains("alpha_schedule")) c.alpha_schedule = schedule_from_json(j["alpha_schedule"]);
  if (j.contains("beta_schedule")) c.beta_schedule = schedule_from_json(j["beta_schedule"]);
  if (j.contains("max_iter")) c.max_iter = j["max_iter"].get<int>();
  if (j.contains("max_backtracks")) c.max_backtracks = j["max_backtracks"].get<int>();
  if (j.contains("stop_tol")) c.stop_tol = j["stop_tol"].get<double>();
  c.validate();
  return c;
}

json to_json(const ProblemSpec& problem) {
  json out{{"manifold", to_json(problem.manifold)},
           {"field", field_to_json(problem.field)},
           {"omega", to_json(problem.omega)},
           {"p0", to_json(problem.p0)},
           {"solver", to_json(problem.solver)},
           {"seed", problem.seed}};
  if (problem.reference) out["reference"] = to_json(*problem.reference);
  return out;
}

ProblemSpec problem_from_json(const json& j, const std::string& name) {
  ManifoldDescriptor m = manifold_from_json(require(j, "manifold"));
  FieldOracle field = field_from_json(require(j, "field"), m);
  ConvexSet omega = set_from_json(require(j, "omega"), m);
  Point p0 = point_from_json(require(j, "p0"), m);
  SolverConfig solver = solver_config_from_json(require(j, "solver"));
  ProblemSpec problem{name, m, std::move(field), std::move(omega), std::move(p0),
                      std::move(solver), std::nullopt, 0};
  if (j.contains("reference")) problem.reference = point_from_json(j["reference"], m);
  if (j.contains("seed")) problem.seed = j["seed"].get<uint64_t>();
  problem.validate();
  return problem;
}

ProblemSpec load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open problem file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidArgument("problem file '" + path + "' is not valid JSON: " + e.what());
  }
  try {
    return problem_from_json(j, std::filesystem::path(path).stem().string());
  } catch (const json::exception& e) {
    throw InvalidArgument("problem file '" + path + "': " + e.what());
  }
}

json to_json(const Certificate& cert) {
  const char* status = cert.status == Certificate::Status::EpsSolution ? "eps_solution"
                       : cert.status == Certificate::Status::MaxIter   ? "max_iter"
                                                                       : "failure";
  return json{{"status", status}, {"eps_k", cert.eps_k}, {"residual", cert.residual}};
}

json to_json(const CheckReport& report) {
  return json{{"verdict", report.refuted ? "refuted" : "not_refuted"},
              {"worst_margin", report.worst_margin},
              {"samples", report.samples},
              {"seed", report.seed},
              {"detail", report.detail}};
}

}  // namespace hvi
