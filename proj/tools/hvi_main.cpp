// Benchmark harness for the variational-inequality solver: runs problem
// files, validates candidate solutions against the gap estimator, and drives
// the property suites.
//
// Exit codes: 0 success, 2 monitor violation / refutation / suite failure,
// 3 solver failure or missing oracle, 4 invalid input.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>

#include "hvi/gap.hpp"
#include "hvi/json_io.hpp"
#include "hvi/verification.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 2;
constexpr int kExitSolverFailure = 3;
constexpr int kExitInvalidInput = 4;

int verbosity() {
  const char* env = std::getenv("HVI_LOG");
  return env ? std::atoi(env) : 0;
}

struct CommonOverrides {
  std::optional<int> max_iter;
  std::optional<double> stop_tol;
  std::optional<uint64_t> seed;

  void apply(hvi::ProblemSpec& problem) const {
    if (max_iter) problem.solver.max_iter = *max_iter;
    if (stop_tol) problem.solver.stop_tol = *stop_tol;
    if (seed) problem.seed = *seed;
    problem.solver.validate();
  }
};

json suite_checks_to_json(const std::vector<hvi::SuiteCheck>& checks) {
  json arr = json::array();
  for (const auto& c : checks) {
    arr.push_back(json{{"name", c.name}, {"pass", c.pass}, {"worst_margin", c.worst},
                       {"detail", c.detail}});
  }
  return arr;
}

int cmd_run(const std::string& problem_file, const std::string& trace_out,
            const std::string& cert_out, const CommonOverrides& overrides) {
  hvi::ProblemSpec problem = hvi::load_problem(problem_file);
  overrides.apply(problem);

  hvi::StepCallback callback;
  if (verbosity() >= 1) {
    callback = [](const hvi::StepTrace& t) {
      std::cerr << "k=" << t.k << " eps=" << t.eps_k << " d(p,z)=" << t.dist_p_z
                << (t.stopped ? " [stopped]" : "") << "\n";
    };
  }

  hvi::RunReport report =
      hvi::run(problem.field, problem.omega, problem.solver, problem.p0, problem.reference,
               callback);

  if (!trace_out.empty()) {
    std::ofstream out(trace_out);
    if (!out) throw hvi::InvalidArgument("cannot open trace output '" + trace_out + "'");
    hvi::write_trace_csv(out, report);
  }
  if (!cert_out.empty()) {
    std::ofstream out(cert_out);
    if (!out) throw hvi::InvalidArgument("cannot open certificate output '" + cert_out + "'");
    out << hvi::to_json(report.certificate).dump(2) << "\n";
  }

  if (report.certificate.status == hvi::Certificate::Status::Failure) {
    std::cerr << "solver failure: " << report.certificate.message << "\n";
    return kExitSolverFailure;
  }
  if (report.monitor_violations > 0) {
    std::cerr << report.monitor_violations << " monitored step(s) violated an inequality\n";
    return kExitViolation;
  }
  std::cout << hvi::to_json(report.certificate).dump() << "\n";
  return kExitOk;
}

int cmd_validate(const std::string& problem_file, const std::vector<double>& point_coords,
                 double eps, int sample_size, const CommonOverrides& overrides) {
  hvi::ProblemSpec problem = hvi::load_problem(problem_file);
  overrides.apply(problem);

  hvi::Point candidate = problem.p0;
  if (!point_coords.empty()) {
    Eigen::VectorXd c(point_coords.size());
    for (std::size_t i = 0; i < point_coords.size(); ++i) c[i] = point_coords[i];
    candidate = hvi::make_point(problem.manifold, std::move(c));
  } else {
    hvi::SolutionOracle oracle = hvi::solve_reference(problem);  // may throw OracleNotAvailable
    candidate = oracle.result;
    std::cerr << "using oracle point (residual " << oracle.residual << ")\n";
  }

  const auto gap = hvi::gap_estimate(problem.field, problem.omega, candidate, sample_size,
                                     problem.seed);
  const auto check = hvi::eps_solution_check(problem.field, problem.omega, candidate, eps,
                                             sample_size, problem.seed);
  const double fpr = hvi::fixed_point_residual(problem.field, problem.omega, candidate, 1.0);

  json report{{"gap_estimate", gap.value_lower_bound},
              {"eps", eps},
              {"eps_solution", hvi::to_json(check)},
              {"fixed_point_residual", fpr}};
  std::cout << report.dump(2) << "\n";
  return check.refuted ? kExitViolation : kExitOk;
}

json run_one_suite_problem(const fs::path& file, const CommonOverrides& overrides) {
  json entry{{"problem", file.filename().string()}};
  hvi::ProblemSpec problem = hvi::load_problem(file.string());
  overrides.apply(problem);

  const auto falsifier = hvi::monotonicity_falsifier(problem.field, 2000, problem.seed);
  entry["monotonicity"] = hvi::to_json(falsifier);

  bool pass = !falsifier.refuted;
  if (falsifier.refuted) {
    entry["pass"] = false;
    entry["detail"] = "monotonicity falsifier refuted the field";
    return entry;
  }

  hvi::RunReport report =
      hvi::run(problem.field, problem.omega, problem.solver, problem.p0, problem.reference);
  entry["certificate"] = hvi::to_json(report.certificate);
  entry["iterations"] = report.steps.size();
  entry["monitor_violations"] = report.monitor_violations;
  entry["min_dist_pz_sq"] = report.min_dist_pz_sq;

  const auto checks = hvi::trace_checks(report, problem.omega, problem.solver);
  entry["trace_checks"] = suite_checks_to_json(checks);

  pass = pass && report.certificate.status != hvi::Certificate::Status::Failure &&
         report.monitor_violations == 0 && hvi::all_pass(checks);

  if (report.certificate.status == hvi::Certificate::Status::EpsSolution) {
    const auto consistency =
        hvi::eps_solution_check(problem.field, problem.omega, report.final_point,
                                report.final_eps + report.certificate.residual, 2000,
                                problem.seed);
    entry["certificate_check"] = hvi::to_json(consistency);
    pass = pass && !consistency.refuted;
  }
  entry["pass"] = pass;
  return entry;
}

int cmd_suite(const std::string& suite_dir, const std::string& report_out,
              const CommonOverrides& overrides) {
  std::vector<fs::path> files;
  if (!fs::is_directory(suite_dir)) {
    throw hvi::InvalidArgument("suite path '" + suite_dir + "' is not a directory");
  }
  for (const auto& entry : fs::directory_iterator(suite_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) {
    throw hvi::InvalidArgument("suite directory '" + suite_dir + "' contains no problem files");
  }
  std::sort(files.begin(), files.end());

  // Problems are independent immutable specs; run them concurrently and merge
  // in name order.
  std::vector<std::future<json>> futures;
  futures.reserve(files.size());
  for (const auto& file : files) {
    futures.push_back(std::async(std::launch::async, [&overrides, file] {
      try {
        return run_one_suite_problem(file, overrides);
      } catch (const hvi::Error& e) {
        return json{{"problem", file.filename().string()}, {"pass", false},
                    {"detail", std::string("error: ") + e.what()}};
      }
    }));
  }
  json problems = json::array();
  bool pass = true;
  for (auto& f : futures) {
    json entry = f.get();
    pass = pass && entry.value("pass", false);
    problems.push_back(std::move(entry));
  }

  const auto geometry = hvi::geometry_suite(2000, 42);
  const auto projection = hvi::projection_suite(500, 42);
  const auto enlargement = hvi::enlargement_suite();
  pass = pass && hvi::all_pass(geometry) && hvi::all_pass(projection) &&
         hvi::all_pass(enlargement);

  json report{{"problems", problems},
              {"geometry", suite_checks_to_json(geometry)},
              {"projection", suite_checks_to_json(projection)},
              {"enlargement", suite_checks_to_json(enlargement)},
              {"all_pass", pass}};

  if (!report_out.empty()) {
    std::ofstream out(report_out);
    if (!out) throw hvi::InvalidArgument("cannot open report output '" + report_out + "'");
    out << report.dump(2) << "\n";
  }
  std::cout << (pass ? "suite passed" : "suite FAILED") << " (" << files.size()
            << " problems)\n";
  if (!pass && verbosity() >= 1) std::cerr << report.dump(2) << "\n";
  return pass ? kExitOk : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extragradient solver for variational inequalities on Hadamard manifolds"};
  app.require_subcommand(1);
  app.fallthrough();  // global overrides may appear after the subcommand

  CommonOverrides overrides;
  app.add_option("--max-iter", overrides.max_iter, "Override the iteration cap");
  app.add_option("--stop-tol", overrides.stop_tol, "Override the stopping tolerance");
  app.add_option("--seed", overrides.seed, "Override the sampling seed");

  std::string problem_file, trace_out, cert_out;
  auto* run_cmd = app.add_subcommand("run", "Run the solver on a problem file");
  run_cmd->add_option("problem", problem_file, "Problem JSON file")->required();
  run_cmd->add_option("--trace", trace_out, "CSV trace output path");
  run_cmd->add_option("--certificate", cert_out, "JSON certificate output path");

  std::vector<double> point_coords;
  double eps = 1e-8;
  int sample_size = 4000;
  auto* validate_cmd =
      app.add_subcommand("validate", "Check a point against the gap estimator");
  validate_cmd->add_option("problem", problem_file, "Problem JSON file")->required();
  validate_cmd->add_option("--point", point_coords,
                           "Candidate point (ambient coordinates); defaults to the oracle");
  validate_cmd->add_option("--eps", eps, "Claimed eps-solution level");
  validate_cmd->add_option("--samples", sample_size, "Gap sample size");

  std::string suite_dir, report_out;
  auto* suite_cmd = app.add_subcommand("suite", "Run a directory of problems plus property suites");
  suite_cmd->add_option("dir", suite_dir, "Directory of problem JSON files")->required();
  suite_cmd->add_option("--report", report_out, "Aggregate JSON report output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(problem_file, trace_out, cert_out, overrides);
    if (validate_cmd->parsed()) {
      return cmd_validate(problem_file, point_coords, eps, sample_size, overrides);
    }
    return cmd_suite(suite_dir, report_out, overrides);
  } catch (const hvi::OracleNotAvailable& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolverFailure;
  } catch (const hvi::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const hvi::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  }
}
