#include "airy/config.hpp"
#include "airy/pipeline.hpp"
#include "airy/verification.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

namespace {

enum Exit { kOk = 0, kValidation = 1, kSolver = 2, kVerification = 3 };

int print_checks(const std::vector<airy::CheckResult>& checks) {
  int failed = 0;
  for (const auto& c : checks) {
    std::printf("%-4s %-64s expected % .6e  computed % .6e  tol %.1e\n", c.pass ? "ok" : "FAIL", c.name.c_str(),
                c.expected, c.computed, c.tolerance);
    failed += c.pass ? 0 : 1;
  }
  std::printf("%zu checks, %d failed\n", checks.size(), failed);
  return failed;
}

int cmd_solve(const std::string& path, const std::string& out, const std::optional<std::string>& checks,
              std::optional<int> refine) {
  airy::ProblemConfig cfg;
  airy::RunOptions opt;
  try {
    cfg = airy::load_config(path);
    if (checks) opt.checks = airy::parse_check_level(*checks);
  } catch (const airy::ValidationError& e) {
    std::cerr << path << ": invalid configuration\n" << e.what() << '\n';
    return kValidation;
  }
  opt.out_dir = out;
  opt.refine = refine;

  airy::RunReport report;
  try {
    report = airy::run_pipeline(cfg, opt);
  } catch (const airy::PipelineError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == airy::FailureKind::Validation ? kValidation : kSolver;
  }

  const auto& s = report.solver;
  std::printf("defects %zu  vertices %zu  triangles %zu  dofs %zu  h %g  refine %d\n", s.num_defects, s.num_vertices,
              s.num_triangles, s.num_dofs, s.h, s.refine);
  std::printf("minimum energy %.12e  (quadrature %.12e)\n", s.energy, s.functional);
  for (Eigen::Index k = 0; k < s.coefficients.size(); ++k) {
    std::printf("A[%td] = % .12e\n", static_cast<std::ptrdiff_t>(k), s.coefficients[k]);
  }
  const int failed = print_checks(report.checks);
  for (const auto& t : report.timings) std::printf("time %-12s %.3f s\n", t.stage.c_str(), t.seconds);
  for (const auto& a : report.artifacts) std::printf("wrote %s\n", a.string().c_str());
  return failed ? kVerification : kOk;
}

int cmd_verify(const std::string& suite) {
  std::vector<airy::CheckResult> checks;
  if (suite == "annulus" || suite == "all") {
    auto a = airy::annulus_suite();
    checks.insert(checks.end(), a.begin(), a.end());
  }
  if (suite == "monge-ampere" || suite == "all") {
    auto m = airy::monge_ampere_suite();
    checks.insert(checks.end(), m.begin(), m.end());
  }
  return print_checks(checks) ? kVerification : kOk;
}

int cmd_mesh_info(const std::string& path, std::optional<int> refine) {
  airy::ProblemConfig cfg;
  try {
    cfg = airy::load_config(path);
  } catch (const airy::ValidationError& e) {
    std::cerr << path << ": invalid configuration\n" << e.what() << '\n';
    return kValidation;
  }
  try {
    const airy::MeshInfo m = airy::mesh_info(cfg, refine.value_or(cfg.mesh.refine));
    std::printf("h                 %g\n", m.h);
    std::printf("core radius       %g (bound %g)\n", m.core_radius, m.core_radius_bound);
    std::printf("vertices          %zu\n", m.num_vertices);
    std::printf("triangles         %zu\n", m.num_triangles);
    std::printf("boundary edges    %zu\n", m.num_boundary_edges);
    std::printf("HCT dofs          %zu\n", m.num_dofs);
    std::printf("min angle         %.2f deg\n", m.min_angle_deg);
    std::printf("area              %.10f\n", m.area);
  } catch (const airy::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolver;
  }
  return kOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibrium of plane-strain bodies with point dislocations and disclinations"};
  app.require_subcommand(1);

  std::string config, out = "out";
  std::optional<std::string> checks;
  std::optional<int> refine;
  auto* solve = app.add_subcommand("solve", "Solve a configuration and write the report and fields");
  solve->add_option("config", config, "YAML configuration")->required()->check(CLI::ExistingFile);
  solve->add_option("--out", out, "Output directory")->capture_default_str();
  solve->add_option("--checks", checks, "Verification level")->check(CLI::IsMember({"all", "fast", "none"}));
  solve->add_option("--refine", refine, "Uniform refinements after meshing")->check(CLI::Range(0, 6));

  std::string suite = "all";
  auto* verify = app.add_subcommand("verify-analytic", "Run the mesh-free analytic suites");
  verify->add_option("--suite", suite, "Suite to run")
      ->check(CLI::IsMember({"annulus", "monge-ampere", "all"}))
      ->capture_default_str();

  std::string info_config;
  std::optional<int> info_refine;
  auto* info = app.add_subcommand("mesh-info", "Print statistics of the mesh for a configuration");
  info->add_option("config", info_config, "YAML configuration")->required()->check(CLI::ExistingFile);
  info->add_option("--refine", info_refine, "Uniform refinements after meshing")->check(CLI::Range(0, 6));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  if (*solve) return cmd_solve(config, out, checks, refine);
  if (*verify) return cmd_verify(suite);
  return cmd_mesh_info(info_config, info_refine);
}
