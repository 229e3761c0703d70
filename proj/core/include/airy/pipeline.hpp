#pragma once

#include "airy/config.hpp"
#include "airy/equilibrium.hpp"
#include "airy/verification.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace airy {

struct RunOptions {
  std::filesystem::path out_dir; // empty: nothing is written
  std::optional<CheckLevel> checks;
  std::optional<int> refine;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct SolverSummary {
  std::size_t num_defects = 0;
  std::size_t num_vertices = 0;
  std::size_t num_triangles = 0;
  std::size_t num_dofs = 0;
  double h = 0.0;
  int refine = 0;
  Eigen::MatrixXd influence;
  Eigen::VectorXd forcing;
  Eigen::VectorXd coefficients;
  double energy = 0.0;     // closed form
  double functional = 0.0; // I(v-hat) by quadrature
  RecoveredCharges recovered;
};

struct RunReport {
  SolverSummary solver;
  CheckLevel check_level = CheckLevel::All;
  std::vector<CheckResult> checks;
  std::vector<StageTiming> timings;
  std::vector<std::filesystem::path> artifacts;

  bool checks_pass() const;
};

enum class FailureKind { Validation, Solver, Output };

/// A pipeline failure tagged with the stage that raised it.
class PipelineError : public std::runtime_error {
public:
  PipelineError(std::string stage, FailureKind kind, const std::string& what);
  const std::string& stage() const noexcept { return stage_; }
  FailureKind kind() const noexcept { return kind_; }

private:
  std::string stage_;
  FailureKind kind_;
};

/// Mesh, cell problems, influence matrix, equilibrium, sampling, checks and
/// outputs. On failure every artifact written so far is removed and a
/// PipelineError names the stage.
RunReport run_pipeline(const ProblemConfig& cfg, const RunOptions& opt = {});

/// JSON report. Everything except the "timings" member is deterministic.
std::string report_json(const RunReport& report, const ProblemConfig& cfg, bool with_timings = true);

struct MeshInfo {
  double h = 0.0;
  double core_radius = 0.0;
  double core_radius_bound = 0.0;
  std::size_t num_vertices = 0;
  std::size_t num_triangles = 0;
  std::size_t num_boundary_edges = 0;
  std::size_t num_dofs = 0;
  double min_angle_deg = 0.0;
  double area = 0.0;
};

/// Statistics of the mesh run_pipeline would build (refine levels included).
MeshInfo mesh_info(const ProblemConfig& cfg, int refine);

} // namespace airy
