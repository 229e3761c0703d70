#include "airy/pipeline.hpp"

#include "airy/output.hpp"
#include "airy/reconstruction.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>

namespace airy {

bool RunReport::checks_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

PipelineError::PipelineError(std::string stage, FailureKind kind, const std::string& what)
    : std::runtime_error("[" + stage + "] " + what), stage_(std::move(stage)), kind_(kind) {}

namespace {

std::string indexed(const char* pattern, std::size_t i) {
  char buf[96];
  std::snprintf(buf, sizeof buf, pattern, i);
  return buf;
}

// tolerance for a charge component: relative when the charge is nonzero
double charge_tolerance(double rel, double scale) { return scale != 0.0 ? rel * std::abs(scale) : 1e-3; }

Mesh build_mesh(const PerforatedDomain& dom, double h, int refine) {
  Mesh mesh = generate_mesh(dom, h);
  for (int l = 0; l < refine; ++l) mesh = refine_uniform(mesh, dom);
  return mesh;
}

void fast_checks(const EquilibriumRun& run, const SolverSummary& s, std::vector<CheckResult>& out) {
  const Eigen::MatrixXd& m = s.influence;
  const double norm = m.cwiseAbs().maxCoeff();
  out.push_back(make_check("influence matrix symmetry", 0.0, (m - m.transpose()).cwiseAbs().maxCoeff() / norm, 1e-10,
                           "max |M - M^T| / max |M|"));
  const Eigen::MatrixXd ms = influence_matrix_from_stiffness(run.basis);
  out.push_back(make_check("influence matrix quadrature vs stiffness", 0.0, (m - ms).cwiseAbs().maxCoeff() / norm,
                           1e-7, "relative to max |M|"));
  out.push_back(make_check("energy closed form vs quadrature", s.energy, s.functional, 5e-3 * std::abs(s.energy),
                           "I(v-hat) by quadrature against -E/(2(1-nu^2))<M^-1 Phi, Phi>"));

  const PerforatedDomain& dom = *run.solution.domain;
  const MaterialParams& mat = run.solution.material;
  const JetFunction vp = plastic_jets(run.solution);
  for (std::size_t i = 0; i < dom.num_cores(); ++i) {
    const ExtendedDefect& d = dom.defects()[i];
    out.push_back(make_check(indexed("core %zu recovered frank angle", i), d.frank, s.recovered.frank[i],
                             charge_tolerance(0.02, d.frank), "weak Euler-Lagrange residual"));
    for (int r = 0; r < 2; ++r) {
      out.push_back(make_check(indexed(r == 0 ? "core %zu recovered burgers_1" : "core %zu recovered burgers_2", i),
                               d.burgers[r], s.recovered.burgers[i][r], charge_tolerance(0.02, d.burgers[r]),
                               "weak Euler-Lagrange residual"));
    }
    const Core& c = dom.cores()[i];
    const Eigen::Vector3d mi =
        michell_integrals(vp, circle_loop(c.center, c.radius, 512, Traversal::Clockwise), mat).scaled(mat);
    const Eigen::Vector3d expect(d.frank, d.burgers[0], d.burgers[1]);
    out.push_back(make_check(indexed("core %zu plastic michell integrals", i), 0.0, (mi - expect).cwiseAbs().maxCoeff(),
                             1e-8, "max component gap on the core circle"));
  }
}

void liftability_checks(const EquilibriumRun& run, const Mesh& mesh, std::vector<CheckResult>& out) {
  const EquilibriumSolution& sol = run.solution;
  const PerforatedDomain& dom = *sol.domain;
  const auto recovery = std::make_shared<const GradLaplacianRecovery>(sol.potential, plastic_jets(sol));
  const Vec2 base = deepest_interior_point(dom);
  const std::vector<Vec2> cuts = choose_cut_directions(dom);
  const Reconstruction el = reconstruct_displacement(elastic_compatibility(sol, recovery), mesh, dom, base, cuts);
  const Reconstruction tot = reconstruct_displacement(total_compatibility(sol, recovery), mesh, dom, base, cuts);
  const LoopCharges lc = loop_charges(sol, recovery);
  for (std::size_t i = 0; i < dom.num_cores(); ++i) {
    const ExtendedDefect& d = dom.defects()[i];
    const double bn = d.burgers.norm();
    out.push_back(make_check(indexed("core %zu elastic rotation jump", i), 0.0, el.mismatch[i].rotation_jump,
                             charge_tolerance(0.01, d.frank), "path integral across the cut"));
    out.push_back(make_check(indexed("core %zu elastic displacement jump", i), 0.0,
                             el.mismatch[i].displacement_jump.norm(), charge_tolerance(0.01, bn),
                             "norm, translational part about the core centre"));
    out.push_back(make_check(indexed("core %zu total rotation jump", i), d.frank, tot.mismatch[i].rotation_jump,
                             charge_tolerance(0.02, d.frank), "path integral across the cut"));
    out.push_back(make_check(indexed("core %zu total displacement jump", i), 0.0,
                             (tot.mismatch[i].displacement_jump - d.burgers).norm(), charge_tolerance(0.02, bn),
                             "distance to the Burgers vector"));
    const double scale = std::max(std::abs(d.frank), bn);
    const Eigen::Vector3d gap(lc.charges.frank[i] - d.frank, lc.charges.burgers[i][0] - d.burgers[0],
                              lc.charges.burgers[i][1] - d.burgers[1]);
    out.push_back(make_check(indexed("core %zu michell loop charges", i), 0.0, gap.cwiseAbs().maxCoeff() / scale, 0.02,
                             "relative, circle of radius " + format_double(lc.radius[i])));
  }
  out.push_back(make_check("elastic loop closure", 0.0, el.closure_defect, 0.05,
                           "worst triangle closure relative to max|eps| times the mesh diameter"));
}

class Artifacts {
public:
  explicit Artifacts(std::filesystem::path dir) : dir_(std::move(dir)) {}

  bool enabled() const { return !dir_.empty(); }

  void prepare() {
    if (!enabled()) return;
    if (!std::filesystem::exists(dir_)) {
      std::filesystem::create_directories(dir_);
      created_dir_ = true;
    }
  }

  std::filesystem::path write(const std::string& name, const std::function<void(std::ostream&)>& body) {
    const std::filesystem::path p = dir_ / name;
    std::ofstream os(p);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    written_.push_back(p);
    body(os);
    os.flush();
    if (!os) throw std::runtime_error("failed writing " + p.string());
    return p;
  }

  void roll_back() noexcept {
    std::error_code ec;
    for (const auto& p : written_) std::filesystem::remove(p, ec);
    if (created_dir_ && std::filesystem::is_empty(dir_, ec)) std::filesystem::remove(dir_, ec);
    written_.clear();
  }

  const std::vector<std::filesystem::path>& written() const { return written_; }

private:
  std::filesystem::path dir_;
  bool created_dir_ = false;
  std::vector<std::filesystem::path> written_;
};

} // namespace

RunReport run_pipeline(const ProblemConfig& cfg, const RunOptions& opt) {
  RunReport report;
  report.check_level = opt.checks.value_or(cfg.checks);
  const int refine = opt.refine.value_or(cfg.mesh.refine);
  Artifacts files(opt.out_dir);

  std::string stage;
  auto timed = [&](const std::string& name, auto&& fn) {
    stage = name;
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    report.timings.push_back({name, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()});
  };

  try {
    std::shared_ptr<const PerforatedDomain> dom;
    std::shared_ptr<const Mesh> mesh;
    std::optional<EquilibriumRun> run;
    SolverSummary& s = report.solver;

    timed("domain", [&] {
      if (refine < 0) throw ValidationError("refinement level must be non-negative");
      if (!(cfg.mesh_size() < cfg.core_radius)) throw ValidationError("mesh size h must be smaller than core_radius");
      dom = std::make_shared<const PerforatedDomain>(build_perforated_domain(cfg.outer, cfg.defects, cfg.core_radius));
    });
    timed("mesh", [&] {
      mesh = std::make_shared<const Mesh>(build_mesh(*dom, cfg.mesh_size(), refine));
    });
    timed("equilibrium", [&] { run = solve_on_mesh(dom, mesh, cfg.material); });
    timed("recovery", [&] {
      const EquilibriumSolution& sol = run->solution;
      s.num_defects = dom->num_cores();
      s.num_vertices = mesh->num_vertices();
      s.num_triangles = mesh->num_triangles();
      s.num_dofs = run->space->num_dofs();
      s.h = cfg.mesh_size();
      s.refine = refine;
      s.influence = sol.influence;
      s.forcing = sol.forcing;
      s.coefficients = sol.coefficients;
      s.energy = sol.energy;
      s.functional = evaluate_functional(sol.potential, *dom, cfg.material);
      s.recovered = recover_charges(sol, run->basis);
    });
    if (report.check_level != CheckLevel::None) {
      timed("checks", [&] {
        fast_checks(*run, s, report.checks);
        if (report.check_level == CheckLevel::All) liftability_checks(*run, *mesh, report.checks);
      });
    }

    if (files.enabled()) {
      std::optional<SampledFields> fields;
      const bool need_samples = cfg.outputs.field_table || !cfg.outputs.heatmaps.empty();
      if (need_samples) {
        timed("sampling", [&] {
          fields = sample_fields(run->solution, domain_grid(*dom, cfg.outputs.grid_nx, cfg.outputs.grid_ny));
        });
      }
      timed("output", [&] {
        files.prepare();
        if (cfg.outputs.field_table) {
          files.write("fields.csv", [&](std::ostream& os) { write_field_table(os, *fields, cfg.material); });
        }
        for (const auto& ch : cfg.outputs.heatmaps) {
          files.write("heatmap_" + ch + ".svg",
                      [&](std::ostream& os) { write_heatmap(os, *fields, *dom, cfg.material, ch); });
        }
        if (cfg.outputs.mesh_dump) files.write("mesh.txt", [&](std::ostream& os) { write_mesh(os, *mesh); });
        if (cfg.outputs.report) {
          // listed before writing so the report names itself
          report.artifacts = files.written();
          report.artifacts.push_back(opt.out_dir / "report.json");
          files.write("report.json", [&](std::ostream& os) { os << report_json(report, cfg) << '\n'; });
        }
      });
      report.artifacts = files.written();
    }
  } catch (const ValidationError& e) {
    files.roll_back();
    throw PipelineError(stage, FailureKind::Validation, e.what());
  } catch (const SolverError& e) {
    files.roll_back();
    throw PipelineError(stage, FailureKind::Solver, e.what());
  } catch (const std::exception& e) {
    files.roll_back();
    throw PipelineError(stage, stage == "output" ? FailureKind::Output : FailureKind::Solver, e.what());
  }
  return report;
}

namespace {

using json = nlohmann::ordered_json;

json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

} // namespace

std::string report_json(const RunReport& r, const ProblemConfig& cfg, bool with_timings) {
  json j;
  json problem;
  problem["young_modulus"] = cfg.material.young_modulus();
  problem["poisson_ratio"] = cfg.material.poisson_ratio();
  if (cfg.outer.is_disk()) {
    const Disk& d = cfg.outer.as_disk();
    problem["domain"] = {{"disk", {{"center", {d.center[0], d.center[1]}}, {"radius", d.radius}}}};
  } else {
    json poly = json::array();
    for (const Vec2& v : cfg.outer.as_polygon()) poly.push_back({v[0], v[1]});
    problem["domain"] = {{"polygon", poly}};
  }
  problem["core_radius"] = cfg.core_radius;
  json defects = json::array();
  for (const ExtendedDefect& d : extend_defects(cfg.defects)) {
    json e;
    e["kind"] = d.is_dislocation() ? "dislocation" : "disclination";
    e["position"] = {d.position[0], d.position[1]};
    if (d.is_dislocation()) e["burgers"] = {d.burgers[0], d.burgers[1]};
    else e["frank"] = d.frank;
    defects.push_back(std::move(e));
  }
  problem["defects"] = std::move(defects);
  j["problem"] = std::move(problem);

  const SolverSummary& s = r.solver;
  json solver;
  solver["num_defects"] = s.num_defects;
  solver["mesh"] = {{"h", s.h}, {"refine", s.refine}, {"vertices", s.num_vertices}, {"triangles", s.num_triangles}};
  solver["num_dofs"] = s.num_dofs;
  solver["influence_matrix"] = to_json(s.influence);
  solver["forcing"] = to_json(s.forcing);
  solver["coefficients"] = to_json(s.coefficients);
  solver["minimum_energy"] = s.energy;
  solver["functional_quadrature"] = s.functional;
  json rec = json::array();
  for (std::size_t i = 0; i < s.recovered.frank.size(); ++i) {
    rec.push_back({{"frank", s.recovered.frank[i]},
                   {"burgers", {s.recovered.burgers[i][0], s.recovered.burgers[i][1]}}});
  }
  solver["recovered_charges"] = std::move(rec);
  j["solver"] = std::move(solver);

  json checks = json::array();
  for (const CheckResult& c : r.checks) {
    json e;
    e["name"] = c.name;
    e["expected"] = c.expected;
    e["computed"] = finite_or_null(c.computed);
    e["tolerance"] = c.tolerance;
    e["pass"] = c.pass;
    if (!c.note.empty()) e["note"] = c.note;
    checks.push_back(std::move(e));
  }
  j["verification"] = {{"level", to_string(r.check_level)}, {"all_pass", r.checks_pass()}, {"checks", checks}};

  json artifacts = json::array();
  for (const auto& p : r.artifacts) artifacts.push_back(p.filename().string());
  j["artifacts"] = std::move(artifacts);

  if (with_timings) {
    json t = json::object();
    for (const StageTiming& st : r.timings) t[st.stage] = st.seconds;
    j["timings"] = std::move(t);
  }
  return j.dump(2);
}

MeshInfo mesh_info(const ProblemConfig& cfg, int refine) {
  const PerforatedDomain dom = build_perforated_domain(cfg.outer, cfg.defects, cfg.core_radius);
  auto mesh = std::make_shared<const Mesh>(build_mesh(dom, cfg.mesh_size(), refine));
  const FeSpace space(mesh);
  MeshInfo info;
  info.h = cfg.mesh_size();
  info.core_radius = cfg.core_radius;
  info.core_radius_bound = core_radius_bound(cfg.defects, cfg.outer);
  info.num_vertices = mesh->num_vertices();
  info.num_triangles = mesh->num_triangles();
  info.num_boundary_edges = mesh->boundary_edges.size();
  info.num_dofs = space.num_dofs();
  info.min_angle_deg = mesh->min_angle_deg();
  info.area = mesh->area();
  return info;
}

} // namespace airy
