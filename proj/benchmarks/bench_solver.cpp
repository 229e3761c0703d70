#include "airy/equilibrium.hpp"

#include <benchmark/benchmark.h>

using namespace airy;

namespace {

const MaterialParams kMat(1.0, 0.3);

std::shared_ptr<const PerforatedDomain> two_defects() {
  static const auto dom = std::make_shared<PerforatedDomain>(build_perforated_domain(
      OuterBoundary::disk({0, 0}, 1),
      DefectConfiguration({Dislocation{{-0.4, 0.0}, {1.0, 0.0}}, Disclination{{0.4, 0.1}, 0.5}}), 0.15));
  return dom;
}

// h = eps / range(0)
double mesh_size(const benchmark::State& state) { return 0.15 / static_cast<double>(state.range(0)); }

} // namespace

static void BM_GenerateMesh(benchmark::State& state) {
  const auto dom = two_defects();
  const double h = mesh_size(state);
  std::size_t triangles = 0;
  for (auto _ : state) {
    const Mesh m = generate_mesh(*dom, h);
    triangles = m.num_triangles();
    benchmark::DoNotOptimize(triangles);
  }
  state.counters["triangles"] = static_cast<double>(triangles);
}
BENCHMARK(BM_GenerateMesh)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_AssembleHessianForm(benchmark::State& state) {
  const auto dom = two_defects();
  const auto space = std::make_shared<FeSpace>(std::make_shared<Mesh>(generate_mesh(*dom, mesh_size(state))));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_hessian_form(*space).nonZeros());
  state.counters["dofs"] = static_cast<double>(space->num_dofs());
}
BENCHMARK(BM_AssembleHessianForm)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_CellSolves(benchmark::State& state) {
  const auto dom = two_defects();
  const auto space = std::make_shared<FeSpace>(std::make_shared<Mesh>(generate_mesh(*dom, mesh_size(state))));
  for (auto _ : state) {
    const auto problem = std::make_shared<ClampedProblem>(space);
    const CellBasis basis = solve_cell_basis(problem, *dom);
    benchmark::DoNotOptimize(assemble_influence_matrix(basis).sum());
  }
  state.counters["dofs"] = static_cast<double>(space->num_dofs());
}
BENCHMARK(BM_CellSolves)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_FullSolve(benchmark::State& state) {
  const auto dom = two_defects();
  for (auto _ : state) {
    const auto mesh = std::make_shared<Mesh>(generate_mesh(*dom, mesh_size(state)));
    benchmark::DoNotOptimize(solve_on_mesh(dom, mesh, kMat).solution.energy);
  }
}
BENCHMARK(BM_FullSolve)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
