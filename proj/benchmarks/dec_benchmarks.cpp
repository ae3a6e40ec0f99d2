#include <map>
#include <utility>

#include <benchmark/benchmark.h>

#include "dec/dual_geometry.hpp"
#include "dec/experiment.hpp"
#include "dec/exterior_derivative.hpp"
#include "dec/forms.hpp"
#include "dec/linalg.hpp"
#include "dec/mesh_gen.hpp"
#include "dec/poisson.hpp"

namespace {

const dec::SimplicialComplex2& mesh_for(int triangles, bool distorted) {
  static std::map<std::pair<int, bool>, dec::SimplicialComplex2> cache;
  auto key = std::make_pair(triangles, distorted);
  auto it = cache.find(key);
  if (it == cache.end()) {
    auto m = dec::delaunay_unit_square(triangles, 7);
    if (distorted) {
      dec::DistortionSpec spec;
      spec.target_edge_ratio = dec::kNd15Ratio;
      spec.rng_seed = 1;
      m = dec::distort_to_non_delaunay(m, spec);
    }
    it = cache.emplace(key, std::move(m)).first;
  }
  return it->second;
}

void BM_DelaunayGeneration(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(dec::delaunay_unit_square(static_cast<int>(state.range(0)), 7));
}
BENCHMARK(BM_DelaunayGeneration)->Arg(512)->Arg(2048)->Arg(8192)->Arg(32768)->Unit(benchmark::kMillisecond);

void BM_DualMetrics(benchmark::State& state) {
  const auto& m = mesh_for(static_cast<int>(state.range(0)), true);
  for (auto _ : state) benchmark::DoNotOptimize(dec::compute_dual_metrics(m));
}
BENCHMARK(BM_DualMetrics)->Arg(512)->Arg(2048)->Arg(8192)->Arg(32768)->Unit(benchmark::kMillisecond);

void BM_AssemblePrimal0(benchmark::State& state) {
  const auto& m = mesh_for(static_cast<int>(state.range(0)), true);
  const auto g = dec::compute_dual_metrics(m);
  for (auto _ : state) benchmark::DoNotOptimize(dec::primal0_operator(m, g));
}
BENCHMARK(BM_AssemblePrimal0)->Arg(512)->Arg(2048)->Arg(8192)->Arg(32768)->Unit(benchmark::kMillisecond);

void BM_AssembleOneForm(benchmark::State& state) {
  const auto& m = mesh_for(static_cast<int>(state.range(0)), true);
  const auto g = dec::compute_dual_metrics(m);
  for (auto _ : state) benchmark::DoNotOptimize(dec::one_form_operator(m, g));
}
BENCHMARK(BM_AssembleOneForm)->Arg(512)->Arg(2048)->Arg(8192)->Arg(32768)->Unit(benchmark::kMillisecond);

void BM_SparseLU_Primal0(benchmark::State& state) {
  const auto& m = mesh_for(static_cast<int>(state.range(0)), true);
  const auto g = dec::compute_dual_metrics(m);
  const auto a = dec::primal0_operator(m, g).with_identity_row(dec::central_interior_node(m));
  for (auto _ : state) {
    dec::SparseLU lu(a);
    benchmark::DoNotOptimize(lu.fill());
  }
}
BENCHMARK(BM_SparseLU_Primal0)->Arg(512)->Arg(2048)->Arg(8192)->Arg(32768)->Unit(benchmark::kMillisecond);

void BM_SolvePrimal0(benchmark::State& state) {
  const auto& m = mesh_for(static_cast<int>(state.range(0)), false);
  const auto g = dec::compute_dual_metrics(m);
  const auto f = dec::project_0form(dec::manufactured::cos_cos_laplacian, m, g, dec::Placement::PrimalNode);
  const auto pin = dec::central_interior_node(m);
  for (auto _ : state) benchmark::DoNotOptimize(dec::solve_poisson_primal0(m, g, f, pin, 0.0));
}
BENCHMARK(BM_SolvePrimal0)->Arg(512)->Arg(2048)->Arg(8192)->Arg(32768)->Unit(benchmark::kMillisecond);

void BM_ConditionEstimate(benchmark::State& state) {
  const auto& m = mesh_for(static_cast<int>(state.range(0)), true);
  const auto g = dec::compute_dual_metrics(m);
  const auto a = dec::study_matrix(dec::Study::Poisson0Primal, m, g);
  for (auto _ : state) benchmark::DoNotOptimize(dec::condition_number(a, dec::CondMode::Estimate));
}
BENCHMARK(BM_ConditionEstimate)->Arg(512)->Arg(2048)->Arg(8192)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
