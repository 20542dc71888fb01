#include <benchmark/benchmark.h>

#include "phasels/certificate.hpp"
#include "phasels/harness.hpp"
#include "phasels/lifted_sdp.hpp"
#include "phasels/phase_completion.hpp"
#include "phasels/rng.hpp"
#include "phasels/signal_model.hpp"

using namespace phasels;

namespace {

SparseSignal make_signal(int n, int k, int delta, std::uint64_t seed) {
  RngStream rng(seed);
  return gen_signal(n, k, delta, rng);
}

void BM_ForwardMeasure(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SparseSignal x = make_signal(n, n / 8, 8, 7);
  const MaskSet masks(n, 2, 3);
  const int k_freq = (n - 1) / 2;
  for (auto _ : state) {
    MeasurementGrid z = forward_measure(x, masks, k_freq);
    benchmark::DoNotOptimize(z.values().data());
  }
}
BENCHMARK(BM_ForwardMeasure)->Arg(40)->Arg(64)->Arg(128);

void BM_PhaseCompletionTree(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SparseSignal x = make_signal(n, n / 8, 8, 11);
  const MaskSet masks(n, 2, 3);
  const int k_freq = (n - 1) / 2;
  const MeasurementGrid z = forward_measure(x, masks, k_freq);
  const PairwiseData p = extract_pairwise(z, masks);
  const ConstraintGraph g(k_freq, 2, 3);
  for (auto _ : state) {
    LowFreqVector y = complete_rank_one(p, g, CompletionMode::exact_tree);
    benchmark::DoNotOptimize(y.values().data());
  }
}
BENCHMARK(BM_PhaseCompletionTree)->Arg(40)->Arg(128);

void BM_PhaseCompletionSpectral(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SparseSignal x = make_signal(n, n / 8, 8, 13);
  const MaskSet masks(n, 2, 3);
  const int k_freq = (n - 1) / 2;
  const MeasurementGrid z = forward_measure(x, masks, k_freq);
  const PairwiseData p = extract_pairwise(z, masks);
  const ConstraintGraph g(k_freq, 2, 3);
  for (auto _ : state) {
    LowFreqVector y = complete_rank_one(p, g, CompletionMode::spectral_sync);
    benchmark::DoNotOptimize(y.values().data());
  }
}
BENCHMARK(BM_PhaseCompletionSpectral)->Arg(40)->Arg(128);

void BM_SolveTwoStage(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SparseSignal x = make_signal(n, 4, n / 5, 17);
  const MaskSet masks(n, 2, 3);
  const int k_freq = n / 3;
  const MeasurementGrid z = forward_measure(x, masks, k_freq);
  for (auto _ : state) {
    LiftedSolution sol = solve_two_stage(z, masks);
    benchmark::DoNotOptimize(sol.x.data());
  }
}
BENCHMARK(BM_SolveTwoStage)->Unit(benchmark::kMillisecond)->Arg(20)->Arg(40);

void BM_SolveLiftedFull(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SparseSignal x = make_signal(n, 2, n / 3, 19);
  const MaskSet masks(n, 1, 2);
  const int k_freq = n / 3;
  const MeasurementGrid z = forward_measure(x, masks, k_freq);
  const ConstraintOperator op = assemble_constraints(masks, k_freq, z);
  for (auto _ : state) {
    LiftedSolution sol = solve_lifted(op, n);
    benchmark::DoNotOptimize(sol.x.data());
  }
}
BENCHMARK(BM_SolveLiftedFull)->Unit(benchmark::kMillisecond)->Arg(8)->Arg(16);

void BM_CertificateBuildVerify(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  RngStream rng(23);
  Eigen::VectorXcd z(n);
  for (int i = 0; i < n; ++i) z(i) = Complex(rng.normal(), rng.normal());
  std::vector<VertexGraph::Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  for (int i = 0; i + 5 < n; i += 3) edges.push_back({i, i + 5});
  const VertexGraph g(n, edges);
  for (auto _ : state) {
    auto [cm, duals] = build_certificate(z, g);
    CertificateReport report = verify_certificate(cm, z);
    benchmark::DoNotOptimize(report.min_eig);
  }
}
BENCHMARK(BM_CertificateBuildVerify)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
