// Microbenchmarks for the fitting paths: closed-form K2IE vs iterative FIE,
// plus the edge-matrix construction that dominates setup cost.

#include <benchmark/benchmark.h>

#include "k2ie/estimators.hpp"
#include "k2ie/experiment.hpp"
#include "k2ie/model_selection.hpp"

using namespace k2ie;

namespace {

TrialData trial_for(const std::string& dataset) {
  return make_trial(dataset, 7, 0);
}

KernelParams params_for(const Domain& domain, double multiplier) {
  return KernelParams(multiplier * beta_bar(domain));
}

void BM_EdgeMatrix(benchmark::State& state) {
  const auto data = trial_for("1d_1");
  const int M = static_cast<int>(state.range(0));
  const auto map = build_feature_map(params_for(data.domain, 10.0), M, 1, true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(edge_matrix(map, data.domain));
  }
}
BENCHMARK(BM_EdgeMatrix)->Arg(50)->Arg(250);

void BM_FitK2IE(benchmark::State& state) {
  const auto data = trial_for(state.range(1) ? "1d_1_x10" : "1d_1");
  const int M = static_cast<int>(state.range(0));
  const auto params = params_for(data.domain, 10.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        fit_k2ie(data.events, params, data.domain, 1.0, M, 1));
  }
}
BENCHMARK(BM_FitK2IE)->Args({50, 0})->Args({250, 0})->Args({50, 1})->Args({250, 1});

void BM_FitK2IE_CachedKernel(benchmark::State& state) {
  // Amortized path used inside the CV grid: kernel built once, refit per fold.
  const auto data = trial_for("1d_1");
  const int M = static_cast<int>(state.range(0));
  const auto map = build_feature_map(params_for(data.domain, 10.0), M, 1, true);
  auto ek = std::make_shared<const EquivalentKernel>(map, data.domain, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_k2ie(ek, data.events));
  }
}
BENCHMARK(BM_FitK2IE_CachedKernel)->Arg(50)->Arg(250);

void BM_FitFIE(benchmark::State& state) {
  const auto data = trial_for("1d_1");
  const int M = static_cast<int>(state.range(0));
  const auto params = params_for(data.domain, 10.0);
  const auto opt = cv_fie_optimizer();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        fit_fie(data.events, params, data.domain, 1.0, M, 1, opt));
  }
}
BENCHMARK(BM_FitFIE)->Arg(50)->Arg(250)->Unit(benchmark::kMillisecond);

void BM_FitKIE_Intensity(benchmark::State& state) {
  const auto data = trial_for("1d_1");
  const auto model = fit_kie(data.events, params_for(data.domain, 10.0), data.domain);
  Eigen::VectorXd x(1);
  x << 17.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.intensity(x));
  }
}
BENCHMARK(BM_FitKIE_Intensity);

}  // namespace

BENCHMARK_MAIN();
