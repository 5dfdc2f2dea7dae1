#include <benchmark/benchmark.h>

#include "delayrc/analysis.hpp"
#include "delayrc/mmf.hpp"

namespace {

using namespace delayrc;

ExperimentConfig experiment(double b, int k_train) {
    ExperimentConfig ex;
    ex.model = stuart_landau_for(-0.503, b, -0.1, 1e-3);
    ex.timing = make_timing(100.0, 100, 141.0);
    ex.k_train = k_train;
    ex.buffer_inputs = 1000;
    ex.n_masks = 1;
    ex.threads = 1;
    return ex;
}

// Arg: feedback b in thousandths.
void BM_Direct(benchmark::State& state) {
    const ExperimentConfig ex = experiment(state.range(0) / 1000.0, 2000);
    const Mask mask = replica_mask(ex, 0);
    const InputSequence inputs = replica_inputs(ex, 0);
    for (auto _ : state) benchmark::DoNotOptimize(direct_spectrum(ex, mask, inputs).mc_total);
}

void BM_Mmf(benchmark::State& state) {
    const ExperimentConfig ex = experiment(state.range(0) / 1000.0, 2000);
    const Mask mask = replica_mask(ex, 0);
    const Linearization lin = linearize(ex.model);
    for (auto _ : state) benchmark::DoNotOptimize(mmf_spectrum(lin, ex.timing, mask, ex.k_train).mc_total);
}

void BM_ModifiedStateMatrix(benchmark::State& state) {
    const ExperimentConfig ex = experiment(state.range(0) / 1000.0, 2000);
    const Mask mask = replica_mask(ex, 0);
    const MapCoefficients mc = map_coefficients(linearize(ex.model), ex.timing.theta, ex.timing.nu, ex.timing.n_v);
    for (auto _ : state) benchmark::DoNotOptimize(modified_state_matrix(mc, mask).entries.data());
}

BENCHMARK(BM_Direct)->Arg(201)->Arg(450)->Unit(benchmark::kMillisecond)->Iterations(1);
BENCHMARK(BM_Mmf)->Arg(201)->Arg(450)->Arg(498)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ModifiedStateMatrix)->Arg(201)->Arg(450)->Arg(498)->Unit(benchmark::kMillisecond);

}  // namespace
