#include "noon/analysis.hpp"
#include "noon/counts.hpp"
#include "noon/experiment.hpp"
#include "noon/fock.hpp"
#include "noon/metrology.hpp"
#include "noon/mzi.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

namespace {

const noon::mzi::MziConfig kDevice{0.5, 0.5, 0.61, 1.0, 0.0};
const noon::sim::SampleModel kSample{0.785, 55.0, 1.79e-3, 0.15};

noon::sim::RunPlan bench_plan() {
    noon::sim::RunPlan plan;
    for (int k = 0; k < 15; ++k) plan.concentrations.push_back(0.5 * k);
    plan.pair_rate_hz = 1.0e4;
    plan.efficiency.eta_a = plan.efficiency.eta_b = 0.1;
    plan.efficiency.eta_c = plan.efficiency.eta_d = 0.1;
    plan.seed = 7;
    return plan;
}

void BM_BuildNetwork(benchmark::State& state) {
    double phi = 0.0;
    for (auto _ : state) {
        phi += 1e-3;
        benchmark::DoNotOptimize(noon::mzi::build_network(kDevice, phi));
    }
}
BENCHMARK(BM_BuildNetwork);

void BM_TwoPhotonAmplitudes(benchmark::State& state) {
    const auto u = noon::mzi::build_network(kDevice, 0.7);
    const auto input = noon::fock::OccupationPattern::pair(4, 0, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(noon::fock::two_photon_amplitudes(u, input));
    }
}
BENCHMARK(BM_TwoPhotonAmplitudes);

void BM_CoincidenceClosedForm(benchmark::State& state) {
    double phi = 0.0;
    for (auto _ : state) {
        phi += 1e-3;
        benchmark::DoNotOptimize(noon::mzi::coincidence_probability(kDevice, phi));
    }
}
BENCHMARK(BM_CoincidenceClosedForm);

void BM_Sensitivity(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(noon::metrology::sensitivity(kDevice));
    }
}
BENCHMARK(BM_Sensitivity);

void BM_SensitivityMap(benchmark::State& state) {
    const int grid = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(noon::metrology::sensitivity_map(1.0, 1.0, grid));
    }
    state.SetComplexityN(grid);
}
BENCHMARK(BM_SensitivityMap)->Arg(11)->Arg(21)->Complexity();

void BM_SimulateSweep(benchmark::State& state) {
    const auto plan = bench_plan();
    for (auto _ : state) {
        benchmark::DoNotOptimize(noon::sim::simulate_sweep(plan, kDevice, kSample));
    }
}
BENCHMARK(BM_SimulateSweep);

void BM_NormalizeCoincidences(benchmark::State& state) {
    noon::counts::CountRecord rec{1.0, 100, 110, 95, 105, 420, 380, 55, 60};
    for (auto _ : state) {
        benchmark::DoNotOptimize(noon::counts::normalize_coincidences(rec));
    }
}
BENCHMARK(BM_NormalizeCoincidences);

void BM_FitFringe(benchmark::State& state) {
    const auto sweep = noon::sim::simulate_sweep(bench_plan(), kDevice, kSample);
    const auto pts = noon::analysis::fringe_points_from_sweep(sweep, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(noon::analysis::fit_fringe(pts, 2));
    }
}
BENCHMARK(BM_FitFringe);

}  // namespace

BENCHMARK_MAIN();
