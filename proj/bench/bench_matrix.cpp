/**
 * @file bench_matrix.cpp
 * @brief Serial vs OpenMP execution of the detuning matrix.
 */
#include "afw/scenario.hpp"

#include <benchmark/benchmark.h>

#include <filesystem>

using namespace afw::scenario;

namespace {

std::vector<ScenarioConfig> detuning_matrix(double duration) {
    const std::filesystem::path dir = std::filesystem::path(AFW_CONFIG_DIR) / "scenarios";
    std::vector<ScenarioConfig> out;
    for (const char* n : {"benchmark", "adaptive_a1", "fixed_a05", "adaptive_a05", "adaptive_a0"}) {
        out.push_back(load_scenario(dir / (std::string(n) + ".json")));
        out.back().duration = duration;
    }
    return out;
}

void run(benchmark::State& state, Execution exec) {
    const auto configs = detuning_matrix(static_cast<double>(state.range(0)));
    for (auto _ : state) {
        auto result = run_matrix(configs, "benchmark", exec);
        benchmark::DoNotOptimize(result);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(configs.size()));
}

void BM_matrix_serial(benchmark::State& state) { run(state, Execution::serial); }
void BM_matrix_parallel(benchmark::State& state) { run(state, Execution::parallel); }

}  // namespace

BENCHMARK(BM_matrix_serial)->Arg(180)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_matrix_parallel)->Arg(180)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
