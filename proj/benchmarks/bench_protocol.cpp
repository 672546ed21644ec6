#include <benchmark/benchmark.h>

#include <popt/protocol.hpp>

namespace {

void BM_SimulateQubitGbm(benchmark::State& state) {
    const popt::Scenario s(popt::gamma_state(popt::bell_projector(2, 0, 0)),
                           popt::pauli_inputs(popt::Party::A),
                           popt::pauli_inputs(popt::Party::B), popt::gbm_povm(2),
                           popt::gbm_povm(2));
    for (auto _ : state) benchmark::DoNotOptimize(popt::simulate(s));
}
BENCHMARK(BM_SimulateQubitGbm);

void BM_SimulateQutritMub(benchmark::State& state) {
    popt::Rng rng = popt::make_rng(5);
    const popt::Scenario s(popt::random_quantum_state(3, 3, rng),
                           popt::mub_inputs(3, popt::Party::A),
                           popt::mub_inputs(3, popt::Party::B), popt::gbm_povm(3),
                           popt::gbm_povm(3));
    for (auto _ : state) benchmark::DoNotOptimize(popt::simulate(s));
}
BENCHMARK(BM_SimulateQutritMub);

void BM_EffectiveState(benchmark::State& state) {
    const popt::Scenario s(popt::gamma_state(popt::bell_projector(2, 0, 0)),
                           popt::pauli_inputs(popt::Party::A),
                           popt::pauli_inputs(popt::Party::B), popt::gbm_povm(2),
                           popt::gbm_povm(2));
    for (auto _ : state) benchmark::DoNotOptimize(popt::effective_state(s, 0, 0));
}
BENCHMARK(BM_EffectiveState);

void BM_ProductMinimumSeesaw(benchmark::State& state) {
    popt::Rng rng = popt::make_rng(6);
    const popt::BipartiteState bq = popt::random_beyond_quantum_state(rng);
    for (auto _ : state) benchmark::DoNotOptimize(popt::product_minimum(bq, 8, rng));
}
BENCHMARK(BM_ProductMinimumSeesaw);

void BM_ProductMinimumGrid(benchmark::State& state) {
    popt::Rng rng = popt::make_rng(7);
    const popt::BipartiteState bq = popt::random_beyond_quantum_state(rng);
    for (auto _ : state)
        benchmark::DoNotOptimize(popt::product_minimum_grid(bq.op, 64));
}
BENCHMARK(BM_ProductMinimumGrid);

void BM_SampleMillionShots(benchmark::State& state) {
    const popt::Scenario s(popt::gamma_state(popt::bell_projector(2, 0, 0)),
                           popt::pauli_inputs(popt::Party::A),
                           popt::pauli_inputs(popt::Party::B), popt::gbm_povm(2),
                           popt::gbm_povm(2));
    popt::Rng rng = popt::make_rng(8);
    for (auto _ : state) benchmark::DoNotOptimize(popt::sample(s, 1000000, rng));
}
BENCHMARK(BM_SampleMillionShots);

}  // namespace
