#include <benchmark/benchmark.h>

#include <popt/detection.hpp>
#include <popt/solver.hpp>

namespace {

popt::DetectionProblem cell_problem(const popt::Scenario& s, const popt::CorrelationTable& t,
                                    int a, int b) {
    popt::DetectionProblem p;
    p.dim = s.inputs_a.dim * s.inputs_b.dim;
    for (int x = 0; x < t.nx(); ++x)
        for (int y = 0; y < t.ny(); ++y)
            p.constraints.push_back(popt::Constraint{
                popt::HermitianOperator(popt::tensor_product(
                    s.inputs_a.states[static_cast<std::size_t>(x)].op.matrix(),
                    s.inputs_b.states[static_cast<std::size_t>(y)].op.matrix())),
                t.at(a, b, x, y)});
    return p;
}

void BM_SolveShortcut(benchmark::State& state) {
    const popt::Scenario s(popt::gamma_state(popt::bell_projector(2, 0, 0)),
                           popt::pauli_inputs(popt::Party::A),
                           popt::pauli_inputs(popt::Party::B), popt::gbm_povm(2),
                           popt::gbm_povm(2));
    const popt::CorrelationTable t = popt::simulate(s);
    const popt::DetectionProblem p = cell_problem(s, t, 0, 0);
    for (auto _ : state) benchmark::DoNotOptimize(popt::solve_detection(p));
}
BENCHMARK(BM_SolveShortcut);

void BM_SolveSplitting(benchmark::State& state) {
    // Underdetermined planar constraints force the iterative path.
    const popt::Scenario s(popt::gamma_state(popt::bell_projector(2, 0, 0)),
                           popt::planar_inputs(popt::Party::A),
                           popt::planar_inputs(popt::Party::B), popt::gbm_povm(2),
                           popt::gbm_povm(2));
    const popt::CorrelationTable t = popt::simulate(s);
    const popt::DetectionProblem p = cell_problem(s, t, 0, 0);
    for (auto _ : state) benchmark::DoNotOptimize(popt::solve_detection(p));
}
BENCHMARK(BM_SolveSplitting);

void BM_PoptDecomposition(benchmark::State& state) {
    popt::Rng rng = popt::make_rng(4);
    const popt::BipartiteState bq = popt::random_beyond_quantum_state(rng);
    for (auto _ : state)
        benchmark::DoNotOptimize(popt::solve_popt_decomposition(bq.op, 2, 2));
}
BENCHMARK(BM_PoptDecomposition);

void BM_DetectFullTable(benchmark::State& state) {
    const popt::Scenario s(popt::gamma_state(popt::bell_projector(2, 0, 0)),
                           popt::pauli_inputs(popt::Party::A),
                           popt::pauli_inputs(popt::Party::B), popt::gbm_povm(2),
                           popt::gbm_povm(2));
    const popt::CorrelationTable t = popt::simulate(s);
    for (auto _ : state)
        benchmark::DoNotOptimize(popt::detect(t, s.inputs_a, s.inputs_b));
}
BENCHMARK(BM_DetectFullTable);

}  // namespace
