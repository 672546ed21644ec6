#include <benchmark/benchmark.h>

#include <popt/linalg.hpp>
#include <popt/rng.hpp>
#include <popt/states.hpp>

namespace {

popt::HermitianOperator random_hermitian(int dim, popt::Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    popt::ComplexMatrix g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = popt::cplx(gauss(rng), gauss(rng));
    return popt::HermitianOperator(0.5 * (g + g.adjoint().eval()));
}

void BM_TensorProduct(benchmark::State& state) {
    popt::Rng rng = popt::make_rng(1);
    const int d = static_cast<int>(state.range(0));
    const popt::ComplexMatrix a = random_hermitian(d, rng).matrix();
    const popt::ComplexMatrix b = random_hermitian(d, rng).matrix();
    for (auto _ : state) benchmark::DoNotOptimize(popt::tensor_product(a, b));
}
BENCHMARK(BM_TensorProduct)->Arg(4)->Arg(9);

void BM_Eigh(benchmark::State& state) {
    popt::Rng rng = popt::make_rng(2);
    const popt::HermitianOperator h = random_hermitian(static_cast<int>(state.range(0)), rng);
    for (auto _ : state) benchmark::DoNotOptimize(popt::eigh(h));
}
BENCHMARK(BM_Eigh)->Arg(4)->Arg(16)->Arg(81);

void BM_NegativePart(benchmark::State& state) {
    popt::Rng rng = popt::make_rng(3);
    const popt::HermitianOperator h = random_hermitian(static_cast<int>(state.range(0)), rng);
    for (auto _ : state) benchmark::DoNotOptimize(popt::negative_part(h));
}
BENCHMARK(BM_NegativePart)->Arg(4)->Arg(9);

void BM_SpanRankFamily(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const auto family = popt::span_family(d);
    std::vector<popt::HermitianOperator> projs;
    for (const auto& psi : family)
        projs.emplace_back(popt::ComplexMatrix(psi.amplitudes() * psi.amplitudes().adjoint()));
    for (auto _ : state) benchmark::DoNotOptimize(popt::span_rank(projs));
}
BENCHMARK(BM_SpanRankFamily)->Arg(2)->Arg(3);

}  // namespace
