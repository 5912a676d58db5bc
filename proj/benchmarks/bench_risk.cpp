#include <benchmark/benchmark.h>

#include "ncvar/risk.hpp"
#include "ncvar/rng.hpp"

using namespace ncvar;

namespace {

DiscreteDistribution make_distribution(int n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> outcomes(std::size_t(n), 0.0);
    std::vector<double> probs(std::size_t(n), 0.0);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        outcomes[std::size_t(i)] = rng.next_range(-5.0, 10.0);
        probs[std::size_t(i)] = rng.next_unit() + 0.01;
        total += probs[std::size_t(i)];
    }
    for (double& p : probs) p /= total;
    return DiscreteDistribution(std::move(outcomes), std::move(probs));
}

void BM_cvar(benchmark::State& state) {
    const auto dist = make_distribution(int(state.range(0)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(cvar(dist, 0.48));
}
BENCHMARK(BM_cvar)->Arg(4)->Arg(64)->Arg(1024);

void BM_ncvar(benchmark::State& state) {
    const auto dist = make_distribution(int(state.range(0)), 2);
    const BudgetVector budget = BudgetVector::constant(2.0, dist.size());
    for (auto _ : state) benchmark::DoNotOptimize(ncvar::ncvar(dist, 0.48, budget));
}
BENCHMARK(BM_ncvar)->Arg(4)->Arg(64)->Arg(1024);

void BM_evar(benchmark::State& state) {
    const auto dist = make_distribution(int(state.range(0)), 3);
    for (auto _ : state) benchmark::DoNotOptimize(evar(dist, 0.48));
}
BENCHMARK(BM_evar)->Arg(4)->Arg(64)->Arg(1024);

} // namespace

BENCHMARK_MAIN();
