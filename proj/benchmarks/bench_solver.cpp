#include <benchmark/benchmark.h>

#include "ncvar/envelope.hpp"
#include "ncvar/gridworld.hpp"
#include "ncvar/rng.hpp"
#include "ncvar/solver.hpp"

using namespace ncvar;

namespace {

GridSpec bench_spec(int rows, int cols) {
    GridSpec spec;
    spec.rows = rows;
    spec.cols = cols;
    spec.start = {rows - 1, cols - 1};
    spec.goal = {0, 0};
    spec.obstacle_count = rows * cols / 16;
    spec.gamma = 0.95;
    return spec;
}

void BM_sweep(benchmark::State& state) {
    const int side = int(state.range(0));
    const Mdp mdp = build_gridworld(bench_spec(side, side), 5);
    const AmbiguitySpec amb = AmbiguitySpec::rn(2.0);
    const ConfidenceGrid grid = grid_for(amb);
    ValueFunction v(mdp.n_states(), grid.size(), 0.0);
    for (int k = 0; k < 5; ++k) v = apply_bellman(v, mdp, amb, grid);
    for (auto _ : state) benchmark::DoNotOptimize(apply_bellman(v, mdp, amb, grid));
    state.SetItemsProcessed(state.iterations() * mdp.n_states() * grid.size());
}
BENCHMARK(BM_sweep)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_envelope(benchmark::State& state) {
    Rng rng(11);
    const ConfidenceGrid grid = grid_for(AmbiguitySpec::rn(2.0));
    const int n = grid.size();
    std::vector<std::vector<double>> g_rows(4);
    std::vector<PiecewiseLinearCurve> curves(4);
    std::vector<double> probs{0.95, 0.05 / 3, 0.05 / 3, 0.05 / 3};
    for (int j = 0; j < 4; ++j) {
        double slope = rng.next_range(5.0, 20.0);
        g_rows[std::size_t(j)].assign(std::size_t(n), 0.0);
        for (int i = 1; i < n; ++i) {
            g_rows[std::size_t(j)][std::size_t(i)] =
                g_rows[std::size_t(j)][std::size_t(i - 1)] +
                slope * (grid.node(i) - grid.node(i - 1));
            slope *= 0.9;
        }
        curves[std::size_t(j)] = PiecewiseLinearCurve{
            {grid.nodes().data(), std::size_t(n)},
            {g_rows[std::size_t(j)].data(), g_rows[std::size_t(j)].size()}};
    }
    std::vector<double> values(std::size_t(n - 1), 0.0);
    EnvelopeWorkspace ws;
    for (auto _ : state) {
        maximize_envelope_at_levels(probs, curves, 2.0, {grid.nodes().data() + 1, std::size_t(n - 1)},
                                    values, nullptr, ws);
        benchmark::DoNotOptimize(values.data());
    }
}
BENCHMARK(BM_envelope);

} // namespace

BENCHMARK_MAIN();
