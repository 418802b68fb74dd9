#include "tfgs/flow.hpp"
#include "tfgs/functionals.hpp"
#include "tfgs/radial.hpp"
#include "tfgs/riesz.hpp"
#include "tfgs/special_fn.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace tfgs;

namespace {

RadialFunction gaussian(const GridPtr& g, int N) {
    std::vector<double> v(g->M() + 1);
    for (int i = 0; i <= g->M(); ++i) v[i] = std::exp(-g->node(i) * g->node(i));
    return RadialFunction(g, std::move(v), N);
}

void BM_hyp2f1(benchmark::State& st) {
    double z = 0;
    for (auto _ : st) {
        z += 1e-6;
        if (z >= 0.99) z = 0;
        benchmark::DoNotOptimize(hyp2f1(0.75, 1.25, 1.5, z));
    }
}
BENCHMARK(BM_hyp2f1);

void BM_hyp2f1_near_one(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(hyp2f1(0.75, 1.25, 1.5, 0.999));
}
BENCHMARK(BM_hyp2f1_near_one);

// Operator assembly for N = 3 (closed-form kernel) and N = 2 (hypergeometric kernel).
void BM_operator_build(benchmark::State& st) {
    const int N = static_cast<int>(st.range(1));
    auto g = make_grid(8.0, static_cast<int>(st.range(0)), Clustering::uniform);
    for (auto _ : st) {
        RieszOperator op(g, N, 1.3);
        benchmark::DoNotOptimize(op.cols());
    }
}
BENCHMARK(BM_operator_build)->Args({128, 3})->Args({512, 3})->Args({128, 2})->Unit(benchmark::kMillisecond);

void BM_operator_apply(benchmark::State& st) {
    auto g = make_grid(8.0, static_cast<int>(st.range(0)), Clustering::uniform);
    auto op = RieszOperator::get(g, 3, 1.3, false);
    Params P{3, 1.3, 2.0, 4.0};
    auto rho = gaussian(g, 3);
    for (auto _ : st) benchmark::DoNotOptimize(potential(rho, P).values.data());
    (void)op;
}
BENCHMARK(BM_operator_apply)->Arg(128)->Arg(512)->Unit(benchmark::kMicrosecond);

void BM_flow_step(benchmark::State& st) {
    Params P{3, 1.0, 1.5, 2.5};
    FlowConfig cfg;
    auto g = make_grid(50.0, static_cast<int>(st.range(0)), Clustering::uniform);
    auto u0 = initial_profile(cfg, P, g);
    auto state = make_state(u0, P, 0.0);
    for (auto _ : st) step(state, cfg, P);
}
BENCHMARK(BM_flow_step)->Arg(256)->Arg(512)->Unit(benchmark::kMicrosecond);

void BM_evaluate_all(benchmark::State& st) {
    Params P{3, 1.0, 1.5, 2.5};
    auto g = make_grid(8.0, 512, Clustering::uniform);
    auto u = gaussian(g, 3);
    evaluate_all(u, P);  // builds the cached operator
    for (auto _ : st) benchmark::DoNotOptimize(evaluate_all(u, P).d_alpha);
}
BENCHMARK(BM_evaluate_all)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
