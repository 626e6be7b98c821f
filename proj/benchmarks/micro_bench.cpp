#include <benchmark/benchmark.h>

#include "copsel/cop.hpp"
#include "copsel/features.hpp"
#include "copsel/model.hpp"
#include "copsel/rng.hpp"
#include "copsel/solvers.hpp"

using namespace copsel;

namespace {

COPInstance make_instance(int d, int n_lin, int n_quad) {
    GeneratorSpec spec;
    spec.dimension = d;
    spec.n_linear = n_lin;
    spec.n_quadratic = n_quad;
    return random_instance(spec, 42);
}

void bm_evaluate_objective(benchmark::State& state) {
    const auto inst = make_instance(static_cast<int>(state.range(0)), 0, 0);
    std::vector<double> x(inst.space.dimension, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_objective(inst, x));
}
BENCHMARK(bm_evaluate_objective)->Arg(5)->Arg(10)->Arg(30);

void bm_violation(benchmark::State& state) {
    const auto inst = make_instance(10, static_cast<int>(state.range(0)),
                                    static_cast<int>(state.range(0)));
    std::vector<double> x(10, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(violation(inst, x));
}
BENCHMARK(bm_violation)->Arg(1)->Arg(4);

void bm_epsilon_compare(benchmark::State& state) {
    FPhi a{1.0, 0.2}, b{2.0, 0.1};
    for (auto _ : state) benchmark::DoNotOptimize(epsilon_compare(a, b, 0.15));
}
BENCHMARK(bm_epsilon_compare);

void bm_solver(benchmark::State& state) {
    const auto kind = kAllSolvers[static_cast<std::size_t>(state.range(0))];
    const auto inst = make_instance(5, 1, 1);
    const auto cfg = SolverConfig::defaults(kind);
    std::uint64_t seed = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(solve(inst, cfg, 2000, 1e-4, seed++));
    state.SetLabel(solver_name(kind));
}
BENCHMARK(bm_solver)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void bm_extract_features(benchmark::State& state) {
    const auto inst = make_instance(5, 2, 2);
    FeatureSettings settings;
    settings.n_samples = static_cast<int>(state.range(0));
    std::uint64_t seed = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(extract_features(inst, settings, seed++));
    state.SetLabel("samples=" + std::to_string(settings.n_samples));
}
BENCHMARK(bm_extract_features)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void bm_forward(benchmark::State& state) {
    const int n_in = FeatureVector::kLength + 3 * SolverConfig::kEncodedLength;
    const auto model = init_model(n_in, 7);
    Eigen::VectorXd input = Eigen::VectorXd::Constant(n_in, 0.3);
    for (auto _ : state) benchmark::DoNotOptimize(forward(model, input));
}
BENCHMARK(bm_forward);

void bm_output_jacobian(benchmark::State& state) {
    const int n_in = FeatureVector::kLength + 3 * SolverConfig::kEncodedLength;
    const auto model = init_model(n_in, 7);
    Eigen::VectorXd input = Eigen::VectorXd::Constant(n_in, 0.3);
    for (auto _ : state) benchmark::DoNotOptimize(output_jacobian(model, input));
}
BENCHMARK(bm_output_jacobian);

} // namespace

BENCHMARK_MAIN();
