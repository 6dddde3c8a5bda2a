#include <benchmark/benchmark.h>

#include <Eigen/SparseLU>

#include "rdcont/discretization.hpp"
#include "rdcont/newton.hpp"
#include "rdcont/stability.hpp"

using namespace rdcont;

namespace {

StateVector uniform_state(const ModelSpec& model, const Grid1D& grid) {
    return StateVector::constant(grid, model.uniform_steady_state());
}

void bm_residual(benchmark::State& state) {
    const ModelSpec model = make_schnakenberg(1.0);
    const Grid1D grid(static_cast<int>(state.range(0)));
    const StateVector u = uniform_state(model, grid);
    for (auto _ : state)
        benchmark::DoNotOptimize(residual(model, u, 0.1));
}

void bm_jacobian_assembly(benchmark::State& state) {
    const ModelSpec model = make_schnakenberg(1.0);
    const Grid1D grid(static_cast<int>(state.range(0)));
    const StateVector u = uniform_state(model, grid);
    for (auto _ : state)
        benchmark::DoNotOptimize(assemble_jacobian(model, u, 0.1));
}

void bm_sparse_solve(benchmark::State& state) {
    const ModelSpec model = make_schnakenberg(1.0);
    const Grid1D grid(static_cast<int>(state.range(0)));
    const StateVector u = uniform_state(model, grid);
    const SparseMat jac = assemble_jacobian(model, u, 0.1);
    const Eigen::VectorXd rhs = residual(model, u, 0.1);
    for (auto _ : state) {
        Eigen::SparseLU<SparseMat> lu(jac);
        benchmark::DoNotOptimize(lu.solve(rhs).eval());
    }
}

void bm_newton_solve(benchmark::State& state) {
    const ModelSpec model = make_schnakenberg(1.0);
    const Grid1D grid(static_cast<int>(state.range(0)));
    const StateVector seed = uniform_state(model, grid);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            newton_solve(model, seed, 0.05, NewtonSettings{}));
}

void bm_leading_spectrum(benchmark::State& state) {
    const ModelSpec model = make_schnakenberg(1.0);
    const Grid1D grid(static_cast<int>(state.range(0)));
    const SparseMat jac =
        assemble_jacobian(model, uniform_state(model, grid), 0.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(leading_spectrum(jac, 4));
}

BENCHMARK(bm_residual)->Arg(201)->Arg(801);
BENCHMARK(bm_jacobian_assembly)->Arg(201)->Arg(801);
BENCHMARK(bm_sparse_solve)->Arg(201)->Arg(801);
BENCHMARK(bm_newton_solve)->Arg(201);
BENCHMARK(bm_leading_spectrum)->Arg(201)->Arg(501);

}  // namespace

BENCHMARK_MAIN();
