#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "nf/grid.hpp"
#include "nf/kernels.hpp"

// Serial reference kernels vs the OpenMP production paths on the node
// operations that dominate solver time.

namespace {

std::vector<double> random_values(std::size_t n) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = dist(rng);
    return v;
}

void bench_laplacian_serial(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const std::vector<double> f = random_values(static_cast<std::size_t>(n) * n);
    std::vector<double> out(f.size());
    for (auto _ : state) {
        nf::kernels::neg_laplacian_2d_serial(f.data(), out.data(), n, n, 1.0, 1.0);
        benchmark::DoNotOptimize(out.data());
    }
}

void bench_laplacian_omp(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const std::vector<double> f = random_values(static_cast<std::size_t>(n) * n);
    std::vector<double> out(f.size());
    for (auto _ : state) {
        nf::kernels::neg_laplacian_2d(f.data(), out.data(), n, n, 1.0, 1.0);
        benchmark::DoNotOptimize(out.data());
    }
}

void bench_sine_transform_serial(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto& table = nf::kernels::sine_table(n);
    const std::vector<double> f = random_values(static_cast<std::size_t>(n) * n);
    std::vector<double> out(f.size());
    for (auto _ : state) {
        nf::kernels::sine_apply_rows_serial(table, f.data(), out.data(), n, n);
        benchmark::DoNotOptimize(out.data());
    }
}

void bench_sine_transform_omp(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto& table = nf::kernels::sine_table(n);
    const std::vector<double> f = random_values(static_cast<std::size_t>(n) * n);
    std::vector<double> out(f.size());
    for (auto _ : state) {
        nf::kernels::sine_apply_rows(table, f.data(), out.data(), n, n);
        benchmark::DoNotOptimize(out.data());
    }
}

void bench_reduction_serial(benchmark::State& state) {
    const std::vector<double> f = random_values(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        double s = nf::kernels::indexed_sum_serial(f.size(),
                                                   [&](std::size_t i) { return f[i] * f[i]; });
        benchmark::DoNotOptimize(s);
    }
}

void bench_reduction_blocked(benchmark::State& state) {
    const std::vector<double> f = random_values(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        double s =
            nf::kernels::indexed_sum(f.size(), [&](std::size_t i) { return f[i] * f[i]; });
        benchmark::DoNotOptimize(s);
    }
}

void bench_poisson_solve(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const nf::Domain d = nf::Domain::box(1.0, 1.0, n, n);
    const nf::GridFunction g = nf::GridFunction::sample(
        d, [](double x, double y) { return x * (1.0 - x) * y * (1.0 - y); });
    for (auto _ : state) {
        nf::GridFunction u = nf::poisson_solve(g);
        benchmark::DoNotOptimize(u.values().data());
    }
}

} // namespace

BENCHMARK(bench_laplacian_serial)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(bench_laplacian_omp)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(bench_sine_transform_serial)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(bench_sine_transform_omp)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(bench_reduction_serial)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(bench_reduction_blocked)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(bench_poisson_solve)->Arg(64)->Arg(128);

BENCHMARK_MAIN();
