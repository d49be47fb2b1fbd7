// Serial-vs-OpenMP comparison for the data-parallel kernels.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "sobtrace/kernels.hpp"

using namespace sobtrace;
using namespace sobtrace::kernels;

namespace {

std::vector<Point2> bench_points(int n) {
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Point2> pts;
    for (int i = 0; i < n; ++i) pts.push_back({u(gen), u(gen)});
    return pts;
}

std::vector<double> bench_angles(int n) {
    std::vector<double> a;
    for (int i = 0; i < n; ++i) a.push_back(2.0 * M_PI * i / n);
    return a;
}

struct BenchField final : Field2D {
    FieldEval eval(const Point2& x) const override {
        FieldEval e;
        e.v = std::sin(3 * x.x) * std::cos(2 * x.y);
        e.gx = 3 * std::cos(3 * x.x) * std::cos(2 * x.y);
        e.gy = -2 * std::sin(3 * x.x) * std::sin(2 * x.y);
        e.hxx = -9 * e.v;
        e.hyy = -4 * e.v;
        e.hxy = -6 * std::cos(3 * x.x) * std::sin(2 * x.y);
        return e;
    }
};

void angle_profile_serial_bench(benchmark::State& state) {
    auto pts = bench_points(int(state.range(0)));
    auto ang = bench_angles(512);
    for (auto _ : state)
        benchmark::DoNotOptimize(angle_profile_serial(pts, ang, 4.0));
}
void angle_profile_omp_bench(benchmark::State& state) {
    auto pts = bench_points(int(state.range(0)));
    auto ang = bench_angles(512);
    for (auto _ : state)
        benchmark::DoNotOptimize(angle_profile_omp(pts, ang, 4.0));
}

void hessian_rows_serial_bench(benchmark::State& state) {
    BenchField F;
    Square box({0, 0}, 2.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            hessian_rows_serial(F, box, int(state.range(0)), 4.0));
}
void hessian_rows_omp_bench(benchmark::State& state) {
    BenchField F;
    Square box({0, 0}, 2.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            hessian_rows_omp(F, box, int(state.range(0)), 4.0));
}

void grid_cells_serial_bench(benchmark::State& state) {
    const int n = int(state.range(0));
    Grid2D g{n, 2.0 / (n - 1)};
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<double> u(std::size_t(n) * n), w(std::size_t(n) * n, 1.0);
    for (double& x : u) x = uni(gen);
    std::vector<double> dxx, dxy, dyy, y;
    for (auto _ : state) {
        cell_hessians_serial(g, u, dxx, dxy, dyy);
        weighted_gather_serial(g, w, dxx, dxy, dyy, y);
        benchmark::DoNotOptimize(penergy_serial(g, dxx, dxy, dyy, 4.0));
    }
}
void grid_cells_omp_bench(benchmark::State& state) {
    const int n = int(state.range(0));
    Grid2D g{n, 2.0 / (n - 1)};
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<double> u(std::size_t(n) * n), w(std::size_t(n) * n, 1.0);
    for (double& x : u) x = uni(gen);
    std::vector<double> dxx, dxy, dyy, y;
    for (auto _ : state) {
        cell_hessians_omp(g, u, dxx, dxy, dyy);
        weighted_gather_omp(g, w, dxx, dxy, dyy, y);
        benchmark::DoNotOptimize(penergy_omp(g, dxx, dxy, dyy, 4.0));
    }
}

void pair_kernel_serial_bench(benchmark::State& state) {
    const std::size_t n = std::size_t(state.range(0));
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<double> s(n), K(n * n, 0.0), w, y;
    for (double& x : s) x = uni(gen);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) K[i * n + j] = 1.0 / double(1 + (i > j ? i - j : j - i));
    for (auto _ : state) {
        pair_weights_serial(s, 4.0, 1e-8, w);
        pair_matvec_serial(K, w, s, y);
        benchmark::DoNotOptimize(pair_energy_serial(K, s, 4.0));
    }
}
void pair_kernel_omp_bench(benchmark::State& state) {
    const std::size_t n = std::size_t(state.range(0));
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<double> s(n), K(n * n, 0.0), w, y;
    for (double& x : s) x = uni(gen);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) K[i * n + j] = 1.0 / double(1 + (i > j ? i - j : j - i));
    for (auto _ : state) {
        pair_weights_omp(s, 4.0, 1e-8, w);
        pair_matvec_omp(K, w, s, y);
        benchmark::DoNotOptimize(pair_energy_omp(K, s, 4.0));
    }
}

}  // namespace

BENCHMARK(angle_profile_serial_bench)->Arg(16)->Arg(32);
BENCHMARK(angle_profile_omp_bench)->Arg(16)->Arg(32);
BENCHMARK(hessian_rows_serial_bench)->Arg(64)->Arg(128);
BENCHMARK(hessian_rows_omp_bench)->Arg(64)->Arg(128);
BENCHMARK(grid_cells_serial_bench)->Arg(64)->Arg(128);
BENCHMARK(grid_cells_omp_bench)->Arg(64)->Arg(128);
BENCHMARK(pair_kernel_serial_bench)->Arg(256)->Arg(512);
BENCHMARK(pair_kernel_omp_bench)->Arg(256)->Arg(512);

BENCHMARK_MAIN();
