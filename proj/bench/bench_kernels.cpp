// Serial reference vs OpenMP kernels on representative sizes.
// Run with OMP_NUM_THREADS set to the core count of interest.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "jko/kernels.hpp"

namespace {

using namespace jko;
namespace ks = jko::kernels::serial;
namespace kp = jko::kernels::parallel;

std::vector<Point> lattice(int n, double lo, double hi) {
    std::vector<Point> p;
    p.reserve(static_cast<std::size_t>(n) * n);
    const double h = (hi - lo) / n;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) p.push_back({lo + (i + 0.5) * h, lo + (j + 0.5) * h});
    return p;
}

std::vector<double> noise(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = u(rng);
    return v;
}

kernels::SeparableLogKernel gaussian_kernel(int n, double eps) {
    kernels::SeparableLogKernel k;
    k.nx = k.ny = n;
    k.log_kx.resize(static_cast<std::size_t>(n) * n);
    const double h = 1.0 / n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double d = (i - j) * h;
            k.log_kx[static_cast<std::size_t>(i) * n + j] = -d * d / eps;
        }
    k.log_ky = k.log_kx;
    return k;
}

template <bool Parallel>
void BM_PairwiseSlope(benchmark::State& st) {
    const auto pts = lattice(static_cast<int>(st.range(0)), 0.0, 1.0);
    const auto f = noise(pts.size(), 1);
    for (auto _ : st) {
        auto r = Parallel ? kp::max_pairwise_slope(pts, f) : ks::max_pairwise_slope(pts, f);
        benchmark::DoNotOptimize(r);
    }
}

template <bool Parallel>
void BM_LseSeparable(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    const auto k = gaussian_kernel(n, 2.0 / (n * n));
    const auto in = noise(static_cast<std::size_t>(n) * n, 2);
    std::vector<double> out(in.size());
    for (auto _ : st) {
        if (Parallel) kp::lse_separable(k, in, out);
        else ks::lse_separable(k, in, out);
        benchmark::DoNotOptimize(out.data());
    }
}

template <bool Parallel>
void BM_SupTangentQuadratics(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    const auto src = lattice(n, 0.0, 1.0);
    const auto tgt = lattice(n, -0.5, 1.5);
    std::vector<double> v(src.size()), gx(src.size()), gy(src.size());
    for (std::size_t s = 0; s < src.size(); ++s) {
        v[s] = 0.5 * (src[s].x * src[s].x + src[s].y * src[s].y);
        gx[s] = src[s].x;
        gy[s] = src[s].y;
    }
    std::vector<double> out(tgt.size());
    for (auto _ : st) {
        if (Parallel) kp::sup_tangent_quadratics(src, v, gx, gy, 1.0, tgt, out);
        else ks::sup_tangent_quadratics(src, v, gx, gy, 1.0, tgt, out);
        benchmark::DoNotOptimize(out.data());
    }
}

template <bool Parallel>
void BM_SupCones(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    const auto src = lattice(n, 0.0, 1.0);
    const auto tgt = lattice(n, -0.5, 1.5);
    const auto h = noise(src.size(), 3);
    std::vector<double> out(tgt.size());
    for (auto _ : st) {
        if (Parallel) kp::sup_cones(src, h, 2.0, tgt, out);
        else ks::sup_cones(src, h, 2.0, tgt, out);
        benchmark::DoNotOptimize(out.data());
    }
}

template <bool Parallel>
void BM_ConvolvePadded(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    const int r = n / 10;
    const auto in = noise(static_cast<std::size_t>(n + 2 * r) * (n + 2 * r), 4);
    std::vector<double> w(static_cast<std::size_t>(2 * r + 1) * (2 * r + 1), 1.0 / ((2 * r + 1) * (2 * r + 1)));
    std::vector<double> out(static_cast<std::size_t>(n) * n);
    for (auto _ : st) {
        if (Parallel) kp::convolve_padded(in, n, n, w, r, r, out);
        else ks::convolve_padded(in, n, n, w, r, r, out);
        benchmark::DoNotOptimize(out.data());
    }
}

}  // namespace

BENCHMARK(BM_PairwiseSlope<false>)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PairwiseSlope<true>)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LseSeparable<false>)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LseSeparable<true>)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SupTangentQuadratics<false>)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SupTangentQuadratics<true>)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SupCones<false>)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SupCones<true>)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvolvePadded<false>)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvolvePadded<true>)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
