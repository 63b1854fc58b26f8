// Serial reference vs OpenMP kernels. Sizes are chosen so the OpenMP path
// has enough work to amortize thread start-up.
#include <benchmark/benchmark.h>

#include <bit>
#include <cstdint>
#include <random>
#include <vector>

#include "chainlab/kernels.hpp"

namespace k = chainlab::kernels;

namespace {

std::vector<double> stochastic(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> a(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) sum += a[i * n + j] = u(rng);
        for (std::size_t j = 0; j < n; ++j) a[i * n + j] /= sum;
    }
    return a;
}

std::vector<std::uint32_t> subsets(std::size_t n, int c) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t m = 0; m < (1u << n); ++m)
        if (std::popcount(m) == c) out.push_back(m);
    return out;
}

template <bool Omp>
void multiply(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = stochastic(n, 1);
    const auto b = stochastic(n, 2);
    std::vector<double> c(n * n);
    for (auto _ : state) {
        if constexpr (Omp) k::omp::multiply(a, b, c, n);
        else k::serial::multiply(a, b, c, n);
        benchmark::DoNotOptimize(c.data());
    }
}

template <bool Omp>
void flow_relax(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = stochastic(n, 3);
    const auto states = subsets(n, static_cast<int>(n / 2));
    std::vector<double> out_mass(states.size() * n), in_mass(states.size() * n);
    k::serial::row_masses(a, n, states, out_mass, in_mass);
    std::vector<double> prev(states.size(), 0.0), next(states.size());
    std::vector<std::uint32_t> pred(states.size());
    for (auto _ : state) {
        if constexpr (Omp) k::omp::flow_relax(n, states, {out_mass, in_mass}, k::FlowVariant::full, prev, next, pred);
        else k::serial::flow_relax(n, states, {out_mass, in_mass}, k::FlowVariant::full, prev, next, pred);
        benchmark::DoNotOptimize(next.data());
    }
    state.counters["subsets"] = static_cast<double>(states.size());
}

template <bool Omp>
void subset_ratio_scan(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = stochastic(n, 4);
    for (auto _ : state) {
        const auto w = Omp ? k::omp::subset_ratio_scan(a, n, false) : k::serial::subset_ratio_scan(a, n, false);
        benchmark::DoNotOptimize(w.ratio);
    }
}

}  // namespace

BENCHMARK(multiply<false>)->Name("multiply/serial")->Arg(64)->Arg(256);
BENCHMARK(multiply<true>)->Name("multiply/omp")->Arg(64)->Arg(256);
BENCHMARK(flow_relax<false>)->Name("flow_relax/serial")->Arg(10)->Arg(12);
BENCHMARK(flow_relax<true>)->Name("flow_relax/omp")->Arg(10)->Arg(12);
BENCHMARK(subset_ratio_scan<false>)->Name("subset_ratio_scan/serial")->Arg(8)->Arg(10);
BENCHMARK(subset_ratio_scan<true>)->Name("subset_ratio_scan/omp")->Arg(8)->Arg(10);

BENCHMARK_MAIN();
