#pragma once

// Hot loops of the library. Each kernel exists twice: a plain serial version
// kept as the reference for tests and benchmarks, and an OpenMP version used
// by the library. Both produce bit-identical results; every parallel loop
// writes disjoint outputs and reductions merge in a fixed order.

#include <cstddef>
#include <cstdint>
#include <span>

namespace chainlab::kernels {

/// Which flow terms a transition T(n) -> T(n+1) is charged: both directions, or inflow only.
enum class FlowVariant { full, reduced };

/// Per-state row masses of one matrix A_n for a list of subsets T:
/// out_mass[t*s + i] = sum_{j not in T} a_ij and in_mass[t*s + i] = sum_{j in T} a_ij,
/// each accumulated in increasing j.
struct RowMasses {
    std::span<const double> out_mass;
    std::span<const double> in_mass;
};

/// Largest constraint ratio of the balanced-asymmetry / cut-balance
/// inequality, with the subset pair that attains it.
struct RatioWitness {
    double ratio = 0.0;  ///< 0 when no pair constrains
    std::uint32_t s1 = 0;
    std::uint32_t s2 = 0;
    bool found = false;
};

namespace serial {

/// c = a * b for order-n row-major matrices.
void multiply(std::span<const double> a, std::span<const double> b, std::span<double> c,
              std::size_t n);

void row_masses(std::span<const double> a, std::size_t n, std::span<const std::uint32_t> states,
                std::span<double> out_mass, std::span<double> in_mass);

/// One dynamic-programming relaxation over equal-cardinality subsets:
/// next[t'] = min_t prev[t] + cost(t, t'), pred[t'] = first minimizing t.
/// states must be sorted ascending so the first minimizer is the smallest mask.
void flow_relax(std::size_t n, std::span<const std::uint32_t> states, RowMasses masses,
                FlowVariant variant, std::span<const double> prev, std::span<double> next,
                std::span<std::uint32_t> pred);

/// Scans every pair (S1, S2) of equal-cardinality subsets with 1 <= |S| < n
/// (only S1 == S2 when diagonal_only) and returns the worst ratio
/// lhs/rhs with lhs = sum_{i in S1, j notin S2} a_ij, rhs = sum_{i notin S1, j in S2} a_ij.
/// lhs == 0 imposes nothing; lhs > 0 with rhs == 0 gives +inf.
/// Ties keep the pair that comes first in (|S|, S1, S2) order.
RatioWitness subset_ratio_scan(std::span<const double> a, std::size_t n, bool diagonal_only);

}  // namespace serial

namespace omp {

void multiply(std::span<const double> a, std::span<const double> b, std::span<double> c,
              std::size_t n);
void row_masses(std::span<const double> a, std::size_t n, std::span<const std::uint32_t> states,
                std::span<double> out_mass, std::span<double> in_mass);
void flow_relax(std::size_t n, std::span<const std::uint32_t> states, RowMasses masses,
                FlowVariant variant, std::span<const double> prev, std::span<double> next,
                std::span<std::uint32_t> pred);
RatioWitness subset_ratio_scan(std::span<const double> a, std::size_t n, bool diagonal_only);

}  // namespace omp

/// Number of OpenMP threads available (1 when built without OpenMP).
int max_threads();

}  // namespace chainlab::kernels
