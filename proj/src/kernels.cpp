#include "chainlab/kernels.hpp"

#include <bit>
#include <limits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace chainlab::kernels {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline void multiply_row(std::span<const double> a, std::span<const double> b, std::span<double> c,
                         std::size_t n, std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += a[i * n + k] * b[k * n + j];
        c[i * n + j] = acc;
    }
}

inline void row_masses_one(std::span<const double> a, std::size_t n, std::uint32_t mask,
                           double* out, double* in) {
    for (std::size_t i = 0; i < n; ++i) {
        double o = 0.0;
        double m = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (mask >> j & 1U)
                m += a[i * n + j];
            else
                o += a[i * n + j];
        }
        out[i] = o;
        in[i] = m;
    }
}

// Cost of moving from states[t] to the subset `next_mask`, in a fixed
// association order: inner sums are the precomputed row masses, outer sums run in
// increasing i, and the two terms are added last.
inline double transition_cost(std::size_t n, const double* out, const double* in,
                              std::uint32_t next_mask, FlowVariant variant) {
    double into_next = 0.0;
    double out_of_next = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (next_mask >> i & 1U)
            into_next += out[i];
        else
            out_of_next += in[i];
    }
    return variant == FlowVariant::full ? into_next + out_of_next : out_of_next;
}

inline void relax_one(std::size_t n, std::span<const std::uint32_t> states, RowMasses masses,
                      FlowVariant variant, std::span<const double> prev, std::span<double> next,
                      std::span<std::uint32_t> pred, std::size_t tn) {
    double best = kInf;
    std::uint32_t arg = 0;
    const std::uint32_t next_mask = states[tn];
    for (std::size_t t = 0; t < states.size(); ++t) {
        const double v = prev[t] + transition_cost(n, masses.out_mass.data() + t * n,
                                                   masses.in_mass.data() + t * n, next_mask, variant);
        if (v < best) {
            best = v;
            arg = static_cast<std::uint32_t>(t);
        }
    }
    next[tn] = best;
    pred[tn] = arg;
}

std::vector<std::vector<std::uint32_t>> masks_by_cardinality(std::size_t n) {
    std::vector<std::vector<std::uint32_t>> by_card(n + 1);
    const std::uint32_t full = n >= 32 ? ~0U : (1U << n);
    for (std::uint32_t m = 0; m < full; ++m) by_card[std::popcount(m)].push_back(m);
    return by_card;
}

struct PairRatio {
    double ratio;
    bool constrains;
};

inline PairRatio pair_ratio(std::size_t n, std::uint32_t s1, const double* out2, const double* in2) {
    double lhs = 0.0;
    double rhs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (s1 >> i & 1U)
            lhs += out2[i];
        else
            rhs += in2[i];
    }
    if (lhs == 0.0) return {0.0, false};
    if (rhs == 0.0) return {kInf, true};
    return {lhs / rhs, true};
}

// Best pair for a fixed S1 (index a) within one cardinality class.
RatioWitness scan_s1(std::size_t n, const std::vector<std::uint32_t>& masks,
                     const std::vector<double>& out, const std::vector<double>& in, std::size_t a,
                     bool diagonal_only) {
    RatioWitness best;
    const std::size_t lo = diagonal_only ? a : 0;
    const std::size_t hi = diagonal_only ? a + 1 : masks.size();
    for (std::size_t b = lo; b < hi; ++b) {
        const PairRatio pr = pair_ratio(n, masks[a], out.data() + b * n, in.data() + b * n);
        if (pr.constrains && (!best.found || pr.ratio > best.ratio)) {
            best = {pr.ratio, masks[a], masks[b], true};
        }
    }
    return best;
}

inline void merge_into(RatioWitness& acc, const RatioWitness& cand) {
    if (cand.found && (!acc.found || cand.ratio > acc.ratio)) acc = cand;
}

template <bool Parallel>
RatioWitness subset_ratio_scan_impl(std::span<const double> a, std::size_t n, bool diagonal_only) {
    RatioWitness best;
    if (n < 2) return best;
    const auto by_card = masks_by_cardinality(n);
    for (std::size_t c = 1; c < n; ++c) {
        const auto& masks = by_card[c];
        const std::size_t m = masks.size();
        std::vector<double> out(m * n);
        std::vector<double> in(m * n);
        std::vector<RatioWitness> per_s1(m);
        const auto count = static_cast<std::ptrdiff_t>(m);
        if constexpr (Parallel) {
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t t = 0; t < count; ++t)
                row_masses_one(a, n, masks[t], out.data() + t * n, in.data() + t * n);
#pragma omp parallel for schedule(dynamic, 8)
            for (std::ptrdiff_t t = 0; t < count; ++t)
                per_s1[t] = scan_s1(n, masks, out, in, static_cast<std::size_t>(t), diagonal_only);
        } else {
            for (std::ptrdiff_t t = 0; t < count; ++t)
                row_masses_one(a, n, masks[t], out.data() + t * n, in.data() + t * n);
            for (std::ptrdiff_t t = 0; t < count; ++t)
                per_s1[t] = scan_s1(n, masks, out, in, static_cast<std::size_t>(t), diagonal_only);
        }
        for (const auto& w : per_s1) merge_into(best, w);
    }
    return best;
}

}  // namespace

namespace serial {

void multiply(std::span<const double> a, std::span<const double> b, std::span<double> c,
              std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) multiply_row(a, b, c, n, i);
}

void row_masses(std::span<const double> a, std::size_t n, std::span<const std::uint32_t> states,
                std::span<double> out_mass, std::span<double> in_mass) {
    for (std::size_t t = 0; t < states.size(); ++t)
        row_masses_one(a, n, states[t], out_mass.data() + t * n, in_mass.data() + t * n);
}

void flow_relax(std::size_t n, std::span<const std::uint32_t> states, RowMasses masses,
                FlowVariant variant, std::span<const double> prev, std::span<double> next,
                std::span<std::uint32_t> pred) {
    for (std::size_t tn = 0; tn < states.size(); ++tn)
        relax_one(n, states, masses, variant, prev, next, pred, tn);
}

RatioWitness subset_ratio_scan(std::span<const double> a, std::size_t n, bool diagonal_only) {
    return subset_ratio_scan_impl<false>(a, n, diagonal_only);
}

}  // namespace serial

namespace omp {

void multiply(std::span<const double> a, std::span<const double> b, std::span<double> c,
              std::size_t n) {
    const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (n >= 64)
    for (std::ptrdiff_t i = 0; i < rows; ++i) multiply_row(a, b, c, n, static_cast<std::size_t>(i));
}

void row_masses(std::span<const double> a, std::size_t n, std::span<const std::uint32_t> states,
                std::span<double> out_mass, std::span<double> in_mass) {
    const auto count = static_cast<std::ptrdiff_t>(states.size());
#pragma omp parallel for schedule(static) if (count >= 256)
    for (std::ptrdiff_t t = 0; t < count; ++t)
        row_masses_one(a, n, states[t], out_mass.data() + t * n, in_mass.data() + t * n);
}

void flow_relax(std::size_t n, std::span<const std::uint32_t> states, RowMasses masses,
                FlowVariant variant, std::span<const double> prev, std::span<double> next,
                std::span<std::uint32_t> pred) {
    const auto count = static_cast<std::ptrdiff_t>(states.size());
#pragma omp parallel for schedule(static) if (count >= 64)
    for (std::ptrdiff_t tn = 0; tn < count; ++tn)
        relax_one(n, states, masses, variant, prev, next, pred, static_cast<std::size_t>(tn));
}

RatioWitness subset_ratio_scan(std::span<const double> a, std::size_t n, bool diagonal_only) {
    return subset_ratio_scan_impl<true>(a, n, diagonal_only);
}

}  // namespace omp

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace chainlab::kernels
