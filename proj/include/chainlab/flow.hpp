#pragma once

#include <cstddef>
#include <vector>

#include "chainlab/certificates.hpp"
#include "chainlab/chain.hpp"
#include "chainlab/kernels.hpp"

namespace chainlab {

using kernels::FlowVariant;

inline constexpr std::size_t kMaxFlowOrder = 20;
inline constexpr double kDefaultBruteForceBudget = 1e7;

const char* to_string(FlowVariant v);

/// T(0), T(1), ..., T(N), all of the same cardinality.
struct SubsetSequence {
    std::size_t cardinality = 0;
    std::vector<SubsetMask> sets;
};

struct MinFlow {
    std::size_t cardinality = 0;
    /// F_c(n), n = 0..N: least cumulative flow over sequences of length n+1.
    std::vector<double> curve;
    /// Minimizer for the full horizon; ties go to the smallest masks.
    SubsetSequence witness;
    bool trivial = false;  ///< c == s: property holds vacuously
    double value() const { return curve.back(); }
};

/// Minimum over all equal-cardinality subset sequences of
///   sum_{n<N} [ sum_{i in T(n+1), j notin T(n)} a_ij(n) + sum_{i notin T(n+1), j in T(n)} a_ij(n) ]
/// (full) or of the second term alone (reduced), by dynamic programming over
/// the C(s, c) subsets at each step. c == s (or s == 1) is trivially
/// satisfied and returns zero cost. Throws OrderTooLarge for s > 20.
MinFlow min_flow_dp(const ChainSource& chain, std::size_t N, std::size_t c, FlowVariant variant);

/// Exhaustive enumeration of all C(s,c)^(N+1) sequences; the test oracle for
/// min_flow_dp. Throws BudgetExceeded past `budget` sequences.
double brute_force_min_flow(const ChainSource& chain, std::size_t N, std::size_t c, FlowVariant variant,
                            double budget = kDefaultBruteForceBudget);

enum class FlowClass { divergent_trend, bounded_witness, undecided, trivially_satisfied };

const char* to_string(FlowClass c);

/// Finite-horizon reading of a nondecreasing flow curve F(0..N). The tail
/// window is the last max(1, N/4) steps.
///   divergent_trend: F(N) >= min_total and the tail growth per unit of
///                    log-time, (F(N) - F(N-w)) / ln((N+1)/(N-w+1)), is at
///                    least min_log_slope (a harmonic-or-faster series)
///   bounded_witness: tail growth <= zero_tail
struct FlowThresholds {
    double min_total = 1.0;
    double min_log_slope = 0.1;
    double zero_tail = 1e-12;
};

struct TailStats {
    double increase = 0.0;
    double slope = 0.0;      ///< per step
    double log_slope = 0.0;  ///< per unit ln n
};

TailStats tail_stats(const std::vector<double>& curve);
FlowClass classify_flow(const std::vector<double>& curve, const FlowThresholds& thresholds);

struct FlowProfile {
    FlowVariant variant = FlowVariant::full;
    std::size_t horizon = 0;
    std::size_t order = 0;
    std::vector<MinFlow> per_cardinality;  ///< c = 1 .. s-1
    std::vector<double> min_over_c;        ///< n = 0..N
    std::size_t argmin_cardinality = 0;    ///< c attaining min_over_c(N)
    FlowClass verdict = FlowClass::undecided;
    TailStats tail;
    FlowThresholds thresholds;

    const MinFlow& cardinality(std::size_t c) const { return per_cardinality.at(c - 1); }
};

/// min_flow_dp for every c = 1..s-1 and the verdict on min_over_c.
FlowProfile aif_profile(const ChainSource& chain, std::size_t N, FlowVariant variant,
                        const FlowThresholds& thresholds = {});

}  // namespace chainlab
