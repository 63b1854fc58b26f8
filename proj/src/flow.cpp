#include "chainlab/flow.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "chainlab/error.hpp"

namespace chainlab {

const char* to_string(FlowVariant v) { return v == FlowVariant::full ? "full" : "reduced"; }

const char* to_string(FlowClass c) {
    switch (c) {
        case FlowClass::divergent_trend: return "flow-divergent-trend";
        case FlowClass::bounded_witness: return "bounded-flow-witness";
        case FlowClass::undecided: return "undecided";
        case FlowClass::trivially_satisfied: return "trivially-satisfied";
    }
    return "?";
}

namespace {

std::vector<SubsetMask> subsets_of_size(std::size_t s, std::size_t c) {
    std::vector<SubsetMask> out;
    const SubsetMask end = SubsetMask{1} << s;
    for (SubsetMask m = 0; m < end; ++m)
        if (static_cast<std::size_t>(std::popcount(m)) == c) out.push_back(m);
    return out;
}

void check_flow_args(const ChainSource& chain, std::size_t N, std::size_t c) {
    if (chain.order() > kMaxFlowOrder)
        throw OrderTooLarge("flow DP limited to " + std::to_string(kMaxFlowOrder) + " agents");
    if (c == 0 || c > chain.order()) throw OrderTooLarge("cardinality must lie in 1..s");
    chain.require_defined_until(N);
}

}  // namespace

MinFlow min_flow_dp(const ChainSource& chain, std::size_t N, std::size_t c, FlowVariant variant) {
    check_flow_args(chain, N, c);
    const std::size_t s = chain.order();
    MinFlow out;
    out.cardinality = c;
    out.witness.cardinality = c;
    if (c == s) {
        out.trivial = true;
        out.curve.assign(N + 1, 0.0);
        out.witness.sets.assign(N + 1, (SubsetMask{1} << s) - 1);
        return out;
    }

    const auto states = subsets_of_size(s, c);
    const std::size_t m = states.size();
    std::vector<double> cost(m, 0.0);
    std::vector<double> next(m);
    std::vector<double> out_mass(m * s);
    std::vector<double> in_mass(m * s);
    std::vector<std::uint32_t> pred(N * m);

    out.curve.reserve(N + 1);
    out.curve.push_back(0.0);
    for (std::size_t n = 0; n < N; ++n) {
        const StochasticMatrix a = chain.at(n);
        kernels::omp::row_masses(a.matrix().data(), s, states, out_mass, in_mass);
        kernels::omp::flow_relax(s, states, {out_mass, in_mass}, variant, cost,
                                 next, std::span<std::uint32_t>(pred.data() + n * m, m));
        cost.swap(next);
        out.curve.push_back(*std::min_element(cost.begin(), cost.end()));
    }

    std::size_t t = static_cast<std::size_t>(std::min_element(cost.begin(), cost.end()) - cost.begin());
    out.witness.sets.assign(N + 1, 0);
    out.witness.sets[N] = states[t];
    for (std::size_t n = N; n-- > 0;) {
        t = pred[n * m + t];
        out.witness.sets[n] = states[t];
    }
    return out;
}

namespace {

// Literal evaluation of one transition: for each receiving agent i the inner
// sum over j is formed first (increasing j), outer sums run in increasing i,
// and the two cross terms are added last.
double literal_cost(const StochasticMatrix& a, SubsetMask from, SubsetMask to, FlowVariant variant) {
    const std::size_t s = a.order();
    double into_to = 0.0;
    double out_of_to = 0.0;
    for (std::size_t i = 0; i < s; ++i) {
        const bool in_to = to >> i & 1U;
        double inner = 0.0;
        for (std::size_t j = 0; j < s; ++j) {
            const bool in_from = from >> j & 1U;
            if (in_to && !in_from) inner += a(i, j);
            if (!in_to && in_from) inner += a(i, j);
        }
        if (in_to)
            into_to += inner;
        else
            out_of_to += inner;
    }
    return variant == FlowVariant::full ? into_to + out_of_to : out_of_to;
}

struct Enumerator {
    const std::vector<StochasticMatrix>& matrices;
    const std::vector<SubsetMask>& states;
    FlowVariant variant;
    double best = std::numeric_limits<double>::infinity();

    void walk(std::size_t n, SubsetMask current, double total) {
        if (n == matrices.size()) {
            best = std::min(best, total);
            return;
        }
        for (SubsetMask next : states) walk(n + 1, next, total + literal_cost(matrices[n], current, next, variant));
    }
};

}  // namespace

double brute_force_min_flow(const ChainSource& chain, std::size_t N, std::size_t c, FlowVariant variant,
                            double budget) {
    check_flow_args(chain, N, c);
    const std::size_t s = chain.order();
    if (c == s) return 0.0;
    const auto states = subsets_of_size(s, c);
    const double sequences = std::pow(static_cast<double>(states.size()), static_cast<double>(N + 1));
    if (sequences > budget)
        throw BudgetExceeded("brute force would enumerate " + std::to_string(sequences) + " sequences");
    const auto matrices = chain.take(N);
    Enumerator e{matrices, states, variant};
    for (SubsetMask start : states) e.walk(0, start, 0.0);
    return e.best;
}

TailStats tail_stats(const std::vector<double>& curve) {
    TailStats t;
    if (curve.size() < 2) return t;
    const std::size_t N = curve.size() - 1;
    const std::size_t w = std::max<std::size_t>(1, N / 4);
    t.increase = curve[N] - curve[N - w];
    t.slope = t.increase / static_cast<double>(w);
    t.log_slope = t.increase / std::log(static_cast<double>(N + 1) / static_cast<double>(N - w + 1));
    return t;
}

FlowClass classify_flow(const std::vector<double>& curve, const FlowThresholds& thresholds) {
    const TailStats t = tail_stats(curve);
    if (curve.back() >= thresholds.min_total && t.log_slope >= thresholds.min_log_slope)
        return FlowClass::divergent_trend;
    if (t.increase <= thresholds.zero_tail) return FlowClass::bounded_witness;
    return FlowClass::undecided;
}

FlowProfile aif_profile(const ChainSource& chain, std::size_t N, FlowVariant variant,
                        const FlowThresholds& thresholds) {
    if (chain.order() > kMaxFlowOrder)
        throw OrderTooLarge("flow DP limited to " + std::to_string(kMaxFlowOrder) + " agents");
    chain.require_defined_until(N);
    FlowProfile p;
    p.variant = variant;
    p.horizon = N;
    p.order = chain.order();
    p.thresholds = thresholds;
    if (chain.order() == 1 || N == 0) {
        p.min_over_c.assign(N + 1, 0.0);
        p.verdict = chain.order() == 1 ? FlowClass::trivially_satisfied : FlowClass::undecided;
        return p;
    }
    for (std::size_t c = 1; c < chain.order(); ++c) p.per_cardinality.push_back(min_flow_dp(chain, N, c, variant));

    p.min_over_c.assign(N + 1, std::numeric_limits<double>::infinity());
    for (const auto& mf : p.per_cardinality)
        for (std::size_t n = 0; n <= N; ++n) p.min_over_c[n] = std::min(p.min_over_c[n], mf.curve[n]);
    p.argmin_cardinality = 1;
    for (const auto& mf : p.per_cardinality)
        if (mf.value() < p.cardinality(p.argmin_cardinality).value()) p.argmin_cardinality = mf.cardinality;
    p.tail = tail_stats(p.min_over_c);
    p.verdict = classify_flow(p.min_over_c, thresholds);
    return p;
}

}  // namespace chainlab
