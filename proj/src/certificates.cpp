#include "chainlab/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "chainlab/error.hpp"
#include "chainlab/kernels.hpp"

namespace chainlab {

std::vector<std::size_t> members(SubsetMask mask, std::size_t order) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < order; ++i)
        if (mask >> i & 1U) out.push_back(i);
    return out;
}

namespace {

void check_order(const StochasticMatrix& m, std::size_t max_order) {
    if (m.order() > max_order)
        throw OrderTooLarge("subset enumeration limited to order " + std::to_string(max_order) + ", got " +
                            std::to_string(m.order()));
    if (m.order() > 31) throw OrderTooLarge("subset masks hold at most 31 agents");
}

ConstantWithWitness from_scan(const kernels::RatioWitness& w) {
    ConstantWithWitness c;
    if (w.found && w.ratio > 1.0) {
        c.value = w.ratio;
        c.s1 = w.s1;
        c.s2 = w.s2;
    } else if (w.found) {
        c.s1 = w.s1;
        c.s2 = w.s2;
    }
    return c;
}

}  // namespace

ConstantWithWitness balanced_asymmetry_constant(const StochasticMatrix& m, std::size_t max_order) {
    check_order(m, max_order);
    return from_scan(kernels::omp::subset_ratio_scan(m.matrix().data(), m.order(), false));
}

ConstantWithWitness cut_balance_constant(const StochasticMatrix& m, std::size_t max_order) {
    check_order(m, max_order);
    return from_scan(kernels::omp::subset_ratio_scan(m.matrix().data(), m.order(), true));
}

double self_confidence(const ChainSource& chain, std::size_t N) {
    chain.require_defined_until(N);
    double delta = kInfinity;
    for (std::size_t n = 0; n < N; ++n) {
        const StochasticMatrix a = chain.at(n);
        for (std::size_t i = 0; i < a.order(); ++i) delta = std::min(delta, a(i, i));
    }
    return delta;
}

bool is_doubly_stochastic(const StochasticMatrix& m, double tol) {
    for (std::size_t j = 0; j < m.order(); ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < m.order(); ++i) col += m(i, j);
        if (!(std::abs(col - 1.0) <= tol)) return false;
    }
    return true;
}

CertificateReport certify(const ChainSource& chain, std::size_t N, std::size_t max_order) {
    if (N == 0) throw HorizonExceeded("certificates need a horizon of at least one step");
    const auto matrices = chain.take(N);
    if (chain.order() > max_order)
        throw OrderTooLarge("subset enumeration limited to order " + std::to_string(max_order));

    CertificateReport r;
    r.horizon = N;
    r.per_step_M.resize(N);
    r.per_step_K.resize(N);
    r.min_diagonal.resize(N);
    std::vector<char> ds(N);

    std::exception_ptr failure;
    const auto steps = static_cast<std::ptrdiff_t>(N);
    // Each step's scan is serial here so the parallelism sits at the outer
    // level; results land in per-step slots and are merged below in order.
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t t = 0; t < steps; ++t) {
        try {
            const auto& a = matrices[static_cast<std::size_t>(t)];
            r.per_step_M[t] = from_scan(kernels::serial::subset_ratio_scan(a.matrix().data(), a.order(), false));
            r.per_step_K[t] = from_scan(kernels::serial::subset_ratio_scan(a.matrix().data(), a.order(), true));
            double d = kInfinity;
            for (std::size_t i = 0; i < a.order(); ++i) d = std::min(d, a(i, i));
            r.min_diagonal[t] = d;
            ds[t] = is_doubly_stochastic(a) ? 1 : 0;
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    r.doubly_stochastic.assign(ds.begin(), ds.end());
    r.delta_running.resize(N);
    double running = kInfinity;
    for (std::size_t n = 0; n < N; ++n) {
        if (r.per_step_M[n].value > r.chain_M) {
            r.chain_M = r.per_step_M[n].value;
            r.worst_M_step = n;
        }
        if (r.per_step_K[n].value > r.chain_K) {
            r.chain_K = r.per_step_K[n].value;
            r.worst_K_step = n;
        }
        running = std::min(running, r.min_diagonal[n]);
        r.delta_running[n] = running;
    }
    r.delta = running;
    return r;
}

double L1Distance::tail_increase() const {
    if (cumulative.size() < 2) return 0.0;
    const std::size_t n = cumulative.size() - 1;
    const std::size_t w = std::max<std::size_t>(1, n / 4);
    return cumulative[n] - cumulative[n - w];
}

L1Distance l1_distance(const ChainSource& a, const ChainSource& b, std::size_t N) {
    if (a.order() != b.order())
        throw OrderMismatch("l1 distance between chains of order " + std::to_string(a.order()) + " and " +
                            std::to_string(b.order()));
    a.require_defined_until(N);
    b.require_defined_until(N);
    L1Distance d;
    d.horizon = N;
    d.per_step.reserve(N);
    d.cumulative.reserve(N + 1);
    d.cumulative.push_back(0.0);
    for (std::size_t n = 0; n < N; ++n) {
        d.per_step.push_back(max_norm_diff(a.at(n), b.at(n)));
        d.cumulative.push_back(d.cumulative.back() + d.per_step.back());
    }
    return d;
}

}  // namespace chainlab
