#include "chainlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "chainlab/detail/union_find.hpp"
#include "chainlab/error.hpp"

namespace chainlab {

SortedStateView sorted_view(std::span<const double> x) {
    SortedStateView v;
    v.perm.resize(x.size());
    std::iota(v.perm.begin(), v.perm.end(), std::size_t{0});
    std::stable_sort(v.perm.begin(), v.perm.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    v.z.reserve(x.size());
    for (std::size_t i : v.perm) v.z.push_back(x[i]);
    return v;
}

StateVector step(const StochasticMatrix& a, std::span<const double> x) {
    if (a.order() != x.size())
        throw OrderMismatch("state of size " + std::to_string(x.size()) + " for matrix of order " +
                            std::to_string(a.order()));
    StateVector y(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        double acc = 0.0;
        const auto row = a.row(i);
        for (std::size_t j = 0; j < x.size(); ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
    return y;
}

Trajectory trajectory(const ChainSource& chain, StateVector x0, std::size_t k, std::size_t N) {
    if (k >= N) throw HorizonExceeded("trajectory needs k < N");
    if (x0.size() != chain.order()) throw OrderMismatch("initial state does not match chain order");
    for (double v : x0)
        if (!std::isfinite(v)) throw std::invalid_argument("initial state must be finite");
    chain.require_defined_until(N);
    Trajectory t;
    t.start = k;
    t.states.reserve(N - k + 1);
    t.sorted.reserve(N - k + 1);
    t.states.push_back(std::move(x0));
    t.sorted.push_back(sorted_view(t.states.back()));
    for (std::size_t n = k; n < N; ++n) {
        t.states.push_back(step(chain.at(n), t.states.back()));
        t.sorted.push_back(sorted_view(t.states.back()));
    }
    t.L = t.sorted.front().z.back() - t.sorted.front().z.front();
    return t;
}

LyapunovSeries lyapunov_series(const Trajectory& traj, double M, std::vector<double> mprime) {
    if (M == std::numeric_limits<double>::infinity()) throw InfiniteM();
    if (!(M >= 1.0) || !std::isfinite(M)) throw std::invalid_argument("Lyapunov series needs finite M >= 1");
    const std::size_t T = traj.states.size();
    const std::size_t s = traj.order();
    if (mprime.empty()) mprime.assign(T, 0.0);
    if (mprime.size() < T) throw std::invalid_argument("m' shorter than the trajectory");
    if (mprime.front() != 0.0) throw std::invalid_argument("m'_0 must be 0");
    for (std::size_t t = 1; t < mprime.size(); ++t)
        if (mprime[t] < mprime[t - 1]) throw std::invalid_argument("m' must be non-decreasing");

    LyapunovSeries ls;
    ls.M = M;
    ls.K = 2.0 * M;
    ls.L = traj.L;
    ls.start = traj.start;
    ls.mprime = std::move(mprime);
    ls.values.assign(s, std::vector<double>(T, 0.0));
    for (std::size_t t = 0; t < T; ++t) {
        const double shift = static_cast<double>(s) * ls.mprime[t] * ls.L;
        double acc = 0.0;
        double weight = 1.0;
        for (std::size_t i = 0; i < s; ++i) {
            weight /= ls.K;
            acc += weight * (traj.sorted[t].z[i] + shift);
            ls.values[i][t] = acc;
        }
    }
    return ls;
}

std::vector<std::vector<double>> reconstruct_sorted(const LyapunovSeries& series, std::size_t order) {
    const std::size_t T = series.length();
    std::vector<std::vector<double>> z(T, std::vector<double>(order));
    for (std::size_t t = 0; t < T; ++t) {
        const double shift = static_cast<double>(order) * series.mprime[t] * series.L;
        double scale = 1.0;
        for (std::size_t i = 0; i < order; ++i) {
            scale *= series.K;
            const double lower = i == 0 ? 0.0 : series.values[i - 1][t];
            z[t][i] = scale * (series.values[i][t] - lower) - shift;
        }
    }
    return z;
}

MonotonicityReport check_S_monotonic(const LyapunovSeries& series, const Trajectory& traj,
                                     const ChainSource& nominal, double tol) {
    const std::size_t s = traj.order();
    const std::size_t T = traj.states.size();
    if (nominal.order() != s) throw OrderMismatch("nominal chain order differs from trajectory");
    nominal.require_defined_until(traj.end());
    const double Ks = std::pow(series.K, -static_cast<double>(s));

    MonotonicityReport rep;
    rep.lower_bounds.assign(s, std::vector<double>(T > 0 ? T - 1 : 0, 0.0));
    rep.increments.assign(s, std::vector<double>(T > 0 ? T - 1 : 0, 0.0));
    for (std::size_t t = 0; t + 1 < T; ++t) {
        const StochasticMatrix b = nominal.at(traj.start + t);
        const auto& now = traj.sorted[t];
        const auto& next = traj.sorted[t + 1];
        // partial[k]: sum over k' <= k of (flow out of the lowest k' at n into
        // the top s-k' at n+1) * (z_{k'+1}(n) - z_{k'}(n))
        std::vector<double> partial(s, 0.0);
        for (std::size_t k = 1; k < s; ++k) {
            double f = 0.0;
            for (std::size_t i = k; i < s; ++i)
                for (std::size_t j = 0; j < k; ++j) f += b(next.perm[i], now.perm[j]);
            partial[k] = partial[k - 1] + f * (now.z[k] - now.z[k - 1]);
        }
        for (std::size_t r = 1; r <= s; ++r) {
            const double bound = Ks * partial[r - 1];
            const double inc = series.values[r - 1][t + 1] - series.values[r - 1][t];
            rep.lower_bounds[r - 1][t] = bound;
            rep.increments[r - 1][t] = inc;
            if (inc < bound - tol || inc < -tol)
                rep.violations.push_back({traj.start + t, r, inc, bound});
        }
    }
    return rep;
}

const char* to_string(ClusterVerdict v) {
    switch (v) {
        case ClusterVerdict::consensus: return "consensus";
        case ClusterVerdict::multiple_consensus: return "multiple-consensus";
        case ClusterVerdict::unsettled: return "unsettled";
    }
    return "?";
}

ClusterReport detect_clusters(const Trajectory& traj, double eps, std::size_t window) {
    const std::size_t T = traj.states.size();
    if (window + 1 > T) throw HorizonExceeded("cluster window longer than the trajectory");
    const std::size_t s = traj.order();
    const std::size_t first = T - 1 - window;

    detail::UnionFind uf(s);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = i + 1; j < s; ++j) {
            bool close = true;
            for (std::size_t t = first; t < T && close; ++t)
                close = std::abs(traj.states[t][i] - traj.states[t][j]) < eps;
            if (close) uf.unite(i, j);
        }

    ClusterReport rep;
    rep.clusters = uf.blocks();
    for (std::size_t i = 0; i < s; ++i) {
        double lo = traj.states[first][i];
        double hi = lo;
        for (std::size_t t = first; t < T; ++t) {
            lo = std::min(lo, traj.states[t][i]);
            hi = std::max(hi, traj.states[t][i]);
        }
        rep.max_agent_variation = std::max(rep.max_agent_variation, hi - lo);
    }
    if (rep.clusters.size() == 1)
        rep.verdict = ClusterVerdict::consensus;
    else if (rep.max_agent_variation < eps)
        rep.verdict = ClusterVerdict::multiple_consensus;
    else
        rep.verdict = ClusterVerdict::unsettled;

    rep.Z = traj.sorted.back().z;
    if (!rep.Z.empty()) {
        rep.accumulation_points = 1;
        for (std::size_t i = 1; i < rep.Z.size(); ++i)
            if (rep.Z[i] - rep.Z[i - 1] >= eps) ++rep.accumulation_points;
    }
    return rep;
}

}  // namespace chainlab
