#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "chainlab/chain.hpp"
#include "chainlab/matrix.hpp"

namespace chainlab {

using StateVector = std::vector<double>;

/// States in ascending order with the agents holding them; ties go to the
/// lower agent index.
struct SortedStateView {
    std::vector<double> z;
    std::vector<std::size_t> perm;  ///< z[i] == x[perm[i]]
};

SortedStateView sorted_view(std::span<const double> x);

/// X(n+1) = A_n X(n). Throws OrderMismatch.
StateVector step(const StochasticMatrix& a, std::span<const double> x);

struct Trajectory {
    std::size_t start = 0;
    std::vector<StateVector> states;  ///< X(start) .. X(end)
    std::vector<SortedStateView> sorted;
    double L = 0.0;  ///< z_s(start) - z_1(start)

    std::size_t end() const { return start + states.size() - 1; }
    std::size_t order() const { return states.empty() ? 0 : states.front().size(); }
    const StateVector& at(std::size_t n) const { return states.at(n - start); }
};

/// Iterates the dynamics from X(k) = x0 up to X(N). Throws HorizonExceeded
/// unless k < N <= horizon.
Trajectory trajectory(const ChainSource& chain, StateVector x0, std::size_t k, std::size_t N);

/// S_r(n) = sum_{i<=r} K^{-i} (z_i(n) + s m'_n L) with K = 2M, r = 1..s.
///
/// Trajectory time t = n - start indexes both the series and `mprime`, so
/// mprime[0] must be 0; an empty mprime means m' == 0 (the chain is its own
/// balanced nominal chain).
struct LyapunovSeries {
    double M = 1.0;
    double K = 2.0;
    double L = 0.0;
    std::size_t start = 0;
    std::vector<double> mprime;
    /// values[r-1][t] = S_r(start + t)
    std::vector<std::vector<double>> values;

    std::size_t order() const { return values.size(); }
    std::size_t length() const { return values.empty() ? 0 : values.front().size(); }
};

/// Throws InfiniteM for M == inf, std::invalid_argument for M < 1 or a
/// decreasing / misaligned mprime.
LyapunovSeries lyapunov_series(const Trajectory& traj, double M, std::vector<double> mprime = {});

/// Recovers z_i(n) = K^i (S_i(n) - S_{i-1}(n)) - s m'_n L; reconstructed[t][i-1].
std::vector<std::vector<double>> reconstruct_sorted(const LyapunovSeries& series, std::size_t order);

struct MonotonicityViolation {
    std::size_t step = 0;  ///< absolute n of the increment S_r(n+1) - S_r(n)
    std::size_t r = 0;
    double increment = 0.0;
    double lower_bound = 0.0;
};

struct MonotonicityReport {
    /// lower_bounds[r-1][t]: K^{-s} sum_{k<r} (sum_{i>k, j<=k} b_{i_{n+1} j_n}) (z_{k+1}(n) - z_k(n))
    std::vector<std::vector<double>> lower_bounds;
    std::vector<std::vector<double>> increments;
    std::vector<MonotonicityViolation> violations;
    bool ok() const { return violations.empty(); }
};

/// Checks every increment against the lower bound above and against zero,
/// both with slack `tol`. `nominal` supplies b_ij(n) (the chain itself when
/// m' == 0).
MonotonicityReport check_S_monotonic(const LyapunovSeries& series, const Trajectory& traj,
                                     const ChainSource& nominal, double tol = 1e-10);

enum class ClusterVerdict { consensus, multiple_consensus, unsettled };

const char* to_string(ClusterVerdict v);

struct ClusterReport {
    Partition clusters;
    ClusterVerdict verdict = ClusterVerdict::unsettled;
    std::vector<double> Z;  ///< final sorted states
    std::size_t accumulation_points = 0;
    double max_agent_variation = 0.0;
};

/// Clusters agents whose states stay within eps of each other over the last
/// `window` steps. Throws HorizonExceeded when window exceeds the trajectory.
ClusterReport detect_clusters(const Trajectory& traj, double eps, std::size_t window);

}  // namespace chainlab
