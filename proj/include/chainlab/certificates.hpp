#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "chainlab/chain.hpp"
#include "chainlab/matrix.hpp"

namespace chainlab {

inline constexpr std::size_t kDefaultEnumerationLimit = 12;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Agent subset as a bitmask, bit i = agent i (0-based).
using SubsetMask = std::uint32_t;

std::vector<std::size_t> members(SubsetMask mask, std::size_t order);

/// Smallest constant (>= 1, possibly +inf) satisfying the subset-pair
/// inequality for one matrix, and the pair that forces it.
struct ConstantWithWitness {
    double value = 1.0;
    SubsetMask s1 = 0;  ///< 0 when no pair constrains beyond the floor of 1
    SubsetMask s2 = 0;
    bool is_infinite() const { return value == kInfinity; }
};

/// Balanced-asymmetry constant M of one matrix: over every pair of nonempty
/// subsets S1, S2 of equal cardinality,
///   sum_{i in S1, j notin S2} a_ij <= M sum_{i notin S1, j in S2} a_ij.
/// A pair with zero left side constrains nothing; zero right side with
/// positive left side gives +inf. Exhaustive, O(4^s); throws OrderTooLarge
/// when s > max_order.
ConstantWithWitness balanced_asymmetry_constant(const StochasticMatrix& m,
                                                std::size_t max_order = kDefaultEnumerationLimit);

/// Cut-balance constant K: the S1 == S2 == E restriction of the above over
/// nonempty proper subsets E.
ConstantWithWitness cut_balance_constant(const StochasticMatrix& m,
                                         std::size_t max_order = kDefaultEnumerationLimit);

/// min over n < N and i of a_ii(n).
double self_confidence(const ChainSource& chain, std::size_t N);

bool is_doubly_stochastic(const StochasticMatrix& m, double tol = 1e-12);

/// Per-step certificate constants over a horizon; chain-level values are
/// suprema/infima over the queried steps only.
struct CertificateReport {
    std::size_t horizon = 0;
    std::vector<ConstantWithWitness> per_step_M;
    std::vector<ConstantWithWitness> per_step_K;
    std::vector<double> min_diagonal;     ///< min_i a_ii(n)
    std::vector<double> delta_running;    ///< min over steps <= n
    std::vector<bool> doubly_stochastic;
    double chain_M = 1.0;
    double chain_K = 1.0;
    double delta = 1.0;
    std::size_t worst_M_step = 0;
    std::size_t worst_K_step = 0;

    bool balanced_asymmetric() const { return chain_M != kInfinity; }
    bool cut_balanced() const { return chain_K != kInfinity; }
};

/// Steps are evaluated in parallel and merged in step order.
CertificateReport certify(const ChainSource& chain, std::size_t N,
                          std::size_t max_order = kDefaultEnumerationLimit);

/// Per-step max-norm gaps m_n = ||A_n - B_n|| and running sums m'_n.
struct L1Distance {
    std::size_t horizon = 0;
    std::vector<double> per_step;    ///< m_0 .. m_{N-1}
    std::vector<double> cumulative;  ///< m'_0 = 0 .. m'_N
    /// Growth of the cumulative sum over the last quarter of the horizon;
    /// tends to zero for a summable gap.
    double tail_increase() const;
};

/// Throws OrderMismatch when the chains have different orders.
L1Distance l1_distance(const ChainSource& a, const ChainSource& b, std::size_t N);

}  // namespace chainlab
