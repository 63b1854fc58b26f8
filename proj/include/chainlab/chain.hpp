#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chainlab/matrix.hpp"

namespace chainlab {

inline constexpr double kDefaultSpanTol = 1e-8;
inline constexpr double kDefaultClusterTol = 1e-8;

/// Directed edge (i, j), 0-based: agent i draws on agent j.
using Edge = std::pair<std::size_t, std::size_t>;

/// Partition of {0..s-1}; blocks sorted by smallest member, members ascending.
using Partition = std::vector<std::vector<std::size_t>>;

/// Indexed producer of stochastic matrices A_0, A_1, ...
///
/// Either a finite list or a pure generator function. Copies share the
/// underlying storage; nothing is mutated after construction.
class ChainSource {
public:
    using Producer = std::function<StochasticMatrix(std::size_t)>;

    static ChainSource from_matrices(std::vector<StochasticMatrix> matrices, std::string name = "inline");
    /// `producer` must return a matrix of `order` for every index below the
    /// horizon and the same matrix on repeated calls.
    static ChainSource generator(std::size_t order, Producer producer,
                                 std::optional<std::size_t> horizon, std::string name);
    static ChainSource constant(const StochasticMatrix& m, std::optional<std::size_t> horizon = std::nullopt,
                                std::string name = "constant");

    std::size_t order() const noexcept { return order_; }
    std::optional<std::size_t> horizon() const noexcept { return horizon_; }
    const std::string& name() const noexcept { return name_; }
    bool is_static() const noexcept { return static_cast<bool>(list_); }

    /// Throws HorizonExceeded for n >= horizon.
    StochasticMatrix at(std::size_t n) const;
    /// A_0 .. A_{count-1}.
    std::vector<StochasticMatrix> take(std::size_t count) const;
    /// Throws HorizonExceeded unless indices [0, n) are all defined.
    void require_defined_until(std::size_t n) const;

    /// Analytically known unbounded interactions; when present they replace
    /// the numeric divergence rule.
    const std::optional<std::vector<Edge>>& declared_unbounded() const noexcept { return declared_; }
    ChainSource with_declared_unbounded(std::vector<Edge> edges) const;

private:
    std::size_t order_ = 0;
    std::optional<std::size_t> horizon_;
    std::string name_;
    std::shared_ptr<const std::vector<StochasticMatrix>> list_;
    Producer producer_;
    std::optional<std::vector<Edge>> declared_;
};

/// A(n, k) = A_{n-1} ... A_k.
struct BackwardProduct {
    std::size_t k = 0;
    std::size_t n = 0;
    StochasticMatrix value;
};

/// Requires 0 <= k < n <= horizon (HorizonExceeded otherwise).
BackwardProduct backward_product(const ChainSource& chain, std::size_t k, std::size_t n);

/// Every A(n, k) for n = k+1 .. N, accumulated left.
std::vector<StochasticMatrix> backward_products(const ChainSource& chain, std::size_t k, std::size_t N);

enum class VerdictKind { ergodic, class_ergodic, undecided_at_horizon };

const char* to_string(VerdictKind kind);

struct ErgodicityVerdict {
    VerdictKind kind = VerdictKind::undecided_at_horizon;
    Partition clusters;
    /// row_span(A(n, k)) for n = k+1 .. N.
    std::vector<double> span_curve;
    std::size_t start = 0;
    std::size_t horizon = 0;
    double tolerance = 0.0;
};

/// Ergodic when row_span(A(N, k)) <= span_tol; otherwise undecided. Only
/// speaks for start index k.
ErgodicityVerdict ergodicity_probe(const ChainSource& chain, std::size_t k, std::size_t N,
                                   double span_tol = kDefaultSpanTol);

/// Groups agents whose rows of A(N, k) are within cluster_tol in max norm
/// (single linkage, then audited for transitivity). Class-ergodic when the
/// clustering is block diagonal, every cluster's rows are identical within
/// tolerance and A(N, k) has settled (max-norm change from A(N-1, k) below
/// tolerance). Throws InconsistentClustering if the audit fails.
ErgodicityVerdict class_ergodicity_probe(const ChainSource& chain, std::size_t k, std::size_t N,
                                         double cluster_tol = kDefaultClusterTol);

}  // namespace chainlab
