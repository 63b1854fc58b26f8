#include "chainlab/chain.hpp"

#include <algorithm>
#include <cmath>

#include "chainlab/detail/union_find.hpp"
#include "chainlab/error.hpp"

namespace chainlab {

ChainSource ChainSource::from_matrices(std::vector<StochasticMatrix> matrices, std::string name) {
    if (matrices.empty()) throw HorizonExceeded("static chain needs at least one matrix");
    const std::size_t s = matrices.front().order();
    for (const auto& m : matrices)
        if (m.order() != s) throw OrderMismatch("static chain mixes matrix orders");
    ChainSource c;
    c.order_ = s;
    c.horizon_ = matrices.size();
    c.name_ = std::move(name);
    c.list_ = std::make_shared<const std::vector<StochasticMatrix>>(std::move(matrices));
    return c;
}

ChainSource ChainSource::generator(std::size_t order, Producer producer,
                                   std::optional<std::size_t> horizon, std::string name) {
    ChainSource c;
    c.order_ = order;
    c.horizon_ = horizon;
    c.name_ = std::move(name);
    c.producer_ = std::move(producer);
    return c;
}

ChainSource ChainSource::constant(const StochasticMatrix& m, std::optional<std::size_t> horizon,
                                  std::string name) {
    return generator(m.order(), [m](std::size_t) { return m; }, horizon, std::move(name));
}

StochasticMatrix ChainSource::at(std::size_t n) const {
    if (horizon_ && n >= *horizon_)
        throw HorizonExceeded("chain '" + name_ + "' is defined for n < " + std::to_string(*horizon_) +
                              ", requested " + std::to_string(n));
    if (list_) return (*list_)[n];
    StochasticMatrix m = producer_(n);
    if (m.order() != order_) throw OrderMismatch("generator produced a matrix of the wrong order");
    return m;
}

std::vector<StochasticMatrix> ChainSource::take(std::size_t count) const {
    require_defined_until(count);
    std::vector<StochasticMatrix> out;
    out.reserve(count);
    for (std::size_t n = 0; n < count; ++n) out.push_back(at(n));
    return out;
}

void ChainSource::require_defined_until(std::size_t n) const {
    if (horizon_ && n > *horizon_)
        throw HorizonExceeded("chain '" + name_ + "' has horizon " + std::to_string(*horizon_) +
                              ", requested " + std::to_string(n));
}

ChainSource ChainSource::with_declared_unbounded(std::vector<Edge> edges) const {
    ChainSource c = *this;
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    c.declared_ = std::move(edges);
    return c;
}

BackwardProduct backward_product(const ChainSource& chain, std::size_t k, std::size_t n) {
    if (k >= n) throw HorizonExceeded("backward product needs k < n");
    chain.require_defined_until(n);
    StochasticMatrix p = chain.at(k);
    for (std::size_t m = k + 1; m < n; ++m) p = chain.at(m) * p;
    return {k, n, std::move(p)};
}

std::vector<StochasticMatrix> backward_products(const ChainSource& chain, std::size_t k, std::size_t N) {
    if (k >= N) throw HorizonExceeded("backward products need k < N");
    chain.require_defined_until(N);
    std::vector<StochasticMatrix> out;
    out.reserve(N - k);
    out.push_back(chain.at(k));
    for (std::size_t m = k + 1; m < N; ++m) out.push_back(chain.at(m) * out.back());
    return out;
}

const char* to_string(VerdictKind kind) {
    switch (kind) {
        case VerdictKind::ergodic: return "ergodic";
        case VerdictKind::class_ergodic: return "class-ergodic";
        case VerdictKind::undecided_at_horizon: return "undecided-at-horizon";
    }
    return "?";
}

namespace {

Partition singletons(std::size_t s) {
    Partition p(s);
    for (std::size_t i = 0; i < s; ++i) p[i] = {i};
    return p;
}

double row_distance(const Matrix& m, std::size_t a, std::size_t b) {
    double d = 0.0;
    for (std::size_t j = 0; j < m.order(); ++j) d = std::max(d, std::abs(m(a, j) - m(b, j)));
    return d;
}

}  // namespace

ErgodicityVerdict ergodicity_probe(const ChainSource& chain, std::size_t k, std::size_t N, double span_tol) {
    if (k >= N) throw HorizonExceeded("ergodicity probe needs k < N");
    chain.require_defined_until(N);
    ErgodicityVerdict v;
    v.start = k;
    v.horizon = N;
    v.tolerance = span_tol;
    v.span_curve.reserve(N - k);
    StochasticMatrix p = chain.at(k);
    v.span_curve.push_back(row_span(p));
    for (std::size_t m = k + 1; m < N; ++m) {
        p = chain.at(m) * p;
        v.span_curve.push_back(row_span(p));
    }
    if (v.span_curve.back() <= span_tol) {
        v.kind = VerdictKind::ergodic;
        std::vector<std::size_t> all(chain.order());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        v.clusters = {all};
    } else {
        v.kind = VerdictKind::undecided_at_horizon;
        v.clusters = singletons(chain.order());
    }
    return v;
}

ErgodicityVerdict class_ergodicity_probe(const ChainSource& chain, std::size_t k, std::size_t N,
                                         double cluster_tol) {
    if (k >= N) throw HorizonExceeded("class-ergodicity probe needs k < N");
    chain.require_defined_until(N);
    const std::size_t s = chain.order();

    ErgodicityVerdict v;
    v.start = k;
    v.horizon = N;
    v.tolerance = cluster_tol;

    StochasticMatrix previous = StochasticMatrix::identity(s);
    StochasticMatrix p = chain.at(k);
    v.span_curve.push_back(row_span(p));
    for (std::size_t m = k + 1; m < N; ++m) {
        previous = p;
        p = chain.at(m) * p;
        v.span_curve.push_back(row_span(p));
    }
    const Matrix& a = p.matrix();

    detail::UnionFind uf(s);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = i + 1; j < s; ++j)
            if (row_distance(a, i, j) < cluster_tol) uf.unite(i, j);
    v.clusters = uf.blocks();

    // Single linkage can chain near-threshold rows; every pair inside a block
    // must itself be close.
    for (const auto& block : v.clusters)
        for (std::size_t x = 0; x < block.size(); ++x)
            for (std::size_t y = x + 1; y < block.size(); ++y)
                if (!(row_distance(a, block[x], block[y]) < cluster_tol))
                    throw InconsistentClustering("rows " + std::to_string(block[x] + 1) + " and " +
                                                 std::to_string(block[y] + 1) +
                                                 " are linked but not within tolerance");

    std::vector<std::size_t> label(s);
    for (std::size_t b = 0; b < v.clusters.size(); ++b)
        for (std::size_t i : v.clusters[b]) label[i] = b;

    bool block_diagonal = true;
    for (std::size_t i = 0; i < s && block_diagonal; ++i)
        for (std::size_t j = 0; j < s; ++j)
            if (label[i] != label[j] && !(a(i, j) < cluster_tol)) {
                block_diagonal = false;
                break;
            }

    bool rows_identical = true;
    for (const auto& block : v.clusters)
        for (std::size_t j = 0; j < s; ++j) {
            double lo = a(block.front(), j);
            double hi = lo;
            for (std::size_t i : block) {
                lo = std::min(lo, a(i, j));
                hi = std::max(hi, a(i, j));
            }
            if (!(hi - lo < cluster_tol)) rows_identical = false;
        }

    const bool settled = max_norm_diff(p, previous) < cluster_tol;
    v.kind = block_diagonal && rows_identical && settled ? VerdictKind::class_ergodic
                                                         : VerdictKind::undecided_at_horizon;
    return v;
}

}  // namespace chainlab
