#pragma once

#include <cstddef>
#include <vector>

#include "chainlab/chain.hpp"
#include "chainlab/flow.hpp"
#include "chainlab/matrix.hpp"

namespace chainlab {

/// Numeric stand-in for divergence of sum_n a_ij(n): flag (i, j) when the
/// truncated weight W_ij(N) >= tau_abs and W_ij(N) - W_ij(N/2) >= tau_tail.
struct DivergenceRule {
    double tau_abs = 1.0;
    double tau_tail = 1.0;
};

/// Unbounded interactions graph truncated at N.
struct InteractionGraph {
    std::size_t order = 0;
    std::size_t horizon = 0;
    Matrix weights;       ///< W_ij(N) = sum_{n<N} a_ij(n)
    Matrix half_weights;  ///< W_ij(N/2)
    std::vector<Edge> unbounded_edges;  ///< i != j, sorted
    bool declared = false;              ///< edges taken from the chain's declaration
    DivergenceRule rule;

    bool is_unbounded(std::size_t i, std::size_t j) const;
};

InteractionGraph unbounded_graph(const ChainSource& chain, std::size_t N, const DivergenceRule& rule = {});

/// Builds a graph directly from an edge list (weights left zero).
InteractionGraph graph_from_edges(std::size_t order, std::vector<Edge> edges);

struct IslandPartition {
    Partition islands;            ///< strongly connected components
    Partition weak_components;
    std::vector<bool> weak_component_strongly_connected;

    /// Every weakly connected component is strongly connected, as it must be
    /// for a balanced asymmetric chain.
    bool weak_components_strongly_connected() const;
};

IslandPartition islands(const InteractionGraph& graph);

/// Zeroes entries linking different blocks of `partition` and moves the
/// removed row mass onto the diagonal so every matrix stays stochastic.
ChainSource island_restricted_chain(const ChainSource& chain, const Partition& partition);

/// Principal submatrix sequence of an already block-diagonal chain on the
/// given agents (ascending).
ChainSource island_subchain(const ChainSource& restricted, const std::vector<std::size_t>& agents);

struct IslandFlow {
    std::vector<std::size_t> members;
    FlowClass verdict = FlowClass::undecided;
    FlowProfile profile;  ///< empty for single-agent islands
};

/// Absolute-infinite-flow profile (full variant) of each island's subchain.
std::vector<IslandFlow> per_island_aif(const ChainSource& chain, const IslandPartition& partition,
                                       std::size_t N, const FlowThresholds& thresholds = {});

}  // namespace chainlab
