#include "chainlab/graph.hpp"

#include <algorithm>
#include <functional>

#include "chainlab/detail/union_find.hpp"
#include "chainlab/error.hpp"

namespace chainlab {

bool InteractionGraph::is_unbounded(std::size_t i, std::size_t j) const {
    return std::binary_search(unbounded_edges.begin(), unbounded_edges.end(), Edge{i, j});
}

InteractionGraph unbounded_graph(const ChainSource& chain, std::size_t N, const DivergenceRule& rule) {
    if (N == 0) throw HorizonExceeded("unbounded graph needs N >= 1");
    chain.require_defined_until(N);
    const std::size_t s = chain.order();
    InteractionGraph g;
    g.order = s;
    g.horizon = N;
    g.rule = rule;
    g.weights = Matrix(s);
    g.half_weights = Matrix(s);
    const std::size_t half = N / 2;
    for (std::size_t n = 0; n < N; ++n) {
        if (n == half) g.half_weights = g.weights;
        const StochasticMatrix a = chain.at(n);
        for (std::size_t i = 0; i < s; ++i)
            for (std::size_t j = 0; j < s; ++j) g.weights(i, j) += a(i, j);
    }
    if (half == N) g.half_weights = g.weights;

    if (chain.declared_unbounded()) {
        g.declared = true;
        for (const Edge& e : *chain.declared_unbounded())
            if (e.first != e.second) g.unbounded_edges.push_back(e);
    } else {
        for (std::size_t i = 0; i < s; ++i)
            for (std::size_t j = 0; j < s; ++j) {
                if (i == j) continue;
                const double w = g.weights(i, j);
                if (w >= rule.tau_abs && w - g.half_weights(i, j) >= rule.tau_tail)
                    g.unbounded_edges.emplace_back(i, j);
            }
    }
    std::sort(g.unbounded_edges.begin(), g.unbounded_edges.end());
    return g;
}

InteractionGraph graph_from_edges(std::size_t order, std::vector<Edge> edges) {
    InteractionGraph g;
    g.order = order;
    g.weights = Matrix(order);
    g.half_weights = Matrix(order);
    g.declared = true;
    for (const Edge& e : edges)
        if (e.first != e.second) g.unbounded_edges.push_back(e);
    std::sort(g.unbounded_edges.begin(), g.unbounded_edges.end());
    g.unbounded_edges.erase(std::unique(g.unbounded_edges.begin(), g.unbounded_edges.end()),
                            g.unbounded_edges.end());
    return g;
}

bool IslandPartition::weak_components_strongly_connected() const {
    return std::all_of(weak_component_strongly_connected.begin(), weak_component_strongly_connected.end(),
                       [](bool b) { return b; });
}

namespace {

// Tarjan's algorithm; s is small so recursion depth is not a concern.
Partition strongly_connected_components(std::size_t s, const std::vector<std::vector<std::size_t>>& adj) {
    std::vector<int> index(s, -1);
    std::vector<int> low(s, 0);
    std::vector<bool> on_stack(s, false);
    std::vector<std::size_t> stack;
    Partition comps;
    int counter = 0;

    std::function<void(std::size_t)> visit = [&](std::size_t v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        for (std::size_t w : adj[v]) {
            if (index[w] < 0) {
                visit(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            std::vector<std::size_t> comp;
            std::size_t w = 0;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                comp.push_back(w);
            } while (w != v);
            std::sort(comp.begin(), comp.end());
            comps.push_back(std::move(comp));
        }
    };
    for (std::size_t v = 0; v < s; ++v)
        if (index[v] < 0) visit(v);
    std::sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return comps;
}

}  // namespace

IslandPartition islands(const InteractionGraph& graph) {
    const std::size_t s = graph.order;
    std::vector<std::vector<std::size_t>> adj(s);
    detail::UnionFind uf(s);
    for (const auto& [i, j] : graph.unbounded_edges) {
        adj[i].push_back(j);
        uf.unite(i, j);
    }
    IslandPartition p;
    p.islands = strongly_connected_components(s, adj);
    p.weak_components = uf.blocks();
    for (const auto& weak : p.weak_components) {
        const bool single_island = std::any_of(p.islands.begin(), p.islands.end(),
                                               [&](const auto& isl) { return isl == weak; });
        p.weak_component_strongly_connected.push_back(single_island);
    }
    return p;
}

namespace {

std::vector<std::size_t> labels_of(const Partition& partition, std::size_t s) {
    std::vector<std::size_t> label(s, s);
    for (std::size_t b = 0; b < partition.size(); ++b)
        for (std::size_t i : partition[b]) {
            if (i >= s) throw OrderMismatch("partition names agent " + std::to_string(i + 1));
            label[i] = b;
        }
    for (std::size_t i = 0; i < s; ++i)
        if (label[i] == s) throw OrderMismatch("partition does not cover agent " + std::to_string(i + 1));
    return label;
}

}  // namespace

ChainSource island_restricted_chain(const ChainSource& chain, const Partition& partition) {
    const std::size_t s = chain.order();
    const auto label = labels_of(partition, s);
    auto producer = [chain, label](std::size_t n) {
        const StochasticMatrix a = chain.at(n);
        const std::size_t s = a.order();
        Matrix b = a.matrix();
        bool touched = false;
        for (std::size_t i = 0; i < s; ++i) {
            double removed = 0.0;
            for (std::size_t j = 0; j < s; ++j)
                if (label[i] != label[j] && b(i, j) != 0.0) {
                    touched = true;
                    removed += b(i, j);
                    b(i, j) = 0.0;
                }
            b(i, i) += removed;
        }
        return touched ? StochasticMatrix::validate(b, 1e-9) : a;
    };
    ChainSource out = ChainSource::generator(s, producer, chain.horizon(), chain.name() + "/islands");
    if (chain.declared_unbounded()) {
        std::vector<Edge> kept;
        for (const Edge& e : *chain.declared_unbounded())
            if (label[e.first] == label[e.second]) kept.push_back(e);
        out = out.with_declared_unbounded(std::move(kept));
    }
    return out;
}

ChainSource island_subchain(const ChainSource& restricted, const std::vector<std::size_t>& agents) {
    auto producer = [restricted, agents](std::size_t n) {
        const StochasticMatrix a = restricted.at(n);
        Matrix sub(agents.size());
        for (std::size_t x = 0; x < agents.size(); ++x)
            for (std::size_t y = 0; y < agents.size(); ++y) sub(x, y) = a(agents[x], agents[y]);
        return StochasticMatrix::validate(sub, 1e-9);
    };
    ChainSource out = ChainSource::generator(agents.size(), producer, restricted.horizon(),
                                             restricted.name() + "/sub");
    if (restricted.declared_unbounded()) {
        std::vector<Edge> kept;
        for (const auto& [i, j] : *restricted.declared_unbounded()) {
            const auto fi = std::find(agents.begin(), agents.end(), i);
            const auto fj = std::find(agents.begin(), agents.end(), j);
            if (fi != agents.end() && fj != agents.end())
                kept.emplace_back(static_cast<std::size_t>(fi - agents.begin()),
                                  static_cast<std::size_t>(fj - agents.begin()));
        }
        out = out.with_declared_unbounded(std::move(kept));
    }
    return out;
}

std::vector<IslandFlow> per_island_aif(const ChainSource& chain, const IslandPartition& partition,
                                       std::size_t N, const FlowThresholds& thresholds) {
    const ChainSource restricted = island_restricted_chain(chain, partition.islands);
    std::vector<IslandFlow> out;
    for (const auto& island : partition.islands) {
        IslandFlow f;
        f.members = island;
        if (island.size() == 1) {
            f.verdict = FlowClass::trivially_satisfied;
        } else {
            f.profile = aif_profile(island_subchain(restricted, island), N, FlowVariant::full, thresholds);
            f.verdict = f.profile.verdict;
        }
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace chainlab
