#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <vector>

namespace chainlab::detail {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);
        parent_[b] = a;
    }

    /// Blocks ordered by smallest member, members ascending.
    std::vector<std::vector<std::size_t>> blocks() {
        const std::size_t n = parent_.size();
        std::vector<std::vector<std::size_t>> by_root(n);
        for (std::size_t i = 0; i < n; ++i) by_root[find(i)].push_back(i);
        std::vector<std::vector<std::size_t>> out;
        for (auto& b : by_root)
            if (!b.empty()) out.push_back(std::move(b));
        std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.front() < y.front(); });
        return out;
    }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace chainlab::detail
