#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "chainlab/chain.hpp"

namespace testing {

// Random row-stochastic matrix; roughly a third of the entries are zeroed so
// that ties and empty cuts show up.
inline chainlab::StochasticMatrix random_stochastic(std::mt19937_64& rng, std::size_t s, bool sparse = true) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::vector<double>> rows(s, std::vector<double>(s));
    for (auto& row : rows) {
        double sum = 0.0;
        for (auto& v : row) {
            v = (sparse && u(rng) < 0.33) ? 0.0 : u(rng);
            sum += v;
        }
        if (sum == 0.0) {
            row[0] = 1.0;
            sum = 1.0;
        }
        for (auto& v : row) v /= sum;
    }
    return chainlab::StochasticMatrix::validate(chainlab::Matrix::from_rows(rows), 1e-9);
}

inline chainlab::ChainSource random_chain(std::uint64_t seed, std::size_t s, std::size_t N, bool sparse = true) {
    std::mt19937_64 rng(seed);
    std::vector<chainlab::StochasticMatrix> ms;
    for (std::size_t n = 0; n < N; ++n) ms.push_back(random_stochastic(rng, s, sparse));
    return chainlab::ChainSource::from_matrices(std::move(ms), "random");
}

inline chainlab::StochasticMatrix stochastic(const std::vector<std::vector<double>>& rows) {
    return chainlab::StochasticMatrix::validate(chainlab::Matrix::from_rows(rows));
}

inline chainlab::ChainSource constant_chain(const std::vector<std::vector<double>>& rows) {
    return chainlab::ChainSource::constant(stochastic(rows));
}

}  // namespace testing
