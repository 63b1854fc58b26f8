#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "chainlab/certificates.hpp"
#include "chainlab/dynamics.hpp"
#include "chainlab/error.hpp"
#include "chainlab/models.hpp"
#include "support.hpp"

using namespace chainlab;

TEST_CASE("step") {
    const StateVector x{0.25, -1.0, 3.0};
    CHECK(step(StochasticMatrix::identity(3), x) == x);
    CHECK(step(testing::stochastic({{0.5, 0.5}, {0.5, 0.5}}), StateVector{0.0, 1.0}) == StateVector{0.5, 0.5});
    CHECK(step(testing::stochastic({{0.0, 1.0}, {1.0, 0.0}}), StateVector{0.0, 1.0}) == StateVector{1.0, 0.0});
    CHECK_THROWS_AS(step(StochasticMatrix::identity(2), x), OrderMismatch);
}

TEST_CASE("sorted view breaks ties by agent index") {
    const auto v = sorted_view(StateVector{1.0, 0.0, 1.0, 0.0});
    CHECK(v.perm == std::vector<std::size_t>{1, 3, 0, 2});
    CHECK(v.z == StateVector{0.0, 0.0, 1.0, 1.0});
}

TEST_CASE("trajectories") {
    SUBCASE("identity is constant") {
        const auto t = trajectory(models::identity_chain(3), {1.0, 2.0, 3.0}, 0, 10);
        for (const auto& x : t.states) CHECK(x == StateVector{1.0, 2.0, 3.0});
    }
    SUBCASE("swap oscillates with constant sorted view") {
        const auto t = trajectory(models::fixture_chain(models::Fixture::swap), {0.0, 1.0}, 0, 20);
        CHECK(t.states[1] == StateVector{1.0, 0.0});
        CHECK(t.states[2] == StateVector{0.0, 1.0});
        for (const auto& s : t.sorted) CHECK(s.z == StateVector{0.0, 1.0});
    }
    SUBCASE("inv_n reaches consensus") {
        const auto t = trajectory(models::fixture_chain(models::Fixture::inv_n), {0.0, 1.0}, 1, 500);
        CHECK(t.start == 1);
        CHECK(t.end() == 500);
        CHECK(std::abs(t.states.back()[0] - t.states.back()[1]) < 1e-6);
    }
    SUBCASE("convex hull shrinks") {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const auto t = trajectory(testing::random_chain(seed, 5, 40), {3.0, -1.0, 0.5, 2.0, 7.0}, 0, 40);
            for (std::size_t n = 1; n < t.states.size(); ++n) {
                CHECK(t.sorted[n].z.front() >= t.sorted[n - 1].z.front() - 1e-15);
                CHECK(t.sorted[n].z.back() <= t.sorted[n - 1].z.back() + 1e-15);
            }
        }
    }
    CHECK_THROWS_AS(trajectory(models::identity_chain(2), {0.0}, 0, 3), OrderMismatch);
}

TEST_CASE("Lyapunov series") {
    SUBCASE("consensus from the start is constant") {
        const auto t = trajectory(testing::random_chain(1, 3, 10), {2.0, 2.0, 2.0}, 0, 10);
        const auto ls = lyapunov_series(t, 1.0, {});
        const double expect = 2.0 * (0.5 + 0.25 + 0.125);
        for (double v : ls.values[2]) CHECK(v == doctest::Approx(expect));
    }
    SUBCASE("doubly stochastic pair") {
        const auto chain = models::random_doubly_stochastic_chain(4, 2, 30, 2);
        const auto t = trajectory(chain, {0.0, 1.0}, 0, 30);
        const auto ls = lyapunov_series(t, 1.0, {});
        for (std::size_t n = 0; n < ls.length(); ++n)
            CHECK(ls.values[1][n] == doctest::Approx(t.sorted[n].z[0] / 2 + t.sorted[n].z[1] / 4));
        CHECK(check_S_monotonic(ls, t, chain).ok());
    }
    SUBCASE("inv_n against itself") {
        const auto chain = models::fixture_chain(models::Fixture::inv_n);
        const auto t = trajectory(chain, {0.0, 1.0}, 1, 200);
        const auto rep = check_S_monotonic(lyapunov_series(t, 1.0, {}), t, chain);
        CHECK(rep.ok());
    }
    SUBCASE("reconstruction of sorted states") {
        const auto chain = testing::random_chain(8, 4, 50);
        const auto t = trajectory(chain, {0.3, -2.0, 1.0, 0.0}, 0, 50);
        std::vector<double> mprime(t.states.size());
        for (std::size_t n = 0; n < mprime.size(); ++n) mprime[n] = 0.01 * static_cast<double>(n);
        const auto ls = lyapunov_series(t, 1.5, mprime);
        const auto z = reconstruct_sorted(ls, 4);
        for (std::size_t n = 0; n < z.size(); ++n)
            for (std::size_t i = 0; i < 4; ++i) CHECK(z[n][i] == doctest::Approx(t.sorted[n].z[i]).epsilon(1e-9));
    }
    SUBCASE("non-balanced chain with a forced M violates the bound") {
        const auto chain = models::fixture_chain(models::Fixture::non_balanced);
        const auto t = trajectory(chain, {0.0, 1.0}, 0, 20);
        CHECK_FALSE(check_S_monotonic(lyapunov_series(t, 1.0, {}), t, chain).ok());
    }
    SUBCASE("identity has zero increments") {
        const auto chain = models::identity_chain(3);
        const auto t = trajectory(chain, {0.0, 1.0, 0.5}, 0, 10);
        const auto rep = check_S_monotonic(lyapunov_series(t, 1.0, {}), t, chain);
        CHECK(rep.ok());
        for (const auto& row : rep.increments)
            for (double v : row) CHECK(v == 0.0);
    }
    SUBCASE("random doubly stochastic chains") {
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            const std::size_t s = 2 + seed % 4;
            const auto chain = models::random_doubly_stochastic_chain(seed, s, 50, 2 + seed % 3);
            StateVector x0(s);
            for (std::size_t i = 0; i < s; ++i) x0[i] = std::sin(static_cast<double>(seed * 7 + i));
            const auto t = trajectory(chain, x0, 0, 50);
            const auto rep = check_S_monotonic(lyapunov_series(t, certify(chain, 50).chain_M, {}), t, chain);
            CHECK(rep.violations.empty());
        }
    }
    const auto t = trajectory(models::identity_chain(2), {0.0, 1.0}, 0, 3);
    CHECK_THROWS_AS(lyapunov_series(t, kInfinity, {}), InfiniteM);
    CHECK_THROWS_AS(lyapunov_series(t, 0.5, {}), std::invalid_argument);
}

TEST_CASE("cluster detection") {
    SUBCASE("Krause two groups") {
        const auto run = models::krause_chain({models::indicator_kernel(1.0), {0.0, 0.5, 0.9, 4.0, 4.6}}, 100);
        const auto rep = detect_clusters(run.trajectory, 1e-8, 10);
        CHECK(rep.clusters.size() == 2);
        CHECK(rep.verdict == ClusterVerdict::multiple_consensus);
        CHECK(rep.accumulation_points == 2);
    }
    SUBCASE("swap is unsettled") {
        const auto t = trajectory(models::fixture_chain(models::Fixture::swap), {0.0, 1.0}, 0, 100);
        CHECK(detect_clusters(t, 1e-8, 10).verdict == ClusterVerdict::unsettled);
    }
    SUBCASE("inv_n consensus") {
        const auto t = trajectory(models::fixture_chain(models::Fixture::inv_n), {0.0, 1.0}, 0, 2000);
        const auto rep = detect_clusters(t, 1e-3, 10);
        CHECK(rep.verdict == ClusterVerdict::consensus);
        CHECK(rep.Z.front() == doctest::Approx(rep.Z.back()).epsilon(1e-3));
    }
    CHECK_THROWS_AS(detect_clusters(trajectory(models::identity_chain(2), {0.0, 1.0}, 0, 3), 1e-8, 5), HorizonExceeded);
}
