#include "doctest.h"

#include <cmath>

#include "chainlab/chain.hpp"
#include "chainlab/dynamics.hpp"
#include "chainlab/error.hpp"
#include "chainlab/models.hpp"
#include "support.hpp"

using namespace chainlab;

TEST_CASE("validate accepts stochastic input and names the bad row") {
    CHECK_NOTHROW(StochasticMatrix::validate(Matrix::identity(2), 1e-12));
    CHECK_NOTHROW(testing::stochastic({{0.5, 0.5}, {1.0, 0.0}}));

    try {
        testing::stochastic({{0.5, 0.6}, {0.5, 0.5}});
        FAIL("expected RowSumViolation");
    } catch (const RowSumViolation& e) {
        CHECK(e.row == 0);
        CHECK(e.sum == doctest::Approx(1.1));
    }
    CHECK_THROWS_AS(testing::stochastic({{-0.1, 1.1}, {0.5, 0.5}}), NegativeEntry);
    CHECK_THROWS_AS(testing::stochastic({{0.5, 0.5, 0.0}, {0.5, 0.5}}), NotSquare);
    CHECK_THROWS_AS(testing::stochastic({{NAN, 1.0}, {0.5, 0.5}}), NegativeEntry);
}

TEST_CASE("row span") {
    CHECK(row_span(testing::stochastic({{0.3, 0.7}, {0.3, 0.7}})) == 0.0);
    CHECK(row_span(StochasticMatrix::identity(2)) == 1.0);
    CHECK(row_span(testing::stochastic({{0.5, 0.5}, {1.0, 0.0}})) == 0.5);
}

TEST_CASE("backward products") {
    const auto id = models::identity_chain(3);
    CHECK(backward_product(id, 0, 5).value.matrix() == Matrix::identity(3));

    const auto swap = models::fixture_chain(models::Fixture::swap);
    CHECK(backward_product(swap, 0, 2).value.matrix() == Matrix::identity(2));
    CHECK(backward_product(swap, 0, 1).value.matrix() == swap.at(0).matrix());

    SUBCASE("inv_n from k = 1 to n = 4 is A_3 A_2 A_1") {
        const auto inv = models::fixture_chain(models::Fixture::inv_n);
        const auto a2 = inv.at(2);
        CHECK(a2(0, 0) == 0.5);
        CHECK(a2(0, 1) == 0.5);
        const auto p = backward_product(inv, 1, 4).value;
        const StochasticMatrix expect = inv.at(3) * (inv.at(2) * inv.at(1));
        CHECK(p.matrix() == expect.matrix());
        CHECK(p(0, 0) == doctest::Approx(0.5));
    }

    CHECK_THROWS_AS(backward_product(ChainSource::constant(StochasticMatrix::identity(2), 3), 0, 5), HorizonExceeded);
}

TEST_CASE("backward product recursion and row sums on random chains") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const std::size_t s = 2 + seed % 7;
        const auto chain = testing::random_chain(seed, s, 100, false);
        const auto all = backward_products(chain, 0, 100);
        for (std::size_t n = 1; n < all.size(); ++n) {
            const StochasticMatrix expect = chain.at(n) * all[n - 1];
            CHECK(max_norm_diff(all[n], expect) <= 1e-12);
        }
        CHECK(max_row_sum_error(all.back().matrix()) <= static_cast<double>(s) * 1e-12);
    }
}

TEST_CASE("columns of A(n,k) are trajectories from basis vectors") {
    const auto chain = testing::random_chain(42, 5, 30);
    const std::size_t k = 3;
    const std::size_t N = 25;
    const auto p = backward_product(chain, k, N).value;
    for (std::size_t i = 0; i < 5; ++i) {
        StateVector e(5, 0.0);
        e[i] = 1.0;
        const auto t = trajectory(chain, e, k, N);
        for (std::size_t r = 0; r < 5; ++r) CHECK(t.states.back()[r] == doctest::Approx(p(r, i)).epsilon(1e-12));
    }
}

TEST_CASE("ergodicity probe") {
    SUBCASE("rank one") {
        const auto v = ergodicity_probe(testing::constant_chain({{0.5, 0.5}, {0.5, 0.5}}), 0, 3, 1e-9);
        CHECK(v.kind == VerdictKind::ergodic);
        CHECK(v.span_curve.front() <= 0.0);
    }
    SUBCASE("swap never contracts") {
        const auto v = ergodicity_probe(models::fixture_chain(models::Fixture::swap), 0, 100, 1e-9);
        CHECK(v.kind == VerdictKind::undecided_at_horizon);
        for (double x : v.span_curve) CHECK(x == 1.0);
    }
    SUBCASE("inv_n") {
        const auto v = ergodicity_probe(models::fixture_chain(models::Fixture::inv_n), 1, 200, 1e-6);
        CHECK(v.kind == VerdictKind::ergodic);
    }
    SUBCASE("span curve is non-increasing") {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const auto v = ergodicity_probe(testing::random_chain(seed, 4, 60), 0, 60, 1e-9);
            for (std::size_t n = 1; n < v.span_curve.size(); ++n)
                CHECK(v.span_curve[n] <= v.span_curve[n - 1] + 1e-15);
        }
    }
    CHECK_THROWS_AS(ergodicity_probe(models::identity_chain(2), 5, 5, 1e-9), HorizonExceeded);
}

TEST_CASE("class-ergodicity probe") {
    SUBCASE("decoupled blocks") {
        const auto v = class_ergodicity_probe(
            testing::constant_chain({{0.5, 0.5, 0.0}, {0.5, 0.5, 0.0}, {0.0, 0.0, 1.0}}), 0, 10, 1e-8);
        CHECK(v.kind == VerdictKind::class_ergodic);
        CHECK(v.clusters == Partition{{0, 1}, {2}});
    }
    SUBCASE("identity") {
        const auto v = class_ergodicity_probe(models::identity_chain(3), 0, 10, 1e-8);
        CHECK(v.kind == VerdictKind::class_ergodic);
        CHECK(v.clusters.size() == 3);
    }
    SUBCASE("Krause groups further apart than the radius") {
        const auto run = models::krause_chain({models::indicator_kernel(1.0), {0.0, 0.4, 0.8, 5.0, 5.5}}, 50);
        const auto v = class_ergodicity_probe(run.chain, 0, 50, 1e-8);
        CHECK(v.kind == VerdictKind::class_ergodic);
        CHECK(v.clusters == Partition{{0, 1, 2}, {3, 4}});
    }
    SUBCASE("swap has two clusters at every horizon but never settles") {
        const auto v = class_ergodicity_probe(models::fixture_chain(models::Fixture::swap), 0, 100, 1e-8);
        CHECK(v.kind == VerdictKind::undecided_at_horizon);
    }
    SUBCASE("near-threshold rows that chain are rejected") {
        const double e = 0.6e-8;
        const auto m = testing::stochastic({{0.5, 0.5, 0.0}, {0.5 - e, 0.5 + e, 0.0}, {0.5 - 2 * e, 0.5 + 2 * e, 0.0}});
        CHECK_THROWS_AS(class_ergodicity_probe(ChainSource::constant(m), 0, 1, 1e-8),
                        InconsistentClustering);
    }
}

TEST_CASE("chain sources") {
    const auto c = ChainSource::constant(StochasticMatrix::identity(2), 4);
    CHECK(c.horizon() == std::optional<std::size_t>(4));
    CHECK_THROWS_AS(c.at(4), HorizonExceeded);
    CHECK(c.take(3).size() == 3);
    const auto d = c.with_declared_unbounded({{1, 0}, {0, 1}, {1, 0}});
    CHECK(*d.declared_unbounded() == std::vector<Edge>{{0, 1}, {1, 0}});
}
