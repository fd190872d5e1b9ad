#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "rankbandit/exploration.hpp"
#include "rankbandit/polytope.hpp"

using namespace rankbandit;

TEST_CASE("pivot permutations") {
    CHECK(pivot_permutation(4, 0) == Permutation({0, 1, 2, 3}));
    CHECK(pivot_permutation(4, 2) == Permutation({2, 1, 0, 3}));
    CHECK(pivot_permutation(4, 3) == Permutation({3, 2, 1, 0}));
}

TEST_CASE("lazy alpha examples") {
    const auto a = lazy_alpha(std::vector<double>{0.6, 0.4});
    CHECK(a[0] == doctest::Approx(5.0 / 6.0));
    CHECK(a[1] == doctest::Approx(1.0 / 6.0));
    const auto p = pivot_marginals(a, std::vector<double>{0.6, 0.4});
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[1] == doctest::Approx(0.5));

    const auto uni = lazy_alpha(std::vector<double>(4, 0.25));
    CHECK(uni[0] == doctest::Approx(1.0));
    for (std::size_t i = 1; i < 4; ++i) CHECK(uni[i] == 0.0);
    CHECK(lazy_alpha(std::vector<double>{1.0}) == std::vector<double>{1.0});

    CHECK_THROWS_AS(lazy_alpha(std::vector<double>{0.4, 0.6}), InputError);
    CHECK_THROWS_AS(lazy_alpha(std::vector<double>{0.4, 0.4}), InputError);
}

TEST_CASE("lazy alpha gives uniform marginals, checked through selection matrices") {
    std::mt19937_64 gen(37);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = 2 + gen() % 9;
        const auto q = oracle::random_lazy(n, gen);
        const auto alpha = lazy_alpha(q);
        double s = 0.0;
        std::vector<double> marg(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            CHECK(alpha[k] >= 0.0);
            s += alpha[k];
            const auto col = oracle::matvec(selection_matrix(pivot_permutation(n, k)), q);
            for (std::size_t i = 0; i < n; ++i) marg[i] += alpha[k] * col[i];
        }
        CHECK(std::abs(s - 1.0) <= 1e-12);
        for (double m : marg) CHECK(std::abs(m - 1.0 / static_cast<double>(n)) <= 1e-12);
        const auto fast = pivot_marginals(alpha, q);
        for (std::size_t i = 0; i < n; ++i) CHECK(fast[i] == doctest::Approx(marg[i]).epsilon(1e-12));
    }
}

TEST_CASE("exploration rate schedule") {
    EpsilonGreedyConfig cfg{{0.5, 0.3, 0.2}, 1.0, std::nullopt};
    CHECK(epsilon_rate(1, 3, cfg) == 1.0);
    CHECK(epsilon_rate(1000, 3, cfg) == doctest::Approx(std::cbrt(3 * std::log(1000.0) / 1000)));
    cfg.horizon = 1000;
    CHECK(epsilon_rate(500, 3, cfg) == doctest::Approx(std::cbrt(3.0) / 10.0));
}

TEST_CASE("forced exploration plays pivots, forced exploitation is greedy") {
    const std::vector<double> q{0.5, 0.3, 0.2};
    const UtilityProfile u({0.3, 0.1, 0.2});  // ranks: item1 < item2 < item0
    EpsilonGreedyRanker r({q, 1.0, std::nullopt}, CounterRng(4));
    r.force_epsilon(1.0);
    for (std::size_t t = 1; t <= 50; ++t) {
        const Permutation ranked = u.to_ranks(r.act(t, u));
        bool is_pivot = false;
        for (std::size_t k = 0; k < 3; ++k) is_pivot = is_pivot || ranked == pivot_permutation(3, k);
        CHECK(is_pivot);
        CHECK(r.explored(t));
        // payoff of rank r is r
        const std::size_t y = user_select(u.to_items(ranked), u, 1);
        r.feed(t, y, static_cast<double>(u.rank(y)));
    }
    r.force_epsilon(0.0);
    const auto est = r.estimates();
    const Permutation a = r.act(51, u), b = r.act(52, u);
    CHECK(a == b);
    CHECK_FALSE(r.explored(51));
    std::vector<double> ranks{0, 1, 2};
    CHECK(u.to_ranks(a) == optimal_family(UtilityProfile(ranks), est).representative);
}
