#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "policies.hpp"
#include "rankbandit/environment.hpp"
#include "rankbandit/exploration.hpp"

using namespace rankbandit;

TEST_CASE("tape lookup and exhaustion") {
    PayoffSource src(make_tape(2, 2, {0.1, 0.2, 0.3, 0.4}));
    CHECK(src.draw(1, 2) == 0.4);
    CHECK(src.draw(0, 1) == 0.1);
    CHECK_THROWS_AS(src.draw(0, 3), InputError);
    CHECK_THROWS_AS(make_tape(2, 2, {0.1}), InputError);
}

TEST_CASE("gaussian payoffs: mean and tape semantics") {
    PayoffSource a(GaussianPayoffs{{0.7, -1.0}, CounterRng(5)});
    double s = 0.0;
    const int N = 100000;
    for (int k = 0; k < N; ++k) s += a.draw(0, static_cast<std::size_t>(k + 1));
    CHECK(std::abs(s / N - 0.7) < 9.0 / std::sqrt(double(N)));
    CHECK(a.draws(0) == N);

    // The k-th draw of an item does not depend on the trial index or on other items.
    PayoffSource b(GaussianPayoffs{{0.7, -1.0}, CounterRng(5)});
    PayoffSource c(GaussianPayoffs{{0.7, -1.0}, CounterRng(5)});
    std::vector<double> xb, xc;
    for (std::size_t k = 1; k <= 50; ++k) xb.push_back(b.draw(1, k));
    for (std::size_t k = 1; k <= 50; ++k) {
        c.draw(0, 1000 + k);
        xc.push_back(c.draw(1, 7 * k));
    }
    CHECK(xb == xc);
}

TEST_CASE("window sources") {
    const auto blocks = WindowSource::lower_bound_blocks(3, 6);
    std::vector<std::size_t> seen;
    for (std::size_t t = 1; t <= 6; ++t) seen.push_back(blocks.draw(t));
    CHECK(seen == std::vector<std::size_t>{1, 1, 2, 2, 3, 3});

    const auto one = WindowSource::multinomial({1.0, 0.0, 0.0}, CounterRng(1));
    for (std::size_t t = 1; t <= 100; ++t) CHECK(one.draw(t) == 1);

    const auto sched = WindowSource::schedule({2, 1}, 2);
    CHECK(sched.draw(2) == 1);
    CHECK_THROWS_AS(sched.draw(3), InputError);

    const std::vector<double> q{0.5, 0.3, 0.2};
    const auto mult = WindowSource::multinomial(q, CounterRng(9));
    const std::size_t N = 100000;
    std::vector<double> freq(3, 0.0);
    for (std::size_t t = 1; t <= N; ++t) freq[mult.draw(t) - 1] += 1.0;
    for (std::size_t w = 0; w < 3; ++w) {
        const double se = std::sqrt(q[w] * (1 - q[w]) / N);
        CHECK(std::abs(freq[w] / N - q[w]) < 3 * se);
    }
    // Same trial, same window: the draw is a function of t alone.
    CHECK(mult.draw(17) == mult.draw(17));
}

TEST_CASE("adaptive window sees only the past") {
    const auto src = WindowSource::adaptive(3, [](std::size_t, std::span<const WindowRecord> past) {
        return past.empty() ? std::size_t{3} : (past.back().selected == 0 ? std::size_t{1} : std::size_t{2});
    });
    scripted::Fixed pol(Permutation({2, 0, 1}));
    PayoffSource pay(make_tape(3, 4, std::vector<double>(12, 1.0)));
    EpisodeOptions opts;
    opts.horizon = 4;
    const auto res = run_episode(pol, UtilitySchedule(UtilityProfile({1, 2, 3})), pay, src,
                                 StochasticBenchmark{{1, 1, 1}}, opts);
    CHECK(res.trace.records()[0].window == 3);
    CHECK(res.trace.records()[1].window == 2);
}

TEST_CASE("fixed optimal permutation has zero pseudo-regret") {
    const UtilityProfile u({1, 2, 3, 4});
    const std::vector<double> mu{0.9, 0.5, 0.7, 0.1};
    const auto fam = optimal_family(u, mu);
    scripted::Fixed pol(fam.representative);
    PayoffSource pay(GaussianPayoffs{mu, CounterRng(3)});
    EpisodeOptions opts;
    opts.horizon = 500;
    const auto res = run_episode(pol, UtilitySchedule(u), pay, WindowSource::multinomial({0.4, 0.3, 0.2, 0.1}, CounterRng(4)),
                                 StochasticBenchmark{mu}, opts);
    CHECK(res.trace.cumulative() == 0.0);
    CHECK(res.delivered == 500);
}

TEST_CASE("single item: zero regret") {
    scripted::Fixed pol(Permutation({0}));
    PayoffSource pay(GaussianPayoffs{{0.3}, CounterRng(1)});
    EpisodeOptions opts;
    opts.horizon = 50;
    const auto res = run_episode(pol, UtilitySchedule(UtilityProfile({1.0})), pay, WindowSource::multinomial({1.0}, CounterRng(2)),
                                 StochasticBenchmark{{0.3}}, opts);
    CHECK(res.trace.cumulative() == 0.0);
}

TEST_CASE("episodes are deterministic under identical seeds") {
    auto run = [] {
        EpsilonGreedyRanker pol(EpsilonGreedyConfig{{0.5, 0.3, 0.2}, 1.0, 1000}, CounterRng(11));
        PayoffSource pay(GaussianPayoffs{{0.2, 0.9, 0.4}, CounterRng(12)});
        EpisodeOptions opts;
        opts.horizon = 1000;
        return run_episode(pol, UtilitySchedule(UtilityProfile({3, 1, 2})), pay,
                           WindowSource::multinomial({0.5, 0.3, 0.2}, CounterRng(13)), StochasticBenchmark{{0.2, 0.9, 0.4}}, opts);
    };
    const auto a = run(), b = run();
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t k = 0; k < a.trace.size(); ++k) {
        CHECK(a.trace.records()[k].selected == b.trace.records()[k].selected);
        CHECK(a.trace.records()[k].payoff == b.trace.records()[k].payoff);
    }
}

TEST_CASE("delayed delivery order and accounting") {
    scripted::Fixed pol(Permutation({0, 1}));
    PayoffSource pay(make_tape(2, 6, std::vector<double>(12, 0.5)));
    EpisodeOptions opts;
    opts.horizon = 6;
    opts.delay = DelayModel::fixed(2);
    const auto res = run_episode(pol, UtilitySchedule(UtilityProfile({1, 2})), pay, WindowSource::schedule({1, 1, 1, 1, 1, 1}, 2),
                                 AdversarialBenchmark{{1.0, 0.0}, {1.0, 0.0}}, opts);
    CHECK(res.delivered == 4);
    CHECK(res.undelivered == 2);
    REQUIRE(pol.fed.size() == 4);
    for (std::size_t k = 0; k < 4; ++k) CHECK(pol.fed[k].t == k + 1);

    const auto uni = DelayModel::uniform(4, CounterRng(7));
    for (std::size_t t = 1; t <= 1000; ++t) CHECK(uni.delay(t) <= 4);
}

TEST_CASE("adversarial regret accounting against a fixed comparator") {
    // Item 1 has the higher utility; with window 2 it is always chosen from any order.
    const UtilityProfile u({1, 2});
    PayoffSource pay(make_tape(2, 3, {0.0, 1.0, 0.0, 1.0, 0.0, 1.0}));
    scripted::Fixed pol(Permutation({0, 1}));
    EpisodeOptions opts;
    opts.horizon = 3;
    // q = (0.5, 0.5); playing (0,1) gives item 0 w.p. 0.5; comparator puts all mass on rank 1.
    const auto res = run_episode(pol, UtilitySchedule(u), pay, WindowSource::multinomial({0.5, 0.5}, CounterRng(1)),
                                 AdversarialBenchmark{{0.5, 0.5}, {0.0, 1.0}}, opts);
    CHECK(res.trace.cumulative() == doctest::Approx(1.5));
    CHECK(marginal_payoff(std::vector<double>{0.25, 0.75}, std::vector<double>{2.0, 4.0}, u) == doctest::Approx(3.5));
}
