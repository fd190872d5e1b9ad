// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "rankbandit/delayed.hpp"
#include "rankbandit/elimination.hpp"
#include "rankbandit/environment.hpp"
#include "rankbandit/estimation.hpp"
#include "rankbandit/exploration.hpp"
#include "rankbandit/harness.hpp"
#include "rankbandit/osmd.hpp"
#include "rankbandit/polytope.hpp"

using namespace rankbandit;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char *f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

template <class... Args>
std::string fmt(const char *f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// ---------------------------------------------------------------------------
// Independent brute-force helpers. None of these call into the library's
// optimisation or selection-matrix code.

std::vector<std::vector<std::size_t>> all_orders(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    std::vector<std::vector<std::size_t>> out;
    do {
        out.push_back(v);
    } while (std::next_permutation(v.begin(), v.end()));
    return out;
}

std::size_t prefix_best(const std::vector<std::size_t> &order, const std::vector<double> &u, std::size_t w) {
    std::size_t best = order[0];
    for (std::size_t k = 1; k < w; ++k)
        if (u[order[k]] > u[best]) best = order[k];
    return best;
}

// Indicator selection matrix over rank labels (row = rank, column = window - 1).
Matrix indicator(const std::vector<std::size_t> &ranked) {
    const std::size_t n = ranked.size();
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = static_cast<double>(i);
    Matrix P = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t w = 1; w <= n; ++w) P(static_cast<Eigen::Index>(prefix_best(ranked, u, w)), static_cast<Eigen::Index>(w - 1)) = 1.0;
    return P;
}

std::vector<double> dirichlet(std::size_t n, std::mt19937_64 &gen) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> v(n);
    double s = 0.0;
    for (auto &x : v) s += (x = e(gen));
    for (auto &x : v) x /= s;
    return v;
}

std::vector<double> lazy(std::size_t n, std::mt19937_64 &gen) {
    auto v = dirichlet(n, gen);
    std::sort(v.begin(), v.end(), std::greater<>());
    return v;
}

// Random fractional admissible matrix: a mixture of permutation indicators.
Matrix random_mixture(std::size_t n, std::size_t terms, std::mt19937_64 &gen) {
    const auto w = dirichlet(terms, gen);
    Matrix P = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < terms; ++k) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), gen);
        P += w[k] * indicator(order);
    }
    return P;
}

// ---------------------------------------------------------------------------
// Shared stochastic setup: 5-item chain, increasing utilities, decreasing
// means with equal gaps of 0.5.

constexpr std::size_t kChainN = 5;
const std::vector<double> kChainU{1, 2, 3, 4, 5};
const std::vector<double> kChainMu{2.0, 1.5, 1.0, 0.5, 0.0};
const std::vector<double> kLazyQ{0.4, 0.25, 0.15, 0.12, 0.08};
constexpr std::size_t kChainT = 100000;
constexpr double kDelta = 0.01;
constexpr std::size_t kSeeds = 20;

struct ChainRun {
    RegretTrace trace;
    bool good_event = true;
    // inversions[a][b]: trials where the benchmark picked a and the policy picked b
    std::vector<std::vector<std::size_t>> inversions;
};

std::vector<ChainRun> chain_runs;

const std::vector<ChainRun> &elimination_chain_runs() {
    if (!chain_runs.empty()) return chain_runs;
    const UtilityProfile u(kChainU);
    const auto fam = optimal_family(u, kChainMu);
    for (std::size_t s = 0; s < kSeeds; ++s) {
        EliminationRanker pol(kChainN, kDelta);
        PayoffSource pay(GaussianPayoffs{kChainMu, substream(2024, s, Stream::Payoff)});
        const auto windows = WindowSource::lower_bound_blocks(kChainN, kChainT);
        ChainRun run;
        run.inversions.assign(kChainN, std::vector<std::size_t>(kChainN, 0));
        EpisodeOptions opts;
        opts.horizon = kChainT;
        opts.on_trial_end = [&](std::size_t t, const Policy &p) {
            const auto &stats = dynamic_cast<const EliminationRanker &>(p).stats();
            for (std::size_t i = 0; i < kChainN; ++i)
                if (stats[i].count > 0 && std::abs(stats[i].mean() - kChainMu[i]) > stats[i].radius(t, kDelta, kChainN))
                    run.good_event = false;
        };
        auto res = run_episode(pol, UtilitySchedule(u), pay, windows, StochasticBenchmark{kChainMu}, opts);
        for (const auto &r : res.trace.records()) {
            const std::size_t best = user_select(fam.representative, u, r.window);
            if (kChainMu[best] > kChainMu[r.selected]) ++run.inversions[best][r.selected];
        }
        run.trace = std::move(res.trace);
        chain_runs.push_back(std::move(run));
    }
    return chain_runs;
}

double mean_regret_at(const std::vector<ChainRun> &runs, std::size_t t) {
    double s = 0.0;
    for (const auto &r : runs) s += r.trace.cumulative_at(t);
    return s / static_cast<double>(runs.size());
}

// ---------------------------------------------------------------------------

Outcome optimal_family_oracle() {
    std::mt19937_64 gen(1);
    std::normal_distribution<double> N(0.0, 1.0);
    double worst = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = 2 + static_cast<std::size_t>(rep) % 5;
        std::vector<double> u(n), mu(n);
        for (auto &x : u) x = N(gen);
        for (auto &x : mu) x = N(gen);
        if (rep % 4 == 0) mu[gen() % n] = mu[0];  // exercise tied means
        const UtilityProfile prof(u);
        const auto fam = optimal_family(prof, mu);
        const auto orders = all_orders(n);
        for (std::size_t w = 1; w <= n; ++w) {
            double brute = -1e300;
            for (const auto &o : orders) brute = std::max(brute, mu[prefix_best(o, u, w)]);
            worst = std::max(worst, std::abs(brute - mu[user_select(fam.representative, prof, w)]));
        }
    }
    return {worst <= 1e-12, fmt("200 instances, max per-window gap %.3g", worst)};
}

Outcome polytope_soundness() {
    std::size_t perms = 0, bad_perms = 0;
    for (std::size_t n = 2; n <= 6; ++n)
        for (const auto &o : all_orders(n)) {
            ++perms;
            if (!is_admissible(selection_matrix(Permutation(o)))) ++bad_perms;
        }

    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> mag(1e-6, 0.3);
    std::size_t rejected_correctly = 0, trials = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        const auto family = static_cast<Constraint>(1 + rep % 4);
        const std::size_t n = (family == Constraint::C4 ? 3 : 2) + gen() % (family == Constraint::C4 ? 4 : 5);
        Matrix P = random_mixture(n, 1 + gen() % (n * n), gen);
        const double d = mag(gen);
        auto col = [&](std::size_t lo) { return lo + gen() % (n - lo); };
        switch (family) {
        case Constraint::C1: {  // push one entry below zero, compensate in the same column
            const std::size_t w = gen() % n, i = col(w);
            std::size_t k = col(w);
            while (n - w > 1 && k == i) k = col(w);
            if (n - w == 1) {  // last column has one allowed row: exceed 1 instead
                P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(w)) = 1.0 + d;
                break;
            }
            const double shift = P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(w)) + d;
            P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(w)) -= shift;
            P(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(w)) += shift;
            break;
        }
        case Constraint::C2: {  // raise an entry that has room, breaking the column sum only
            const std::size_t w = gen() % n;
            std::size_t i = col(w);
            for (std::size_t r = w; r < n; ++r)
                if (P(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(w)) <= 1.0 - d) i = r;
            if (P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(w)) > 1.0 - d)
                P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(w)) -= d;
            else
                P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(w)) += d;
            break;
        }
        case Constraint::C3: {  // move mass from an allowed row to a forbidden one
            const std::size_t w = 1 + gen() % (n - 1), i = gen() % w;
            std::size_t k = w;
            for (std::size_t r = w; r < n; ++r)
                if (P(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(w)) > P(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(w))) k = r;
            const double shift = std::min(d, P(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(w)));
            P(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(w)) -= shift;
            P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(w)) += shift;
            if (shift < 1e-6) continue;
            break;
        }
        case Constraint::C4: {  // independent columns supported on allowed rows, kept only if tails decrease
            for (;;) {
                P.setZero();
                for (std::size_t w = 0; w < n; ++w) {
                    const auto v = dirichlet(n - w, gen);
                    for (std::size_t r = w; r < n; ++r) P(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(w)) = v[r - w];
                }
                bool decreasing = false;
                for (std::size_t m = 1; m < n && !decreasing; ++m)
                    for (std::size_t w = 0; w + 1 < n && !decreasing; ++w)
                        decreasing = P.block(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(n - m), 1).sum() >
                                     P.block(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(w + 1), static_cast<Eigen::Index>(n - m), 1).sum() + 1e-6;
                if (decreasing) break;
            }
            break;
        }
        }
        ++trials;
        const auto rep_ = check_admissible(P);
        if (!rep_.admissible && rep_.first() && rep_.first()->constraint == family) ++rejected_correctly;
    }
    return {bad_perms == 0 && rejected_correctly == trials && trials >= 990,
            fmt("%zu permutations (%zu rejected); %zu/%zu perturbed matrices rejected with the right constraint", perms,
                bad_perms, rejected_correctly, trials)};
}

Outcome decomposition_round_trip() {
    std::mt19937_64 gen(3);
    std::size_t ok = 0;
    double worst_err = 0.0;
    std::size_t worst_support_excess = 0;
    bool residuals_ok = true;
    for (int rep = 0; rep < 500; ++rep) {
        const std::size_t n = 2 + static_cast<std::size_t>(rep) % 7;
        const Matrix P = random_mixture(n, 1 + gen() % (n * n), gen);
        bool res_ok = true;
        const auto dec = rfsm_decompose(P, [&](const Matrix &R) { res_ok = res_ok && is_admissible(R, 1e-9); });
        const double err = (dec.recombine(n) - P).cwiseAbs().maxCoeff();
        const std::size_t z = count_nonzero(P);
        const bool support_ok = dec.support() + n <= z + 1;
        if (!support_ok) worst_support_excess = std::max(worst_support_excess, dec.support() + n - z - 1);
        worst_err = std::max(worst_err, err);
        residuals_ok = residuals_ok && res_ok;
        if (err <= 1e-9 && support_ok && res_ok) ++ok;
    }
    return {ok == 500, fmt("%zu/500 ok, max entry error %.3g, support excess %zu, residuals admissible: %s", ok, worst_err,
                           worst_support_excess, residuals_ok ? "yes" : "no")};
}

Outcome lazy_uniform_exploration() {
    std::mt19937_64 gen(4);
    double worst_p = 0.0, worst_sum = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 2 + static_cast<std::size_t>(rep) % 9;
        const auto q = lazy(n, gen);
        const auto alpha = lazy_alpha(q);
        // Marginals through explicit pivot orders and prefix maxima.
        std::vector<double> p(n, 0.0), u(n);
        for (std::size_t i = 0; i < n; ++i) u[i] = static_cast<double>(i);
        for (std::size_t k = 0; k < n; ++k) {
            std::vector<std::size_t> order;
            for (std::size_t j = k + 1; j-- > 0;) order.push_back(j);
            for (std::size_t j = k + 1; j < n; ++j) order.push_back(j);
            for (std::size_t w = 1; w <= n; ++w) p[prefix_best(order, u, w)] += alpha[k] * q[w - 1];
        }
        for (double v : p) worst_p = std::max(worst_p, std::abs(v - 1.0 / static_cast<double>(n)));
        worst_sum = std::max(worst_sum, std::abs(std::accumulate(alpha.begin(), alpha.end(), 0.0) - 1.0));
    }
    return {worst_p <= 1e-12 && worst_sum <= 1e-12,
            fmt("max |p_i - 1/n| = %.3g, max |sum alpha - 1| = %.3g", worst_p, worst_sum)};
}

Outcome stochastic_regret_scaling() {
    const auto &runs = elimination_chain_runs();
    const double rT = mean_regret_at(runs, kChainT), r10 = mean_regret_at(runs, kChainT / 10);
    const double bound = regret_upper_bound(Instance(UtilityProfile(kChainU), kChainMu), kChainT, kDelta);
    const double ratio = rT / r10;
    return {ratio < 3.0 && rT < 5.0 * bound,
            fmt("mean regret(T) = %.1f, regret(T)/regret(T/10) = %.3f (< 3), bound = %.1f (5x = %.1f)", rT, ratio, bound,
                5.0 * bound)};
}

Outcome inversion_budget_check() {
    const auto &runs = elimination_chain_runs();
    std::size_t good = 0, violations = 0, worst_a = 0, worst_b = 0;
    double worst_frac = 0.0;
    for (const auto &r : runs) {
        if (!r.good_event) continue;
        ++good;
        for (std::size_t a = 0; a < kChainN; ++a)
            for (std::size_t b = 0; b < kChainN; ++b) {
                if (!(kChainMu[a] > kChainMu[b])) continue;
                const std::size_t budget = inversion_budget(kChainMu[a] - kChainMu[b], kChainT, kDelta, kChainN);
                const double frac = static_cast<double>(r.inversions[a][b]) / static_cast<double>(budget);
                if (frac > worst_frac) worst_frac = frac, worst_a = a, worst_b = b;
                if (r.inversions[a][b] > budget) ++violations;
            }
    }
    // Diagnostic only: strict separation of two intervals needs both radii
    // below gap/4, i.e. four times the budget above.
    return {good > 0 && violations == 0,
            fmt("%zu/%zu seeds kept every interval valid; %zu pair violations; worst pair (%zu,%zu) at %.3f x budget "
                "(%.3f x the 16 log/gap^2 separation count)",
                good, runs.size(), violations, worst_a, worst_b, worst_frac, worst_frac / 4.0)};
}

Outcome adversarial_regret() {
    ExperimentConfig cfg;
    cfg.n = 5;
    cfg.utilities = {kChainU};
    cfg.payoff.kind = PayoffSpec::Kind::Bernoulli;
    cfg.payoff.probs = {0.3, 0.7, 0.5, 0.6, 0.4};
    cfg.window.kind = WindowSpec::Kind::Multinomial;
    cfg.window.q = kLazyQ;
    cfg.seed = 77;
    cfg.horizon = 100000;
    cfg.replications = kSeeds;
    cfg.policy.name = "osmd";
    cfg.checkpoints = {1000, 10000, 100000};
    const auto res = run_experiment(cfg);
    const double mean = res.report.checkpoints.back().mean;
    const double limit = 3.0 * 2.0 * std::sqrt(2.0 * 100000.0 * 5.0);
    return {mean <= limit, fmt("mean regret vs best fixed p in hindsight = %.1f +/- %.1f (limit %.0f)", mean,
                               res.report.checkpoints.back().se, limit)};
}

Outcome unbiased_loss() {
    // Frozen interior p, realised end to end: witness matrix, decomposition,
    // sampled permutation, sampled window, greedy selection.
    const std::vector<double> q = kLazyQ;
    const std::vector<double> p{0.1, 0.15, 0.2, 0.25, 0.3};
    const std::vector<double> r{0.9, 0.2, 0.6, 0.4, 0.75};
    const double offset = 1.0;
    const Matrix P = feasible_matrix(p, q);
    const Decomposition dec = rfsm_decompose(P);
    CounterRng rng(8), wrng(9);
    std::vector<double> u(5);
    std::iota(u.begin(), u.end(), 0.0);
    const UtilityProfile prof(u);
    const std::size_t N = 1000000;
    std::vector<double> sum(5, 0.0), sq(5, 0.0);
    for (std::size_t k = 0; k < N; ++k) {
        const Permutation &perm = dec.sample(rng);
        const std::size_t w = 1 + wrng.categorical(q);
        const std::size_t i = user_select(perm, prof, w);
        const LossEstimate e = make_loss_estimate(i, r[i], p[i], offset);
        sum[e.index] += e.value;
        sq[e.index] += e.value * e.value;
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
        const double mean = sum[i] / N;
        const double var = sq[i] / N - mean * mean;
        const double se = std::sqrt(var / N);
        worst = std::max(worst, std::abs(mean - (offset - r[i])) / se);
    }
    return {worst <= 3.0, fmt("max |mean - loss| / SE over coordinates = %.2f", worst)};
}

Outcome epsilon_greedy_slope() {
    const std::vector<std::size_t> cps{1000, 2000, 5000, 10000, 20000, 50000, 100000};
    std::vector<double> mean(cps.size(), 0.0);
    const UtilityProfile u(kChainU);
    for (std::size_t s = 0; s < kSeeds; ++s) {
        EpsilonGreedyRanker pol(EpsilonGreedyConfig{kLazyQ, 1.0, std::nullopt}, substream(99, s, Stream::Policy));
        PayoffSource pay(GaussianPayoffs{kChainMu, substream(99, s, Stream::Payoff)});
        EpisodeOptions opts;
        opts.horizon = kChainT;
        const auto res = run_episode(pol, UtilitySchedule(u), pay, WindowSource::multinomial(kLazyQ, substream(99, s, Stream::Window)),
                                     StochasticBenchmark{kChainMu}, opts);
        for (std::size_t c = 0; c < cps.size(); ++c) mean[c] += res.trace.cumulative_at(cps[c]) / kSeeds;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(cps.size());
    for (std::size_t c = 0; c < cps.size(); ++c) {
        const double x = std::log(static_cast<double>(cps[c])), y = std::log(mean[c]);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return {slope >= 0.5 && slope <= 0.8,
            fmt("log-log slope %.3f over T in [1e3, 1e5]; mean regret %.1f at 1e3, %.1f at 1e5", slope, mean.front(), mean.back())};
}

Outcome delayed_feedback() {
    const std::size_t tau = 10;
    const UtilityProfile u(kChainU);
    const double dmax = kChainMu.front() - kChainMu.back();
    double base_sum = 0.0, wrapped_sum = 0.0;
    std::size_t worse_seeds = 0;
    for (std::size_t s = 0; s < kSeeds; ++s) {
        auto run = [&](Policy &pol, DelayModel delay) {
            PayoffSource pay(GaussianPayoffs{kChainMu, substream(555, s, Stream::Payoff)});
            EpisodeOptions opts;
            opts.horizon = kChainT;
            opts.delay = delay;
            return run_episode(pol, UtilitySchedule(u), pay, WindowSource::multinomial(kLazyQ, substream(555, s, Stream::Window)),
                               StochasticBenchmark{kChainMu}, opts)
                .trace.cumulative();
        };
        EliminationRanker base(kChainN, kDelta);
        QueuedDelayPolicy wrapped(std::make_unique<EliminationRanker>(kChainN, kDelta));
        const double b = run(base, DelayModel::none()), w = run(wrapped, DelayModel::fixed(tau));
        base_sum += b;
        wrapped_sum += w;
        if (w > b + 2.0 * kChainN * tau * dmax) ++worse_seeds;
    }
    const double slack = 2.0 * kChainN * tau * dmax;
    const double bm = base_sum / kSeeds, wm = wrapped_sum / kSeeds;

    std::size_t max_pool = 0;
    for (std::size_t s = 0; s < 5; ++s) {
        PooledDelayPolicy pool([s, counter = std::make_shared<std::size_t>(0)] {
            return std::make_unique<BloRanker>(BloConfig{kLazyQ, 10000 / 11, std::nullopt, 1.0, WitnessMethod::LinearProgram},
                                               substream(556, s, Stream::Policy).split((*counter)++));
        });
        PayoffSource pay(bernoulli_tape(std::vector<double>{0.3, 0.7, 0.5, 0.6, 0.4}, 10000, substream(556, s, Stream::Tape)));
        EpisodeOptions opts;
        opts.horizon = 10000;
        opts.delay = s % 2 ? DelayModel::fixed(tau) : DelayModel::uniform(tau, substream(556, s, Stream::Delay));
        run_episode(pool, UtilitySchedule(u), pay, WindowSource::multinomial(kLazyQ, substream(556, s, Stream::Window)),
                    AdversarialBenchmark{kLazyQ, {0, 0, 0, 0, 1}}, opts);
        max_pool = std::max({max_pool, pool.pool_size(), pool.max_waiting()});
    }
    return {wm <= bm + slack && max_pool <= tau + 1,
            fmt("queued elimination %.1f vs base %.1f + %.0f (seeds over: %zu/%zu); largest instance pool %zu (limit %zu)", wm,
                bm, slack, worse_seeds, kSeeds, max_pool, tau + 1)};
}

Outcome utility_estimation() {
    std::mt19937_64 gen(11);
    std::size_t sorted_ok = 0;
    const std::size_t cap = sorting_trial_cap(5, kChainT);
    std::size_t max_trials = 0;
    for (std::size_t r = 0; r < 100; ++r) {
        auto u = dirichlet(5, gen);
        const auto q = lazy(5, gen);
        GreedyUserEnvironment env(UtilityProfile(u), q, substream(12, r, Stream::User));
        try {
            const auto res = estimate_order_sorting(env, cap);
            std::vector<std::size_t> truth(5);
            std::iota(truth.begin(), truth.end(), std::size_t{0});
            std::sort(truth.begin(), truth.end(), [&](std::size_t a, std::size_t b) { return u[a] < u[b]; });
            if (res.ascending == truth) ++sorted_ok;
            max_trials = std::max(max_trials, res.trials);
        } catch (const EstimationBudgetError &) {
        }
    }

    std::size_t separated = 0, social_max = 0;
    const double gap = 0.2;
    const std::size_t social_cap = social_trial_cap(3, kChainT, gap);
    for (std::size_t r = 0; r < 100; ++r) {
        std::vector<double> u{0.0, gap, 2 * gap};
        std::shuffle(u.begin(), u.end(), gen);
        SocialConfig cfg;
        cfg.q = lazy(3, gen);
        cfg.max_trials = social_cap;
        cfg.perception = r % 2 ? PerceptionMode::AdversarialEndpoint : PerceptionMode::Uniform;
        const auto res = estimate_social_learning(UtilityProfile(u), cfg, substream(13, r, Stream::User));
        if (res.separated) ++separated;
        social_max = std::max(social_max, res.trials);
    }
    return {sorted_ok == 100 && separated >= 95,
            fmt("sorting exact in %zu/100 (cap %zu, max used %zu); social separation in %zu/100 (cap %zu, max used %zu)",
                sorted_ok, cap, max_trials, separated, social_cap, social_max)};
}

struct Criterion {
    int id;
    const char *name;
    double time_limit;  // seconds; 0 means no explicit limit
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "optimal family matches brute force per window", 60, optimal_family_oracle},
        {2, "polytope soundness and constraint naming", 60, polytope_soundness},
        {3, "decomposition round trip", 120, decomposition_round_trip},
        {4, "lazy uniform exploration weights", 0, lazy_uniform_exploration},
        {5, "stochastic regret scaling on the chain instance", 300, stochastic_regret_scaling},
        {6, "inversion counts within budget", 0, inversion_budget_check},
        {7, "adversarial regret against best fixed marginal", 600, adversarial_regret},
        {8, "unbiased loss estimates", 0, unbiased_loss},
        {9, "epsilon-greedy regret growth", 0, epsilon_greedy_slope},
        {10, "delayed feedback wrappers", 0, delayed_feedback},
        {11, "utility estimation", 0, utility_estimation},
    };
    int failed = 0;
    for (const auto &c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool pass = o.pass;
        std::string timing = fmt("%.1fs", secs);
        if (c.time_limit > 0) {
            timing += fmt(" (limit %.0fs)", c.time_limit);
            if (secs >= c.time_limit) pass = false;
        }
        std::printf("[%s] criterion %2d: %s: %s [%s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), timing.c_str());
        std::fflush(stdout);
        if (!pass) ++failed;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
