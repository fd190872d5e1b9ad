#include "rankbandit/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace rankbandit {

GreedyUserEnvironment::GreedyUserEnvironment(UtilityProfile truth, std::vector<double> q, CounterRng rng)
    : truth_(std::move(truth)), q_(std::move(q)), rng_(rng) {
    validate_window_model(Multinomial{q_}, truth_.size());
}

std::size_t GreedyUserEnvironment::show(const Permutation &perm) {
    ++trials_;
    const std::size_t w = 1 + rng_.categorical(q_);
    return user_select(perm, truth_, w);
}

UtilityProfile SortingResult::profile() const {
    std::vector<double> u(ascending.size());
    for (std::size_t r = 0; r < ascending.size(); ++r) u[ascending[r]] = static_cast<double>(r + 1);
    return UtilityProfile(u);
}

std::size_t insertion_comparison_bound(std::size_t n) {
    std::size_t total = 0;
    for (std::size_t k = 1; k < n; ++k) total += static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(k + 1))));
    return total;
}

std::size_t sorting_trial_cap(std::size_t n, std::size_t horizon) {
    const double nd = static_cast<double>(n);
    const double cap = nd * nd * std::log(nd + 1.0) * std::log(static_cast<double>(std::max<std::size_t>(horizon, 3)));
    return std::max(static_cast<std::size_t>(std::ceil(cap)), 4 * insertion_comparison_bound(n));
}

std::size_t social_trial_cap(std::size_t n, std::size_t horizon, double gap) {
    if (!(gap > 0.0)) throw InputError("social_trial_cap: gap must be positive");
    const double nd = static_cast<double>(n);
    const double lt = std::log(static_cast<double>(std::max<std::size_t>(horizon, 3)));
    return static_cast<std::size_t>(std::ceil(4.0 * nd * nd * lt / (gap * gap)));
}

double min_utility_gap(const UtilityProfile &u) {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t r = 1; r < u.size(); ++r)
        gap = std::min(gap, u[u.item_with_rank(r)] - u[u.item_with_rank(r - 1)]);
    return gap;
}

SortingResult estimate_order_sorting(GreedyUserEnvironment &env, std::size_t max_trials) {
    const std::size_t n = env.size();
    SortingResult res;
    const std::size_t start = env.trials();

    // Returns true when utility(a) < utility(b).
    auto less = [&](std::size_t a, std::size_t b) {
        ++res.comparisons;
        // Everything else goes below the pair, known-low items first.
        std::vector<std::size_t> rest;
        for (std::size_t it : res.ascending)
            if (it != a && it != b) rest.push_back(it);
        for (std::size_t it = 0; it < n; ++it)
            if (it != a && it != b && std::find(rest.begin(), rest.end(), it) == rest.end()) rest.push_back(it);
        for (bool a_first = true;; a_first = !a_first) {
            if (env.trials() - start >= max_trials) {
                std::ostringstream os;
                os << "sorting ran out of trials after " << res.comparisons << " comparisons; partial order:";
                for (std::size_t it : res.ascending) os << ' ' << it;
                throw EstimationBudgetError(os.str(), env.trials() - start);
            }
            std::vector<std::size_t> order{a_first ? a : b, a_first ? b : a};
            order.insert(order.end(), rest.begin(), rest.end());
            const std::size_t y = env.show(Permutation(order));
            if (y == order[1]) return y == b;
        }
    };

    for (std::size_t item = 0; item < n; ++item) {
        // binary search for the insertion point among the sorted prefix
        std::size_t lo = 0, hi = res.ascending.size();
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (less(item, res.ascending[mid]))
                hi = mid;
            else
                lo = mid + 1;
        }
        res.ascending.insert(res.ascending.begin() + static_cast<std::ptrdiff_t>(lo), item);
    }
    res.trials = env.trials() - start;
    return res;
}

double UtilityBelief::mean(std::size_t i) const {
    return reviews[i] == 0 ? 0.5 * (prior_lo + prior_hi) : review_sum[i] / static_cast<double>(reviews[i]);
}

double UtilityBelief::lo(std::size_t i) const {
    return reviews[i] == 0 ? prior_lo : mean(i) - width_scale / std::sqrt(static_cast<double>(reviews[i]));
}

double UtilityBelief::hi(std::size_t i) const {
    return reviews[i] == 0 ? prior_hi : mean(i) + width_scale / std::sqrt(static_cast<double>(reviews[i]));
}

bool UtilityBelief::overlaps(std::size_t i, std::size_t j) const { return lo(i) <= hi(j) && lo(j) <= hi(i); }

bool UtilityBelief::separated() const {
    for (std::size_t i = 0; i < reviews.size(); ++i)
        for (std::size_t j = i + 1; j < reviews.size(); ++j)
            if (overlaps(i, j)) return false;
    return true;
}

std::vector<std::size_t> UtilityBelief::ascending() const {
    std::vector<std::size_t> order(reviews.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) { return mean(a) < mean(b); });
    return order;
}

SocialResult estimate_social_learning(const UtilityProfile &truth, const SocialConfig &cfg, CounterRng rng) {
    const std::size_t n = truth.size();
    validate_window_model(Multinomial{cfg.q}, n);
    if (!(cfg.prior_lo < cfg.prior_hi)) throw InputError("social learning: empty prior interval");
    if (!(cfg.width_scale > 0.0)) throw InputError("social learning: width scale must be positive");

    SocialResult res;
    res.belief.review_sum.assign(n, 0.0);
    res.belief.reviews.assign(n, 0);
    res.belief.prior_lo = cfg.prior_lo;
    res.belief.prior_hi = cfg.prior_hi;
    res.belief.width_scale = cfg.width_scale;
    UtilityBelief &b = res.belief;

    CounterRng windows = rng.split(0), perception = rng.split(1), reviews = rng.split(2);
    std::vector<double> perceived(n);
    while (!b.separated()) {
        if (res.trials >= cfg.max_trials) return res;
        std::size_t target = n;
        for (std::size_t i = 0; i < n; ++i) {
            bool overlapping = false;
            for (std::size_t j = 0; j < n && !overlapping; ++j) overlapping = j != i && b.overlaps(i, j);
            if (overlapping && (target == n || b.reviews[i] < b.reviews[target])) target = i;
        }
        std::vector<std::size_t> order{target};
        for (std::size_t i = 0; i < n; ++i)
            if (i != target) order.push_back(i);
        ++res.forced_placements;

        const std::size_t w = 1 + windows.categorical(cfg.q);
        for (std::size_t i = 0; i < n; ++i) {
            if (cfg.perception == PerceptionMode::Uniform)
                perceived[i] = b.lo(i) + perception.uniform() * (b.hi(i) - b.lo(i));
            else
                perceived[i] = i == target ? b.lo(i) : b.hi(i);
        }
        std::size_t y = order[0];
        for (std::size_t pos = 1; pos < w; ++pos)
            if (perceived[order[pos]] > perceived[y]) y = order[pos];

        b.review_sum[y] += truth[y] + cfg.review_noise * reviews.normal();
        ++b.reviews[y];
        ++res.trials;
    }
    res.separated = true;
    return res;
}

}  // namespace rankbandit
