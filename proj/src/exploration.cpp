#include "rankbandit/exploration.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rankbandit {

Permutation pivot_permutation(std::size_t n, std::size_t k) {
    if (k >= n) throw InputError("pivot index out of range");
    std::vector<std::size_t> order;
    order.reserve(n);
    for (std::size_t i = k + 1; i-- > 0;) order.push_back(i);
    for (std::size_t i = k + 1; i < n; ++i) order.push_back(i);
    return Permutation(std::move(order));
}

std::vector<double> lazy_alpha(std::span<const double> q) {
    const std::size_t n = q.size();
    if (n == 0) throw InputError("lazy_alpha: empty window distribution");
    double total = 0.0;
    for (double v : q) {
        if (!(v >= 0.0)) throw InputError("lazy_alpha: negative window probability");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-12) throw InputError("lazy_alpha: q must sum to 1");
    if (!is_lazy(q)) throw InputError("lazy_alpha: q is not lazy (non-increasing)");
    if (!(q[0] > 0.0)) throw InputError("lazy_alpha: q[0] must be positive");

    const double nd = static_cast<double>(n);
    std::vector<double> alpha(n);
    alpha[0] = 1.0 / (nd * q[0]);
    double prev = q[0];  // sum of q over the first i windows
    for (std::size_t i = 1; i < n; ++i) {
        const double cur = prev + q[i];
        const double numer = prev - static_cast<double>(i) * q[i];
        alpha[i] = std::max(0.0, numer) / (nd * prev * cur);
        prev = cur;
    }
    return alpha;
}

std::vector<double> pivot_marginals(std::span<const double> alpha, std::span<const double> q) {
    const std::size_t n = q.size();
    if (alpha.size() != n) throw InputError("pivot_marginals: size mismatch");
    std::vector<double> p(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        if (alpha[k] == 0.0) continue;
        // Windows 1..k+1 see item k first; longer windows pick rank w-1.
        for (std::size_t w = 0; w < n; ++w) p[w <= k ? k : w] += alpha[k] * q[w];
    }
    return p;
}

double epsilon_rate(std::size_t t, std::size_t n, const EpsilonGreedyConfig &cfg) {
    if (t <= 1) return 1.0;
    const double nd = static_cast<double>(n);
    if (cfg.horizon)
        return std::min(1.0, cfg.c * std::cbrt(nd) / std::cbrt(static_cast<double>(*cfg.horizon)));
    const double td = static_cast<double>(t);
    return std::min(1.0, cfg.c * std::cbrt(nd * std::log(td) / td));
}

EpsilonGreedyRanker::EpsilonGreedyRanker(EpsilonGreedyConfig cfg, CounterRng rng)
    : cfg_(std::move(cfg)), rng_(rng), alpha_(lazy_alpha(cfg_.q)), sums_(cfg_.q.size(), 0.0) {
    if (!(cfg_.c > 0.0)) throw InputError("eps-greedy: exploration constant must be positive");
}

Permutation EpsilonGreedyRanker::act(std::size_t t, const UtilityProfile &u) {
    const std::size_t n = sums_.size();
    if (u.size() != n) throw InputError("eps-greedy: utility profile has the wrong size");
    const double eps = forced_ ? *forced_ : epsilon_rate(t, n, cfg_);
    const bool explore = rng_.uniform() < eps;

    Pending info{explore, std::vector<std::size_t>(n)};
    for (std::size_t i = 0; i < n; ++i) info.rank_of_item[i] = u.rank(i);

    Permutation ranked;
    if (explore) {
        ranked = pivot_permutation(n, rng_.categorical(alpha_));
        ++explore_rounds_;
        explore_log_.push_back(t);
    } else {
        // Identity utilities in rank space: rank r has utility r.
        std::vector<double> ranks(n);
        for (std::size_t r = 0; r < n; ++r) ranks[r] = static_cast<double>(r);
        ranked = optimal_family(UtilityProfile(ranks), estimates()).representative;
    }
    pending_[t] = std::move(info);
    return u.to_items(ranked);
}

void EpsilonGreedyRanker::feed(std::size_t t, std::size_t selected, double payoff) {
    auto it = pending_.find(t);
    if (it == pending_.end()) throw InputError("eps-greedy: feedback for an unknown trial");
    if (it->second.explore) sums_[it->second.rank_of_item.at(selected)] += payoff;
    pending_.erase(it);
}

std::vector<double> EpsilonGreedyRanker::estimates() const {
    std::vector<double> est(sums_.size(), 0.0);
    if (explore_rounds_ == 0) return est;
    // Each rank is selected with probability 1/n on exploration rounds.
    const double scale = static_cast<double>(sums_.size()) / static_cast<double>(explore_rounds_);
    for (std::size_t i = 0; i < est.size(); ++i) est[i] = sums_[i] * scale;
    return est;
}

bool EpsilonGreedyRanker::explored(std::size_t t) const {
    return std::binary_search(explore_log_.begin(), explore_log_.end(), t);
}

}  // namespace rankbandit
