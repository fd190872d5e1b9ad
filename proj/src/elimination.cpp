#include "rankbandit/elimination.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace rankbandit {

double confidence_log_term(std::size_t n, std::size_t t, double delta) {
    const double td = static_cast<double>(t);
    return std::log(4.0 * static_cast<double>(n) * td * td / delta);
}

double ItemStats::radius(std::size_t t, double delta, std::size_t n) const {
    if (count == 0) return std::numeric_limits<double>::infinity();
    return std::sqrt(confidence_log_term(n, t, delta) / static_cast<double>(count));
}

Permutation find_permutation(const std::vector<ItemStats> &stats, std::size_t t, double delta,
                             const UtilityProfile &u) {
    const std::size_t n = stats.size();
    if (u.size() != n) throw InputError("find_permutation: utilities and stats differ in length");
    if (t < 1) throw InputError("find_permutation: trials are numbered from 1");

    std::vector<double> upper(n), lower(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double c = stats[i].radius(t, delta, n);
        const double m = stats[i].mean();
        upper[i] = m + c;
        lower[i] = m - c;
    }

    std::vector<bool> remaining(n, true);
    std::vector<std::size_t> order;
    order.reserve(n);
    while (order.size() < n) {
        double max_lower = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j)
            if (remaining[j]) max_lower = std::max(max_lower, lower[j]);

        std::size_t pick = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (!remaining[i] || !(upper[i] > max_lower)) continue;
            if (pick == n || stats[i].count < stats[pick].count) pick = i;
        }
        if (pick == n) {
            // Only reachable with zero-width intervals; fall back to the best lower bound.
            for (std::size_t i = 0; i < n; ++i)
                if (remaining[i] && (pick == n || lower[i] > lower[pick])) pick = i;
        }

        order.push_back(pick);
        remaining[pick] = false;
        for (std::size_t j = 0; j < n; ++j)
            if (remaining[j] && u[j] < u[pick]) {
                order.push_back(j);
                remaining[j] = false;
            }
    }
    return Permutation(std::move(order));
}

std::size_t inversion_budget(double gap, std::size_t horizon, double delta, std::size_t n) {
    if (!(gap > 0.0)) throw InputError("inversion_budget: gap must be positive");
    if (!(delta > 0.0 && delta <= 1.0)) throw InputError("inversion_budget: delta must lie in (0, 1]");
    return static_cast<std::size_t>(std::ceil(4.0 * confidence_log_term(n, horizon, delta) / (gap * gap)));
}

EliminationRanker::EliminationRanker(std::size_t n, double delta) : delta_(delta), stats_(n) {
    if (n == 0) throw InputError("elimination ranker needs at least one item");
    if (!(delta > 0.0 && delta <= 1.0)) throw InputError("delta must lie in (0, 1], got " + std::to_string(delta));
}

Permutation EliminationRanker::act(std::size_t t, const UtilityProfile &u) {
    return find_permutation(stats_, t, delta_, u);
}

void EliminationRanker::feed(std::size_t, std::size_t selected, double payoff) {
    if (selected >= stats_.size()) throw InputError("feed: item index out of range");
    stats_[selected].reward += payoff;
    ++stats_[selected].count;
}

}  // namespace rankbandit
