#include "rankbandit/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace rankbandit {

Permutation::Permutation(std::vector<std::size_t> order) : order_(std::move(order)) {
    const std::size_t n = order_.size();
    std::vector<bool> seen(n, false);
    for (std::size_t item : order_) {
        if (item >= n || seen[item])
            throw InputError("permutation is not a bijection on {0.." + std::to_string(n) + ")");
        seen[item] = true;
    }
}

std::size_t Permutation::position_of(std::size_t item) const {
    return static_cast<std::size_t>(std::find(order_.begin(), order_.end(), item) - order_.begin());
}

Permutation Permutation::identity(std::size_t n) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    return Permutation(std::move(order));
}

UtilityProfile::UtilityProfile(std::vector<double> utilities) : values_(std::move(utilities)) {
    const std::size_t n = values_.size();
    by_rank_.resize(n);
    std::iota(by_rank_.begin(), by_rank_.end(), std::size_t{0});
    for (double v : values_)
        if (!std::isfinite(v)) throw InputError("utilities must be finite");
    std::sort(by_rank_.begin(), by_rank_.end(),
              [this](std::size_t a, std::size_t b) { return values_[a] < values_[b]; });
    for (std::size_t r = 1; r < n; ++r)
        if (values_[by_rank_[r]] == values_[by_rank_[r - 1]])
            throw InputError("utilities must be pairwise distinct (items " +
                             std::to_string(by_rank_[r - 1]) + " and " +
                             std::to_string(by_rank_[r]) + " tie)");
    rank_.resize(n);
    for (std::size_t r = 0; r < n; ++r) rank_[by_rank_[r]] = r;
}

Permutation UtilityProfile::to_ranks(const Permutation &by_item) const {
    std::vector<std::size_t> order(by_item.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) order[pos] = rank_[by_item[pos]];
    return Permutation(std::move(order));
}

Permutation UtilityProfile::to_items(const Permutation &by_rank) const {
    std::vector<std::size_t> order(by_rank.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) order[pos] = by_rank_[by_rank[pos]];
    return Permutation(std::move(order));
}

Instance::Instance(UtilityProfile u, std::vector<double> mu) : utilities(std::move(u)), means(std::move(mu)) {
    if (utilities.size() != means.size())
        throw InputError("instance: utilities and means differ in length");
    if (means.empty()) throw InputError("instance: no items");
    for (double m : means)
        if (!std::isfinite(m)) throw InputError("instance: means must be finite");
}

bool Instance::means_distinct() const {
    std::vector<double> sorted = means;
    std::sort(sorted.begin(), sorted.end());
    return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

bool is_lazy(std::span<const double> q) {
    for (std::size_t w = 1; w < q.size(); ++w)
        if (q[w] > q[w - 1]) return false;
    return true;
}

void validate_window_model(const WindowModel &model, std::size_t n) {
    if (const auto *m = std::get_if<Multinomial>(&model)) {
        if (m->q.size() != n) throw InputError("window q must have one entry per item");
        double total = 0.0;
        for (double v : m->q) {
            if (!(v >= 0.0)) throw InputError("window q entries must be non-negative");
            total += v;
        }
        if (std::abs(total - 1.0) > 1e-12) throw InputError("window q must sum to 1");
    } else {
        for (std::size_t w : std::get<FixedSchedule>(model).windows)
            if (w < 1 || w > n) throw InputError("window schedule entries must lie in [1, n]");
    }
}

std::size_t user_select(const Permutation &perm, const UtilityProfile &u, std::size_t window) {
    if (window < 1 || window > perm.size())
        throw InputError("window length " + std::to_string(window) + " outside [1, " +
                         std::to_string(perm.size()) + "]");
    std::size_t best = perm[0];
    for (std::size_t pos = 1; pos < window; ++pos)
        if (u[perm[pos]] > u[best]) best = perm[pos];
    return best;
}

Matrix selection_matrix(const Permutation &ranked) {
    const std::size_t n = ranked.size();
    Matrix P = Matrix::Zero(n, n);
    std::size_t best = 0;
    for (std::size_t w = 0; w < n; ++w) {
        best = (w == 0) ? ranked[0] : std::max(best, ranked[w]);
        P(best, w) = 1.0;
    }
    return P;
}

Matrix selection_matrix(const Permutation &perm, const UtilityProfile &u) {
    return selection_matrix(u.to_ranks(perm));
}

std::vector<std::size_t> OptimalFamily::dominated() const {
    std::vector<std::size_t> out;
    for (const auto &d : dominated_by) out.insert(out.end(), d.begin(), d.end());
    std::sort(out.begin(), out.end());
    return out;
}

OptimalFamily optimal_family(const UtilityProfile &u, std::span<const double> means) {
    const std::size_t n = u.size();
    if (means.size() != n) throw InputError("optimal_family: size mismatch");

    std::vector<bool> is_dominated(n, false);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n && !is_dominated[j]; ++i)
            if (u[i] > u[j] && means[i] > means[j]) is_dominated[j] = true;

    OptimalFamily fam;
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t item = u.item_with_rank(r);
        if (!is_dominated[item]) fam.undominated.push_back(item);
    }
    fam.dominated_by.resize(fam.undominated.size());

    // Ascending item index inside every block, so iterate items in index order.
    for (std::size_t j = 0; j < n; ++j) {
        if (!is_dominated[j]) continue;
        std::size_t owner = fam.undominated.size();
        for (std::size_t k = 0; k < fam.undominated.size(); ++k) {
            const std::size_t s = fam.undominated[k];
            if (u[s] > u[j] && (owner == fam.undominated.size() ||
                                means[s] > means[fam.undominated[owner]]))
                owner = k;
        }
        fam.dominated_by[owner].push_back(j);
    }

    std::vector<std::size_t> order;
    order.reserve(n);
    for (std::size_t k = 0; k < fam.undominated.size(); ++k) {
        order.push_back(fam.undominated[k]);
        order.insert(order.end(), fam.dominated_by[k].begin(), fam.dominated_by[k].end());
    }
    fam.representative = Permutation(std::move(order));
    return fam;
}

OptimalFamily optimal_family(const Instance &inst) { return optimal_family(inst.utilities, inst.means); }

double optimal_window_value(const UtilityProfile &u, std::span<const double> means, std::size_t window) {
    const OptimalFamily fam = optimal_family(u, means);
    return means[user_select(fam.representative, u, window)];
}

double pseudo_regret(const UtilityProfile &u, std::span<const double> means, const Permutation &perm,
                     std::size_t window) {
    const double best = optimal_window_value(u, means, window);
    return best - means[user_select(perm, u, window)];
}

double pseudo_regret(const Instance &inst, const Permutation &perm, std::size_t window) {
    return pseudo_regret(inst.utilities, inst.means, perm, window);
}

double regret_upper_bound(const Instance &inst, std::size_t horizon, double delta) {
    if (!(delta > 0.0 && delta <= 1.0)) throw InputError("delta must lie in (0, 1]");
    if (horizon == 0) throw InputError("horizon must be positive");
    const double n = static_cast<double>(inst.size());
    const double T = static_cast<double>(horizon);
    const double log_term = std::log(4.0 * n * T * T / delta);

    const OptimalFamily fam = optimal_family(inst);
    auto charge = [&](std::size_t better, std::size_t worse) {
        const double gap = inst.gap(better, worse);
        if (!(gap > 0.0))
            throw DegenerateInstanceError("zero payoff gap between items " + std::to_string(better) +
                                          " and " + std::to_string(worse));
        return 8.0 * log_term / gap;
    };

    double bound = 0.0;
    for (std::size_t k = 1; k < fam.undominated.size(); ++k)
        bound += charge(fam.undominated[k - 1], fam.undominated[k]);
    for (std::size_t k = 0; k < fam.undominated.size(); ++k)
        for (std::size_t j : fam.dominated_by[k]) bound += charge(fam.undominated[k], j);
    return bound;
}

void RegretTrace::append(std::size_t t, Permutation perm, std::size_t window, std::size_t selected,
                         double payoff, double inst_regret) {
    const double cum = cumulative() + inst_regret;
    records_.push_back(TraceRecord{t, std::move(perm), window, selected, payoff, inst_regret, cum});
}

double RegretTrace::cumulative_at(std::size_t t) const {
    if (t == 0 || records_.empty()) return 0.0;
    return records_[std::min(t, records_.size()) - 1].cum_regret;
}

}  // namespace rankbandit
