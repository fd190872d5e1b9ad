#pragma once

#include <stdexcept>
#include <vector>

#include "rankbandit/model.hpp"
#include "rankbandit/random.hpp"

namespace rankbandit {

/// Thrown when an estimation phase runs out of trials. `what()` carries the
/// partial result.
class EstimationBudgetError : public std::runtime_error {
  public:
    EstimationBudgetError(const std::string &msg, std::size_t trials)
        : std::runtime_error(msg), trials_used(trials) {}
    std::size_t trials_used;
};

/// Users with fixed (hidden) utilities who pick the best item in a window drawn from q.
class GreedyUserEnvironment {
  public:
    GreedyUserEnvironment(UtilityProfile truth, std::vector<double> q, CounterRng rng);

    std::size_t size() const { return truth_.size(); }
    std::size_t show(const Permutation &perm);
    std::size_t trials() const { return trials_; }

  private:
    UtilityProfile truth_;
    std::vector<double> q_;
    CounterRng rng_;
    std::size_t trials_ = 0;
};

struct SortingResult {
    std::vector<std::size_t> ascending;  // items ordered by increasing utility
    std::size_t comparisons = 0;
    std::size_t trials = 0;

    /// Utilities 1..n consistent with the recovered order.
    UtilityProfile profile() const;
};

/// Worst-case comparison count of binary insertion sort on n items.
std::size_t insertion_comparison_bound(std::size_t n);

/// Default trial cap: ceil(n^2 ln(n+1) ln(T)) with at least 4 trials per comparison.
std::size_t sorting_trial_cap(std::size_t n, std::size_t horizon);

/// Recovers the utility order by binary insertion sort. Each comparison
/// displays the pair in the top two positions, alternating which one leads,
/// until the item in second position is selected: that item must have the
/// higher utility.
SortingResult estimate_order_sorting(GreedyUserEnvironment &env, std::size_t max_trials);

enum class PerceptionMode { Uniform, AdversarialEndpoint };

struct SocialConfig {
    std::vector<double> q;
    double prior_lo = -5.0;     // belief interval before any review
    double prior_hi = 5.0;
    double width_scale = 3.0;   // half-width = width_scale / sqrt(m)
    double review_noise = 1.0;  // standard deviation of a review
    PerceptionMode perception = PerceptionMode::Uniform;
    std::size_t max_trials = 0;
};

struct UtilityBelief {
    std::vector<double> review_sum;
    std::vector<std::size_t> reviews;
    double prior_lo = -5.0, prior_hi = 5.0, width_scale = 3.0;

    double mean(std::size_t i) const;
    double lo(std::size_t i) const;
    double hi(std::size_t i) const;
    bool overlaps(std::size_t i, std::size_t j) const;
    bool separated() const;
    /// Items ordered by increasing interval midpoint.
    std::vector<std::size_t> ascending() const;
};

struct SocialResult {
    UtilityBelief belief;
    std::size_t trials = 0;
    std::size_t forced_placements = 0;  // trials where an overlapping item was put on top
    bool separated = false;
};

/// Trial cap ceil(4 n^2 ln(T) / gap^2) for a minimum utility gap `gap`.
std::size_t social_trial_cap(std::size_t n, std::size_t horizon, double gap);

/// Smallest difference between two utilities of the profile.
double min_utility_gap(const UtilityProfile &u);

/// Repeatedly places the least-reviewed item whose interval overlaps another
/// at the top. Users choose by a perceived utility taken from each item's
/// current interval; every selection adds a noisy review of the selected item.
/// Stops when all intervals are disjoint or the trial cap is reached.
SocialResult estimate_social_learning(const UtilityProfile &truth, const SocialConfig &cfg, CounterRng rng);

}  // namespace rankbandit
