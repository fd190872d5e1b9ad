#pragma once

#include <vector>

#include "rankbandit/policy.hpp"

namespace rankbandit {

struct ItemStats {
    double reward = 0.0;     // cumulative observed payoff
    std::size_t count = 0;   // number of times selected

    /// Empirical mean; 0 for an unselected item.
    double mean() const { return count == 0 ? 0.0 : reward / static_cast<double>(count); }
    /// Confidence radius sqrt(log(4 n t^2 / delta) / N); +inf when N = 0.
    double radius(std::size_t t, double delta, std::size_t n) const;
};

/// log(4 n t^2 / delta), natural log.
double confidence_log_term(std::size_t n, std::size_t t, double delta);

/// Builds the displayed permutation from confidence intervals: repeatedly take
/// the least-played empirically undominated item and append it followed by
/// every remaining item of lower utility (ascending index).
Permutation find_permutation(const std::vector<ItemStats> &stats, std::size_t t, double delta,
                             const UtilityProfile &u);

/// ceil(4 log(4 n T^2 / delta) / gap^2).
std::size_t inversion_budget(double gap, std::size_t horizon, double delta, std::size_t n);

class EliminationRanker : public Policy {
  public:
    EliminationRanker(std::size_t n, double delta);

    std::string name() const override { return "elim"; }
    Permutation act(std::size_t t, const UtilityProfile &u) override;
    void feed(std::size_t t, std::size_t selected, double payoff) override;

    const std::vector<ItemStats> &stats() const { return stats_; }
    double delta() const { return delta_; }

  private:
    double delta_;
    std::vector<ItemStats> stats_;
};

}  // namespace rankbandit
