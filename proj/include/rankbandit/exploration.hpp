#pragma once

#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "rankbandit/policy.hpp"
#include "rankbandit/random.hpp"

namespace rankbandit {

/// Pivot permutation k over rank labels: (k, k-1, ..., 0, k+1, ..., n-1).
Permutation pivot_permutation(std::size_t n, std::size_t k);

/// Mixture weights over the n pivot permutations that make every item equally
/// likely to be selected when windows are drawn from the lazy distribution q.
/// Throws InputError when q is not lazy or q[0] == 0.
std::vector<double> lazy_alpha(std::span<const double> q);

/// Item (rank) selection probabilities of a pivot mixture under windows q.
std::vector<double> pivot_marginals(std::span<const double> alpha, std::span<const double> q);

struct EpsilonGreedyConfig {
    std::vector<double> q;                 // lazy window distribution
    double c = 1.0;                        // exploration constant
    std::optional<std::size_t> horizon;    // known T switches to the fixed rate
};

/// Exploration probability at trial t: min(1, c (n ln t / t)^(1/3)), or
/// min(1, c n^(1/3) T^(-1/3)) when the horizon is known. Trial 1 always explores.
double epsilon_rate(std::size_t t, std::size_t n, const EpsilonGreedyConfig &cfg);

/// Explores with the uniform pivot mixture and otherwise plays the optimal
/// permutation for importance-weighted exploration estimates. Estimates are
/// kept per utility rank so the policy also handles changing utilities.
class EpsilonGreedyRanker : public Policy {
  public:
    EpsilonGreedyRanker(EpsilonGreedyConfig cfg, CounterRng rng);

    std::string name() const override { return "eps-greedy"; }
    Permutation act(std::size_t t, const UtilityProfile &u) override;
    void feed(std::size_t t, std::size_t selected, double payoff) override;

    /// Current per-rank payoff estimates.
    std::vector<double> estimates() const;
    bool explored(std::size_t t) const;
    /// Forces the explore/exploit coin for testing; nullopt restores the rate.
    void force_epsilon(std::optional<double> eps) { forced_ = eps; }

  private:
    struct Pending {
        bool explore;
        std::vector<std::size_t> rank_of_item;
    };

    EpsilonGreedyConfig cfg_;
    CounterRng rng_;
    std::vector<double> alpha_;
    std::vector<double> sums_;   // per rank, importance-weighted payoff sums
    std::size_t explore_rounds_ = 0;
    std::unordered_map<std::size_t, Pending> pending_;
    std::vector<std::size_t> explore_log_;
    std::optional<double> forced_;
};

}  // namespace rankbandit
