#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "rankbandit/policy.hpp"
#include "rankbandit/random.hpp"

namespace rankbandit {

/// One-sparse importance-weighted loss estimate.
struct LossEstimate {
    std::size_t index = 0;
    double value = 0.0;
};

/// (offset - payoff) / prob at `index`. With offset 0 this is -payoff / prob.
LossEstimate make_loss_estimate(std::size_t index, double payoff, double prob, double offset = 0.0);

/// Bijection from items to utility values 0..n-1, built from utilities that
/// take exactly the values 1..n.
struct UtilityRelabel {
    std::vector<std::size_t> sigma;

    static UtilityRelabel from_rank_utilities(std::span<const double> u);
    std::size_t operator()(std::size_t item) const { return sigma[item]; }
};

/// Replaces arbitrary distinct utilities by their ranks 1..n.
std::vector<double> rank_reduce(std::span<const double> u);

class ProjectionError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// The set of admissible marginals for windows q, described by its upper-tail
/// lower bounds: x in simplex with sum_{i>=m} x_i >= sum_{w>=m} q_w.
class MarginalSet {
  public:
    explicit MarginalSet(std::vector<double> q);

    std::size_t size() const { return q_.size(); }
    const std::vector<double> &q() const { return q_; }
    /// First rank that can carry positive mass; lower ranks are pinned to 0.
    std::size_t first_free() const { return first_; }
    /// tail_bound(m) = sum_{w >= m} q_w.
    double tail_bound(std::size_t m) const { return tails_[m]; }
    bool contains(std::span<const double> x, double tol = 1e-9) const;

    /// argmin over the set of  sum_i a_i x_i - 2 sqrt(x_i),  started from the
    /// strictly positive member `start`. Projected Newton on tail sums.
    std::vector<double> minimize(std::span<const double> a, std::span<const double> start,
                                 std::size_t max_iter = 200, double tol = 1e-8,
                                 std::size_t *iterations = nullptr) const;

    /// Bregman projection of a positive vector y for F(x) = -2 sum sqrt(x).
    std::vector<double> project(std::span<const double> y) const;

    /// Strictly positive starting point: uniform when q is lazy, otherwise the
    /// marginals of the equal-weight pivot mixture.
    std::vector<double> initial_point() const;

  private:
    std::vector<double> q_;
    std::vector<double> tails_;
    std::size_t first_ = 0;
};

/// Online stochastic mirror descent over the admissible marginals with the
/// regulariser F(x) = -2 sum sqrt(x_i).
class OsmdState {
  public:
    OsmdState(std::vector<double> q, double eta);

    const std::vector<double> &act() const { return x_; }
    void feed(const LossEstimate &loss);
    void feed(std::span<const double> loss);

    double eta() const { return eta_; }
    const MarginalSet &set() const { return set_; }
    std::size_t last_iterations() const { return last_iterations_; }

  private:
    MarginalSet set_;
    double eta_;
    std::vector<double> x_;
    std::size_t last_iterations_ = 0;
};

/// sqrt(2 / T).
double default_learning_rate(std::size_t horizon);

enum class WitnessMethod { LinearProgram, Coupling };

struct BloConfig {
    std::vector<double> q;
    std::optional<std::size_t> horizon;  // unknown horizon uses doubling epochs
    std::optional<double> eta;           // overrides the default rate
    double loss_offset = 1.0;            // payoff upper bound; losses become (offset - r) / p
    WitnessMethod witness = WitnessMethod::LinearProgram;
};

/// Ranks by sampling from a decomposition of a selection matrix realising the
/// mirror-descent iterate. Iterates and losses are indexed by utility rank.
class BloRanker : public Policy {
  public:
    BloRanker(BloConfig cfg, CounterRng rng);

    std::string name() const override { return "osmd"; }
    Permutation act(std::size_t t, const UtilityProfile &u) override;
    void feed(std::size_t t, std::size_t selected, double payoff) override;

    const OsmdState &state() const { return state_; }
    const std::vector<double> &marginals() const { return state_.act(); }

  private:
    struct Pending {
        std::vector<std::size_t> rank_of_item;
        std::vector<double> realised;  // selection probability per rank
        std::size_t epoch;
    };

    void maybe_restart(std::size_t t);

    BloConfig cfg_;
    CounterRng rng_;
    OsmdState state_;
    std::size_t epoch_ = 0;
    std::size_t epoch_end_ = 0;
    std::unordered_map<std::size_t, Pending> pending_;
};

}  // namespace rankbandit
