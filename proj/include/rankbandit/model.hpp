#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace rankbandit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Raised for malformed caller input (bad sizes, out-of-range windows, ties).
class InputError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an instance makes a quantity undefined (e.g. a zero payoff gap).
class DegenerateInstanceError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// An ordering of n items. Items are 0-based; position 0 is the top of the list.
class Permutation {
  public:
    Permutation() = default;
    explicit Permutation(std::vector<std::size_t> order);

    static Permutation identity(std::size_t n);

    std::size_t size() const { return order_.size(); }
    std::size_t operator[](std::size_t position) const { return order_[position]; }
    std::size_t position_of(std::size_t item) const;
    const std::vector<std::size_t> &order() const { return order_; }

    bool operator==(const Permutation &other) const { return order_ == other.order_; }

  private:
    std::vector<std::size_t> order_;
};

/// Pairwise-distinct item utilities together with the induced rank labelling
/// (rank 0 = least preferred item).
class UtilityProfile {
  public:
    UtilityProfile() = default;
    explicit UtilityProfile(std::vector<double> utilities);

    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t item) const { return values_[item]; }
    const std::vector<double> &values() const { return values_; }

    std::size_t rank(std::size_t item) const { return rank_[item]; }
    std::size_t item_with_rank(std::size_t rank) const { return by_rank_[rank]; }

    // Relabel a permutation between item indices and utility-rank labels.
    Permutation to_ranks(const Permutation &by_item) const;
    Permutation to_items(const Permutation &by_rank) const;

    bool operator==(const UtilityProfile &other) const { return values_ == other.values_; }

  private:
    std::vector<double> values_;
    std::vector<std::size_t> rank_;
    std::vector<std::size_t> by_rank_;
};

/// Stationary-utility instance with per-item mean payoffs.
struct Instance {
    UtilityProfile utilities;
    std::vector<double> means;

    Instance() = default;
    Instance(UtilityProfile u, std::vector<double> mu);

    std::size_t size() const { return means.size(); }
    double gap(std::size_t i, std::size_t j) const { return means[i] - means[j]; }
    bool means_distinct() const;
};

struct FixedSchedule {
    std::vector<std::size_t> windows;  // 1-based window lengths
};

struct Multinomial {
    std::vector<double> q;  // q[w-1] = Pr(window length w)
};

/// Attention-window model: either a fixed sequence or i.i.d. multinomial draws.
using WindowModel = std::variant<FixedSchedule, Multinomial>;

void validate_window_model(const WindowModel &model, std::size_t n);
bool is_lazy(std::span<const double> q);

/// Index of the item the user picks: the highest-utility item among the first
/// `window` positions of `perm`.
std::size_t user_select(const Permutation &perm, const UtilityProfile &u, std::size_t window);

/// Selection matrix of a permutation whose entries are utility-rank labels.
/// Column w-1 holds a single 1 at the rank selected under window length w.
Matrix selection_matrix(const Permutation &ranked);

/// Selection matrix with rows indexed by utility rank.
Matrix selection_matrix(const Permutation &perm, const UtilityProfile &u);

/// Optimal-permutation family for a fixed utility profile and payoff vector.
struct OptimalFamily {
    std::vector<std::size_t> undominated;               // increasing utility, decreasing mean
    std::vector<std::vector<std::size_t>> dominated_by;  // parallel to `undominated`
    Permutation representative;

    std::vector<std::size_t> dominated() const;
};

/// Builds the family for arbitrary real payoffs. Ties in `means` are allowed;
/// domination is strict in both utility and mean.
OptimalFamily optimal_family(const UtilityProfile &u, std::span<const double> means);
OptimalFamily optimal_family(const Instance &inst);

/// Mean payoff of the item any optimal permutation selects at `window`.
double optimal_window_value(const UtilityProfile &u, std::span<const double> means,
                            std::size_t window);

double pseudo_regret(const UtilityProfile &u, std::span<const double> means,
                     const Permutation &perm, std::size_t window);
double pseudo_regret(const Instance &inst, const Permutation &perm, std::size_t window);

/// High-probability regret bound of the elimination ranker on `inst`.
double regret_upper_bound(const Instance &inst, std::size_t horizon, double delta);

struct TraceRecord {
    std::size_t t = 0;
    Permutation permutation;
    std::size_t window = 0;
    std::size_t selected = 0;
    double payoff = 0.0;
    double inst_regret = 0.0;
    double cum_regret = 0.0;
};

/// Per-trial interaction log with running cumulative pseudo-regret.
class RegretTrace {
  public:
    void append(std::size_t t, Permutation perm, std::size_t window, std::size_t selected,
                double payoff, double inst_regret);

    const std::vector<TraceRecord> &records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }
    double cumulative() const { return records_.empty() ? 0.0 : records_.back().cum_regret; }

    /// Cumulative regret after the first `t` trials (t clipped to the trace length).
    double cumulative_at(std::size_t t) const;

  private:
    std::vector<TraceRecord> records_;
};

}  // namespace rankbandit
