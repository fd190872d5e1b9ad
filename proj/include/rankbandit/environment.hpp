#pragma once

#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "rankbandit/policy.hpp"
#include "rankbandit/random.hpp"

namespace rankbandit {

/// Unit-variance Gaussian payoffs. The k-th draw of item i is a fixed function
/// of (seed, i, k), whichever trial it happens in.
struct GaussianPayoffs {
    std::vector<double> means;
    CounterRng rng;
};

/// Payoff tape fixed ahead of time: row t-1 holds r^t for every item.
struct PayoffTape {
    std::size_t n = 0;
    std::size_t horizon = 0;
    std::vector<double> values;  // horizon x n, row-major

    double at(std::size_t t, std::size_t item) const { return values[(t - 1) * n + item]; }
    std::span<const double> row(std::size_t t) const { return {values.data() + (t - 1) * n, n}; }
};

PayoffTape make_tape(std::size_t n, std::size_t horizon, std::vector<double> values);
/// Independent Bernoulli(probs[i]) entries.
PayoffTape bernoulli_tape(std::span<const double> probs, std::size_t horizon, CounterRng rng);

class PayoffSource {
  public:
    explicit PayoffSource(GaussianPayoffs g);
    explicit PayoffSource(PayoffTape tape);

    std::size_t size() const;
    double draw(std::size_t item, std::size_t t);
    bool is_tape() const { return std::holds_alternative<PayoffTape>(src_); }
    const PayoffTape &tape() const { return std::get<PayoffTape>(src_); }
    /// Number of draws taken so far from `item`.
    std::size_t draws(std::size_t item) const { return counts_[item]; }

  private:
    std::variant<GaussianPayoffs, PayoffTape> src_;
    std::vector<CounterRng> streams_;
    std::vector<std::size_t> counts_;
};

struct WindowRecord {
    std::size_t t;
    std::size_t window;
    std::size_t selected;
    double payoff;
};

/// Adaptive window adversary: sees only past windows, selections and payoffs.
using AdaptiveWindowRule = std::function<std::size_t(std::size_t t, std::span<const WindowRecord> past)>;

class WindowSource {
  public:
    static WindowSource schedule(std::vector<std::size_t> windows, std::size_t n);
    static WindowSource multinomial(std::vector<double> q, CounterRng rng);
    /// w^t = i for the i-th block of T/n consecutive trials.
    static WindowSource lower_bound_blocks(std::size_t n, std::size_t horizon);
    static WindowSource adaptive(std::size_t n, AdaptiveWindowRule rule);

    std::size_t size() const { return n_; }
    std::size_t draw(std::size_t t, std::span<const WindowRecord> past = {}) const;
    /// Multinomial probabilities, when the source has them.
    const std::optional<std::vector<double>> &distribution() const { return q_; }

  private:
    enum class Kind { Schedule, Multinomial, Blocks, Adaptive };
    Kind kind_ = Kind::Schedule;
    std::size_t n_ = 0;
    std::vector<std::size_t> schedule_;
    std::optional<std::vector<double>> q_;
    CounterRng rng_;
    std::size_t block_ = 0;
    AdaptiveWindowRule rule_;
};

/// Per-trial utilities: a single profile or a cycled sequence of profiles.
class UtilitySchedule {
  public:
    UtilitySchedule() = default;
    explicit UtilitySchedule(UtilityProfile fixed) : profiles_{std::move(fixed)} {}
    explicit UtilitySchedule(std::vector<UtilityProfile> seq);

    const UtilityProfile &at(std::size_t t) const { return profiles_[(t - 1) % profiles_.size()]; }
    std::size_t size() const { return profiles_.front().size(); }
    bool stationary() const { return profiles_.size() == 1; }
    const std::vector<UtilityProfile> &profiles() const { return profiles_; }

  private:
    std::vector<UtilityProfile> profiles_;
};

/// Known means: regret of trial t is mean of the optimal selection at the
/// realised window minus mean of the actual selection.
struct StochasticBenchmark {
    std::vector<double> means;
};

/// Fixed comparator p* over utility ranks: regret of trial t is the payoff of
/// p* on r^t minus the expected (over windows) payoff of the displayed permutation.
struct AdversarialBenchmark {
    std::vector<double> q;
    std::vector<double> p_star;
};

using Benchmark = std::variant<StochasticBenchmark, AdversarialBenchmark>;

/// Delay per trial in [0, max]: none, fixed k, or uniform on 0..k.
class DelayModel {
  public:
    enum class Kind { None, Fixed, Uniform };

    DelayModel() = default;
    static DelayModel none() { return {}; }
    static DelayModel fixed(std::size_t k);
    static DelayModel uniform(std::size_t k, CounterRng rng);

    Kind kind() const { return kind_; }
    std::size_t max_delay() const { return kind_ == Kind::None ? 0 : k_; }
    std::size_t delay(std::size_t t) const;

  private:
    Kind kind_ = Kind::None;
    std::size_t k_ = 0;
    CounterRng rng_;
};

struct EpisodeOptions {
    std::size_t horizon = 0;
    DelayModel delay;
    /// Called after each trial's feedback has been delivered.
    std::function<void(std::size_t t, const Policy &)> on_trial_end;
};

struct EpisodeResult {
    RegretTrace trace;
    std::size_t delivered = 0;   // payoffs handed to the policy
    std::size_t undelivered = 0; // still in flight at the horizon
};

/// The interaction loop: utilities, display, window, selection, payoff,
/// feedback (possibly delayed), and regret accounting.
EpisodeResult run_episode(Policy &policy, const UtilitySchedule &utilities, PayoffSource &payoffs,
                          const WindowSource &windows, const Benchmark &benchmark, const EpisodeOptions &opts);

/// Expected payoff of a rank-space marginal p on payoff row r under utilities u.
double marginal_payoff(std::span<const double> p_by_rank, std::span<const double> r, const UtilityProfile &u);

}  // namespace rankbandit
