#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "rankbandit/policy.hpp"

namespace rankbandit {

/// Queue-based wrapper for delayed feedback. The base policy is asked for a
/// permutation; the item selected on its first display is the base step's
/// outcome. The base is fed as soon as a payoff for that item is queued
/// (FIFO per item); until then the same permutation keeps being displayed.
class QueuedDelayPolicy : public Policy {
  public:
    explicit QueuedDelayPolicy(std::unique_ptr<Policy> base);

    std::string name() const override { return "qpmd(" + base_->name() + ")"; }
    Permutation act(std::size_t t, const UtilityProfile &u) override;
    void observe_selection(std::size_t t, std::size_t selected) override;
    void feed(std::size_t t, std::size_t selected, double payoff) override;

    const Policy &base() const { return *base_; }
    std::size_t base_steps() const { return base_t_ - 1; }
    std::size_t enqueued() const { return enqueued_; }
    std::size_t dequeued() const { return dequeued_; }
    std::size_t queued() const;

  private:
    void try_advance();

    std::unique_ptr<Policy> base_;
    std::size_t base_t_ = 1;
    std::optional<Permutation> current_;
    bool fresh_ = false;                    // current_ not yet displayed
    std::optional<std::size_t> awaiting_;   // item whose payoff the base step needs
    std::vector<std::deque<double>> queues_;
    std::size_t enqueued_ = 0, dequeued_ = 0;
};

/// Instance-pool wrapper for delayed feedback: a base instance acts only when
/// it is not waiting for feedback; a new instance is spawned when all are.
class PooledDelayPolicy : public Policy {
  public:
    explicit PooledDelayPolicy(PolicyFactory factory);

    std::string name() const override;
    Permutation act(std::size_t t, const UtilityProfile &u) override;
    void observe_selection(std::size_t t, std::size_t selected) override;
    void feed(std::size_t t, std::size_t selected, double payoff) override;

    std::size_t pool_size() const { return pool_.size(); }
    std::size_t max_waiting() const { return max_waiting_; }
    std::size_t waiting() const;
    /// Index of the instance that acted at trial t.
    std::size_t owner(std::size_t t) const { return origin_.at(t).instance; }

  private:
    struct Slot {
        std::unique_ptr<Policy> policy;
        std::size_t local_t = 1;
        bool waiting = false;
    };
    struct Origin {
        std::size_t instance;
        std::size_t local_t;
    };

    PolicyFactory factory_;
    std::vector<Slot> pool_;
    std::unordered_map<std::size_t, Origin> origin_;
    std::size_t max_waiting_ = 0;
};

}  // namespace rankbandit
