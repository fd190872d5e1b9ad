#include "rankbandit/delayed.hpp"

#include <algorithm>

namespace rankbandit {

QueuedDelayPolicy::QueuedDelayPolicy(std::unique_ptr<Policy> base) : base_(std::move(base)) {
    if (!base_) throw InputError("delay wrapper needs a base policy");
}

std::size_t QueuedDelayPolicy::queued() const {
    std::size_t s = 0;
    for (const auto &q : queues_) s += q.size();
    return s;
}

void QueuedDelayPolicy::try_advance() {
    if (!awaiting_) return;
    const std::size_t y = *awaiting_;
    if (y >= queues_.size() || queues_[y].empty()) return;
    const double r = queues_[y].front();
    queues_[y].pop_front();
    ++dequeued_;
    base_->feed(base_t_, y, r);
    ++base_t_;
    awaiting_.reset();
    current_.reset();
}

Permutation QueuedDelayPolicy::act(std::size_t, const UtilityProfile &u) {
    if (queues_.size() < u.size()) queues_.resize(u.size());
    try_advance();
    if (!current_) {
        current_ = base_->act(base_t_, u);
        fresh_ = true;
    }
    return *current_;
}

void QueuedDelayPolicy::observe_selection(std::size_t, std::size_t selected) {
    if (!fresh_) return;
    fresh_ = false;
    awaiting_ = selected;
    base_->observe_selection(base_t_, selected);
    try_advance();
}

void QueuedDelayPolicy::feed(std::size_t, std::size_t selected, double payoff) {
    if (selected >= queues_.size()) queues_.resize(selected + 1);
    queues_[selected].push_back(payoff);
    ++enqueued_;
    try_advance();
}

PooledDelayPolicy::PooledDelayPolicy(PolicyFactory factory) : factory_(std::move(factory)) {
    if (!factory_) throw InputError("pool wrapper needs a policy factory");
}

std::string PooledDelayPolicy::name() const {
    return "bold(" + (pool_.empty() ? factory_()->name() : pool_.front().policy->name()) + ")";
}

std::size_t PooledDelayPolicy::waiting() const {
    return static_cast<std::size_t>(std::count_if(pool_.begin(), pool_.end(), [](const Slot &s) { return s.waiting; }));
}

Permutation PooledDelayPolicy::act(std::size_t t, const UtilityProfile &u) {
    auto it = std::find_if(pool_.begin(), pool_.end(), [](const Slot &s) { return !s.waiting; });
    if (it == pool_.end()) {
        pool_.push_back(Slot{factory_(), 1, false});
        it = std::prev(pool_.end());
    }
    const auto idx = static_cast<std::size_t>(it - pool_.begin());
    it->waiting = true;
    origin_[t] = Origin{idx, it->local_t};
    max_waiting_ = std::max(max_waiting_, waiting());
    return it->policy->act(it->local_t, u);
}

void PooledDelayPolicy::observe_selection(std::size_t t, std::size_t selected) {
    const Origin o = origin_.at(t);
    pool_[o.instance].policy->observe_selection(o.local_t, selected);
}

void PooledDelayPolicy::feed(std::size_t t, std::size_t selected, double payoff) {
    const auto found = origin_.find(t);
    if (found == origin_.end()) throw InputError("pool wrapper: feedback for an unknown trial");
    const Origin o = found->second;
    Slot &slot = pool_[o.instance];
    slot.policy->feed(o.local_t, selected, payoff);
    ++slot.local_t;
    slot.waiting = false;
}

}  // namespace rankbandit
