#pragma once

#include <functional>
#include <memory>
#include <string>

#include "rankbandit/model.hpp"

namespace rankbandit {

/// Uniform interface between ranking algorithms and the interaction loop.
/// Trials are numbered from 1. Permutations are over external item indices.
class Policy {
  public:
    virtual ~Policy() = default;

    virtual std::string name() const = 0;

    /// Permutation to display at trial `t` for users with utilities `u`.
    virtual Permutation act(std::size_t t, const UtilityProfile &u) = 0;

    /// Payoff of the item selected at trial `t` (possibly delivered late).
    virtual void feed(std::size_t t, std::size_t selected, double payoff) = 0;

    /// The selection itself, reported immediately even when payoffs are delayed.
    virtual void observe_selection(std::size_t /*t*/, std::size_t /*selected*/) {}
};

using PolicyFactory = std::function<std::unique_ptr<Policy>()>;

}  // namespace rankbandit
