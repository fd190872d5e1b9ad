#pragma once

#include <cstdint>
#include <limits>
#include <span>

namespace rankbandit {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based generator: the i-th output is a pure function of (key, i).
/// `split` derives independent substreams, so consumers that draw different
/// amounts never shift each other's sequences.
class CounterRng {
  public:
    using result_type = std::uint64_t;

    CounterRng() = default;
    explicit CounterRng(std::uint64_t seed) : key_(mix64(seed ^ 0x5851f42d4c957f2dULL)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return at(counter_++); }

    /// Output at an absolute counter position; does not advance the stream.
    result_type at(std::uint64_t counter) const { return mix64(key_ ^ mix64(counter)); }

    CounterRng split(std::uint64_t stream) const {
        CounterRng child;
        child.key_ = mix64(key_ + 0x632be59bd9b4e019ULL * (stream + 1));
        return child;
    }

    std::uint64_t counter() const { return counter_; }
    void seek(std::uint64_t counter) { counter_ = counter; }

    /// Uniform double in [0, 1).
    double uniform() { return to_unit((*this)()); }
    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound);
    /// Standard normal via Box-Muller on two consecutive outputs.
    double normal();
    bool bernoulli(double p) { return uniform() < p; }
    /// Index drawn with probability proportional to `weights` (must sum to ~1).
    std::size_t categorical(std::span<const double> weights);

    static double to_unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

  private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

/// Standard normal derived from two fixed counter positions of `rng`.
double normal_at(const CounterRng &rng, std::uint64_t index);

// Stream identifiers used to split a replication seed.
enum class Stream : std::uint64_t { Payoff = 1, Window = 2, Policy = 3, Tape = 4, User = 5, Delay = 6 };

inline CounterRng substream(std::uint64_t seed, std::uint64_t replication, Stream s) {
    return CounterRng(seed).split(replication).split(static_cast<std::uint64_t>(s));
}

}  // namespace rankbandit
