#include "rankbandit/random.hpp"

#include <cmath>
#include <numbers>

namespace rankbandit {

std::uint64_t CounterRng::below(std::uint64_t bound) {
    // Lemire's nearly-divisionless rejection.
    std::uint64_t x = (*this)();
    __uint128_t m = static_cast<__uint128_t>(x) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = -bound % bound;
        while (low < threshold) {
            x = (*this)();
            m = static_cast<__uint128_t>(x) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

namespace {
double box_muller(double u1, double u2) {
    // u1 in (0, 1]
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}
}  // namespace

double CounterRng::normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return box_muller(u1, u2);
}

std::size_t CounterRng::categorical(std::span<const double> weights) {
    const double u = uniform();
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        last_positive = i;
        acc += weights[i];
        if (u < acc) return i;
    }
    return last_positive;  // rounding slack when weights sum to slightly below 1
}

double normal_at(const CounterRng &rng, std::uint64_t index) {
    const double u1 = 1.0 - CounterRng::to_unit(rng.at(2 * index));
    const double u2 = CounterRng::to_unit(rng.at(2 * index + 1));
    return box_muller(u1, u2);
}

}  // namespace rankbandit
