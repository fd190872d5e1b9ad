#include "rankbandit/environment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace rankbandit {

PayoffTape make_tape(std::size_t n, std::size_t horizon, std::vector<double> values) {
    if (values.size() != n * horizon) throw InputError("payoff tape must hold horizon x n values");
    for (double v : values)
        if (!std::isfinite(v)) throw InputError("payoff tape values must be finite");
    return PayoffTape{n, horizon, std::move(values)};
}

PayoffTape bernoulli_tape(std::span<const double> probs, std::size_t horizon, CounterRng rng) {
    const std::size_t n = probs.size();
    for (double p : probs)
        if (!(p >= 0.0 && p <= 1.0)) throw InputError("Bernoulli probabilities must lie in [0, 1]");
    std::vector<double> values(n * horizon);
    for (std::size_t t = 0; t < horizon; ++t)
        for (std::size_t i = 0; i < n; ++i)
            values[t * n + i] = CounterRng::to_unit(rng.at(t * n + i)) < probs[i] ? 1.0 : 0.0;
    return PayoffTape{n, horizon, std::move(values)};
}

PayoffSource::PayoffSource(GaussianPayoffs g) : src_(std::move(g)) {
    const auto &gp = std::get<GaussianPayoffs>(src_);
    for (double m : gp.means)
        if (!std::isfinite(m)) throw InputError("payoff means must be finite");
    for (std::size_t i = 0; i < gp.means.size(); ++i) streams_.push_back(gp.rng.split(i));
    counts_.assign(gp.means.size(), 0);
}

PayoffSource::PayoffSource(PayoffTape tape) : src_(std::move(tape)) { counts_.assign(size(), 0); }

std::size_t PayoffSource::size() const {
    if (const auto *g = std::get_if<GaussianPayoffs>(&src_)) return g->means.size();
    return std::get<PayoffTape>(src_).n;
}

double PayoffSource::draw(std::size_t item, std::size_t t) {
    if (item >= size()) throw InputError("payoff draw: item out of range");
    if (const auto *g = std::get_if<GaussianPayoffs>(&src_)) {
        const std::size_t k = counts_[item]++;
        return g->means[item] + normal_at(streams_[item], k);
    }
    const auto &tape = std::get<PayoffTape>(src_);
    if (t < 1 || t > tape.horizon)
        throw InputError("payoff tape exhausted at trial " + std::to_string(t) + " (length " +
                         std::to_string(tape.horizon) + ")");
    ++counts_[item];
    return tape.at(t, item);
}

WindowSource WindowSource::schedule(std::vector<std::size_t> windows, std::size_t n) {
    validate_window_model(FixedSchedule{windows}, n);
    WindowSource s;
    s.kind_ = Kind::Schedule;
    s.n_ = n;
    s.schedule_ = std::move(windows);
    return s;
}

WindowSource WindowSource::multinomial(std::vector<double> q, CounterRng rng) {
    validate_window_model(Multinomial{q}, q.size());
    WindowSource s;
    s.kind_ = Kind::Multinomial;
    s.n_ = q.size();
    s.q_ = std::move(q);
    s.rng_ = rng;
    return s;
}

WindowSource WindowSource::lower_bound_blocks(std::size_t n, std::size_t horizon) {
    if (n == 0 || horizon % n != 0) throw InputError("block windows need a horizon divisible by n");
    WindowSource s;
    s.kind_ = Kind::Blocks;
    s.n_ = n;
    s.block_ = horizon / n;
    s.schedule_.resize(1, horizon);
    return s;
}

WindowSource WindowSource::adaptive(std::size_t n, AdaptiveWindowRule rule) {
    WindowSource s;
    s.kind_ = Kind::Adaptive;
    s.n_ = n;
    s.rule_ = std::move(rule);
    return s;
}

std::size_t WindowSource::draw(std::size_t t, std::span<const WindowRecord> past) const {
    if (t < 1) throw InputError("trials are numbered from 1");
    switch (kind_) {
    case Kind::Schedule:
        if (t > schedule_.size())
            throw InputError("window schedule exhausted at trial " + std::to_string(t));
        return schedule_[t - 1];
    case Kind::Multinomial: {
        // One uniform per trial at a fixed counter position.
        CounterRng at_t = rng_;
        at_t.seek(t);
        return 1 + at_t.categorical(*q_);
    }
    case Kind::Blocks:
        if (t > schedule_[0]) throw InputError("window schedule exhausted at trial " + std::to_string(t));
        return (t - 1) / block_ + 1;
    case Kind::Adaptive: {
        const std::size_t w = rule_(t, past);
        if (w < 1 || w > n_) throw InputError("adaptive window rule returned an out-of-range window");
        return w;
    }
    }
    return 1;
}

UtilitySchedule::UtilitySchedule(std::vector<UtilityProfile> seq) : profiles_(std::move(seq)) {
    if (profiles_.empty()) throw InputError("utility schedule is empty");
    for (const auto &p : profiles_)
        if (p.size() != profiles_.front().size()) throw InputError("utility profiles differ in size");
}

DelayModel DelayModel::fixed(std::size_t k) {
    DelayModel d;
    d.kind_ = k == 0 ? Kind::None : Kind::Fixed;
    d.k_ = k;
    return d;
}

DelayModel DelayModel::uniform(std::size_t k, CounterRng rng) {
    DelayModel d;
    d.kind_ = Kind::Uniform;
    d.k_ = k;
    d.rng_ = rng;
    return d;
}

std::size_t DelayModel::delay(std::size_t t) const {
    switch (kind_) {
    case Kind::None:
        return 0;
    case Kind::Fixed:
        return k_;
    case Kind::Uniform:
        return static_cast<std::size_t>(mix64(rng_.at(t)) % (k_ + 1));
    }
    return 0;
}

double marginal_payoff(std::span<const double> p_by_rank, std::span<const double> r, const UtilityProfile &u) {
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) s += p_by_rank[u.rank(i)] * r[i];
    return s;
}

namespace {

class RegretAccountant {
  public:
    RegretAccountant(const Benchmark &b, const UtilitySchedule &u, const PayoffSource &payoffs)
        : bench_(b) {
        if (const auto *s = std::get_if<StochasticBenchmark>(&b)) {
            if (s->means.size() != u.size()) throw InputError("benchmark means have the wrong size");
            if (u.stationary()) best_ = optimal_family(u.at(1), s->means).representative;
        } else {
            const auto &a = std::get<AdversarialBenchmark>(b);
            if (!payoffs.is_tape()) throw InputError("adversarial regret needs a payoff tape");
            if (a.q.size() != u.size() || a.p_star.size() != u.size())
                throw InputError("adversarial benchmark has the wrong size");
        }
    }

    double operator()(std::size_t t, const Permutation &perm, const UtilityProfile &u, std::size_t window,
                      std::size_t selected, const PayoffSource &payoffs) const {
        if (const auto *s = std::get_if<StochasticBenchmark>(&bench_)) {
            const Permutation best = best_ ? *best_ : optimal_family(u, s->means).representative;
            return s->means[user_select(best, u, window)] - s->means[selected];
        }
        const auto &a = std::get<AdversarialBenchmark>(bench_);
        const auto row = payoffs.tape().row(t);
        double played = 0.0;
        for (std::size_t w = 1; w <= a.q.size(); ++w)
            if (a.q[w - 1] > 0.0) played += a.q[w - 1] * row[user_select(perm, u, w)];
        return marginal_payoff(a.p_star, row, u) - played;
    }

  private:
    const Benchmark &bench_;
    std::optional<Permutation> best_;
};

}  // namespace

EpisodeResult run_episode(Policy &policy, const UtilitySchedule &utilities, PayoffSource &payoffs,
                          const WindowSource &windows, const Benchmark &benchmark, const EpisodeOptions &opts) {
    const std::size_t n = utilities.size();
    if (payoffs.size() != n || windows.size() != n) throw InputError("episode components disagree on n");
    const RegretAccountant regret(benchmark, utilities, payoffs);

    EpisodeResult out;
    std::vector<WindowRecord> past;
    past.reserve(opts.horizon);
    // arrival trial -> (origin trial, item, payoff); std::map keeps origin order.
    std::map<std::size_t, std::vector<WindowRecord>> in_flight;

    for (std::size_t t = 1; t <= opts.horizon; ++t) {
        const UtilityProfile &u = utilities.at(t);
        const std::size_t w = windows.draw(t, past);
        Permutation perm = policy.act(t, u);
        if (perm.size() != n) throw InputError("policy returned a permutation of the wrong size");
        const std::size_t y = user_select(perm, u, w);
        const double r = payoffs.draw(y, t);
        const double inst = regret(t, perm, u, w, y, payoffs);
        out.trace.append(t, std::move(perm), w, y, r, inst);
        past.push_back({t, w, y, r});
        policy.observe_selection(t, y);

        in_flight[t + opts.delay.delay(t)].push_back({t, w, y, r});
        if (auto it = in_flight.find(t); it != in_flight.end()) {
            auto &arrivals = it->second;
            std::sort(arrivals.begin(), arrivals.end(), [](const WindowRecord &a, const WindowRecord &b) {
                return a.t != b.t ? a.t < b.t : a.selected < b.selected;
            });
            for (const auto &rec : arrivals) {
                policy.feed(rec.t, rec.selected, rec.payoff);
                ++out.delivered;
            }
            in_flight.erase(it);
        }
        if (opts.on_trial_end) opts.on_trial_end(t, policy);
    }
    for (const auto &[arrival, recs] : in_flight) out.undelivered += recs.size();
    return out;
}

}  // namespace rankbandit
