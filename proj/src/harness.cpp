#include "rankbandit/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "rankbandit/delayed.hpp"
#include "rankbandit/elimination.hpp"
#include "rankbandit/estimation.hpp"
#include "rankbandit/exploration.hpp"
#include "rankbandit/io.hpp"
#include "rankbandit/polytope.hpp"

namespace rankbandit {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string &path, const std::string &msg) { throw ConfigError(path + ": " + msg); }

double number(const json &j, const std::string &path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

std::size_t count(const json &j, const std::string &path) {
    if (!j.is_number_integer() && !(j.is_number() && j.get<double>() == std::floor(j.get<double>())))
        fail(path, "expected a non-negative integer");
    const double v = j.get<double>();
    if (v < 0) fail(path, "expected a non-negative integer");
    return static_cast<std::size_t>(v);
}

std::vector<double> numbers(const json &j, const std::string &path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t k = 0; k < j.size(); ++k) out.push_back(number(j[k], path + "[" + std::to_string(k) + "]"));
    return out;
}

std::string text(const json &j, const std::string &path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

void expect_length(std::size_t got, std::size_t n, const std::string &path) {
    if (got != n) fail(path, "expected " + std::to_string(n) + " entries, got " + std::to_string(got));
}

void check_distribution(const std::vector<double> &q, const std::string &path) {
    double s = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) {
        if (!(q[k] >= 0.0)) fail(path + "[" + std::to_string(k) + "]", "must be non-negative");
        s += q[k];
    }
    if (std::abs(s - 1.0) > 1e-12) fail(path, "must sum to 1");
}

PolicySpec parse_policy(const json &j) {
    PolicySpec p;
    if (j.is_string()) {
        p.name = j.get<std::string>();
    } else if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            const std::string key = it.key(), path = "policy." + it.key();
            if (key == "name") p.name = text(*it, path);
            else if (key == "delta") p.delta = number(*it, path);
            else if (key == "c") p.c = number(*it, path);
            else if (key == "known_horizon") {
                if (!it->is_boolean()) fail(path, "expected true or false");
                p.known_horizon = it->get<bool>();
            } else if (key == "eta") p.eta = number(*it, path);
            else if (key == "loss_offset") p.loss_offset = number(*it, path);
            else if (key == "witness") {
                const std::string w = text(*it, path);
                if (w == "lp") p.witness = WitnessMethod::LinearProgram;
                else if (w == "coupling") p.witness = WitnessMethod::Coupling;
                else fail(path, "expected \"lp\" or \"coupling\"");
            } else fail(path, "unknown field");
        }
    } else {
        fail("policy", "expected a name or an object");
    }
    if (p.name != "elim" && p.name != "eps-greedy" && p.name != "osmd")
        fail("policy.name", "expected one of elim, eps-greedy, osmd");
    if (!(p.delta > 0.0 && p.delta <= 1.0)) fail("policy.delta", "must lie in (0, 1]");
    if (!(p.c > 0.0)) fail("policy.c", "must be positive");
    if (p.eta && !(*p.eta > 0.0)) fail("policy.eta", "must be positive");
    return p;
}

}  // namespace

DelaySpec parse_delay(const std::string &s) {
    DelaySpec d;
    auto parse_k = [&](const std::string &digits) {
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
            throw ConfigError("delay: expected none, fixed:k or uniform:0..k, got '" + s + "'");
        return static_cast<std::size_t>(std::stoull(digits));
    };
    if (s == "none") return d;
    if (s.rfind("fixed:", 0) == 0) {
        d.k = parse_k(s.substr(6));
        d.kind = d.k == 0 ? DelayModel::Kind::None : DelayModel::Kind::Fixed;
        return d;
    }
    if (s.rfind("uniform:0..", 0) == 0) {
        d.k = parse_k(s.substr(11));
        d.kind = DelayModel::Kind::Uniform;
        return d;
    }
    throw ConfigError("delay: expected none, fixed:k or uniform:0..k, got '" + s + "'");
}

std::string to_string(const DelaySpec &d) {
    switch (d.kind) {
    case DelayModel::Kind::None:
        return "none";
    case DelayModel::Kind::Fixed:
        return "fixed:" + std::to_string(d.k);
    case DelayModel::Kind::Uniform:
        return "uniform:0.." + std::to_string(d.k);
    }
    return "none";
}

std::string estimate_name(EstimateMode m) {
    switch (m) {
    case EstimateMode::None:
        return "none";
    case EstimateMode::Sort:
        return "sort";
    case EstimateMode::Social:
        return "social";
    }
    return "none";
}

EstimateMode parse_estimate(const std::string &s) {
    if (s == "none") return EstimateMode::None;
    if (s == "sort") return EstimateMode::Sort;
    if (s == "social") return EstimateMode::Social;
    throw ConfigError("estimate: expected none, sort or social, got '" + s + "'");
}

std::vector<std::size_t> default_checkpoints(std::size_t horizon) {
    std::vector<std::size_t> out;
    for (std::size_t c = 10; c < horizon; c *= 10) out.push_back(c);
    out.push_back(horizon);
    return out;
}

ExperimentConfig parse_config(const std::string &json_text, const std::filesystem::path &base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception &e) {
        throw ConfigError(std::string("config: invalid JSON (") + e.what() + ")");
    }
    if (!j.is_object()) fail("config", "expected a JSON object");

    static const std::vector<std::string> known{"n",     "utilities", "utility_schedule", "means",    "payoff_file",
                                                "payoff", "window",   "seed",             "T",        "replications",
                                                "policy", "delay",    "delay_wrapper",    "estimate", "estimate_cap",
                                                "checkpoints", "output", "write_traces",  "rank_reduce"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(known.begin(), known.end(), it.key()) == known.end()) fail(it.key(), "unknown field");

    ExperimentConfig cfg;
    if (!j.contains("n")) fail("n", "required");
    cfg.n = count(j["n"], "n");
    if (cfg.n == 0) fail("n", "must be positive");
    const std::size_t n = cfg.n;

    const bool reduce = j.contains("rank_reduce") && j["rank_reduce"].is_boolean() && j["rank_reduce"].get<bool>();
    if (j.contains("utilities") == j.contains("utility_schedule"))
        fail("utilities", "give exactly one of utilities or utility_schedule");
    if (j.contains("utilities")) {
        auto u = numbers(j["utilities"], "utilities");
        expect_length(u.size(), n, "utilities");
        try {
            UtilityProfile check(u);
        } catch (const InputError &e) {
            fail("utilities", e.what());
        }
        cfg.utilities.push_back(std::move(u));
    } else {
        const json &sched = j["utility_schedule"];
        if (!sched.is_array() || sched.empty()) fail("utility_schedule", "expected a non-empty array of profiles");
        for (std::size_t k = 0; k < sched.size(); ++k) {
            const std::string path = "utility_schedule[" + std::to_string(k) + "]";
            auto u = numbers(sched[k], path);
            expect_length(u.size(), n, path);
            try {
                if (reduce) u = rank_reduce(u);
                UtilityRelabel::from_rank_utilities(u);
            } catch (const InputError &e) {
                fail(path, e.what());
            }
            cfg.utilities.push_back(std::move(u));
        }
    }

    const int payoff_fields = int(j.contains("means")) + int(j.contains("payoff_file")) + int(j.contains("payoff"));
    if (payoff_fields != 1) fail("means", "give exactly one of means, payoff_file or payoff");
    if (j.contains("means")) {
        cfg.payoff.kind = PayoffSpec::Kind::Gaussian;
        cfg.payoff.means = numbers(j["means"], "means");
        expect_length(cfg.payoff.means.size(), n, "means");
    } else if (j.contains("payoff_file")) {
        cfg.payoff.kind = PayoffSpec::Kind::File;
        cfg.payoff.path = base_dir / text(j["payoff_file"], "payoff_file");
    } else {
        const json &p = j["payoff"];
        if (!p.is_object() || !p.contains("type")) fail("payoff.type", "required");
        const std::string type = text(p["type"], "payoff.type");
        if (type == "gaussian") {
            cfg.payoff.kind = PayoffSpec::Kind::Gaussian;
            if (!p.contains("means")) fail("payoff.means", "required");
            cfg.payoff.means = numbers(p["means"], "payoff.means");
            expect_length(cfg.payoff.means.size(), n, "payoff.means");
        } else if (type == "bernoulli") {
            cfg.payoff.kind = PayoffSpec::Kind::Bernoulli;
            if (!p.contains("probs")) fail("payoff.probs", "required");
            cfg.payoff.probs = numbers(p["probs"], "payoff.probs");
            expect_length(cfg.payoff.probs.size(), n, "payoff.probs");
            for (std::size_t k = 0; k < n; ++k)
                if (!(cfg.payoff.probs[k] >= 0.0 && cfg.payoff.probs[k] <= 1.0))
                    fail("payoff.probs[" + std::to_string(k) + "]", "must lie in [0, 1]");
        } else if (type == "file") {
            cfg.payoff.kind = PayoffSpec::Kind::File;
            if (!p.contains("path")) fail("payoff.path", "required");
            cfg.payoff.path = base_dir / text(p["path"], "payoff.path");
        } else {
            fail("payoff.type", "expected gaussian, bernoulli or file");
        }
    }

    if (!j.contains("window")) fail("window", "required");
    {
        const json &w = j["window"];
        if (!w.is_object() || !w.contains("type")) fail("window.type", "required");
        const std::string type = text(w["type"], "window.type");
        if (type == "multinomial") {
            cfg.window.kind = WindowSpec::Kind::Multinomial;
            if (!w.contains("q")) fail("window.q", "required");
            cfg.window.q = numbers(w["q"], "window.q");
            expect_length(cfg.window.q.size(), n, "window.q");
            check_distribution(cfg.window.q, "window.q");
        } else if (type == "schedule") {
            cfg.window.kind = WindowSpec::Kind::Schedule;
            if (!w.contains("schedule") || !w["schedule"].is_array()) fail("window.schedule", "expected an array");
            for (std::size_t k = 0; k < w["schedule"].size(); ++k) {
                const std::string path = "window.schedule[" + std::to_string(k) + "]";
                const std::size_t v = count(w["schedule"][k], path);
                if (v < 1 || v > n) fail(path, "window lengths must lie in [1, n]");
                cfg.window.schedule.push_back(v);
            }
        } else if (type == "blocks") {
            cfg.window.kind = WindowSpec::Kind::Blocks;
        } else {
            fail("window.type", "expected multinomial, schedule or blocks");
        }
    }

    if (j.contains("seed")) cfg.seed = static_cast<std::uint64_t>(count(j["seed"], "seed"));
    if (!j.contains("T")) fail("T", "required");
    cfg.horizon = count(j["T"], "T");
    if (cfg.horizon == 0) fail("T", "must be positive");
    if (j.contains("replications")) cfg.replications = count(j["replications"], "replications");
    if (cfg.replications == 0) fail("replications", "must be positive");
    if (j.contains("policy")) cfg.policy = parse_policy(j["policy"]);
    if (j.contains("delay")) cfg.delay = parse_delay(text(j["delay"], "delay"));
    if (j.contains("delay_wrapper")) {
        const std::string w = text(j["delay_wrapper"], "delay_wrapper");
        if (w == "auto") cfg.wrapper = DelayWrapper::Auto;
        else if (w == "none") cfg.wrapper = DelayWrapper::None;
        else if (w == "qpmd") cfg.wrapper = DelayWrapper::Queue;
        else if (w == "bold") cfg.wrapper = DelayWrapper::Pool;
        else fail("delay_wrapper", "expected auto, none, qpmd or bold");
    }
    if (j.contains("estimate")) cfg.estimate = parse_estimate(text(j["estimate"], "estimate"));
    if (j.contains("estimate_cap")) cfg.estimate_cap = count(j["estimate_cap"], "estimate_cap");
    if (j.contains("checkpoints")) {
        const json &c = j["checkpoints"];
        if (!c.is_array()) fail("checkpoints", "expected an array");
        for (std::size_t k = 0; k < c.size(); ++k) {
            const std::string path = "checkpoints[" + std::to_string(k) + "]";
            const std::size_t v = count(c[k], path);
            if (v < 1 || v > cfg.horizon) fail(path, "must lie in [1, T]");
            if (!cfg.checkpoints.empty() && v <= cfg.checkpoints.back()) fail(path, "must be increasing");
            cfg.checkpoints.push_back(v);
        }
    } else {
        cfg.checkpoints = default_checkpoints(cfg.horizon);
    }
    if (j.contains("output")) cfg.output = text(j["output"], "output");
    if (j.contains("write_traces")) {
        if (!j["write_traces"].is_boolean()) fail("write_traces", "expected true or false");
        cfg.write_traces = j["write_traces"].get<bool>();
    }

    // Cross-field consistency.
    const bool adversarial = cfg.payoff.kind != PayoffSpec::Kind::Gaussian;
    const bool multinomial = cfg.window.kind == WindowSpec::Kind::Multinomial;
    if (adversarial && !multinomial) fail("window.type", "payoff tapes need multinomial windows for regret accounting");
    if ((cfg.policy.name == "eps-greedy" || cfg.policy.name == "osmd") && !multinomial)
        fail("window.type", cfg.policy.name + " needs multinomial windows");
    if (cfg.policy.name == "eps-greedy" && !is_lazy(cfg.window.q)) fail("window.q", "eps-greedy needs a lazy q");
    if (cfg.window.kind == WindowSpec::Kind::Schedule && cfg.window.schedule.size() < cfg.horizon)
        fail("window.schedule", "shorter than T");
    if (cfg.window.kind == WindowSpec::Kind::Blocks && cfg.horizon % n != 0)
        fail("T", "block windows need T divisible by n");
    if (cfg.estimate != EstimateMode::None) {
        if (cfg.utilities.size() != 1) fail("estimate", "needs stationary utilities");
        if (!multinomial || !is_lazy(cfg.window.q)) fail("estimate", "needs lazy multinomial windows");
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path());
}

HindsightOptimum best_fixed_hindsight(const PayoffTape &tape, std::span<const double> q,
                                      const UtilitySchedule &utilities) {
    const std::size_t n = tape.n;
    if (q.size() != n || utilities.size() != n) throw InputError("best_fixed_hindsight: size mismatch");
    validate_window_model(Multinomial{std::vector<double>(q.begin(), q.end())}, n);

    std::vector<double> gain(n, 0.0);  // summed payoff per utility rank
    for (std::size_t t = 1; t <= tape.horizon; ++t) {
        const UtilityProfile &u = utilities.at(t);
        for (std::size_t i = 0; i < n; ++i) gain[u.rank(i)] += tape.at(t, i);
    }

    PolytopeProgram pp = polytope_program(n);
    for (std::size_t w = 0; w < n; ++w)
        for (std::size_t i = w; i < n; ++i) pp.problem.c(static_cast<Eigen::Index>(pp.var(i, w))) = -gain[i] * q[w];
    const lp::Result res = lp::solve(pp.problem);
    if (res.status != lp::Status::Optimal)
        throw std::runtime_error(std::string("best_fixed_hindsight: linear program ") + lp::to_string(res.status));

    HindsightOptimum out;
    out.P = pp.unpack(res.x);
    out.p.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t w = 0; w < n; ++w) out.p[i] += out.P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(w)) * q[w];
    for (std::size_t i = 0; i < n; ++i) out.value += gain[i] * out.p[i];
    return out;
}

std::vector<CheckpointStat> summarize(const std::vector<std::vector<double>> &runs,
                                      const std::vector<std::size_t> &checkpoints) {
    std::vector<CheckpointStat> out;
    const double R = static_cast<double>(runs.size());
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        double mean = 0.0;
        for (const auto &r : runs) mean += r[c];
        mean /= R;
        double ss = 0.0;
        for (const auto &r : runs) ss += (r[c] - mean) * (r[c] - mean);
        const double se = runs.size() > 1 ? std::sqrt(ss / (R - 1.0) / R) : 0.0;
        out.push_back({checkpoints[c], mean, se});
    }
    return out;
}

std::vector<CheckpointStat> summarize_traces(const std::vector<std::filesystem::path> &files,
                                             const std::vector<std::size_t> &checkpoints) {
    std::vector<std::vector<double>> runs;
    for (const auto &f : files) {
        std::ifstream in(f);
        if (!in) throw InputError("cannot open " + f.string());
        const auto rows = read_trace_csv(in);
        std::vector<double> vals;
        for (std::size_t c : checkpoints) {
            if (rows.empty()) {
                vals.push_back(0.0);
                continue;
            }
            vals.push_back(rows[std::min(c, rows.size()) - 1].cum_regret);
        }
        runs.push_back(std::move(vals));
    }
    return summarize(runs, checkpoints);
}

std::size_t worker_count() {
    if (const char *env = std::getenv("RANKBANDIT_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

/// Shows the base policy estimated utilities instead of the true ones.
class EstimatedUtilityPolicy : public Policy {
  public:
    EstimatedUtilityPolicy(std::unique_ptr<Policy> base, UtilityProfile estimate)
        : base_(std::move(base)), estimate_(std::move(estimate)) {}
    std::string name() const override { return base_->name(); }
    Permutation act(std::size_t t, const UtilityProfile &) override { return base_->act(t, estimate_); }
    void feed(std::size_t t, std::size_t y, double r) override { base_->feed(t, y, r); }
    void observe_selection(std::size_t t, std::size_t y) override { base_->observe_selection(t, y); }

  private:
    std::unique_ptr<Policy> base_;
    UtilityProfile estimate_;
};

PolicyFactory base_factory(const ExperimentConfig &cfg, CounterRng rng, std::size_t horizon) {
    const PolicySpec spec = cfg.policy;
    const std::size_t n = cfg.n;
    const std::vector<double> q = cfg.window.q;
    auto counter = std::make_shared<std::uint64_t>(0);
    return [=]() -> std::unique_ptr<Policy> {
        const CounterRng inst_rng = rng.split((*counter)++);
        if (spec.name == "elim") return std::make_unique<EliminationRanker>(n, spec.delta);
        if (spec.name == "eps-greedy") {
            EpsilonGreedyConfig ec{q, spec.c, std::nullopt};
            if (spec.known_horizon) ec.horizon = horizon;
            return std::make_unique<EpsilonGreedyRanker>(ec, inst_rng);
        }
        BloConfig bc{q, std::nullopt, spec.eta, spec.loss_offset, spec.witness};
        if (spec.known_horizon) bc.horizon = horizon;
        return std::make_unique<BloRanker>(bc, inst_rng);
    };
}

struct Replication {
    ReplicationSummary summary;
    RegretTrace trace;
};

Replication run_replication(const ExperimentConfig &cfg, std::size_t rep, const std::optional<PayoffTape> &file_tape) {
    const std::size_t n = cfg.n, T = cfg.horizon;
    std::vector<UtilityProfile> profiles;
    for (const auto &u : cfg.utilities) profiles.emplace_back(u);
    const UtilitySchedule utilities(profiles);

    std::optional<PayoffSource> payoffs;
    switch (cfg.payoff.kind) {
    case PayoffSpec::Kind::Gaussian:
        payoffs.emplace(GaussianPayoffs{cfg.payoff.means, substream(cfg.seed, rep, Stream::Payoff)});
        break;
    case PayoffSpec::Kind::Bernoulli:
        payoffs.emplace(bernoulli_tape(cfg.payoff.probs, T, substream(cfg.seed, rep, Stream::Tape)));
        break;
    case PayoffSpec::Kind::File:
        payoffs.emplace(*file_tape);
        break;
    }

    WindowSource windows = [&] {
        switch (cfg.window.kind) {
        case WindowSpec::Kind::Multinomial:
            return WindowSource::multinomial(cfg.window.q, substream(cfg.seed, rep, Stream::Window));
        case WindowSpec::Kind::Schedule:
            return WindowSource::schedule(cfg.window.schedule, n);
        case WindowSpec::Kind::Blocks:
            break;
        }
        return WindowSource::lower_bound_blocks(n, T);
    }();

    Replication out;
    out.summary.replication = rep;
    Benchmark bench;
    if (payoffs->is_tape()) {
        const HindsightOptimum opt = best_fixed_hindsight(payoffs->tape(), cfg.window.q, utilities);
        bench = AdversarialBenchmark{cfg.window.q, opt.p};
        out.summary.hindsight_value = opt.value;
    } else {
        bench = StochasticBenchmark{cfg.payoff.means};
    }

    const std::size_t tau = cfg.delay.kind == DelayModel::Kind::None ? 0 : cfg.delay.k;
    DelayWrapper wrapper = cfg.wrapper;
    if (tau == 0) wrapper = DelayWrapper::None;
    if (wrapper == DelayWrapper::Auto) wrapper = cfg.policy.name == "elim" ? DelayWrapper::Queue : DelayWrapper::Pool;

    const CounterRng policy_rng = substream(cfg.seed, rep, Stream::Policy);
    std::unique_ptr<Policy> policy;
    PooledDelayPolicy *pool = nullptr;
    if (wrapper == DelayWrapper::Pool) {
        // Each instance sees roughly T / (tau + 1) trials.
        auto p = std::make_unique<PooledDelayPolicy>(base_factory(cfg, policy_rng, std::max<std::size_t>(1, T / (tau + 1))));
        pool = p.get();
        policy = std::move(p);
    } else {
        auto base = base_factory(cfg, policy_rng, T)();
        if (wrapper == DelayWrapper::Queue) policy = std::make_unique<QueuedDelayPolicy>(std::move(base));
        else policy = std::move(base);
    }

    if (cfg.estimate != EstimateMode::None) {
        const UtilityProfile &truth = utilities.at(1);
        const CounterRng est_rng = substream(cfg.seed, rep, Stream::User);
        UtilityProfile estimate;
        if (cfg.estimate == EstimateMode::Sort) {
            GreedyUserEnvironment env(truth, cfg.window.q, est_rng);
            const std::size_t cap = cfg.estimate_cap ? cfg.estimate_cap : sorting_trial_cap(n, T);
            try {
                const SortingResult s = estimate_order_sorting(env, cap);
                out.summary.estimation_trials = s.trials;
                estimate = s.profile();
            } catch (const EstimationBudgetError &e) {
                out.summary.estimation_trials = e.trials_used;
                out.summary.estimation_ok = false;
                std::vector<double> idx(n);
                for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<double>(i);
                estimate = UtilityProfile(idx);
            }
        } else {
            SocialConfig sc;
            sc.q = cfg.window.q;
            sc.max_trials = cfg.estimate_cap ? cfg.estimate_cap : social_trial_cap(n, T, min_utility_gap(truth));
            const SocialResult s = estimate_social_learning(truth, sc, est_rng);
            out.summary.estimation_trials = s.trials;
            out.summary.estimation_ok = s.separated;
            const auto asc = s.belief.ascending();
            std::vector<double> u(n);
            for (std::size_t r = 0; r < n; ++r) u[asc[r]] = static_cast<double>(r + 1);
            estimate = UtilityProfile(u);
        }
        policy = std::make_unique<EstimatedUtilityPolicy>(std::move(policy), estimate);
    }

    EpisodeOptions opts;
    opts.horizon = T;
    switch (cfg.delay.kind) {
    case DelayModel::Kind::None:
        break;
    case DelayModel::Kind::Fixed:
        opts.delay = DelayModel::fixed(cfg.delay.k);
        break;
    case DelayModel::Kind::Uniform:
        opts.delay = DelayModel::uniform(cfg.delay.k, substream(cfg.seed, rep, Stream::Delay));
        break;
    }
    EpisodeResult ep = run_episode(*policy, utilities, *payoffs, windows, bench, opts);

    out.summary.final_regret = ep.trace.cumulative();
    for (std::size_t c : cfg.checkpoints) out.summary.checkpoint_regret.push_back(ep.trace.cumulative_at(c));
    for (const auto &r : ep.trace.records()) out.summary.total_payoff += r.payoff;
    out.summary.undelivered = ep.undelivered;
    out.summary.max_pool = pool ? pool->pool_size() : 1;
    out.trace = std::move(ep.trace);
    return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig &cfg) {
    std::optional<PayoffTape> file_tape;
    if (cfg.payoff.kind == PayoffSpec::Kind::File) {
        file_tape = read_tape(cfg.payoff.path);
        if (file_tape->n != cfg.n) throw ConfigError("payoff_file: tape has " + std::to_string(file_tape->n) + " items, n is " + std::to_string(cfg.n));
        if (file_tape->horizon < cfg.horizon) throw ConfigError("payoff_file: tape shorter than T");
    }

    std::vector<std::optional<Replication>> results(cfg.replications);
    std::vector<std::exception_ptr> errors(cfg.replications);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t r; (r = next.fetch_add(1)) < cfg.replications;) {
            try {
                results[r] = run_replication(cfg, r, file_tape);
            } catch (...) {
                errors[r] = std::current_exception();
            }
        }
    };
    const std::size_t workers = std::min(worker_count(), cfg.replications);
    std::vector<std::thread> threads;
    for (std::size_t k = 1; k < workers; ++k) threads.emplace_back(work);
    work();
    for (auto &t : threads) t.join();
    for (const auto &e : errors)
        if (e) std::rethrow_exception(e);

    ExperimentResult res;
    ExperimentReport &rep = res.report;
    rep.policy = cfg.policy.name;
    rep.n = cfg.n;
    rep.horizon = cfg.horizon;
    rep.replications = cfg.replications;
    rep.seed = cfg.seed;
    rep.regime = cfg.payoff.kind == PayoffSpec::Kind::Gaussian ? "stochastic" : "adversarial";
    std::vector<std::vector<double>> per_run;
    for (auto &r : results) {
        per_run.push_back(r->summary.checkpoint_regret);
        rep.runs.push_back(r->summary);
        res.traces.push_back(std::move(r->trace));
    }
    rep.checkpoints = summarize(per_run, cfg.checkpoints);
    rep.osmd_bound = 2.0 * std::sqrt(2.0 * static_cast<double>(cfg.horizon) * static_cast<double>(cfg.n));
    if (cfg.payoff.kind == PayoffSpec::Kind::Gaussian && cfg.utilities.size() == 1) {
        try {
            rep.elimination_bound = regret_upper_bound(Instance(UtilityProfile(cfg.utilities[0]), cfg.payoff.means),
                                                       cfg.horizon, cfg.policy.delta);
        } catch (const DegenerateInstanceError &) {
        }
    }
    return res;
}

std::string ExperimentReport::to_json() const {
    json j;
    j["policy"] = policy;
    j["n"] = n;
    j["T"] = horizon;
    j["replications"] = replications;
    j["seed"] = seed;
    j["regime"] = regime;
    j["checkpoints"] = json::array();
    for (const auto &c : checkpoints) j["checkpoints"].push_back({{"t", c.t}, {"mean", c.mean}, {"se", c.se}});
    j["bounds"]["regret_upper_bound"] = elimination_bound ? json(*elimination_bound) : json(nullptr);
    j["bounds"]["osmd_bound"] = osmd_bound;
    j["runs"] = json::array();
    for (const auto &r : runs) {
        json jr;
        jr["replication"] = r.replication;
        jr["final_regret"] = r.final_regret;
        jr["checkpoint_regret"] = r.checkpoint_regret;
        jr["total_payoff"] = r.total_payoff;
        jr["hindsight_value"] = r.hindsight_value ? json(*r.hindsight_value) : json(nullptr);
        jr["estimation_trials"] = r.estimation_trials;
        jr["estimation_ok"] = r.estimation_ok;
        jr["max_pool"] = r.max_pool;
        jr["undelivered"] = r.undelivered;
        j["runs"].push_back(jr);
    }
    return j.dump(2);
}

void write_outputs(const ExperimentConfig &cfg, const ExperimentResult &res) {
    if (cfg.output.empty()) return;
    std::filesystem::create_directories(cfg.output);
    {
        std::ofstream out(cfg.output / "report.json");
        out << res.report.to_json() << '\n';
    }
    {
        std::ofstream out(cfg.output / "checkpoints.csv");
        out << "t,mean,se\n";
        for (const auto &c : res.report.checkpoints)
            out << c.t << ',' << format_real(c.mean) << ',' << format_real(c.se) << '\n';
    }
    if (cfg.write_traces)
        for (std::size_t r = 0; r < res.traces.size(); ++r) {
            std::ofstream out(cfg.output / ("trace_" + std::to_string(r) + ".csv"));
            write_trace_csv(out, res.traces[r]);
        }
}

std::string bound_report(const ExperimentConfig &cfg) {
    json j;
    j["n"] = cfg.n;
    j["T"] = cfg.horizon;
    j["delta"] = cfg.policy.delta;
    j["osmd_bound"] = 2.0 * std::sqrt(2.0 * static_cast<double>(cfg.horizon) * static_cast<double>(cfg.n));
    j["regret_upper_bound"] = nullptr;
    if (cfg.payoff.kind == PayoffSpec::Kind::Gaussian && cfg.utilities.size() == 1) {
        try {
            j["regret_upper_bound"] = regret_upper_bound(Instance(UtilityProfile(cfg.utilities[0]), cfg.payoff.means),
                                                         cfg.horizon, cfg.policy.delta);
        } catch (const DegenerateInstanceError &e) {
            j["regret_upper_bound_error"] = e.what();
        }
    }
    return j.dump(2);
}

}  // namespace rankbandit
