#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rankbandit/environment.hpp"
#include "rankbandit/osmd.hpp"

namespace rankbandit {

/// Invalid experiment configuration; the message starts with the field path.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct PolicySpec {
    std::string name = "elim";  // elim | eps-greedy | osmd
    double delta = 0.01;
    double c = 1.0;
    bool known_horizon = true;
    std::optional<double> eta;
    double loss_offset = 1.0;
    WitnessMethod witness = WitnessMethod::LinearProgram;
};

struct PayoffSpec {
    enum class Kind { Gaussian, Bernoulli, File };
    Kind kind = Kind::Gaussian;
    std::vector<double> means;
    std::vector<double> probs;
    std::filesystem::path path;
};

struct WindowSpec {
    enum class Kind { Multinomial, Schedule, Blocks };
    Kind kind = Kind::Multinomial;
    std::vector<double> q;
    std::vector<std::size_t> schedule;
};

struct DelaySpec {
    DelayModel::Kind kind = DelayModel::Kind::None;
    std::size_t k = 0;
};

/// "none", "fixed:k" or "uniform:0..k".
DelaySpec parse_delay(const std::string &text);
std::string to_string(const DelaySpec &d);

enum class DelayWrapper { Auto, None, Queue, Pool };
enum class EstimateMode { None, Sort, Social };

struct ExperimentConfig {
    std::size_t n = 0;
    std::vector<std::vector<double>> utilities;  // one profile, or a cycled schedule
    PayoffSpec payoff;
    WindowSpec window;
    std::uint64_t seed = 0;
    std::size_t horizon = 0;
    std::size_t replications = 1;
    PolicySpec policy;
    DelaySpec delay;
    DelayWrapper wrapper = DelayWrapper::Auto;
    EstimateMode estimate = EstimateMode::None;
    std::size_t estimate_cap = 0;  // 0 picks the default cap
    std::vector<std::size_t> checkpoints;
    std::filesystem::path output;
    bool write_traces = true;
};

ExperimentConfig parse_config(const std::string &json_text, const std::filesystem::path &base_dir = {});
ExperimentConfig load_config(const std::filesystem::path &path);
std::string estimate_name(EstimateMode m);
EstimateMode parse_estimate(const std::string &s);

/// Powers of ten below T, then T.
std::vector<std::size_t> default_checkpoints(std::size_t horizon);

struct HindsightOptimum {
    std::vector<double> p;  // marginal over utility ranks
    double value = 0.0;     // total payoff of p over the tape
    Matrix P;               // admissible witness with Pq = p
};

/// Best fixed admissible marginal for the summed payoffs, by linear
/// programming over the selection-matrix description.
HindsightOptimum best_fixed_hindsight(const PayoffTape &tape, std::span<const double> q,
                                      const UtilitySchedule &utilities);

struct ReplicationSummary {
    std::size_t replication = 0;
    double final_regret = 0.0;
    std::vector<double> checkpoint_regret;
    double total_payoff = 0.0;
    std::optional<double> hindsight_value;
    std::size_t estimation_trials = 0;
    bool estimation_ok = true;
    std::size_t max_pool = 0;
    std::size_t undelivered = 0;
};

struct CheckpointStat {
    std::size_t t = 0;
    double mean = 0.0;
    double se = 0.0;
};

struct ExperimentReport {
    std::string policy;
    std::size_t n = 0, horizon = 0, replications = 0;
    std::uint64_t seed = 0;
    std::string regime;  // stochastic | adversarial
    std::vector<CheckpointStat> checkpoints;
    std::vector<ReplicationSummary> runs;
    std::optional<double> elimination_bound;  // stochastic high-probability bound
    double osmd_bound = 0.0;                  // 2 sqrt(2 T n)

    std::string to_json() const;
};

struct ExperimentResult {
    ExperimentReport report;
    std::vector<RegretTrace> traces;  // indexed by replication
};

/// Number of worker threads: RANKBANDIT_WORKERS if set, else hardware concurrency.
std::size_t worker_count();

ExperimentResult run_experiment(const ExperimentConfig &cfg);

/// Writes report.json, checkpoints.csv and (optionally) one trace CSV per replication.
void write_outputs(const ExperimentConfig &cfg, const ExperimentResult &res);

/// Recomputes checkpoint statistics from trace CSV files.
std::vector<CheckpointStat> summarize_traces(const std::vector<std::filesystem::path> &files,
                                             const std::vector<std::size_t> &checkpoints);
std::vector<CheckpointStat> summarize(const std::vector<std::vector<double>> &per_run_checkpoint_regret,
                                      const std::vector<std::size_t> &checkpoints);

/// Bound values reported for a config, as JSON text.
std::string bound_report(const ExperimentConfig &cfg);

}  // namespace rankbandit
