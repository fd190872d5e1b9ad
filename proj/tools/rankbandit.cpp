#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "rankbandit/harness.hpp"
#include "rankbandit/io.hpp"
#include "rankbandit/polytope.hpp"

using namespace rankbandit;

namespace {

int cmd_run(const std::string &config, const std::optional<std::uint64_t> &seed, const std::string &policy,
            const std::string &delay, const std::string &estimate, const std::string &output) {
    ExperimentConfig cfg = load_config(config);
    if (seed) cfg.seed = *seed;
    if (!policy.empty()) {
        cfg.policy.name = policy;
        if (policy != "elim" && policy != "eps-greedy" && policy != "osmd")
            throw ConfigError("policy: expected one of elim, eps-greedy, osmd");
    }
    if (!delay.empty()) cfg.delay = parse_delay(delay);
    if (!estimate.empty()) cfg.estimate = parse_estimate(estimate);
    if (!output.empty()) cfg.output = output;
    if (cfg.output.empty()) cfg.output = "results";

    const ExperimentResult res = run_experiment(cfg);
    write_outputs(cfg, res);
    const auto &last = res.report.checkpoints.back();
    std::cout << res.report.policy << " n=" << cfg.n << " T=" << cfg.horizon << " replications=" << cfg.replications
              << " regret(T)=" << last.mean << " +/- " << last.se << "\nwrote " << cfg.output.string() << '\n';
    return 0;
}

int cmd_decompose(const std::string &path) {
    const Matrix P = read_matrix(path);
    const Decomposition d = rfsm_decompose(P);
    write_decomposition(std::cout, d);
    return 0;
}

int cmd_check(const std::string &path) {
    const Matrix P = read_matrix(path);
    const AdmissibilityReport rep = check_admissible(P);
    if (rep.admissible) {
        std::cout << "admissible\n";
        return 0;
    }
    for (const auto &v : rep.violations) std::cout << v.describe() << '\n';
    return 1;
}

int cmd_summarize(const std::string &dir) {
    std::vector<std::filesystem::path> files;
    for (std::size_t r = 0;; ++r) {
        auto f = std::filesystem::path(dir) / ("trace_" + std::to_string(r) + ".csv");
        if (!std::filesystem::exists(f)) break;
        files.push_back(f);
    }
    if (files.empty()) throw InputError("summarize: no trace_<r>.csv files in " + dir);
    std::vector<std::size_t> checkpoints;
    {
        std::ifstream in(std::filesystem::path(dir) / "checkpoints.csv");
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line))
            if (!line.empty()) checkpoints.push_back(std::stoull(line.substr(0, line.find(','))));
    }
    if (checkpoints.empty()) {
        std::ifstream in(files.front());
        checkpoints = default_checkpoints(read_trace_csv(in).size());
    }
    std::cout << "t,mean,se\n";
    for (const auto &c : summarize_traces(files, checkpoints))
        std::cout << c.t << ',' << format_real(c.mean) << ',' << format_real(c.se) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Ranking under position-biased attention windows: simulations and tools"};
    app.require_subcommand(1);

    std::string config, policy, delay, estimate, output, matrix, dir;
    std::optional<std::uint64_t> seed;

    auto *run = app.add_subcommand("run", "Run an experiment described by a JSON config");
    run->add_option("config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "Override the master seed");
    run->add_option("--policy", policy, "Override the policy")->check(CLI::IsMember({"elim", "eps-greedy", "osmd"}));
    run->add_option("--delay", delay, "none, fixed:k or uniform:0..k");
    run->add_option("--estimate", estimate, "Utility estimation burn-in")->check(CLI::IsMember({"none", "sort", "social"}));
    run->add_option("--output", output, "Output directory");

    auto *dec = app.add_subcommand("decompose", "Decompose an admissible matrix into weighted permutations");
    dec->add_option("matrix", matrix, "Matrix file (JSON or CSV)")->required()->check(CLI::ExistingFile);

    auto *chk = app.add_subcommand("check", "Check membership in the admissible polytope");
    chk->add_option("matrix", matrix, "Matrix file (JSON or CSV)")->required()->check(CLI::ExistingFile);

    auto *bnd = app.add_subcommand("bound", "Print theoretical regret bounds for a config");
    bnd->add_option("config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);

    auto *sum = app.add_subcommand("summarize", "Recompute checkpoint statistics from stored traces");
    sum->add_option("dir", dir, "Output directory of a previous run")->required()->check(CLI::ExistingDirectory);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(config, seed, policy, delay, estimate, output);
        if (*dec) return cmd_decompose(matrix);
        if (*chk) return cmd_check(matrix);
        if (*bnd) {
            std::cout << bound_report(load_config(config)) << '\n';
            return 0;
        }
        if (*sum) return cmd_summarize(dir);
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
