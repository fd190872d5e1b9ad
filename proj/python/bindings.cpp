#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "rankbandit/elimination.hpp"
#include "rankbandit/exploration.hpp"
#include "rankbandit/harness.hpp"
#include "rankbandit/polytope.hpp"

namespace py = pybind11;
using namespace rankbandit;

namespace {

std::vector<std::size_t> order_of(const Permutation &p) { return p.order(); }

py::dict admissibility(const Matrix &P, double tol) {
    const auto rep = check_admissible(P, tol);
    py::list violations;
    for (const auto &v : rep.violations) violations.append(py::make_tuple(to_string(v.constraint), v.describe()));
    py::dict d;
    d["admissible"] = rep.admissible;
    d["violations"] = violations;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Ranking with position-biased attention windows";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<InfeasibleTargetError>(m, "InfeasibleTargetError", PyExc_ValueError);

    m.def(
        "user_select",
        [](const std::vector<std::size_t> &order, const std::vector<double> &u, std::size_t w) {
            return user_select(Permutation(order), UtilityProfile(u), w);
        },
        py::arg("order"), py::arg("utilities"), py::arg("window"));
    m.def(
        "optimal_permutation",
        [](const std::vector<double> &u, const std::vector<double> &mu) {
            return order_of(optimal_family(UtilityProfile(u), mu).representative);
        },
        py::arg("utilities"), py::arg("means"), "A representative optimal permutation (item indices, top first).");
    m.def(
        "selection_matrix", [](const std::vector<std::size_t> &ranked) { return selection_matrix(Permutation(ranked)); },
        py::arg("ranked"), "Selection matrix of a permutation written in utility-rank labels.");
    m.def("check_admissible", &admissibility, py::arg("P"), py::arg("tol") = kMembershipTol);
    m.def(
        "decompose",
        [](const Matrix &P) {
            py::list out;
            for (const auto &t : rfsm_decompose(P).terms) out.append(py::make_tuple(t.weight, t.permutation.order()));
            return out;
        },
        py::arg("P"), "Weighted permutations (rank labels) whose selection matrices recombine to P.");
    m.def(
        "feasible_matrix", [](const std::vector<double> &p, const std::vector<double> &q) { return feasible_matrix(p, q); },
        py::arg("p"), py::arg("q"));
    m.def(
        "tail_dominates",
        [](const std::vector<double> &p, const std::vector<double> &q) { return tail_dominates(p, q); }, py::arg("p"),
        py::arg("q"));
    m.def(
        "lazy_alpha", [](const std::vector<double> &q) { return lazy_alpha(q); }, py::arg("q"));
    m.def(
        "regret_upper_bound",
        [](const std::vector<double> &u, const std::vector<double> &mu, std::size_t T, double delta) {
            return regret_upper_bound(Instance(UtilityProfile(u), mu), T, delta);
        },
        py::arg("utilities"), py::arg("means"), py::arg("T"), py::arg("delta"));
    m.def("inversion_budget", &inversion_budget, py::arg("gap"), py::arg("T"), py::arg("delta"), py::arg("n"));
    m.def(
        "best_fixed_hindsight",
        [](const std::vector<std::vector<double>> &tape, const std::vector<double> &q, const std::vector<double> &u) {
            if (tape.empty()) throw InputError("empty tape");
            std::vector<double> flat;
            for (const auto &row : tape) flat.insert(flat.end(), row.begin(), row.end());
            const auto opt = best_fixed_hindsight(make_tape(tape.front().size(), tape.size(), flat), q,
                                                  UtilitySchedule(UtilityProfile(u)));
            return py::make_tuple(opt.p, opt.value);
        },
        py::arg("tape"), py::arg("q"), py::arg("utilities"), "Rows of the tape are trials, columns items.");
    m.def(
        "run_experiment",
        [](const std::string &config_json, const std::string &base_dir) {
            const ExperimentConfig cfg = parse_config(config_json, base_dir);
            py::gil_scoped_release release;
            const ExperimentResult res = run_experiment(cfg);
            write_outputs(cfg, res);
            return res.report.to_json();
        },
        py::arg("config_json"), py::arg("base_dir") = "", "Runs an experiment; returns the report as JSON text.");
    m.def(
        "bound_report", [](const std::string &config_json) { return bound_report(parse_config(config_json)); },
        py::arg("config_json"));
}
