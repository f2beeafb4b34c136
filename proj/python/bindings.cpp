#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cdag/errors.hpp"
#include "cdag/eval.hpp"
#include "cdag/search.hpp"
#include "cdag/separation.hpp"
#include "cdag/simulate.hpp"

namespace py = pybind11;
using namespace cdag;

namespace {

Dag make_dag(int p, const std::vector<Edge>& edges) { return Dag(p, edges); }

Dataset make_dataset(const Eigen::MatrixXd& y, const std::optional<Eigen::MatrixXd>& x) {
    return x ? Dataset(y, *x) : Dataset(y);
}

py::dict shd_dict(const ShdReport& r, const EdgeRecovery& e) {
    py::dict d;
    d["precision"] = e.precision();
    d["recall"] = e.recall();
    d["shd"] = r.shd;
    d["missing"] = r.missing;
    d["extra"] = r.extra;
    d["reversed"] = r.reversed;
    return d;
}

py::list rows_to_list(const BenchmarkReport& report) {
    py::list out;
    for (const auto& row : report.rows) {
        py::dict d;
        d["theta"] = row.theta;
        d["p"] = row.p;
        d["n"] = row.n;
        d["misspec_prob"] = row.misspec_prob;
        d["estimator"] = to_string(row.estimator);
        d["mean_shd"] = row.mean_shd;
        d["stderr"] = row.stderr_shd ? py::cast(*row.stderr_shd) : py::none();
        d["replicates"] = row.replicates;
        d["shd_values"] = row.shd_values;
        out.append(d);
    }
    return out;
}

BenchmarkOptions bench_options(int reps, std::uint64_t seed, int restarts, int threads) {
    BenchmarkOptions o;
    o.replicates = reps;
    o.seed = seed;
    o.estimate.greedy.restarts = restarts;
    o.threads = threads;
    return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Conditional DAG structure estimation";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    m.def(
        "simulate",
        [](int p, int n, double theta, double misspec_prob, std::uint64_t seed, std::optional<double> edge_prob) {
            SimConfig cfg;
            cfg.p = p;
            cfg.n = n;
            cfg.theta = theta;
            cfg.misspec_prob = misspec_prob;
            cfg.seed = seed;
            cfg.edge_prob = edge_prob;
            const Simulation sim = simulate(cfg);
            py::dict d;
            d["y"] = sim.data.y();
            d["x"] = sim.data.x();
            d["g"] = sim.truth.g.edges();
            d["g_prime"] = sim.truth.g_prime.edges();
            d["misspec"] = sim.truth.misspec;
            return d;
        },
        py::arg("p") = 5, py::arg("n") = 100, py::arg("theta") = 0.0, py::arg("misspec_prob") = 0.0,
        py::arg("seed") = 1, py::arg("edge_prob") = py::none(),
        "Simulate y (n x p), x (n x p) and the true graphs. Edges are 0-based (i, j) pairs.");

    m.def(
        "estimate",
        [](const Eigen::MatrixXd& y, std::optional<Eigen::MatrixXd> x, const std::string& mode,
           std::optional<double> g, int max_parents, int restarts, std::uint64_t seed, int threads) {
            EstimateOptions o;
            o.prior.g = g;
            o.prior.max_parents = max_parents;
            o.greedy.restarts = restarts;
            o.greedy.seed = seed;
            o.threads = threads;
            Estimate est;
            {
                py::gil_scoped_release release;
                est = estimate(make_dataset(y, x), parse_mode(mode), o);
            }
            py::dict d;
            d["p"] = est.graph.p();
            d["edges"] = est.graph.edges();
            d["log_score"] = est.search.log_score;
            d["method"] = to_string(est.search.method);
            d["optimal"] = est.search.optimal;
            return d;
        },
        py::arg("y"), py::arg("x") = py::none(), py::arg("mode") = "cdag", py::arg("g") = py::none(),
        py::arg("max_parents") = 5, py::arg("restarts") = 10, py::arg("seed") = 1, py::arg("threads") = 0,
        "MAP graph over the primary variables for mode 'cdag', 'dag' or 'dag2'.");

    m.def(
        "log_marginal_likelihood",
        [](const Eigen::MatrixXd& y, std::optional<Eigen::MatrixXd> x, int child, std::vector<int> parents,
           const std::string& mode, std::optional<double> g) {
            GPriorConfig cfg;
            cfg.g = g;
            return log_marginal_likelihood(make_dataset(y, x), {child, std::move(parents), parse_mode(mode)}, cfg);
        },
        py::arg("y"), py::arg("x"), py::arg("child"), py::arg("parents"), py::arg("mode") = "cdag",
        py::arg("g") = py::none());

    m.def(
        "c_separated",
        [](int p, const std::vector<Edge>& edges, const std::string& a, const std::string& b, const std::string& c) {
            return c_separated(Cdag(make_dag(p, edges)), {parse_node_list(a), parse_node_list(b), parse_node_list(c)});
        },
        py::arg("p"), py::arg("edges"), py::arg("a"), py::arg("b"), py::arg("c") = "",
        "Nodes are written v1.. and w1.. (1-based), comma separated.");

    m.def(
        "d_separated",
        [](int p, const std::vector<Edge>& edges, const std::string& a, const std::string& b, const std::string& c) {
            return d_separated(to_digraph(make_dag(p, edges)),
                               {parse_node_list(a), parse_node_list(b), parse_node_list(c)});
        },
        py::arg("p"), py::arg("edges"), py::arg("a"), py::arg("b"), py::arg("c") = "");

    m.def(
        "shd",
        [](int p, const std::vector<Edge>& estimate, const std::vector<Edge>& truth) {
            const Dag est = make_dag(p, estimate), tru = make_dag(p, truth);
            return shd_dict(shd(est, tru), edge_recovery(est, tru));
        },
        py::arg("p"), py::arg("estimate"), py::arg("truth"));

    m.def(
        "run_benchmark",
        [](std::vector<double> thetas, std::vector<int> ps, std::vector<int> ns, int reps, std::uint64_t seed,
           int restarts, int threads) {
            BenchmarkGrid grid;
            grid.thetas = std::move(thetas);
            grid.ps = std::move(ps);
            grid.ns = std::move(ns);
            BenchmarkReport report;
            {
                py::gil_scoped_release release;
                report = run_benchmark(grid, bench_options(reps, seed, restarts, threads));
            }
            return rows_to_list(report);
        },
        py::arg("thetas"), py::arg("ps"), py::arg("ns"), py::arg("reps") = 10, py::arg("seed") = 1,
        py::arg("restarts") = 10, py::arg("threads") = 0);

    m.def(
        "run_misspec_sweep",
        [](int p, int n, double theta, std::vector<double> probs, int reps, std::uint64_t seed, int restarts,
           int threads) {
            MisspecSweep sweep;
            sweep.p = p;
            sweep.n = n;
            sweep.theta = theta;
            sweep.misspec_probs = std::move(probs);
            BenchmarkReport report;
            {
                py::gil_scoped_release release;
                report = run_misspec_sweep(sweep, bench_options(reps, seed, restarts, threads));
            }
            return rows_to_list(report);
        },
        py::arg("p") = 15, py::arg("n") = 1000, py::arg("theta") = 0.0,
        py::arg("probs") = std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}, py::arg("reps") = 10, py::arg("seed") = 1,
        py::arg("restarts") = 10, py::arg("threads") = 0);
}
