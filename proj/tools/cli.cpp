#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cdag/errors.hpp"
#include "cdag/eval.hpp"
#include "cdag/io.hpp"
#include "cdag/search.hpp"
#include "cdag/separation.hpp"
#include "cdag/simulate.hpp"

namespace cdag::cli {

namespace {

using nlohmann::json;

struct Globals {
    std::uint64_t seed = 1;
    int threads = 0;
    bool quiet = false;
};

struct SimulateArgs {
    SimConfig cfg;
    std::optional<double> edge_prob;
    std::string out_data;
    std::string out_truth;
};

struct EstimateArgs {
    std::string data;
    std::string mode = "cdag";
    int max_parents = 5;
    std::string g = "n";
    std::string out;
    std::string dump_scores;
    int restarts = 10;
};

struct CsepArgs {
    std::string graph;
    std::string a, b, c;
    bool dsep = false;
};

struct BenchmarkArgs {
    std::vector<double> thetas{0.0, 0.5, 0.99};
    std::vector<int> ps{5, 10, 15};
    std::vector<int> ns{10, 100, 1000};
    std::vector<double> probs{0.0, 0.25, 0.5, 0.75, 1.0};
    int p = 15;
    int n = 1000;
    double theta = 0.0;
    int reps = 10;
    int max_parents = 5;
    int restarts = 10;
    std::string out;
};

std::optional<double> parse_g(const std::string& text) {
    if (text == "n") return std::nullopt;
    try {
        std::size_t used = 0;
        const double g = std::stod(text, &used);
        if (used != text.size()) throw InputError("");
        return g;
    } catch (...) {
        throw InputError("--g must be 'n' or a positive number, got '" + text + "'");
    }
}

json prior_json(const GPriorConfig& prior) {
    return json{{"g", prior.g ? json(*prior.g) : json("n")}, {"max_parents", prior.max_parents}};
}

void emit(const Globals& globals, std::ostream& out, const std::string& text) {
    if (!globals.quiet) out << text << '\n';
}

int do_simulate(const Globals& globals, SimulateArgs args, std::ostream& out) {
    args.cfg.seed = globals.seed;
    args.cfg.edge_prob = args.edge_prob;
    const Simulation sim = simulate(args.cfg);
    const json meta = metadata("simulate", globals.seed,
                               {{"p", args.cfg.p},
                                {"n", args.cfg.n},
                                {"theta", args.cfg.theta},
                                {"misspec_prob", args.cfg.misspec_prob},
                                {"edge_prob", args.cfg.resolved_edge_prob()},
                                {"coef_low", args.cfg.coef_low},
                                {"coef_high", args.cfg.coef_high},
                                {"noise_sd", args.cfg.noise_sd}});
    std::ostringstream csv;
    write_dataset_csv(csv, sim.data, meta);
    write_text_file(args.out_data, csv.str());
    json truth = truth_to_json(sim.truth);
    truth["meta"] = meta;
    write_text_file(args.out_truth, truth.dump(2) + "\n");
    emit(globals, out, "wrote " + args.out_data + " and " + args.out_truth);
    return 0;
}

int do_estimate(const Globals& globals, const EstimateArgs& args, std::ostream& out) {
    std::ifstream in(args.data);
    if (!in) throw InputError("cannot open " + args.data);
    const Dataset data = read_dataset_csv(in);
    const EstimatorMode mode = parse_mode(args.mode);

    EstimateOptions options;
    options.prior.g = parse_g(args.g);
    options.prior.max_parents = args.max_parents;
    options.greedy.restarts = args.restarts;
    options.greedy.seed = globals.seed;
    options.greedy.threads = globals.threads;
    options.threads = globals.threads;

    if (!args.dump_scores.empty()) {
        const ScoreTable table = score_table(data, mode, {options.prior, options.threads});
        write_text_file(args.dump_scores, score_table_to_json(table).dump(2) + "\n");
    }
    const Estimate est = estimate(data, mode, options);

    json graph = graph_to_json(est.graph);
    graph["meta"] = metadata("estimate", globals.seed,
                             {{"mode", to_string(mode)},
                              {"prior", prior_json(options.prior)},
                              {"restarts", args.restarts},
                              {"n", data.n()},
                              {"method", to_string(est.search.method)},
                              {"optimal", est.search.optimal},
                              {"log_score", est.search.log_score}});
    if (!args.out.empty()) write_text_file(args.out, graph.dump(2) + "\n");
    out << "log_score: " << format_double(est.search.log_score) << '\n';
    emit(globals, out, "method: " + to_string(est.search.method) + (est.search.optimal ? " (optimal)" : ""));
    emit(globals, out, "edges: " + graph["edges"].dump());
    return 0;
}

int do_csep(const CsepArgs& args, std::ostream& out) {
    const json doc = read_json_file(args.graph);
    // A truth file works too; its primary graph is used.
    const Dag g = graph_from_json(doc.is_object() && !doc.contains("p") && doc.contains("g") ? doc["g"] : doc);
    Query q{parse_node_list(args.a), parse_node_list(args.b), parse_node_list(args.c)};
    const NodeSet valid = Cdag(g).primary_nodes() | Cdag(g).secondary_nodes();
    if (!(q.a | q.b | q.c).subset_of(valid)) throw InputError("query names nodes outside the graph");
    bool result;
    if (args.dsep) {
        if (!((q.a | q.b | q.c) - Cdag(g).primary_nodes()).empty())
            throw InputError("--dsep queries may only name primary nodes");
        result = d_separated(to_digraph(g), q);
    } else {
        result = c_separated(Cdag(g), q);
    }
    out << "separated: " << (result ? "true" : "false") << '\n';
    return 0;
}

BenchmarkOptions benchmark_options(const Globals& globals, const BenchmarkArgs& args) {
    BenchmarkOptions options;
    options.replicates = args.reps;
    options.seed = globals.seed;
    options.estimate.prior.max_parents = args.max_parents;
    options.estimate.greedy.restarts = args.restarts;
    options.threads = globals.threads;
    return options;
}

int do_benchmark(const Globals& globals, const BenchmarkArgs& args, std::ostream& out) {
    BenchmarkGrid grid;
    grid.thetas = args.thetas;
    grid.ps = args.ps;
    grid.ns = args.ns;
    const BenchmarkReport report = run_benchmark(grid, benchmark_options(globals, args));
    const json meta = metadata("benchmark", globals.seed,
                               {{"theta", args.thetas},
                                {"p", args.ps},
                                {"n", args.ns},
                                {"reps", args.reps},
                                {"max_parents", args.max_parents},
                                {"restarts", args.restarts}});
    std::ostringstream csv;
    write_benchmark_csv(csv, report, meta);
    if (args.out.empty()) out << csv.str();
    else {
        write_text_file(args.out, csv.str());
        emit(globals, out, "wrote " + args.out + " (" + std::to_string(report.rows.size()) + " rows)");
    }
    return 0;
}

int do_misspec(const Globals& globals, const BenchmarkArgs& args, std::ostream& out) {
    MisspecSweep sweep;
    sweep.p = args.p;
    sweep.n = args.n;
    sweep.theta = args.theta;
    sweep.misspec_probs = args.probs;
    const BenchmarkReport report = run_misspec_sweep(sweep, benchmark_options(globals, args));
    const json meta = metadata("misspec", globals.seed,
                               {{"theta", args.theta},
                                {"p", args.p},
                                {"n", args.n},
                                {"misspec_probs", args.probs},
                                {"reps", args.reps},
                                {"max_parents", args.max_parents},
                                {"restarts", args.restarts}});
    std::ostringstream csv;
    write_misspec_csv(csv, report, meta);
    if (args.out.empty()) out << csv.str();
    else {
        write_text_file(args.out, csv.str());
        emit(globals, out, "wrote " + args.out + " (" + std::to_string(report.rows.size()) + " rows)");
    }
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Causal structure estimation with conditional DAG models"};
    app.name("cdag");
    app.require_subcommand(1);
    app.fallthrough();

    Globals globals;
    app.add_option("--seed", globals.seed, "Seed for every stochastic step (recorded in outputs)")->capture_default_str();
    app.add_option("--threads", globals.threads, "Worker threads; 0 uses all cores")->capture_default_str();
    app.add_flag("--quiet", globals.quiet, "Suppress informational messages");

    SimulateArgs sim;
    auto* simulate_cmd = app.add_subcommand("simulate", "Simulate data and ground truth from a linear-Gaussian SEM");
    simulate_cmd->add_option("--p", sim.cfg.p, "Number of primary variables")->capture_default_str();
    simulate_cmd->add_option("--n", sim.cfg.n, "Number of observations")->capture_default_str();
    simulate_cmd->add_option("--theta", sim.cfg.theta, "Dependence among secondary variables in [0, 1]")->capture_default_str();
    simulate_cmd->add_option("--misspec-prob", sim.cfg.misspec_prob, "Probability of x_i -> y_j per primary edge i -> j")
        ->capture_default_str();
    simulate_cmd->add_option("--edge-prob", sim.edge_prob, "Edge probability of sampled DAGs (default 2/(p-1))");
    simulate_cmd->add_option("--coef-low", sim.cfg.coef_low, "Smallest coefficient magnitude")->capture_default_str();
    simulate_cmd->add_option("--coef-high", sim.cfg.coef_high, "Largest coefficient magnitude")->capture_default_str();
    simulate_cmd->add_option("--noise-sd", sim.cfg.noise_sd, "Noise standard deviation")->capture_default_str();
    simulate_cmd->add_option("--out-data", sim.out_data, "Dataset CSV (header y1..yp,x1..xp)")->required();
    simulate_cmd->add_option("--out-truth", sim.out_truth, "Truth JSON {g, g_prime, misspec}")->required();

    EstimateArgs est;
    auto* estimate_cmd = app.add_subcommand("estimate", "Estimate the primary DAG from a dataset CSV");
    estimate_cmd->add_option("--data", est.data, "Dataset CSV")->required();
    estimate_cmd->add_option("--mode", est.mode, "Estimator: cdag, dag or dag2")
        ->check(CLI::IsMember({"cdag", "dag", "dag2"}, CLI::ignore_case))
        ->capture_default_str();
    estimate_cmd->add_option("--max-parents", est.max_parents, "Largest parent set considered")->capture_default_str();
    estimate_cmd->add_option("--g", est.g, "g-prior scale: 'n' or a positive number")->capture_default_str();
    estimate_cmd->add_option("--out", est.out, "Graph JSON {p, edges}");
    estimate_cmd->add_option("--restarts", est.restarts, "Greedy restarts when exact search is infeasible")
        ->capture_default_str();
    estimate_cmd->add_option("--dump-scores", est.dump_scores, "Write the score table as JSON");

    CsepArgs csep;
    auto* csep_cmd = app.add_subcommand("csep", "Test c-separation in the CDAG of a graph JSON");
    csep_cmd->add_option("--graph", csep.graph, "Graph JSON {p, edges} or truth JSON")->required();
    csep_cmd->add_option("--a", csep.a, "First node set, e.g. v3 or v1,w2 (1-based)")->required();
    csep_cmd->add_option("--b", csep.b, "Second node set")->required();
    csep_cmd->add_option("--c", csep.c, "Conditioning set (may be empty)");
    csep_cmd->add_flag("--dsep", csep.dsep, "Classical d-separation in the primary DAG instead");

    BenchmarkArgs bench;
    auto* bench_cmd = app.add_subcommand("benchmark", "Simulation benchmark over theta x p x n");
    bench_cmd->add_option("--theta", bench.thetas, "Comma-separated theta values")->delimiter(',')->capture_default_str();
    bench_cmd->add_option("--p", bench.ps, "Comma-separated primary variable counts")->delimiter(',')->capture_default_str();
    bench_cmd->add_option("--n", bench.ns, "Comma-separated sample sizes")->delimiter(',')->capture_default_str();
    bench_cmd->add_option("--reps", bench.reps, "Replicates per cell")->capture_default_str();
    bench_cmd->add_option("--max-parents", bench.max_parents, "Largest parent set considered")->capture_default_str();
    bench_cmd->add_option("--restarts", bench.restarts, "Greedy restarts for DAG2")->capture_default_str();
    bench_cmd->add_option("--out", bench.out, "Report CSV (stdout when omitted)");

    BenchmarkArgs mis;
    auto* mis_cmd = app.add_subcommand("misspec", "Misspecified-edge sweep at fixed theta, p, n");
    mis_cmd->add_option("--p", mis.p, "Primary variable count")->capture_default_str();
    mis_cmd->add_option("--n", mis.n, "Sample size")->capture_default_str();
    mis_cmd->add_option("--theta", mis.theta, "Secondary dependence")->capture_default_str();
    mis_cmd->add_option("--probs", mis.probs, "Comma-separated misspecification probabilities")
        ->delimiter(',')
        ->capture_default_str();
    mis_cmd->add_option("--reps", mis.reps, "Replicates per probability")->capture_default_str();
    mis_cmd->add_option("--max-parents", mis.max_parents, "Largest parent set considered")->capture_default_str();
    mis_cmd->add_option("--restarts", mis.restarts, "Greedy restarts for DAG2")->capture_default_str();
    mis_cmd->add_option("--out", mis.out, "Report CSV (stdout when omitted)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*simulate_cmd) return do_simulate(globals, sim, out);
        if (*estimate_cmd) return do_estimate(globals, est, out);
        if (*csep_cmd) return do_csep(csep, out);
        if (*bench_cmd) return do_benchmark(globals, bench, out);
        if (*mis_cmd) return do_misspec(globals, mis, out);
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace cdag::cli
