#include "cdag/eval.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "cdag/errors.hpp"
#include "cdag/parallel.hpp"

namespace cdag {

namespace {

struct Cell {
    double theta;
    int p;
    int n;
    double misspec_prob;
};

std::string describe(const Cell& c, int replicate) {
    std::ostringstream os;
    os << "cell theta=" << c.theta << " p=" << c.p << " n=" << c.n << " misspec_prob=" << c.misspec_prob
       << " replicate=" << replicate << ": ";
    return os.str();
}

BenchmarkReport run_cells(const std::vector<Cell>& cells, const std::vector<EstimatorMode>& estimators,
                          const BenchmarkOptions& options) {
    if (options.replicates < 1) throw InputError("replicates must be >= 1");
    if (estimators.empty()) throw InputError("no estimators requested");
    for (const Cell& c : cells) {
        for (EstimatorMode mode : estimators) {
            const int universe = mode == EstimatorMode::Dag2 ? 2 * c.p : c.p;
            if (mode != EstimatorMode::Dag2 && universe > kMaxExactNodes)
                throw InputError("exact search is infeasible for p = " + std::to_string(c.p));
            if (universe > 64) throw InputError("p = " + std::to_string(c.p) + " is too large for " + to_string(mode));
        }
    }

    const int reps = options.replicates;
    const std::size_t tasks = cells.size() * static_cast<std::size_t>(reps);
    // results[task][estimator]
    std::vector<std::vector<int>> results(tasks, std::vector<int>(estimators.size(), 0));
    const int outer = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(resolve_threads(options.threads)), tasks));

    parallel_for(tasks, outer, [&](std::size_t task) {
        const Cell& cell = cells[task / reps];
        const int rep = static_cast<int>(task % reps);
        const std::uint64_t seed = replicate_seed(options.seed, cell.theta, cell.p, cell.n, cell.misspec_prob, rep);
        try {
            SimConfig sim = options.sim;
            sim.p = cell.p;
            sim.n = cell.n;
            sim.theta = cell.theta;
            sim.misspec_prob = cell.misspec_prob;
            sim.seed = seed;
            const Simulation s = simulate(sim);

            EstimateOptions est = options.estimate;
            est.greedy.seed = seed;
            if (outer > 1) {
                est.threads = 1;
                est.greedy.threads = 1;
            }
            for (std::size_t e = 0; e < estimators.size(); ++e)
                results[task][e] = shd(estimate(s.data, estimators[e], est).graph, s.truth.g).shd;
        } catch (const InputError& err) {
            throw InputError(describe(cell, rep) + err.what());
        } catch (const NumericError& err) {
            throw NumericError(describe(cell, rep) + err.what());
        }
    });

    BenchmarkReport report;
    report.seed = options.seed;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        for (std::size_t e = 0; e < estimators.size(); ++e) {
            BenchmarkRow row;
            row.theta = cells[c].theta;
            row.p = cells[c].p;
            row.n = cells[c].n;
            row.misspec_prob = cells[c].misspec_prob;
            row.estimator = estimators[e];
            row.replicates = reps;
            double sum = 0.0;
            for (int r = 0; r < reps; ++r) {
                const int v = results[c * reps + r][e];
                row.shd_values.push_back(v);
                sum += v;
            }
            row.mean_shd = sum / reps;
            if (reps >= 2) {
                double ss = 0.0;
                for (int v : row.shd_values) ss += (v - row.mean_shd) * (v - row.mean_shd);
                row.stderr_shd = std::sqrt(ss / (reps - 1)) / std::sqrt(static_cast<double>(reps));
            }
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

}  // namespace

ShdReport shd(const Dag& estimate, const Dag& truth) {
    if (estimate.p() != truth.p()) throw InputError("shd: graphs have different node counts");
    ShdReport r;
    for (int a = 0; a < truth.p(); ++a) {
        for (int b = a + 1; b < truth.p(); ++b) {
            const bool t_ab = truth.has_edge(a, b), t_ba = truth.has_edge(b, a);
            const bool e_ab = estimate.has_edge(a, b), e_ba = estimate.has_edge(b, a);
            const bool t_adj = t_ab || t_ba, e_adj = e_ab || e_ba;
            if (t_adj && !e_adj) ++r.missing;
            else if (!t_adj && e_adj) ++r.extra;
            else if (t_adj && e_adj && t_ab != e_ab) ++r.reversed;
        }
    }
    r.shd = r.missing + r.extra + r.reversed;
    return r;
}

EdgeRecovery edge_recovery(const Dag& estimate, const Dag& truth) {
    if (estimate.p() != truth.p()) throw InputError("edge_recovery: graphs have different node counts");
    EdgeRecovery r;
    r.estimated = estimate.edge_count();
    r.actual = truth.edge_count();
    for (auto [i, j] : estimate.edges())
        if (truth.has_edge(i, j)) ++r.true_positive;
    return r;
}

const BenchmarkRow& BenchmarkReport::find(double theta, int p, int n, EstimatorMode estimator, double misspec_prob) const {
    for (const auto& row : rows)
        if (row.theta == theta && row.p == p && row.n == n && row.estimator == estimator && row.misspec_prob == misspec_prob)
            return row;
    throw InputError("no benchmark row for the requested cell");
}

std::uint64_t replicate_seed(std::uint64_t base, double theta, int p, int n, double misspec_prob, int replicate) {
    const auto t = std::bit_cast<std::uint64_t>(theta);
    const auto m = std::bit_cast<std::uint64_t>(misspec_prob);
    std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                      static_cast<std::uint32_t>(t),    static_cast<std::uint32_t>(t >> 32),
                      static_cast<std::uint32_t>(p),    static_cast<std::uint32_t>(n),
                      static_cast<std::uint32_t>(m),    static_cast<std::uint32_t>(m >> 32),
                      static_cast<std::uint32_t>(replicate)};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

BenchmarkReport run_benchmark(const BenchmarkGrid& grid, const BenchmarkOptions& options) {
    std::vector<Cell> cells;
    for (double theta : grid.thetas)
        for (int p : grid.ps)
            for (int n : grid.ns) cells.push_back({theta, p, n, options.sim.misspec_prob});
    return run_cells(cells, grid.estimators, options);
}

BenchmarkReport run_misspec_sweep(const MisspecSweep& sweep, const BenchmarkOptions& options) {
    std::vector<Cell> cells;
    for (double prob : sweep.misspec_probs) cells.push_back({sweep.theta, sweep.p, sweep.n, prob});
    return run_cells(cells, sweep.estimators, options);
}

}  // namespace cdag
