#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cdag/graph.hpp"
#include "cdag/search.hpp"
#include "cdag/simulate.hpp"

namespace cdag {

// Structural Hamming distance with reversals costing 1.
struct ShdReport {
    int shd = 0;
    int missing = 0;   // truth adjacencies absent from the estimate
    int extra = 0;     // estimate adjacencies absent from the truth
    int reversed = 0;  // adjacent in both, opposite orientation
};

ShdReport shd(const Dag& estimate, const Dag& truth);

// Directed edge recovery. An empty estimate has precision 1, an empty truth recall 1.
struct EdgeRecovery {
    int true_positive = 0;
    int estimated = 0;
    int actual = 0;
    [[nodiscard]] double precision() const { return estimated == 0 ? 1.0 : double(true_positive) / estimated; }
    [[nodiscard]] double recall() const { return actual == 0 ? 1.0 : double(true_positive) / actual; }
};

EdgeRecovery edge_recovery(const Dag& estimate, const Dag& truth);

struct BenchmarkRow {
    double theta = 0.0;
    int p = 0;
    int n = 0;
    double misspec_prob = 0.0;
    EstimatorMode estimator = EstimatorMode::Cdag;
    double mean_shd = 0.0;
    std::optional<double> stderr_shd;  // unset with a single replicate
    int replicates = 0;
    std::vector<int> shd_values;       // per replicate, in replicate order
};

struct BenchmarkReport {
    std::vector<BenchmarkRow> rows;
    std::uint64_t seed = 0;

    // Throws InputError when no row matches.
    [[nodiscard]] const BenchmarkRow& find(double theta, int p, int n, EstimatorMode estimator,
                                           double misspec_prob = 0.0) const;
};

struct BenchmarkGrid {
    std::vector<double> thetas{0.0, 0.5, 0.99};
    std::vector<int> ps{5, 10, 15};
    std::vector<int> ns{10, 100, 1000};
    std::vector<EstimatorMode> estimators{EstimatorMode::Dag, EstimatorMode::Dag2, EstimatorMode::Cdag};
};

struct BenchmarkOptions {
    int replicates = 10;
    std::uint64_t seed = 1;
    EstimateOptions estimate;  // prior, search settings; its greedy seed is replaced per replicate
    SimConfig sim;             // generator settings other than p, n, theta, misspec_prob and seed
    int threads = 0;
};

// Seed of one replicate, a function of the cell's values rather than its
// position in a grid, so equal cells in different runs share data.
std::uint64_t replicate_seed(std::uint64_t base, double theta, int p, int n, double misspec_prob, int replicate);

// Simulate -> estimate under each estimator -> SHD, for every cell and
// replicate. Rows are ordered theta, p, n, then estimator.
BenchmarkReport run_benchmark(const BenchmarkGrid& grid, const BenchmarkOptions& options);

struct MisspecSweep {
    int p = 15;
    int n = 1000;
    double theta = 0.0;
    std::vector<double> misspec_probs{0.0, 0.25, 0.5, 0.75, 1.0};
    std::vector<EstimatorMode> estimators{EstimatorMode::Dag, EstimatorMode::Dag2, EstimatorMode::Cdag};
};

// The same pipeline over misspecification probabilities at a fixed regime.
BenchmarkReport run_misspec_sweep(const MisspecSweep& sweep, const BenchmarkOptions& options);

}  // namespace cdag
