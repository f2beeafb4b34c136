#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "cdag/graph.hpp"
#include "cdag/random.hpp"
#include "cdag/scoring.hpp"

namespace cdag {

struct SimConfig {
    int p = 5;
    int n = 100;
    double theta = 0.0;                  // dependence among secondary variables, in [0, 1]
    std::optional<double> edge_prob;     // unset: 2 / (p - 1), expected in-degree about one
    double coef_low = 0.5;               // coefficient magnitudes are uniform on [low, high]
    double coef_high = 1.5;
    double noise_sd = 1.0;
    double misspec_prob = 0.0;           // chance that a primary edge i->j also gets x_i -> y_j
    std::uint64_t seed = 1;

    [[nodiscard]] double resolved_edge_prob() const;
    // Throws InputError for out-of-range values.
    void validate() const;
};

struct GroundTruth {
    Dag g;                                      // primary structure
    Dag g_prime;                                // secondary structure
    std::vector<std::pair<int, int>> misspec;  // (i, j): extra edge x_i -> y_j, always with i->j in g
};

struct Simulation {
    Dataset data;
    GroundTruth truth;
};

// Uniform random topological order, then each order-respecting edge
// independently with probability edge_prob.
Dag sample_dag(int p, double edge_prob, Rng& rng);

// Linear-Gaussian data: x from an SEM on g_prime whose non-root equations are
// theta * (parent terms) + sqrt(1 - theta^2) * noise, then y from an SEM on g
// driven by its own x_j (positive coefficient), its primary parents, and any
// misspecified x_i -> y_j edges.
Simulation simulate(const SimConfig& cfg);

}  // namespace cdag
