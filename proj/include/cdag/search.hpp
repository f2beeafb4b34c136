#pragma once

#include <cstdint>
#include <string>

#include "cdag/graph.hpp"
#include "cdag/scoring.hpp"

namespace cdag {

enum class SearchMethod { ExactDP, Greedy };

std::string to_string(SearchMethod method);

struct SearchResult {
    Dag graph;
    double log_score = 0.0;  // table sum over the graph's parent sets
    SearchMethod method = SearchMethod::ExactDP;
    bool optimal = false;
};

// Largest node count exact_map accepts (the DP visits 2^m subsets per node).
inline constexpr int kMaxExactNodes = 25;

// Globally optimal DAG for a decomposable score: best parent set of each node
// within every candidate subset, then the best sink ordering over subsets.
// Ties prefer smaller parent sets, then the lexicographically smaller set,
// then the lower sink index. Throws InputError above kMaxExactNodes.
SearchResult exact_map(const ScoreTable& table);

struct GreedyOptions {
    int restarts = 10;
    std::uint64_t seed = 1;
    int threads = 1;
};

// Best-improvement hill climbing over single-edge additions, deletions and
// reversals. Restart 0 starts from the empty graph, later restarts from random
// DAGs. Deterministic for a given seed.
SearchResult greedy_map(const ScoreTable& table, const GreedyOptions& options = {});

struct EstimateOptions {
    GPriorConfig prior;
    GreedyOptions greedy;
    int exact_limit = kMaxExactNodes;  // larger universes fall back to greedy
    int threads = 0;
};

struct Estimate {
    Dag graph;          // over the primary nodes
    SearchResult search;  // over the mode's full universe
};

// Scores the dataset under `mode`, maximizes, and restricts the result to the
// primary nodes (only matters for Dag2).
Estimate estimate(const Dataset& d, EstimatorMode mode, const EstimateOptions& options = {});

}  // namespace cdag
