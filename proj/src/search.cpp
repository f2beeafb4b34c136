#include "cdag/search.hpp"

#include <bit>
#include <cmath>
#include <limits>

#include "cdag/errors.hpp"
#include "cdag/parallel.hpp"
#include "cdag/random.hpp"

namespace cdag {

namespace {

constexpr double kImprovement = 1e-9;

// Same size assumed; the set holding the lowest differing element sorts first.
bool lex_less(std::uint64_t a, std::uint64_t b) {
    const std::uint64_t diff = a ^ b;
    return diff != 0 && (a & diff & (~diff + 1)) != 0;
}

// Strict "a is a better parent set than b".
bool better(double score_a, std::uint64_t a, double score_b, std::uint64_t b) {
    if (score_a != score_b) return score_a > score_b;
    const int ka = std::popcount(a), kb = std::popcount(b);
    if (ka != kb) return ka < kb;
    return lex_less(a, b);
}

struct GreedyState {
    std::vector<std::uint64_t> parents;
    std::vector<double> scores;
    double total = 0.0;
};

std::vector<std::uint64_t> descendants(const std::vector<std::uint64_t>& parents) {
    const int m = static_cast<int>(parents.size());
    std::vector<std::uint64_t> children(m, 0);
    for (int j = 0; j < m; ++j)
        for (auto pm = parents[j]; pm; pm &= pm - 1) children[std::countr_zero(pm)] |= std::uint64_t{1} << j;
    const std::vector<int> order = Dag::from_parent_masks(parents).topological_order();
    std::vector<std::uint64_t> desc(m, 0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const int v = *it;
        for (auto cm = children[v]; cm; cm &= cm - 1) {
            const int c = std::countr_zero(cm);
            desc[v] |= desc[c] | (std::uint64_t{1} << c);
        }
    }
    return desc;
}

GreedyState climb(const ScoreTable& table, std::vector<std::uint64_t> start) {
    const int m = table.node_count();
    const int cap = table.max_parents();
    GreedyState st;
    st.parents = std::move(start);
    st.scores.resize(m);
    for (int j = 0; j < m; ++j) st.scores[j] = table.score(j, st.parents[j]);

    while (true) {
        const auto desc = descendants(st.parents);
        double best_delta = kImprovement;
        int best_kind = -1, best_from = -1, best_to = -1;  // kind: 0 add, 1 delete, 2 reverse
        auto consider = [&](double delta, int kind, int from, int to) {
            if (delta > best_delta) {
                best_delta = delta;
                best_kind = kind;
                best_from = from;
                best_to = to;
            }
        };
        for (int j = 0; j < m; ++j) {
            const std::uint64_t pj = st.parents[j];
            for (int i = 0; i < m; ++i) {
                if (i == j) continue;
                const std::uint64_t bi = std::uint64_t{1} << i, bj = std::uint64_t{1} << j;
                if (pj & bi) {
                    const double del = table.score(j, pj & ~bi) - st.scores[j];
                    consider(del, 1, i, j);
                    if (std::popcount(st.parents[i]) < cap) {
                        // Reversal is acyclic iff no other directed path i ~> j exists.
                        bool other_path = false;
                        for (int c = 0; c < m && !other_path; ++c) {
                            if (c == j || !((st.parents[c] >> i) & 1U)) continue;
                            other_path = (desc[c] & bj) != 0;
                        }
                        if (!other_path) consider(del + table.score(i, st.parents[i] | bj) - st.scores[i], 2, i, j);
                    }
                } else if (!(st.parents[i] & bj) && std::popcount(pj) < cap && !(desc[j] & bi)) {
                    consider(table.score(j, pj | bi) - st.scores[j], 0, i, j);
                }
            }
        }
        if (best_kind < 0) break;
        const std::uint64_t bf = std::uint64_t{1} << best_from, bt = std::uint64_t{1} << best_to;
        switch (best_kind) {
            case 0: st.parents[best_to] |= bf; break;
            case 1: st.parents[best_to] &= ~bf; break;
            default:
                st.parents[best_to] &= ~bf;
                st.parents[best_from] |= bt;
                break;
        }
        st.scores[best_to] = table.score(best_to, st.parents[best_to]);
        st.scores[best_from] = table.score(best_from, st.parents[best_from]);
    }
    st.total = table.total(st.parents);
    return st;
}

std::vector<std::uint64_t> random_start(const ScoreTable& table, Rng& rng) {
    const int m = table.node_count();
    const int cap = table.max_parents();
    const std::vector<int> order = random_permutation(rng, m);
    const double edge_prob = m > 1 ? std::min(1.0, 2.0 / (m - 1)) : 0.0;
    std::vector<std::uint64_t> parents(m, 0);
    for (int pos = 0; pos < m; ++pos) {
        const int child = order[pos];
        for (int earlier = 0; earlier < pos; ++earlier) {
            if (std::popcount(parents[child]) >= cap) break;
            if (uniform01(rng) < edge_prob) parents[child] |= std::uint64_t{1} << order[earlier];
        }
        if (!std::isfinite(table.score(child, parents[child]))) parents[child] = 0;
    }
    return parents;
}

}  // namespace

std::string to_string(SearchMethod method) { return method == SearchMethod::ExactDP ? "exact-dp" : "greedy"; }

SearchResult exact_map(const ScoreTable& table) {
    const int m = table.node_count();
    if (m > kMaxExactNodes)
        throw InputError("exact search supports at most " + std::to_string(kMaxExactNodes) + " nodes (got " +
                         std::to_string(m) + "); use greedy_map");
    const int cap = table.max_parents();
    const std::size_t local_count = std::size_t{1} << (m - 1);

    // best[j][L]: best admissible parent set of j inside candidate-local subset L.
    std::vector<std::vector<std::uint32_t>> best(m, std::vector<std::uint32_t>(local_count));
    std::vector<double> best_score(local_count);
    auto local_score = [&](int j, std::uint64_t local) { return table.score(j, ScoreTable::to_global(j, local)); };

    for (int j = 0; j < m; ++j) {
        auto& bj = best[j];
        for (std::size_t set = 0; set < local_count; ++set) {
            std::uint32_t arg = 0;
            double value = -std::numeric_limits<double>::infinity();
            bool have = false;
            if (std::popcount(set) <= cap) {
                arg = static_cast<std::uint32_t>(set);
                value = local_score(j, set);
                have = true;
            }
            for (auto rest = set; rest; rest &= rest - 1) {
                const std::size_t sub = set & ~(rest & (~rest + 1));
                if (!have || better(best_score[sub], bj[sub], value, arg)) {
                    arg = bj[sub];
                    value = best_score[sub];
                    have = true;
                }
            }
            bj[set] = arg;
            best_score[set] = value;
        }
    }

    const std::size_t full_count = std::size_t{1} << m;
    std::vector<double> opt(full_count, -std::numeric_limits<double>::infinity());
    std::vector<std::int8_t> sink(full_count, -1);
    opt[0] = 0.0;
    for (std::size_t set = 1; set < full_count; ++set) {
        for (auto rest = set; rest; rest &= rest - 1) {
            const int j = std::countr_zero(rest);
            const std::size_t without = set & ~(std::size_t{1} << j);
            const double value = opt[without] + local_score(j, best[j][ScoreTable::to_local(j, without)]);
            if (sink[set] < 0 || value > opt[set]) {
                opt[set] = value;
                sink[set] = static_cast<std::int8_t>(j);
            }
        }
    }

    std::vector<std::uint64_t> parents(m, 0);
    for (std::size_t set = full_count - 1; set != 0;) {
        const int j = sink[set];
        const std::size_t without = set & ~(std::size_t{1} << j);
        parents[j] = ScoreTable::to_global(j, best[j][ScoreTable::to_local(j, without)]);
        set = without;
    }

    SearchResult result;
    result.graph = Dag::from_parent_masks(parents);
    result.log_score = table.total(parents);
    result.method = SearchMethod::ExactDP;
    result.optimal = true;
    return result;
}

SearchResult greedy_map(const ScoreTable& table, const GreedyOptions& options) {
    const int m = table.node_count();
    const int restarts = std::max(1, options.restarts);
    std::vector<GreedyState> runs(restarts);
    parallel_for(static_cast<std::size_t>(restarts), options.threads, [&](std::size_t r) {
        std::vector<std::uint64_t> start(m, 0);
        if (r > 0) {
            Rng rng = make_rng(options.seed, {r});
            start = random_start(table, rng);
        }
        runs[r] = climb(table, std::move(start));
    });
    std::size_t winner = 0;
    for (std::size_t r = 1; r < runs.size(); ++r)
        if (runs[r].total > runs[winner].total) winner = r;

    SearchResult result;
    result.graph = Dag::from_parent_masks(runs[winner].parents);
    result.log_score = runs[winner].total;
    result.method = SearchMethod::Greedy;
    result.optimal = false;
    return result;
}

Estimate estimate(const Dataset& d, EstimatorMode mode, const EstimateOptions& options) {
    d.require_mode(mode);
    const ScoreTable table = score_table(d, mode, {options.prior, options.threads});
    const int limit = std::min(options.exact_limit, kMaxExactNodes);
    Estimate out;
    out.search = table.node_count() <= limit ? exact_map(table) : greedy_map(table, options.greedy);
    out.graph = out.search.graph.induced_prefix(d.p());
    return out;
}

}  // namespace cdag
