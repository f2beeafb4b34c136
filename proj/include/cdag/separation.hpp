#pragma once

#include <compare>
#include <cstddef>
#include <vector>

#include "cdag/graph.hpp"
#include "cdag/node_set.hpp"

namespace cdag {

// Conditional independence statement <a, b | c>.
struct Query {
    NodeSet a;
    NodeSet b;
    NodeSet c;

    // Throws InputError unless a, b, c are pairwise disjoint and a, b nonempty.
    void validate() const;
    // Same statement with a and b ordered so that a <= b.
    [[nodiscard]] Query canonical() const;

    friend auto operator<=>(const Query&, const Query&) = default;
    friend bool operator==(const Query&, const Query&) = default;
};

// The undirected graph U4 whose separation decides c-separation of queries
// over `involved`: ancestral subgraph, moralized, skeleton, and every pair of
// secondary nodes present in it joined.
UndirectedGraph c_separation_graph(const Cdag& g, const NodeSet& involved);

// Moral graph of the ancestral subgraph of `involved` (c-separation without
// the secondary clique).
UndirectedGraph d_separation_graph(const DiGraph& g, const NodeSet& involved);

bool c_separated(const Cdag& g, const Query& q);
bool d_separated(const DiGraph& g, const Query& q);

// The CDAG plus a fresh root z with an edge z -> w_i for each i.
DiGraph extended_graph(const Cdag& g);

// Answers many separation queries against one directed graph without
// materializing the moral graph per query.
class SeparationOracle {
public:
    // With join_secondary set, the answers are c-separation; otherwise d-separation.
    SeparationOracle(const DiGraph& g, bool join_secondary);

    [[nodiscard]] bool separated(const NodeSet& a, const NodeSet& b, const NodeSet& c) const;

private:
    DiGraph graph_;
    std::vector<NodeSet> children_;
    NodeSet secondary_;
    bool join_secondary_;
};

// All relations <a, b | c> over `scope` that hold under c-separation, stored
// in canonical form. Symmetric by construction.
class IndependenceModel {
public:
    IndependenceModel(int p, std::vector<Query> relations);

    [[nodiscard]] int p() const { return p_; }
    [[nodiscard]] const std::vector<Query>& relations() const { return relations_; }
    [[nodiscard]] std::size_t size() const { return relations_.size(); }
    // Order of a and b in `q` does not matter.
    [[nodiscard]] bool contains(const Query& q) const;

    friend bool operator==(const IndependenceModel&, const IndependenceModel&) = default;

private:
    int p_;
    std::vector<Query> relations_;  // sorted, canonical
};

inline constexpr int kMaxModelScope = 8;

// Enumerates every disjoint triple over `scope` with a and b nonempty.
// Throws InputError when |scope| > kMaxModelScope or scope has foreign nodes.
IndependenceModel independence_model(const Cdag& g, const NodeSet& scope);

// Scope of every node of the CDAG.
IndependenceModel independence_model(const Cdag& g);

}  // namespace cdag
