#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "cdag/node_set.hpp"

namespace cdag {

// Directed edge between primary indices, tail first.
using Edge = std::pair<int, int>;

// True iff the edge list over nodes [0, p) has no directed cycle (self-loops
// count as cycles). Throws InputError for indices outside [0, p).
bool is_acyclic(std::span<const Edge> edges, int p);

// DAG over the primary nodes. Parent sets are bitmasks, so p <= 64.
// Values are immutable: the edit operations return a new graph and throw
// InputError rather than produce a cycle.
class Dag {
public:
    Dag() = default;
    explicit Dag(int p);
    Dag(int p, std::span<const Edge> edges);

    // Parent bitmask per node; validated like the edge-list constructor.
    static Dag from_parent_masks(std::vector<std::uint64_t> parents);

    [[nodiscard]] int p() const { return static_cast<int>(parents_.size()); }
    [[nodiscard]] std::uint64_t parent_mask(int child) const { return parents_.at(child); }
    [[nodiscard]] std::vector<int> parents(int child) const;
    [[nodiscard]] bool has_edge(int from, int to) const;
    [[nodiscard]] std::vector<Edge> edges() const;  // sorted
    [[nodiscard]] int edge_count() const;
    // Nodes ordered so every parent precedes its children (ties by index).
    [[nodiscard]] std::vector<int> topological_order() const;

    [[nodiscard]] Dag with_edge(int from, int to) const;
    [[nodiscard]] Dag without_edge(int from, int to) const;
    // Subgraph induced on nodes [0, count).
    [[nodiscard]] Dag induced_prefix(int count) const;

    friend bool operator==(const Dag&, const Dag&) = default;

private:
    std::vector<std::uint64_t> parents_;
};

// Directed graph over NodeRef vertices. Used for the CDAG with its secondary
// nodes made explicit and for the extended graph with the extra root z.
class DiGraph {
public:
    DiGraph();

    void add_node(NodeRef n);
    // Adds both endpoints if missing. Acyclicity is not checked here.
    void add_edge(NodeRef from, NodeRef to);

    [[nodiscard]] const NodeSet& nodes() const { return nodes_; }
    [[nodiscard]] const NodeSet& parents(NodeRef n) const { return parents_[n.slot()]; }
    [[nodiscard]] std::vector<std::pair<NodeRef, NodeRef>> edges() const;
    [[nodiscard]] std::size_t edge_count() const;
    [[nodiscard]] bool is_acyclic() const;
    [[nodiscard]] DiGraph induced(const NodeSet& keep) const;

private:
    NodeSet nodes_;
    std::vector<NodeSet> parents_;
};

// Undirected simple graph over NodeRef vertices.
class UndirectedGraph {
public:
    UndirectedGraph();

    void add_node(NodeRef n);
    // Throws InputError on a self-loop.
    void add_edge(NodeRef a, NodeRef b);
    // Joins every pair of distinct members of `clique` (all must be nodes).
    void connect_all(const NodeSet& clique);

    [[nodiscard]] const NodeSet& nodes() const { return nodes_; }
    [[nodiscard]] const NodeSet& neighbors(NodeRef n) const { return adjacent_[n.slot()]; }
    [[nodiscard]] bool has_edge(NodeRef a, NodeRef b) const { return adjacent_[a.slot()].contains(b); }
    // Each edge once, smaller endpoint first, sorted.
    [[nodiscard]] std::vector<std::pair<NodeRef, NodeRef>> edges() const;

    friend bool operator==(const UndirectedGraph&, const UndirectedGraph&) = default;

private:
    NodeSet nodes_;
    std::vector<NodeSet> adjacent_;
};

// Conditional DAG: a primary DAG plus the fixed edges w_i -> v_i. Only the
// primary DAG is stored, so the bijection edges can never go missing.
class Cdag {
public:
    Cdag() = default;
    explicit Cdag(Dag primary) : primary_(std::move(primary)) {}

    [[nodiscard]] int p() const { return primary_.p(); }
    [[nodiscard]] const Dag& primary() const { return primary_; }
    // All 2p nodes with both primary and bijection edges.
    [[nodiscard]] DiGraph graph() const;
    [[nodiscard]] std::vector<std::pair<NodeRef, NodeRef>> edges() const;
    [[nodiscard]] NodeSet primary_nodes() const;
    [[nodiscard]] NodeSet secondary_nodes() const;

    friend bool operator==(const Cdag&, const Cdag&) = default;

private:
    Dag primary_;
};

// Smallest parent-closed superset of `s` (contains `s` itself).
NodeSet ancestors(const DiGraph& g, const NodeSet& s);
NodeSet ancestors(const Cdag& g, const NodeSet& s);

// Skeleton plus an edge between every pair of co-parents.
UndirectedGraph moralize(const DiGraph& g);

// True iff every path between `a` and `b` in `u` meets `c`. The three sets
// must be pairwise disjoint (InputError otherwise).
bool separated(const UndirectedGraph& u, const NodeSet& a, const NodeSet& b, const NodeSet& c);

// Primary DAG as a DiGraph over v-nodes only.
DiGraph to_digraph(const Dag& g);

}  // namespace cdag
