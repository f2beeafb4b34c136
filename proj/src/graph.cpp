#include "cdag/graph.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "cdag/errors.hpp"

namespace cdag {

namespace {

void check_p(int p) {
    if (p < 0 || p > kMaxPrimary)
        throw InputError("node count " + std::to_string(p) + " outside [0, " + std::to_string(kMaxPrimary) + "]");
}

void check_index(int i, int p) {
    if (i < 0 || i >= p)
        throw InputError("node index " + std::to_string(i) + " outside [0, " + std::to_string(p) + ")");
}

// Kahn's algorithm over parent masks; returns the order, shorter than p on a cycle.
std::vector<int> kahn_order(const std::vector<std::uint64_t>& parents) {
    const int p = static_cast<int>(parents.size());
    std::vector<int> order;
    order.reserve(p);
    std::uint64_t placed = 0;
    bool progress = true;
    while (progress && static_cast<int>(order.size()) < p) {
        progress = false;
        for (int j = 0; j < p; ++j) {
            const std::uint64_t bit = std::uint64_t{1} << j;
            if ((placed & bit) == 0 && (parents[j] & ~placed) == 0) {
                order.push_back(j);
                placed |= bit;
                progress = true;
                break;  // restart from the lowest index for a canonical order
            }
        }
    }
    return order;
}

}  // namespace

bool is_acyclic(std::span<const Edge> edges, int p) {
    check_p(p);
    std::vector<std::uint64_t> parents(p, 0);
    for (auto [from, to] : edges) {
        check_index(from, p);
        check_index(to, p);
        if (from == to) return false;
        parents[to] |= std::uint64_t{1} << from;
    }
    return static_cast<int>(kahn_order(parents).size()) == p;
}

Dag::Dag(int p) {
    check_p(p);
    parents_.assign(p, 0);
}

Dag::Dag(int p, std::span<const Edge> edges) : Dag(p) {
    for (auto [from, to] : edges) {
        check_index(from, p);
        check_index(to, p);
        if (from == to) throw InputError("self-loop on node " + std::to_string(from));
        parents_[to] |= std::uint64_t{1} << from;
    }
    if (static_cast<int>(kahn_order(parents_).size()) != p) throw InputError("edge set contains a directed cycle");
}

Dag Dag::from_parent_masks(std::vector<std::uint64_t> parents) {
    const int p = static_cast<int>(parents.size());
    check_p(p);
    const std::uint64_t valid = p == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << p) - 1;
    for (int j = 0; j < p; ++j) {
        if (parents[j] & ~valid) throw InputError("parent mask references a node >= p");
        if (parents[j] & (std::uint64_t{1} << j)) throw InputError("self-loop on node " + std::to_string(j));
    }
    if (static_cast<int>(kahn_order(parents).size()) != p) throw InputError("parent masks contain a directed cycle");
    Dag g;
    g.parents_ = std::move(parents);
    return g;
}

std::vector<int> Dag::parents(int child) const {
    std::vector<int> out;
    for (auto m = parent_mask(child); m; m &= m - 1) out.push_back(std::countr_zero(m));
    return out;
}

bool Dag::has_edge(int from, int to) const {
    check_index(from, p());
    check_index(to, p());
    return (parents_[to] >> from) & 1U;
}

std::vector<Edge> Dag::edges() const {
    std::vector<Edge> out;
    for (int to = 0; to < p(); ++to)
        for (auto m = parents_[to]; m; m &= m - 1) out.emplace_back(std::countr_zero(m), to);
    std::sort(out.begin(), out.end());
    return out;
}

int Dag::edge_count() const {
    int n = 0;
    for (auto m : parents_) n += std::popcount(m);
    return n;
}

std::vector<int> Dag::topological_order() const { return kahn_order(parents_); }

Dag Dag::with_edge(int from, int to) const {
    check_index(from, p());
    check_index(to, p());
    if (from == to) throw InputError("self-loop on node " + std::to_string(from));
    auto parents = parents_;
    parents[to] |= std::uint64_t{1} << from;
    if (static_cast<int>(kahn_order(parents).size()) != p())
        throw InputError("adding " + std::to_string(from) + "->" + std::to_string(to) + " creates a cycle");
    Dag g;
    g.parents_ = std::move(parents);
    return g;
}

Dag Dag::without_edge(int from, int to) const {
    check_index(from, p());
    check_index(to, p());
    Dag g = *this;
    g.parents_[to] &= ~(std::uint64_t{1} << from);
    return g;
}

Dag Dag::induced_prefix(int count) const {
    if (count < 0 || count > p()) throw InputError("induced_prefix count out of range");
    const std::uint64_t keep = count == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << count) - 1;
    Dag g;
    g.parents_.assign(parents_.begin(), parents_.begin() + count);
    for (auto& m : g.parents_) m &= keep;
    return g;
}

DiGraph::DiGraph() : parents_(NodeSet::kSlots) {}

void DiGraph::add_node(NodeRef n) { nodes_.insert(n); }

void DiGraph::add_edge(NodeRef from, NodeRef to) {
    if (from == to) throw InputError("self-loop on " + to_string(from));
    nodes_.insert(from);
    nodes_.insert(to);
    parents_[to.slot()].insert(from);
}

std::vector<std::pair<NodeRef, NodeRef>> DiGraph::edges() const {
    std::vector<std::pair<NodeRef, NodeRef>> out;
    nodes_.for_each([&](NodeRef child) { parents_[child.slot()].for_each([&](NodeRef par) { out.emplace_back(par, child); }); });
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t DiGraph::edge_count() const {
    std::size_t n = 0;
    nodes_.for_each([&](NodeRef child) { n += parents_[child.slot()].size(); });
    return n;
}

bool DiGraph::is_acyclic() const {
    NodeSet placed;
    const int total = nodes_.size();
    int count = 0;
    bool progress = true;
    while (progress && count < total) {
        progress = false;
        (nodes_ - placed).for_each([&](NodeRef n) {
            if (parents_[n.slot()].subset_of(placed)) {
                placed.insert(n);
                ++count;
                progress = true;
            }
        });
    }
    return count == total;
}

DiGraph DiGraph::induced(const NodeSet& keep) const {
    DiGraph out;
    out.nodes_ = nodes_ & keep;
    out.nodes_.for_each([&](NodeRef n) { out.parents_[n.slot()] = parents_[n.slot()] & keep; });
    return out;
}

UndirectedGraph::UndirectedGraph() : adjacent_(NodeSet::kSlots) {}

void UndirectedGraph::add_node(NodeRef n) { nodes_.insert(n); }

void UndirectedGraph::add_edge(NodeRef a, NodeRef b) {
    if (a == b) throw InputError("self-loop on " + to_string(a));
    nodes_.insert(a);
    nodes_.insert(b);
    adjacent_[a.slot()].insert(b);
    adjacent_[b.slot()].insert(a);
}

void UndirectedGraph::connect_all(const NodeSet& clique) {
    if (!clique.subset_of(nodes_)) throw InputError("connect_all: set contains non-members");
    clique.for_each([&](NodeRef n) {
        adjacent_[n.slot()] |= clique;
        adjacent_[n.slot()].erase(n);
    });
}

std::vector<std::pair<NodeRef, NodeRef>> UndirectedGraph::edges() const {
    std::vector<std::pair<NodeRef, NodeRef>> out;
    nodes_.for_each([&](NodeRef a) {
        adjacent_[a.slot()].for_each([&](NodeRef b) {
            if (a < b) out.emplace_back(a, b);
        });
    });
    return out;
}

DiGraph Cdag::graph() const {
    DiGraph g;
    for (int i = 0; i < p(); ++i) g.add_edge(NodeRef::secondary(i), NodeRef::primary(i));
    for (auto [from, to] : primary_.edges()) g.add_edge(NodeRef::primary(from), NodeRef::primary(to));
    return g;
}

std::vector<std::pair<NodeRef, NodeRef>> Cdag::edges() const { return graph().edges(); }

NodeSet Cdag::primary_nodes() const {
    NodeSet s;
    for (int i = 0; i < p(); ++i) s.insert(NodeRef::primary(i));
    return s;
}

NodeSet Cdag::secondary_nodes() const {
    NodeSet s;
    for (int i = 0; i < p(); ++i) s.insert(NodeRef::secondary(i));
    return s;
}

NodeSet ancestors(const DiGraph& g, const NodeSet& s) {
    if (!s.subset_of(g.nodes())) throw InputError("ancestors: " + to_string(s - g.nodes()) + " not in graph");
    NodeSet result = s;
    NodeSet frontier = s;
    while (!frontier.empty()) {
        NodeSet next;
        frontier.for_each([&](NodeRef n) { next |= g.parents(n); });
        frontier = next - result;
        result |= frontier;
    }
    return result;
}

NodeSet ancestors(const Cdag& g, const NodeSet& s) { return ancestors(g.graph(), s); }

UndirectedGraph moralize(const DiGraph& g) {
    UndirectedGraph u;
    g.nodes().for_each([&](NodeRef n) { u.add_node(n); });
    g.nodes().for_each([&](NodeRef child) {
        const NodeSet& pa = g.parents(child);
        pa.for_each([&](NodeRef par) { u.add_edge(par, child); });
        if (pa.size() > 1) u.connect_all(pa);
    });
    return u;
}

bool separated(const UndirectedGraph& u, const NodeSet& a, const NodeSet& b, const NodeSet& c) {
    if (a.intersects(b) || a.intersects(c) || b.intersects(c))
        throw InputError("separation query sets must be pairwise disjoint");
    const NodeSet open = u.nodes() - c;
    NodeSet reached = a & open;
    NodeSet frontier = reached;
    while (!frontier.empty()) {
        if (frontier.intersects(b)) return false;
        NodeSet next;
        frontier.for_each([&](NodeRef n) { next |= u.neighbors(n); });
        frontier = (next & open) - reached;
        reached |= frontier;
    }
    return true;
}

DiGraph to_digraph(const Dag& g) {
    DiGraph d;
    for (int i = 0; i < g.p(); ++i) d.add_node(NodeRef::primary(i));
    for (auto [from, to] : g.edges()) d.add_edge(NodeRef::primary(from), NodeRef::primary(to));
    return d;
}

}  // namespace cdag
