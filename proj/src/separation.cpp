#include "cdag/separation.hpp"

#include <algorithm>
#include <string>

#include "cdag/errors.hpp"

namespace cdag {

namespace {

void check_disjoint(const NodeSet& a, const NodeSet& b, const NodeSet& c) {
    if (a.intersects(b) || a.intersects(c) || b.intersects(c))
        throw InputError("query sets must be pairwise disjoint: " + to_string(a) + ", " + to_string(b) + ", " +
                         to_string(c));
}

NodeSet secondary_members(const NodeSet& s) {
    NodeSet out;
    s.for_each([&](NodeRef n) {
        if (n.kind == NodeKind::Secondary) out.insert(n);
    });
    return out;
}

}  // namespace

void Query::validate() const {
    check_disjoint(a, b, c);
    if (a.empty() || b.empty()) throw InputError("query sets a and b must be nonempty");
}

Query Query::canonical() const {
    if (b < a) return {b, a, c};
    return *this;
}

UndirectedGraph d_separation_graph(const DiGraph& g, const NodeSet& involved) {
    const DiGraph u1 = g.induced(ancestors(g, involved));
    return moralize(u1);  // moralize also drops the arrowheads
}

UndirectedGraph c_separation_graph(const Cdag& g, const NodeSet& involved) {
    UndirectedGraph u = d_separation_graph(g.graph(), involved);
    u.connect_all(secondary_members(u.nodes()));
    return u;
}

bool c_separated(const Cdag& g, const Query& q) {
    q.validate();
    const UndirectedGraph u4 = c_separation_graph(g, q.a | q.b | q.c);
    return separated(u4, q.a, q.b, q.c);
}

bool d_separated(const DiGraph& g, const Query& q) {
    q.validate();
    if (!g.is_acyclic()) throw InputError("d_separated: graph has a directed cycle");
    const UndirectedGraph u = d_separation_graph(g, q.a | q.b | q.c);
    return separated(u, q.a, q.b, q.c);
}

DiGraph extended_graph(const Cdag& g) {
    DiGraph out = g.graph();
    const NodeRef z = NodeRef::auxiliary();
    out.add_node(z);
    for (int i = 0; i < g.p(); ++i) out.add_edge(z, NodeRef::secondary(i));
    return out;
}

SeparationOracle::SeparationOracle(const DiGraph& g, bool join_secondary)
    : graph_(g), children_(NodeSet::kSlots), join_secondary_(join_secondary) {
    g.nodes().for_each([&](NodeRef child) {
        g.parents(child).for_each([&](NodeRef par) { children_[par.slot()].insert(child); });
    });
    secondary_ = secondary_members(g.nodes());
}

bool SeparationOracle::separated(const NodeSet& a, const NodeSet& b, const NodeSet& c) const {
    check_disjoint(a, b, c);
    const NodeSet anc = ancestors(graph_, a | b | c);
    const NodeSet open = anc - c;
    const NodeSet joined = secondary_ & anc;

    NodeSet reached = a;
    NodeSet frontier = a;
    while (!frontier.empty()) {
        if (frontier.intersects(b)) return false;
        NodeSet next;
        frontier.for_each([&](NodeRef n) {
            // Neighbours of n in the moral graph of the ancestral subgraph.
            next |= graph_.parents(n);
            const NodeSet kids = children_[n.slot()] & anc;
            next |= kids;
            kids.for_each([&](NodeRef k) { next |= graph_.parents(k); });
            if (join_secondary_ && n.kind == NodeKind::Secondary) next |= joined;
        });
        frontier = (next & open) - reached;
        reached |= frontier;
    }
    return true;
}

IndependenceModel::IndependenceModel(int p, std::vector<Query> relations) : p_(p), relations_(std::move(relations)) {
    for (auto& q : relations_) q = q.canonical();
    std::sort(relations_.begin(), relations_.end());
    relations_.erase(std::unique(relations_.begin(), relations_.end()), relations_.end());
}

bool IndependenceModel::contains(const Query& q) const {
    return std::binary_search(relations_.begin(), relations_.end(), q.canonical());
}

IndependenceModel independence_model(const Cdag& g, const NodeSet& scope) {
    const NodeSet all = g.primary_nodes() | g.secondary_nodes();
    if (!scope.subset_of(all)) throw InputError("scope contains nodes outside the CDAG: " + to_string(scope - all));
    if (scope.size() > kMaxModelScope)
        throw InputError("scope of " + std::to_string(scope.size()) + " nodes exceeds the enumeration limit of " +
                         std::to_string(kMaxModelScope));

    const std::vector<NodeRef> nodes = scope.to_vector();
    const int k = static_cast<int>(nodes.size());
    const SeparationOracle oracle(g.graph(), true);

    int total = 1;
    for (int i = 0; i < k; ++i) total *= 4;

    std::vector<Query> holds;
    for (int code = 0; code < total; ++code) {
        Query q;
        int rest = code;
        for (int i = 0; i < k; ++i, rest /= 4) {
            switch (rest % 4) {
                case 1: q.a.insert(nodes[i]); break;
                case 2: q.b.insert(nodes[i]); break;
                case 3: q.c.insert(nodes[i]); break;
                default: break;
            }
        }
        if (q.a.empty() || q.b.empty() || q.b < q.a) continue;
        if (oracle.separated(q.a, q.b, q.c)) holds.push_back(q);
    }
    return IndependenceModel(g.p(), std::move(holds));
}

IndependenceModel independence_model(const Cdag& g) {
    return independence_model(g, g.primary_nodes() | g.secondary_nodes());
}

}  // namespace cdag
