#pragma once

#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <string>
#include <vector>

namespace cdag {

// Largest primary node count supported by every graph type.
inline constexpr int kMaxPrimary = 64;

enum class NodeKind : std::uint8_t { Primary = 0, Secondary = 1, Auxiliary = 2 };

// A node of a conditional DAG. Primary node i carries Y_i, secondary node i
// carries X_i and is the known cause of primary node i. The auxiliary kind
// only appears as the extra root added by extended_graph().
struct NodeRef {
    NodeKind kind = NodeKind::Primary;
    int index = 0;

    static constexpr NodeRef primary(int i) { return {NodeKind::Primary, i}; }
    static constexpr NodeRef secondary(int i) { return {NodeKind::Secondary, i}; }
    static constexpr NodeRef auxiliary() { return {NodeKind::Auxiliary, 0}; }

    // Position of this node in a NodeSet bitmask.
    [[nodiscard]] constexpr int slot() const { return static_cast<int>(kind) * kMaxPrimary + index; }
    static constexpr NodeRef from_slot(int s) {
        return {static_cast<NodeKind>(s / kMaxPrimary), s % kMaxPrimary};
    }

    friend constexpr auto operator<=>(const NodeRef& a, const NodeRef& b) { return a.slot() <=> b.slot(); }
    friend constexpr bool operator==(const NodeRef& a, const NodeRef& b) { return a.slot() == b.slot(); }
};

// 1-based display form: v3, w1, z.
std::string to_string(NodeRef node);
std::ostream& operator<<(std::ostream& os, NodeRef node);

// Parses "v<i>" / "w<i>" with 1-based i. Throws InputError.
NodeRef parse_node(const std::string& text);

// Fixed-width bitmask over node slots. Ordering compares slots from the lowest
// upward, which is lexicographic order on the sorted node lists.
class NodeSet {
public:
    static constexpr int kSlots = 2 * kMaxPrimary + 1;
    static constexpr int kWords = (kSlots + 63) / 64;

    constexpr NodeSet() = default;
    NodeSet(std::initializer_list<NodeRef> nodes) {
        for (auto n : nodes) insert(n);
    }

    constexpr void insert(NodeRef n) { words_[n.slot() / 64] |= bit(n.slot()); }
    constexpr void erase(NodeRef n) { words_[n.slot() / 64] &= ~bit(n.slot()); }
    [[nodiscard]] constexpr bool contains(NodeRef n) const { return (words_[n.slot() / 64] & bit(n.slot())) != 0; }

    [[nodiscard]] constexpr bool empty() const {
        for (auto w : words_)
            if (w) return false;
        return true;
    }
    [[nodiscard]] constexpr int size() const {
        int s = 0;
        for (auto w : words_) s += std::popcount(w);
        return s;
    }
    [[nodiscard]] constexpr bool intersects(const NodeSet& o) const { return !(*this & o).empty(); }
    [[nodiscard]] constexpr bool subset_of(const NodeSet& o) const { return (*this & ~o).empty(); }

    constexpr NodeSet operator|(const NodeSet& o) const { return combine(o, [](auto a, auto b) { return a | b; }); }
    constexpr NodeSet operator&(const NodeSet& o) const { return combine(o, [](auto a, auto b) { return a & b; }); }
    constexpr NodeSet operator-(const NodeSet& o) const { return combine(o, [](auto a, auto b) { return a & ~b; }); }
    constexpr NodeSet operator~() const {
        NodeSet r;
        for (int i = 0; i < kWords; ++i) r.words_[i] = ~words_[i];
        r.words_[kWords - 1] &= kLastMask;
        return r;
    }
    constexpr NodeSet& operator|=(const NodeSet& o) { return *this = *this | o; }
    constexpr NodeSet& operator&=(const NodeSet& o) { return *this = *this & o; }
    constexpr NodeSet& operator-=(const NodeSet& o) { return *this = *this - o; }

    // Calls fn(NodeRef) for each member in ascending slot order.
    template <class Fn>
    constexpr void for_each(Fn&& fn) const {
        for (int w = 0; w < kWords; ++w) {
            for (auto bits = words_[w]; bits; bits &= bits - 1)
                fn(NodeRef::from_slot(w * 64 + std::countr_zero(bits)));
        }
    }
    [[nodiscard]] std::vector<NodeRef> to_vector() const {
        std::vector<NodeRef> out;
        for_each([&](NodeRef n) { out.push_back(n); });
        return out;
    }
    [[nodiscard]] NodeRef first() const;

    // Lexicographic on sorted member lists (a proper prefix sorts first).
    friend std::strong_ordering operator<=>(const NodeSet& a, const NodeSet& b);
    friend constexpr bool operator==(const NodeSet& a, const NodeSet& b) { return a.words_ == b.words_; }

    [[nodiscard]] const std::array<std::uint64_t, kWords>& words() const { return words_; }

private:
    static constexpr std::uint64_t kLastMask =
        (kSlots % 64 == 0) ? ~std::uint64_t{0} : ((std::uint64_t{1} << (kSlots % 64)) - 1);
    static constexpr std::uint64_t bit(int slot) { return std::uint64_t{1} << (slot % 64); }
    template <class Op>
    constexpr NodeSet combine(const NodeSet& o, Op op) const {
        NodeSet r;
        for (int i = 0; i < kWords; ++i) r.words_[i] = op(words_[i], o.words_[i]);
        return r;
    }

    std::array<std::uint64_t, kWords> words_{};
};

std::string to_string(const NodeSet& s);
std::ostream& operator<<(std::ostream& os, const NodeSet& s);

// "v1,w2" style list, empty string for the empty set.
NodeSet parse_node_list(const std::string& text);

struct NodeSetHash {
    std::size_t operator()(const NodeSet& s) const noexcept;
};

}  // namespace cdag
