#include "cdag/node_set.hpp"

#include <charconv>
#include <ostream>
#include <sstream>

#include "cdag/errors.hpp"

namespace cdag {

std::string to_string(NodeRef node) {
    switch (node.kind) {
        case NodeKind::Primary: return "v" + std::to_string(node.index + 1);
        case NodeKind::Secondary: return "w" + std::to_string(node.index + 1);
        case NodeKind::Auxiliary: return "z";
    }
    return "?";
}

std::ostream& operator<<(std::ostream& os, NodeRef node) { return os << to_string(node); }

NodeRef parse_node(const std::string& text) {
    if (text.size() < 2 || (text[0] != 'v' && text[0] != 'w'))
        throw InputError("bad node '" + text + "': expected v<i> or w<i>");
    int one_based = 0;
    const char* begin = text.data() + 1;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, one_based);
    if (ec != std::errc{} || ptr != end || one_based < 1 || one_based > kMaxPrimary)
        throw InputError("bad node index in '" + text + "'");
    return text[0] == 'v' ? NodeRef::primary(one_based - 1) : NodeRef::secondary(one_based - 1);
}

NodeRef NodeSet::first() const {
    for (int w = 0; w < kWords; ++w)
        if (words_[w]) return NodeRef::from_slot(w * 64 + std::countr_zero(words_[w]));
    throw InputError("first() of empty node set");
}

namespace {

bool has_member_above(const NodeSet& s, int slot) {
    const auto& w = s.words();
    const int word = slot / 64;
    const int offset = slot % 64;
    if (offset < 63 && (w[word] >> (offset + 1)) != 0) return true;
    for (int i = word + 1; i < NodeSet::kWords; ++i)
        if (w[i]) return true;
    return false;
}

}  // namespace

std::strong_ordering operator<=>(const NodeSet& a, const NodeSet& b) {
    if (a == b) return std::strong_ordering::equal;
    const NodeRef lowest = ((a - b) | (b - a)).first();
    // Both lists agree below `lowest`; the one holding it is smaller unless the
    // other list has already ended.
    if (a.contains(lowest))
        return has_member_above(b, lowest.slot()) ? std::strong_ordering::less : std::strong_ordering::greater;
    return has_member_above(a, lowest.slot()) ? std::strong_ordering::greater : std::strong_ordering::less;
}

std::string to_string(const NodeSet& s) {
    std::string out = "{";
    bool first = true;
    s.for_each([&](NodeRef n) {
        if (!first) out += ",";
        out += to_string(n);
        first = false;
    });
    return out + "}";
}

std::ostream& operator<<(std::ostream& os, const NodeSet& s) { return os << to_string(s); }

NodeSet parse_node_list(const std::string& text) {
    NodeSet out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto b = item.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        auto e = item.find_last_not_of(" \t");
        out.insert(parse_node(item.substr(b, e - b + 1)));
    }
    return out;
}

std::size_t NodeSetHash::operator()(const NodeSet& s) const noexcept {
    std::size_t h = 0;
    for (auto w : s.words()) h = h * 0x9E3779B97F4A7C15ULL ^ (w + 0x7F4A7C15 + (h << 6) + (h >> 2));
    return h;
}

}  // namespace cdag
