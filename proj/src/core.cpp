#include "cogk/core.hpp"

#include <deque>
#include <map>
#include <set>

namespace cogk {

std::string Triple::show(const SymbolTable& t) const {
    return "(" + t.text(node) + " ^" + t.text(edge) + " " + value.show(t) + ")";
}

Chunk assemble_chunk(std::span<const Element> elements) {
    if (elements.empty()) fail(Errc::empty_chunk, "cannot assemble a chunk from zero elements");
    Symbol name = elements.front().node;
    for (const auto& e : elements) {
        if (e.node != name)
            fail(Errc::heterogeneous_node, "elements do not share a common node");
    }
    Chunk c;
    c.name = name;
    c.elements.assign(elements.begin(), elements.end());
    return c;
}

Symbol status_symbol(const Innate& in, StatusState s) {
    switch (s) {
        case StatusState::free_: return in.free;
        case StatusState::busy: return in.busy;
        case StatusState::success: return in.success;
        case StatusState::failure: return in.failure;
    }
    return in.free;
}

LinkResult linked(std::span<const Element> graph, Symbol root, Symbol target) {
    if (root == target) return {true, 0};
    std::map<Symbol, std::vector<Symbol>> out;
    for (const auto& e : graph) {
        if (e.value.is_sym()) out[e.node].push_back(e.value.as_sym());
    }
    std::deque<std::pair<Symbol, int>> queue{{root, 0}};
    std::set<Symbol> seen{root};
    while (!queue.empty()) {
        auto [n, d] = queue.front();
        queue.pop_front();
        auto it = out.find(n);
        if (it == out.end()) continue;
        for (Symbol next : it->second) {
            if (next == target) return {true, d + 1};
            if (seen.insert(next).second) queue.emplace_back(next, d + 1);
        }
    }
    return {false, 0};
}

}  // namespace cogk
