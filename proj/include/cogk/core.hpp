#pragma once
// The universal data model: elements, chunks, graph reachability, module status.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "cogk/value.hpp"

namespace cogk {

using ElementId = uint64_t;

// The atomic datum: a (node, labeled edge, value) triple. The triple is
// immutable after creation; a change is modelled as delete + create.
struct Element {
    ElementId id = 0;
    Symbol node;
    Symbol edge;
    Value value;

    bool same_content(const Element& o) const {
        return node == o.node && edge == o.edge && value == o.value;
    }
};

// Content triple without identity, used for deltas, cues, and episodic events.
struct Triple {
    Symbol node;
    Symbol edge;
    Value value;

    friend bool operator==(const Triple& a, const Triple& b) {
        return a.node == b.node && a.edge == b.edge && a.value == b.value;
    }
    friend bool operator<(const Triple& a, const Triple& b) {
        if (a.node != b.node) return a.node < b.node;
        if (a.edge != b.edge) return a.edge < b.edge;
        return a.value < b.value;
    }
    std::string show(const SymbolTable& t) const;
};

// A chunk is a view over elements that share one node.
struct Chunk {
    Symbol name;
    std::vector<Element> elements;
};

// Throws heterogeneous_node / empty_chunk on bad input.
Chunk assemble_chunk(std::span<const Element> elements);

enum class StatusState : uint8_t { free_, busy, success, failure };

// Module status data: architecture-written, agent-readable, never agent-writable.
struct ModuleStatus {
    Symbol module;
    StatusState state = StatusState::free_;
    Symbol detail;  // optional innate atom
};

Symbol status_symbol(const Innate& in, StatusState s);

struct LinkResult {
    bool reachable = false;
    int depth = 0;  // shortest path length in edges; 0 when root == target
};

// Directed reachability root -> target following elements whose value is a
// symbol. Dangling symbol values are terminal leaves and cost one edge.
LinkResult linked(std::span<const Element> graph, Symbol root, Symbol target);

}  // namespace cogk
