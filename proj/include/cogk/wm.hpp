#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cogk/core.hpp"
#include "cogk/symbols.hpp"
#include "cogk/value.hpp"

namespace cogk {

enum class Mode { actr, soar };

enum class Provenance { rule, dm, percept, architecture };

// Per-element bookkeeping the architecture keeps alongside the graph. Rules
// can never see any of this; it feeds learning and forgetting only.
struct WmMeta {
    int64_t created_at = 0;
    std::vector<int64_t> accesses;
    Provenance prov = Provenance::architecture;
    uint64_t source_inst = 0;           // creating (or cue-issuing) instantiation
    Symbol copy_of;                     // DM chunk this element was copied from
    bool justified = false;             // persists only while a support matches
    std::vector<uint64_t> supports;     // supporting instantiations (justified only)
};

struct AddInfo {
    Provenance prov = Provenance::architecture;
    uint64_t inst = 0;
    Symbol copy_of;
    bool justified = false;
};

struct Buffer {
    Symbol name;
    Symbol owner_state;  // soar only; null in actr mode
    std::string detail;  // last module status detail, for traces
};

class WorkingMemory {
public:
    WorkingMemory(SymbolTable& syms, const Innate& innate, Mode mode);

    Mode mode() const { return mode_; }
    SymbolTable& symbols() const { return syms_; }
    const Innate& innate() const { return in_; }

    // elements
    ElementId add(Symbol node, Symbol edge, const Value& value, const AddInfo& info, int64_t now);
    // actr: node is a buffer or hangs off one; always true in soar mode
    bool seated(Symbol node) const;
    void remove(ElementId id);
    bool remove_triple(Symbol node, Symbol edge, const Value& value);  // false if absent
    bool has(ElementId id) const;
    const Element& get(ElementId id) const;
    const WmMeta& meta(ElementId id) const;
    WmMeta& meta_mut(ElementId id);
    std::optional<ElementId> find_triple(Symbol node, Symbol edge, const Value& value) const;
    std::vector<ElementId> by_node(Symbol node) const;
    size_t size() const { return elements_.size(); }
    const std::map<ElementId, Element>& elements() const { return elements_; }

    void touch(ElementId id, int64_t now);

    // buffers
    void declare_buffer(Symbol name, Symbol owner_state, int64_t now);
    void drop_buffer(Symbol name);
    bool is_buffer(Symbol name) const;
    const Buffer* buffer(Symbol name) const;
    Buffer* buffer(Symbol name);
    std::vector<Symbol> buffer_names() const;  // declaration order
    void set_status(Symbol buf, StatusState s, int64_t now, const std::string& detail = "");
    StatusState status(Symbol buf) const;
    // all non-status elements on the buffer node plus one level of referenced
    // chunks; the ids are returned so callers can harvest chunks before removal
    std::vector<ElementId> buffer_content(Symbol buf) const;
    std::vector<ElementId> clear_buffer(Symbol buf);

    Chunk chunk_at(Symbol node) const;  // empty elements vector if node bare

    // soar states
    const std::vector<Symbol>& states() const { return states_; }
    Symbol top_state() const { return states_.front(); }
    Symbol deepest_state() const { return states_.back(); }
    Symbol create_substate(Symbol impasse, std::span<const Symbol> candidates, int64_t now);
    int resolve_substate(Symbol state);  // returns removed element count
    size_t collect_orphans();
    // node -> shallowest state index reaching it; absent = orphan
    std::map<Symbol, int> compute_levels() const;
    int level_of_node(Symbol node) const;  // -1 if unreachable
    int state_index(Symbol state) const;   // -1 if not a state

    Symbol fresh_node(const std::string& stem);  // s2, o1, blend1, ... skipping taken texts

    std::vector<ElementId> forget(double threshold, double decay, int64_t now);

    std::vector<std::string> dump() const;  // sorted "(node ^edge value)" lines
    void audit() const;                     // throws Errc::internal on a broken invariant

private:
    void index_add(const Element& e);
    void index_remove(const Element& e);
    bool placed_actr(Symbol node) const;

    SymbolTable& syms_;
    const Innate& in_;
    Mode mode_;
    ElementId next_id_ = 1;
    int substate_counter_ = 1;  // top state is s1
    std::map<std::string, int> stem_counter_;
    std::map<ElementId, Element> elements_;
    std::map<ElementId, WmMeta> meta_;
    std::map<Triple, ElementId> content_;
    std::map<Symbol, std::set<ElementId>> by_node_;
    std::map<Symbol, Buffer> buffers_;
    std::vector<Symbol> buffer_order_;
    std::vector<Symbol> states_;  // empty in actr mode
};

}  // namespace cogk
