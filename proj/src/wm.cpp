#include "cogk/wm.hpp"

#include <algorithm>
#include <deque>

#include "cogk/activation.hpp"
#include "cogk/errors.hpp"

namespace cogk {

WorkingMemory::WorkingMemory(SymbolTable& syms, const Innate& innate, Mode mode)
    : syms_(syms), in_(innate), mode_(mode) {
    if (mode_ == Mode::soar) {
        // models address the top state by its conventional name
        Symbol s1 = syms_.intern("s1");
        states_.push_back(s1);
        // the fixed module interface area; substates share these buffers
        for (const char* n : {"dm", "em", "percept", "motor", "reward"})
            declare_buffer(syms_.resolve(n), s1, 0);
    }
}

ElementId WorkingMemory::add(Symbol node, Symbol edge, const Value& value, const AddInfo& info,
                             int64_t now) {
    if (info.prov == Provenance::rule && edge == in_.status)
        fail(Errc::wall_violation, "rules cannot write module status");
    if (mode_ == Mode::actr && !placed_actr(node))
        fail(Errc::placement, "element node '" + syms_.text(node) + "' is outside every buffer");

    Triple t{node, edge, value};
    auto hit = content_.find(t);
    if (hit != content_.end()) {
        // content-set semantics: an existing triple absorbs the add
        WmMeta& m = meta_.at(hit->second);
        if (info.justified) {
            if (m.justified && info.inst &&
                std::find(m.supports.begin(), m.supports.end(), info.inst) == m.supports.end())
                m.supports.push_back(info.inst);
        } else if (m.justified) {
            m.justified = false;  // persistent add upgrades a justified element
            m.supports.clear();
        }
        return hit->second;
    }

    ElementId id = next_id_++;
    Element e{id, node, edge, value};
    elements_.emplace(id, e);
    WmMeta m;
    m.created_at = now;
    m.prov = info.prov;
    m.source_inst = info.inst;
    m.copy_of = info.copy_of;
    m.justified = info.justified;
    if (info.justified && info.inst) m.supports.push_back(info.inst);
    if (!(edge == in_.status) && info.prov != Provenance::percept) m.accesses.push_back(now);
    meta_.emplace(id, std::move(m));
    index_add(e);
    return id;
}

void WorkingMemory::remove(ElementId id) {
    auto it = elements_.find(id);
    if (it == elements_.end()) fail(Errc::unknown_id, "no element " + std::to_string(id));
    index_remove(it->second);
    elements_.erase(it);
    meta_.erase(id);
}

bool WorkingMemory::remove_triple(Symbol node, Symbol edge, const Value& value) {
    auto it = content_.find(Triple{node, edge, value});
    if (it == content_.end()) return false;
    remove(it->second);
    return true;
}

bool WorkingMemory::has(ElementId id) const { return elements_.count(id) != 0; }

const Element& WorkingMemory::get(ElementId id) const {
    auto it = elements_.find(id);
    if (it == elements_.end()) fail(Errc::unknown_id, "no element " + std::to_string(id));
    return it->second;
}

const WmMeta& WorkingMemory::meta(ElementId id) const { return meta_.at(id); }
WmMeta& WorkingMemory::meta_mut(ElementId id) { return meta_.at(id); }

std::optional<ElementId> WorkingMemory::find_triple(Symbol node, Symbol edge,
                                                    const Value& value) const {
    auto it = content_.find(Triple{node, edge, value});
    if (it == content_.end()) return std::nullopt;
    return it->second;
}

std::vector<ElementId> WorkingMemory::by_node(Symbol node) const {
    auto it = by_node_.find(node);
    if (it == by_node_.end()) return {};
    return std::vector<ElementId>(it->second.begin(), it->second.end());
}

void WorkingMemory::touch(ElementId id, int64_t now) {
    auto it = elements_.find(id);
    if (it == elements_.end()) return;
    WmMeta& m = meta_.at(id);
    if (it->second.edge == in_.status || m.prov == Provenance::percept) return;
    m.accesses.push_back(now);
}

void WorkingMemory::declare_buffer(Symbol name, Symbol owner_state, int64_t now) {
    if (buffers_.count(name)) return;
    Buffer b;
    b.name = name;
    b.owner_state = owner_state;
    buffers_.emplace(name, b);
    buffer_order_.push_back(name);
    if (mode_ == Mode::soar && !(owner_state == Symbol{}))
        add(owner_state, name, Value::sym(name), {}, now);
    add(name, in_.status, Value::sym(in_.free), {}, now);
}

void WorkingMemory::drop_buffer(Symbol name) {
    buffers_.erase(name);
    buffer_order_.erase(std::remove(buffer_order_.begin(), buffer_order_.end(), name),
                        buffer_order_.end());
}

bool WorkingMemory::is_buffer(Symbol name) const { return buffers_.count(name) != 0; }

const Buffer* WorkingMemory::buffer(Symbol name) const {
    auto it = buffers_.find(name);
    return it == buffers_.end() ? nullptr : &it->second;
}

Buffer* WorkingMemory::buffer(Symbol name) {
    auto it = buffers_.find(name);
    return it == buffers_.end() ? nullptr : &it->second;
}

std::vector<Symbol> WorkingMemory::buffer_names() const { return buffer_order_; }

void WorkingMemory::set_status(Symbol buf, StatusState s, int64_t now, const std::string& detail) {
    Buffer* b = buffer(buf);
    if (!b) fail(Errc::unknown_id, "no buffer '" + syms_.text(buf) + "'");
    b->detail = detail;
    for (ElementId id : by_node(buf))
        if (get(id).edge == in_.status) remove(id);
    add(buf, in_.status, Value::sym(status_symbol(in_, s)), {}, now);
}

StatusState WorkingMemory::status(Symbol buf) const {
    auto it = by_node_.find(buf);
    if (it != by_node_.end())
        for (ElementId id : it->second) {
            const Element& e = elements_.at(id);
            if (e.edge == in_.status && e.value.is_sym()) {
                Symbol v = e.value.as_sym();
                if (v == in_.free) return StatusState::free_;
                if (v == in_.busy) return StatusState::busy;
                if (v == in_.success) return StatusState::success;
                if (v == in_.failure) return StatusState::failure;
            }
        }
    return StatusState::free_;
}

std::vector<ElementId> WorkingMemory::buffer_content(Symbol buf) const {
    std::vector<ElementId> out;
    std::set<Symbol> children;
    for (ElementId id : by_node(buf)) {
        const Element& e = elements_.at(id);
        if (e.edge == in_.status) continue;
        out.push_back(id);
        if (e.value.is_sym()) {
            Symbol v = e.value.as_sym();
            if (!is_buffer(v) && state_index(v) < 0 && by_node_.count(v)) children.insert(v);
        }
    }
    for (Symbol c : children)
        for (ElementId id : by_node(c)) out.push_back(id);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<ElementId> WorkingMemory::clear_buffer(Symbol buf) {
    std::vector<ElementId> ids = buffer_content(buf);
    for (ElementId id : ids)
        if (has(id)) remove(id);
    return ids;
}

Chunk WorkingMemory::chunk_at(Symbol node) const {
    Chunk c;
    c.name = node;
    for (ElementId id : by_node(node)) c.elements.push_back(elements_.at(id));
    return c;
}

Symbol WorkingMemory::fresh_node(const std::string& stem) {
    int& k = stem_counter_[stem];
    for (;;) {
        ++k;
        std::string text = stem + std::to_string(k);
        if (!syms_.has(text)) return syms_.intern(text);
    }
}

Symbol WorkingMemory::create_substate(Symbol impasse, std::span<const Symbol> candidates,
                                      int64_t now) {
    if (mode_ != Mode::soar) fail(Errc::unsupported_mode, "substates exist only in soar mode");
    if (!in_.is_impasse(impasse)) fail(Errc::unknown_innate, "not an impasse type");
    Symbol parent = states_.back();
    Symbol sub = fresh_node("s");
    states_.push_back(sub);
    add(sub, syms_.resolve("superstate"), Value::sym(parent), {}, now);
    add(sub, syms_.resolve("impasse"), Value::sym(impasse), {}, now);
    for (Symbol c : candidates) add(sub, syms_.resolve("item"), Value::sym(c), {}, now);
    return sub;
}

int WorkingMemory::state_index(Symbol state) const {
    for (size_t i = 0; i < states_.size(); ++i)
        if (states_[i] == state) return static_cast<int>(i);
    return -1;
}

int WorkingMemory::resolve_substate(Symbol state) {
    int d = state_index(state);
    if (d < 0) fail(Errc::unknown_id, "not a state: " + syms_.text(state));
    if (d == 0) fail(Errc::cannot_remove, "the top state cannot be resolved away");
    auto levels = compute_levels();
    std::vector<ElementId> doomed;
    for (const auto& [id, e] : elements_) {
        auto it = levels.find(e.node);
        if (it == levels.end() || it->second >= d) doomed.push_back(id);
    }
    for (ElementId id : doomed) remove(id);
    states_.resize(d);
    return static_cast<int>(doomed.size());
}

size_t WorkingMemory::collect_orphans() {
    if (mode_ != Mode::soar) return 0;
    auto levels = compute_levels();
    std::vector<ElementId> doomed;
    for (const auto& [id, e] : elements_)
        if (!levels.count(e.node)) doomed.push_back(id);
    for (ElementId id : doomed) remove(id);
    return doomed.size();
}

std::map<Symbol, int> WorkingMemory::compute_levels() const {
    std::map<Symbol, int> levels;
    for (size_t k = 0; k < states_.size(); ++k) {
        std::deque<Symbol> queue;
        if (!levels.count(states_[k])) {
            levels[states_[k]] = static_cast<int>(k);
            queue.push_back(states_[k]);
        }
        while (!queue.empty()) {
            Symbol n = queue.front();
            queue.pop_front();
            auto it = by_node_.find(n);
            if (it == by_node_.end()) continue;
            for (ElementId id : it->second) {
                const Element& e = elements_.at(id);
                if (!e.value.is_sym()) continue;
                Symbol v = e.value.as_sym();
                if (!levels.count(v)) {
                    levels[v] = static_cast<int>(k);
                    // terminal symbols get a level too but have nothing to walk
                    if (by_node_.count(v)) queue.push_back(v);
                }
            }
        }
    }
    return levels;
}

int WorkingMemory::level_of_node(Symbol node) const {
    auto levels = compute_levels();
    auto it = levels.find(node);
    return it == levels.end() ? -1 : it->second;
}

std::vector<ElementId> WorkingMemory::forget(double threshold, double decay, int64_t now) {
    std::vector<ElementId> removed;
    if (mode_ != Mode::soar) return removed;
    for (const auto& [id, e] : elements_) {
        const WmMeta& m = meta_.at(id);
        if (m.prov == Provenance::architecture || m.prov == Provenance::percept ||
            e.edge == in_.status)
            continue;
        if (bla(m.accesses, now, decay) < threshold) removed.push_back(id);
    }
    for (ElementId id : removed) remove(id);
    return removed;
}

std::vector<std::string> WorkingMemory::dump() const {
    std::vector<std::pair<std::array<std::string, 3>, std::string>> rows;
    for (const auto& [id, e] : elements_) {
        Triple t{e.node, e.edge, e.value};
        rows.push_back({{syms_.text(e.node), syms_.text(e.edge), e.value.sort_key(syms_)},
                        t.show(syms_)});
    }
    std::sort(rows.begin(), rows.end());
    std::vector<std::string> out;
    out.reserve(rows.size());
    for (auto& r : rows) out.push_back(std::move(r.second));
    return out;
}

void WorkingMemory::audit() const {
    for (const auto& [name, b] : buffers_) {
        int status_count = 0;
        auto it = by_node_.find(name);
        if (it != by_node_.end())
            for (ElementId id : it->second)
                if (elements_.at(id).edge == in_.status) ++status_count;
        if (status_count != 1)
            fail(Errc::internal, "buffer '" + syms_.text(name) + "' holds " +
                                     std::to_string(status_count) + " status elements");
    }
    if (mode_ == Mode::soar) {
        auto levels = compute_levels();
        for (const auto& [id, e] : elements_)
            if (!levels.count(e.node))
                fail(Errc::internal, "unlinked element " + Triple{e.node, e.edge, e.value}.show(syms_));
    } else {
        for (const auto& [id, e] : elements_)
            if (!placed_actr(e.node))
                fail(Errc::internal, "stray element " + Triple{e.node, e.edge, e.value}.show(syms_));
    }
}

void WorkingMemory::index_add(const Element& e) {
    content_[Triple{e.node, e.edge, e.value}] = e.id;
    by_node_[e.node].insert(e.id);
}

void WorkingMemory::index_remove(const Element& e) {
    content_.erase(Triple{e.node, e.edge, e.value});
    auto it = by_node_.find(e.node);
    if (it != by_node_.end()) {
        it->second.erase(e.id);
        if (it->second.empty()) by_node_.erase(it);
    }
}

bool WorkingMemory::seated(Symbol node) const {
    return mode_ != Mode::actr || placed_actr(node);
}

bool WorkingMemory::placed_actr(Symbol node) const {
    if (buffers_.count(node)) return true;
    for (const auto& [name, b] : buffers_) {
        auto it = by_node_.find(name);
        if (it == by_node_.end()) continue;
        for (ElementId id : it->second) {
            const Element& e = elements_.at(id);
            if (e.value.is_sym() && e.value.as_sym() == node) return true;
        }
    }
    return false;
}

}  // namespace cogk
