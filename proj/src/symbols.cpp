#include "cogk/symbols.hpp"

#include <algorithm>

namespace cogk {

const std::vector<std::string_view>& SymbolTable::innate_vocabulary() {
    static const std::vector<std::string_view> vocab = {
        // module status values
        "free", "busy", "success", "failure",
        // buffer field names
        "percept", "command", "payload", "cue", "retrieved", "status",
        // impasse types
        "state-no-change", "tie", "conflict", "operator-no-change",
        // module commands
        "retrieve", "retrieve-blend", "retrieve-name",
        "em-query", "em-next", "em-prev",
        "store", "motor", "halt",
    };
    return vocab;
}

SymbolTable::SymbolTable() {
    entries_.push_back({"", SymbolKind::user});  // null slot
    for (auto v : innate_vocabulary()) add(v, SymbolKind::innate);
}

Symbol SymbolTable::add(std::string_view text, SymbolKind kind) {
    uint32_t idx = static_cast<uint32_t>(entries_.size());
    entries_.push_back({std::string(text), kind});
    by_text_.emplace(std::string(text), idx);
    return Symbol(idx);
}

Symbol SymbolTable::intern(std::string_view text) {
    if (text.empty()) fail(Errc::bad_model, "cannot intern empty symbol text");
    auto it = by_text_.find(std::string(text));
    if (it != by_text_.end()) {
        if (entries_[it->second].kind == SymbolKind::innate)
            fail(Errc::vocabulary_collision,
                 "'" + std::string(text) + "' is innate vocabulary and cannot be a user symbol");
        return Symbol(it->second);
    }
    return add(text, SymbolKind::user);
}

Symbol SymbolTable::innate(std::string_view text) const {
    auto it = by_text_.find(std::string(text));
    if (it == by_text_.end() || entries_[it->second].kind != SymbolKind::innate)
        fail(Errc::unknown_innate, "no innate atom '" + std::string(text) + "'");
    return Symbol(it->second);
}

Symbol SymbolTable::resolve(std::string_view text) {
    auto it = by_text_.find(std::string(text));
    if (it != by_text_.end()) return Symbol(it->second);
    return add(text, SymbolKind::user);
}

Symbol SymbolTable::lookup(std::string_view text) const {
    auto it = by_text_.find(std::string(text));
    return it == by_text_.end() ? Symbol() : Symbol(it->second);
}

const std::string& SymbolTable::text(Symbol s) const {
    return entries_.at(s.raw()).text;
}

SymbolKind SymbolTable::kind(Symbol s) const {
    return entries_.at(s.raw()).kind;
}

Innate::Innate(const SymbolTable& t)
    : free(t.innate("free")),
      busy(t.innate("busy")),
      success(t.innate("success")),
      failure(t.innate("failure")),
      percept(t.innate("percept")),
      command(t.innate("command")),
      payload(t.innate("payload")),
      cue(t.innate("cue")),
      retrieved(t.innate("retrieved")),
      status(t.innate("status")),
      state_no_change(t.innate("state-no-change")),
      tie(t.innate("tie")),
      conflict(t.innate("conflict")),
      operator_no_change(t.innate("operator-no-change")),
      cmd_retrieve(t.innate("retrieve")),
      cmd_retrieve_blend(t.innate("retrieve-blend")),
      cmd_retrieve_name(t.innate("retrieve-name")),
      cmd_em_query(t.innate("em-query")),
      cmd_em_next(t.innate("em-next")),
      cmd_em_prev(t.innate("em-prev")),
      cmd_store(t.innate("store")),
      cmd_motor(t.innate("motor")),
      cmd_halt(t.innate("halt")) {}

bool Innate::is_command(Symbol s) const {
    return s == cmd_retrieve || s == cmd_retrieve_blend || s == cmd_retrieve_name ||
           s == cmd_em_query || s == cmd_em_next || s == cmd_em_prev ||
           s == cmd_store || s == cmd_motor || s == cmd_halt;
}

bool Innate::is_status_value(Symbol s) const {
    return s == free || s == busy || s == success || s == failure;
}

bool Innate::is_impasse(Symbol s) const {
    return s == state_no_change || s == tie || s == conflict || s == operator_no_change;
}

bool Innate::is_buffer_field(Symbol s) const {
    return s == percept || s == command || s == payload || s == cue ||
           s == retrieved || s == status;
}

}  // namespace cogk
