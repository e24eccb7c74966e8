#pragma once
// Interned symbols and the fixed innate vocabulary.
//
// Interning is injective: equal text always yields the identical handle.
// Innate atoms (module status values, buffer field names, impasse types,
// module commands) are minted once at table construction; user code can
// neither re-intern their texts nor add new innate atoms.

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cogk/errors.hpp"

namespace cogk {

enum class SymbolKind : uint8_t { user, innate };

// Lightweight handle into a SymbolTable. Default-constructed handle is null.
class Symbol {
public:
    Symbol() = default;
    bool valid() const { return idx_ != 0; }
    uint32_t raw() const { return idx_; }
    friend bool operator==(Symbol a, Symbol b) = default;
    friend auto operator<=>(Symbol a, Symbol b) = default;

private:
    friend class SymbolTable;
    explicit Symbol(uint32_t i) : idx_(i) {}
    uint32_t idx_ = 0;
};

struct SymbolHash {
    size_t operator()(Symbol s) const { return std::hash<uint32_t>()(s.raw()); }
};

class SymbolTable {
public:
    SymbolTable();

    // Interns user text. Idempotent. Innate-vocabulary texts collide.
    Symbol intern(std::string_view text);

    // Returns the innate atom for a vocabulary text; throws if unknown.
    Symbol innate(std::string_view text) const;

    // Innate atom when the text is vocabulary, fresh/existing user atom otherwise.
    // This is what the parser uses to resolve identifiers.
    Symbol resolve(std::string_view text);

    bool has(std::string_view text) const { return by_text_.count(std::string(text)) > 0; }
    Symbol lookup(std::string_view text) const;  // null symbol when absent

    const std::string& text(Symbol s) const;
    SymbolKind kind(Symbol s) const;
    bool is_innate(Symbol s) const { return s.valid() && kind(s) == SymbolKind::innate; }
    size_t size() const { return entries_.size(); }

    static const std::vector<std::string_view>& innate_vocabulary();

private:
    Symbol add(std::string_view text, SymbolKind kind);

    struct Entry {
        std::string text;
        SymbolKind kind;
    };
    std::vector<Entry> entries_;  // entries_[0] reserved for the null symbol
    std::unordered_map<std::string, uint32_t> by_text_;
};

// Cached handles for the innate atoms the architecture touches constantly.
struct Innate {
    Symbol free, busy, success, failure;
    Symbol percept, command, payload, cue, retrieved, status;
    Symbol state_no_change, tie, conflict, operator_no_change;
    Symbol cmd_retrieve, cmd_retrieve_blend, cmd_retrieve_name;
    Symbol cmd_em_query, cmd_em_next, cmd_em_prev;
    Symbol cmd_store, cmd_motor, cmd_halt;

    explicit Innate(const SymbolTable& t);
    bool is_command(Symbol s) const;
    bool is_status_value(Symbol s) const;
    bool is_impasse(Symbol s) const;
    bool is_buffer_field(Symbol s) const;
};

}  // namespace cogk
