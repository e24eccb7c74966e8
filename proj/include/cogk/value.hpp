#pragma once
// Element values: a symbol, a number, or a string.
//
// A symbol value doubles as a node reference whenever the graph it lives in
// has elements rooted at that symbol; graph traversal (linkage, spreading)
// resolves this dynamically, so no separate node-ref alternative is stored.

#include <compare>
#include <cstdint>
#include <string>
#include <variant>

#include "cogk/symbols.hpp"

namespace cogk {

enum class ValueKind : uint8_t { sym = 0, num = 1, str = 2 };

class Value {
public:
    Value() : data_(Symbol()) {}
    static Value sym(Symbol s) { return Value(s); }
    static Value num(double n) { return Value(n); }
    static Value str(std::string s) { return Value(std::move(s)); }

    ValueKind kind() const { return static_cast<ValueKind>(data_.index()); }
    bool is_sym() const { return kind() == ValueKind::sym; }
    bool is_num() const { return kind() == ValueKind::num; }
    bool is_str() const { return kind() == ValueKind::str; }

    Symbol as_sym() const { return std::get<Symbol>(data_); }
    double as_num() const { return std::get<double>(data_); }
    const std::string& as_str() const { return std::get<std::string>(data_); }

    friend bool operator==(const Value& a, const Value& b) { return a.data_ == b.data_; }
    friend bool operator<(const Value& a, const Value& b) { return a.data_ < b.data_; }

    // Display form; symbols render by text, integral numbers without a point.
    std::string show(const SymbolTable& t) const;

    // Deterministic text-based sort key used by canonical dumps.
    std::string sort_key(const SymbolTable& t) const;

private:
    explicit Value(Symbol s) : data_(s) {}
    explicit Value(double n) : data_(n) {}
    explicit Value(std::string s) : data_(std::move(s)) {}
    std::variant<Symbol, double, std::string> data_;
};

// Canonical number rendering: shortest round-trip text, integers bare.
std::string format_number(double n);

}  // namespace cogk
