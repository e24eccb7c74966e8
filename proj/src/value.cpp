#include "cogk/value.hpp"

#include <charconv>
#include <cmath>

namespace cogk {

std::string format_number(double n) {
    if (std::isfinite(n) && n == std::floor(n) && std::abs(n) < 9.007199254740992e15) {
        char buf[32];
        auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), static_cast<int64_t>(n));
        return std::string(buf, p);
    }
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), n);
    return std::string(buf, p);
}

std::string Value::show(const SymbolTable& t) const {
    switch (kind()) {
        case ValueKind::sym: return t.text(as_sym());
        case ValueKind::num: return format_number(as_num());
        case ValueKind::str: return "\"" + as_str() + "\"";
    }
    return {};
}

std::string Value::sort_key(const SymbolTable& t) const {
    // Kind prefix keeps the ordering total across kinds.
    switch (kind()) {
        case ValueKind::sym: return "s:" + t.text(as_sym());
        case ValueKind::num: return "n:" + format_number(as_num());
        case ValueKind::str: return "t:" + as_str();
    }
    return {};
}

}  // namespace cogk
