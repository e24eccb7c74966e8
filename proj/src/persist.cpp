#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "cogk/errors.hpp"
#include "cogk/persist.hpp"

namespace cogk {

namespace {

constexpr const char* kMagic = "cogk-dm v1";
constexpr int64_t kRetrievedSentinel = std::numeric_limits<int64_t>::min() / 4;

uint64_t fnv1a(const std::string& data) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void append_value(std::string& out, const Value& v, const SymbolTable& syms) {
    switch (v.kind()) {
        case ValueKind::sym: out += "y " + syms.text(v.as_sym()); break;
        case ValueKind::num: out += "n " + format_number(v.as_num()); break;
        case ValueKind::str: {
            out += "t \"";
            for (char c : v.as_str()) {
                if (c == '"' || c == '\\') out += '\\';
                if (c == '\n') { out += "\\n"; continue; }
                out += c;
            }
            out += '"';
            break;
        }
    }
}

void append_stamps(std::string& out, const std::vector<int64_t>& stamps) {
    for (int64_t t : stamps) out += " " + std::to_string(t);
}

// Splits a line into tokens; double-quoted tokens keep spaces and mark
// themselves as strings.
struct LineTok {
    std::string text;
    bool quoted = false;
};

std::vector<LineTok> split_line(const std::string& line, bool& bad) {
    std::vector<LineTok> out;
    size_t i = 0;
    bad = false;
    while (i < line.size()) {
        if (line[i] == ' ') {
            ++i;
            continue;
        }
        LineTok t;
        if (line[i] == '"') {
            t.quoted = true;
            ++i;
            while (i < line.size() && line[i] != '"') {
                if (line[i] == '\\' && i + 1 < line.size()) {
                    ++i;
                    t.text += line[i] == 'n' ? '\n' : line[i];
                    ++i;
                    continue;
                }
                t.text += line[i++];
            }
            if (i >= line.size()) {
                bad = true;
                return out;
            }
            ++i;
        } else {
            while (i < line.size() && line[i] != ' ') t.text += line[i++];
        }
        out.push_back(std::move(t));
    }
    return out;
}

bool parse_i64(const std::string& s, int64_t& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    long long v = std::strtoll(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size()) return false;
    out = v;
    return true;
}

Value parse_value(const LineTok& kind, const LineTok& tok, SymbolTable& syms, bool& ok) {
    ok = true;
    if (kind.text == "y") return Value::sym(syms.resolve(tok.text));
    if (kind.text == "t") return Value::str(tok.text);
    if (kind.text == "n") {
        char* end = nullptr;
        double d = std::strtod(tok.text.c_str(), &end);
        if (end == tok.text.c_str() + tok.text.size()) return Value::num(d);
    }
    ok = false;
    return Value();
}

[[noreturn]] void malformed(const std::string& path, size_t lineno, const std::string& why) {
    fail(Errc::bad_model,
         path + " line " + std::to_string(lineno) + ": " + why);
}

}  // namespace

void save_dm(const SemanticStore& sm, const EpisodicStore& em, const SymbolTable& syms,
             const std::string& path) {
    std::string body;

    for (Symbol name : sm.names_sorted()) {
        const StoredChunk& c = *sm.get(name);
        body += "chunk " + syms.text(name) + "\n";
        body += "a";
        append_stamps(body, c.accesses);
        body += "\n";
        if (c.last_retrieved_at != kRetrievedSentinel)
            body += "r " + std::to_string(c.last_retrieved_at) + "\n";
        for (const StoredSlot& s : c.slots) {
            body += "s " + syms.text(s.edge) + " ";
            append_value(body, s.val, syms);
            append_stamps(body, s.accesses);
            body += "\n";
        }
    }

    // sorted by text so interning order never shows in the bytes
    std::vector<std::pair<std::pair<std::string, std::string>, const std::vector<int64_t>*>> assoc;
    for (const auto& [pair, stamps] : sm.associations())
        assoc.push_back({{syms.text(pair.first), syms.text(pair.second)}, &stamps});
    std::sort(assoc.begin(), assoc.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [names, stamps] : assoc) {
        body += "assoc " + names.first + " " + names.second;
        append_stamps(body, *stamps);
        body += "\n";
    }

    for (const auto& ev : em.events()) {
        body += "event " + syms.text(ev.t.node) + " " + syms.text(ev.t.edge) + " ";
        append_value(body, ev.t.value, syms);
        body += " " + std::to_string(ev.added_at) + " ";
        body += ev.removed_at == std::numeric_limits<int64_t>::max()
                    ? "open"
                    : std::to_string(ev.removed_at);
        body += "\n";
    }
    for (const auto& [cycle, time] : em.index())
        body += "episode " + std::to_string(cycle) + " " + std::to_string(time) + "\n";

    std::string full = std::string(kMagic) + "\nchecksum " + hex64(fnv1a(body)) + "\n" + body;
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(Errc::io, "cannot write " + tmp);
        out << full;
        if (!out.flush()) fail(Errc::io, "short write to " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) fail(Errc::io, "cannot replace " + path);
}

void load_dm(SemanticStore& sm, EpisodicStore& em, SymbolTable& syms, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::io, "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string full = ss.str();

    size_t p1 = full.find('\n');
    if (p1 == std::string::npos || full.substr(0, p1) != kMagic)
        fail(Errc::bad_model, path + ": not a " + std::string(kMagic) + " file");
    size_t p2 = full.find('\n', p1 + 1);
    if (p2 == std::string::npos) fail(Errc::bad_model, path + ": truncated header");
    std::string checksum_line = full.substr(p1 + 1, p2 - p1 - 1);
    if (checksum_line.rfind("checksum ", 0) != 0)
        fail(Errc::bad_model, path + ": missing checksum line");
    std::string body = full.substr(p2 + 1);
    if (checksum_line.substr(9) != hex64(fnv1a(body)))
        fail(Errc::checksum_mismatch, path + ": checksum mismatch");

    // Parse everything into scratch structures first; commit only at the end.
    std::vector<StoredChunk> chunks;
    std::map<std::pair<Symbol, Symbol>, std::vector<int64_t>> assoc;
    std::vector<EpisodicStore::Event> events;
    std::vector<std::pair<int64_t, int64_t>> index;

    std::istringstream lines(body);
    std::string line;
    size_t lineno = 2;
    StoredChunk* open_chunk = nullptr;
    while (std::getline(lines, line)) {
        ++lineno;
        if (line.empty()) continue;
        bool bad = false;
        auto toks = split_line(line, bad);
        if (bad || toks.empty()) malformed(path, lineno, "unreadable line");
        const std::string& head = toks[0].text;

        if (head == "chunk") {
            if (toks.size() != 2) malformed(path, lineno, "chunk line needs a name");
            chunks.emplace_back();
            chunks.back().name = syms.resolve(toks[1].text);
            open_chunk = &chunks.back();
        } else if (head == "a") {
            if (!open_chunk) malformed(path, lineno, "access list outside a chunk");
            for (size_t i = 1; i < toks.size(); ++i) {
                int64_t t;
                if (!parse_i64(toks[i].text, t)) malformed(path, lineno, "bad access stamp");
                open_chunk->accesses.push_back(t);
            }
        } else if (head == "r") {
            if (!open_chunk || toks.size() != 2) malformed(path, lineno, "bad retrieved-at line");
            if (!parse_i64(toks[1].text, open_chunk->last_retrieved_at))
                malformed(path, lineno, "bad retrieved-at stamp");
        } else if (head == "s") {
            if (!open_chunk || toks.size() < 4) malformed(path, lineno, "bad slot line");
            StoredSlot slot;
            slot.edge = syms.resolve(toks[1].text);
            bool ok = false;
            slot.val = parse_value(toks[2], toks[3], syms, ok);
            if (!ok) malformed(path, lineno, "bad slot value");
            for (size_t i = 4; i < toks.size(); ++i) {
                int64_t t;
                if (!parse_i64(toks[i].text, t)) malformed(path, lineno, "bad slot stamp");
                slot.accesses.push_back(t);
            }
            open_chunk->slots.push_back(std::move(slot));
        } else if (head == "assoc") {
            if (toks.size() < 3) malformed(path, lineno, "bad assoc line");
            auto key = std::make_pair(syms.resolve(toks[1].text), syms.resolve(toks[2].text));
            auto& stamps = assoc[key];
            for (size_t i = 3; i < toks.size(); ++i) {
                int64_t t;
                if (!parse_i64(toks[i].text, t)) malformed(path, lineno, "bad assoc stamp");
                stamps.push_back(t);
            }
        } else if (head == "event") {
            if (toks.size() != 7) malformed(path, lineno, "bad event line");
            EpisodicStore::Event ev;
            ev.t.node = syms.resolve(toks[1].text);
            ev.t.edge = syms.resolve(toks[2].text);
            bool ok = false;
            ev.t.value = parse_value(toks[3], toks[4], syms, ok);
            if (!ok) malformed(path, lineno, "bad event value");
            if (!parse_i64(toks[5].text, ev.added_at)) malformed(path, lineno, "bad added-at");
            if (toks[6].text == "open")
                ev.removed_at = std::numeric_limits<int64_t>::max();
            else if (!parse_i64(toks[6].text, ev.removed_at))
                malformed(path, lineno, "bad removed-at");
            events.push_back(std::move(ev));
        } else if (head == "episode") {
            if (toks.size() != 3) malformed(path, lineno, "bad episode line");
            int64_t cycle, time;
            if (!parse_i64(toks[1].text, cycle) || !parse_i64(toks[2].text, time))
                malformed(path, lineno, "bad episode entry");
            index.emplace_back(cycle, time);
        } else {
            malformed(path, lineno, "unknown record '" + head + "'");
        }
    }

    for (auto& c : chunks) sm.insert_raw(std::move(c));
    sm.associations_mut() = std::move(assoc);
    em.restore(std::move(events), std::move(index));
}

}  // namespace cogk
