#include <algorithm>
#include <cctype>
#include <cstdlib>

#include "cogk/env.hpp"

namespace cogk {

namespace {

struct EnvTok {
    std::string text;
    bool is_string = false;
    bool is_brace_open = false, is_brace_close = false, is_caret = false;
    SourceSpan span;
};

class EnvScanner {
public:
    EnvScanner(const std::string& text, std::string file, std::vector<Diagnostic>& diags)
        : text_(text), file_(std::move(file)), diags_(diags) {}

    std::vector<EnvTok> run() {
        std::vector<EnvTok> out;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
                continue;
            }
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
                continue;
            }
            EnvTok t;
            t.span = {file_, line_, col_, 1};
            if (c == '{') t.is_brace_open = true, t.text = "{", advance();
            else if (c == '}') t.is_brace_close = true, t.text = "}", advance();
            else if (c == '^') t.is_caret = true, t.text = "^", advance();
            else if (c == '"') {
                advance();
                t.is_string = true;
                while (pos_ < text_.size() && text_[pos_] != '"' && text_[pos_] != '\n') {
                    if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) {
                        advance();
                        char e = text_[pos_];
                        t.text += e == 'n' ? '\n' : e == 't' ? '\t' : e;
                        advance();
                        continue;
                    }
                    t.text += text_[pos_];
                    advance();
                }
                if (pos_ >= text_.size() || text_[pos_] != '"')
                    diags_.push_back({t.span, true, "unterminated string"});
                else
                    advance();
            } else {
                while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
                       text_[pos_] != '{' && text_[pos_] != '}' && text_[pos_] != '^' &&
                       text_[pos_] != '"' && text_[pos_] != '#') {
                    t.text += text_[pos_];
                    advance();
                }
            }
            out.push_back(std::move(t));
        }
        EnvTok eof;
        eof.span = {file_, line_, col_, 0};
        out.push_back(eof);
        return out;
    }

private:
    void advance() {
        if (text_[pos_] == '\n') ++line_, col_ = 0;
        ++pos_;
        ++col_;
    }

    const std::string& text_;
    std::string file_;
    std::vector<Diagnostic>& diags_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;
};

bool numeric(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

class EnvParser {
public:
    EnvParser(std::vector<EnvTok> toks, SymbolTable& syms, std::vector<Diagnostic>& diags)
        : toks_(std::move(toks)), syms_(syms), diags_(diags) {}

    EnvScript run() {
        EnvScript out;
        while (!eof()) {
            if (word() == "motor") parse_motor(out);
            else if (word() == "at") parse_timed(out);
            else {
                error("expected 'motor' or 'at'");
                skip_entry();
            }
        }
        return out;
    }

private:
    const EnvTok& peek() const { return toks_[pos_]; }
    bool eof() const { return pos_ + 1 >= toks_.size(); }
    const std::string& word() const { return peek().text; }
    EnvTok take() {
        EnvTok t = toks_[pos_];
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }
    void error(const std::string& msg) { diags_.push_back({peek().span, true, msg}); }

    void skip_entry() {
        int depth = 0;
        while (!eof()) {
            if (peek().is_brace_open) ++depth;
            if (peek().is_brace_close && depth > 0) --depth;
            take();
            if (depth == 0 && !eof() && (word() == "motor" || word() == "at")) return;
        }
    }

    std::optional<EnvPercept> parse_percept_body() {
        EnvPercept p;
        if (peek().is_brace_open || peek().is_caret || peek().is_string || eof()) {
            error("expected a percept chunk stem");
            return std::nullopt;
        }
        p.stem = take().text;
        if (!peek().is_brace_open) {
            error("expected '{' opening the percept slots");
            return std::nullopt;
        }
        take();
        while (peek().is_caret) {
            take();
            if (eof() || peek().is_brace_close || peek().is_brace_open) {
                error("expected a slot name after '^'");
                return std::nullopt;
            }
            Symbol edge = syms_.resolve(take().text);
            if (eof() || peek().is_brace_close || peek().is_caret) {
                error("expected a slot value");
                return std::nullopt;
            }
            EnvTok v = take();
            double num;
            Value val = v.is_string         ? Value::str(v.text)
                        : numeric(v.text, num) ? Value::num(num)
                                               : Value::sym(syms_.resolve(v.text));
            p.slots.emplace_back(edge, val);
        }
        if (!peek().is_brace_close) {
            error("expected '}' closing the percept");
            return std::nullopt;
        }
        take();
        return p;
    }

    void parse_motor(EnvScript& out) {
        take();  // motor
        std::string key;
        while (!eof() && !peek().is_brace_open && !peek().is_caret) {
            if (!key.empty()) key += ' ';
            key += take().text;
        }
        if (key.empty()) {
            error("motor entry needs at least one argument token");
            skip_entry();
            return;
        }
        if (!peek().is_brace_open) {
            error("expected '{' opening the motor response");
            skip_entry();
            return;
        }
        SourceSpan span = peek().span;
        take();
        MotorResponse resp;
        while (!eof() && !peek().is_brace_close) {
            std::string field = take().text;
            if (field == "latency") {
                double n;
                if (eof() || !numeric(word(), n) || n < 0 || n != static_cast<int64_t>(n)) {
                    error("latency must be a nonnegative integer");
                    skip_entry();
                    return;
                }
                resp.latency = static_cast<int64_t>(n);
                take();
            } else if (field == "status") {
                if (word() == "success") resp.succeeds = true;
                else if (word() == "failure") resp.succeeds = false;
                else {
                    error("status must be success or failure");
                    skip_entry();
                    return;
                }
                take();
            } else if (field == "percept") {
                auto p = parse_percept_body();
                if (!p) {
                    skip_entry();
                    return;
                }
                resp.percept = std::move(*p);
            } else {
                error("unknown motor field '" + field + "' (latency, status, percept)");
                skip_entry();
                return;
            }
        }
        if (peek().is_brace_close) take();
        if (out.motor.count(key))
            diags_.push_back({span, true, "duplicate motor entry '" + key + "'"});
        else
            out.motor.emplace(std::move(key), std::move(resp));
    }

    void parse_timed(EnvScript& out) {
        take();  // at
        double at;
        if (eof() || !numeric(word(), at) || at < 0 || at != static_cast<int64_t>(at)) {
            error("'at' needs a nonnegative integer time");
            skip_entry();
            return;
        }
        take();
        TimedEnvEvent ev;
        ev.at = static_cast<int64_t>(at);
        if (word() == "reward") {
            take();
            double amount;
            if (eof() || !numeric(word(), amount)) {
                error("reward needs a numeric amount");
                skip_entry();
                return;
            }
            take();
            ev.is_reward = true;
            ev.amount = amount;
        } else if (word() == "percept") {
            take();
            auto p = parse_percept_body();
            if (!p) {
                skip_entry();
                return;
            }
            ev.percept = std::move(*p);
        } else {
            error("expected 'reward' or 'percept' after the time");
            skip_entry();
            return;
        }
        out.timeline.push_back(std::move(ev));
    }

    std::vector<EnvTok> toks_;
    SymbolTable& syms_;
    std::vector<Diagnostic>& diags_;
    size_t pos_ = 0;
};

}  // namespace

EnvParseResult parse_env(const std::string& text, const std::string& filename, SymbolTable& syms) {
    EnvParseResult res;
    EnvScanner scanner(text, filename, res.diagnostics);
    EnvParser parser(scanner.run(), syms, res.diagnostics);
    res.script = parser.run();
    std::stable_sort(res.script.timeline.begin(), res.script.timeline.end(),
                     [](const TimedEnvEvent& a, const TimedEnvEvent& b) { return a.at < b.at; });
    return res;
}

}  // namespace cogk
