#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <set>

#include "cogk/dsl.hpp"
#include "cogk/errors.hpp"

namespace cogk {

std::string Diagnostic::show() const {
    return span.file + ":" + std::to_string(span.line) + ":" + std::to_string(span.col) + ": " +
           (is_error ? "error" : "warning") + ": " + message;
}

const std::vector<std::string>& default_actr_buffers() {
    static const std::vector<std::string> names = {"goal",  "imaginal", "retrieval",
                                                   "blend", "percept",  "motor"};
    return names;
}

const std::vector<std::pair<std::string, double>>& param_table() {
    static const std::vector<std::pair<std::string, double>> table = {
        {"cycle-cost", 50},
        {"utility-alpha", 0.2},
        {"utility-noise", 0.25},
        {"init-utility", 0},
        {"rl-alpha", 0.3},
        {"rl-gamma", 0.9},
        {"selection-temperature", 1},
        {"elaboration-limit", 100},
        {"decay", 0.5},
        {"tau", 0},
        {"tau-spontaneous", 2},
        {"latency-factor", 1000},
        {"assoc-strength", 2},
        {"spread-depth", 1},
        {"blend-temperature", 1},
        {"inhibition-window", 0},
        {"dm-noise", 0},
        {"compilation", 0},
        {"chunking", 0},
        {"spontaneous-retrieval", 0},
        {"idle-wait", 0},
        {"wm-decay-threshold", 0},
        {"forget-threshold", 0},
        {"forget-decay", 0.5},
    };
    return table;
}

namespace {

int edit_distance(const std::string& a, const std::string& b) {
    std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
    for (size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
    for (size_t i = 1; i <= a.size(); ++i) {
        cur[0] = static_cast<int>(i);
        for (size_t j = 1; j <= b.size(); ++j) {
            int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

}  // namespace

std::string suggest_name(const std::string& got, const std::vector<std::string>& candidates) {
    std::string best;
    int best_d = 4;
    for (const auto& c : candidates) {
        int d = edit_distance(got, c);
        if (d < best_d) best_d = d, best = c;
    }
    return best;
}

namespace {

enum class Tok {
    lparen,
    rparen,
    lbrace,
    rbrace,
    caret,
    ident,
    var,
    number,
    str,
    op_eq,
    op_ne,
    op_lt,
    op_gt,
    op_le,
    op_ge,
    bad,
    eof,
};

struct Token {
    Tok kind = Tok::eof;
    std::string text;
    double num = 0.0;
    SourceSpan span;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_cont(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '~';
}

class Lexer {
public:
    Lexer(const std::string& text, std::string file, std::vector<Diagnostic>& diags)
        : text_(text), file_(std::move(file)), diags_(diags) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            Token t = next();
            bool end = t.kind == Tok::eof;
            if (t.kind != Tok::bad) out.push_back(t);
            if (end) break;
        }
        return out;
    }

private:
    SourceSpan here(int length) const { return {file_, line_, col_, length}; }

    void advance() {
        if (pos_ < text_.size() && text_[pos_] == '\n') ++line_, col_ = 0;
        ++pos_;
        ++col_;
    }

    char peek(size_t ahead = 0) const {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }

    Token next() {
        for (;;) {
            while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
                advance();
            if (peek() == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
                continue;
            }
            break;
        }
        if (pos_ >= text_.size()) return {Tok::eof, "", 0.0, here(0)};

        char c = peek();
        SourceSpan start = here(1);
        switch (c) {
            case '(': advance(); return {Tok::lparen, "(", 0.0, start};
            case ')': advance(); return {Tok::rparen, ")", 0.0, start};
            case '{': advance(); return {Tok::lbrace, "{", 0.0, start};
            case '}': advance(); return {Tok::rbrace, "}", 0.0, start};
            case '^': advance(); return {Tok::caret, "^", 0.0, start};
            case '=': advance(); return {Tok::op_eq, "=", 0.0, start};
            case '<':
                advance();
                if (peek() == '=') { advance(); start.length = 2; return {Tok::op_le, "<=", 0.0, start}; }
                return {Tok::op_lt, "<", 0.0, start};
            case '>':
                advance();
                if (peek() == '=') { advance(); start.length = 2; return {Tok::op_ge, ">=", 0.0, start}; }
                return {Tok::op_gt, ">", 0.0, start};
            case '!':
                advance();
                if (peek() == '=') { advance(); start.length = 2; return {Tok::op_ne, "!=", 0.0, start}; }
                diags_.push_back({start, true, "stray '!' (did you mean '!='?)"});
                return {Tok::bad, "!", 0.0, start};
            default: break;
        }

        if (c == '"') return lex_string();
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '-' && std::isdigit(static_cast<unsigned char>(peek(1)))))
            return lex_number();
        if (c == '?') {
            advance();
            if (!ident_start(peek()) && !std::isdigit(static_cast<unsigned char>(peek()))) {
                diags_.push_back({start, true, "'?' must be followed by a variable name"});
                return {Tok::bad, "?", 0.0, start};
            }
            std::string name;
            while (ident_cont(peek())) name += peek(), advance();
            start.length = static_cast<int>(name.size()) + 1;
            return {Tok::var, name, 0.0, start};
        }
        if (ident_start(c)) {
            std::string name;
            while (ident_cont(peek())) name += peek(), advance();
            start.length = static_cast<int>(name.size());
            return {Tok::ident, name, 0.0, start};
        }

        diags_.push_back({start, true, std::string("unexpected character '") + c + "'"});
        advance();
        return {Tok::bad, std::string(1, c), 0.0, start};
    }

    Token lex_number() {
        SourceSpan start = here(0);
        std::string raw;
        if (peek() == '-') raw += peek(), advance();
        while (std::isdigit(static_cast<unsigned char>(peek()))) raw += peek(), advance();
        if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
            raw += peek(), advance();
            while (std::isdigit(static_cast<unsigned char>(peek()))) raw += peek(), advance();
        }
        if ((peek() == 'e' || peek() == 'E') &&
            (std::isdigit(static_cast<unsigned char>(peek(1))) ||
             ((peek(1) == '+' || peek(1) == '-') &&
              std::isdigit(static_cast<unsigned char>(peek(2)))))) {
            raw += peek(), advance();
            if (peek() == '+' || peek() == '-') raw += peek(), advance();
            while (std::isdigit(static_cast<unsigned char>(peek()))) raw += peek(), advance();
        }
        start.length = static_cast<int>(raw.size());
        return {Tok::number, raw, std::strtod(raw.c_str(), nullptr), start};
    }

    Token lex_string() {
        SourceSpan start = here(0);
        advance();  // opening quote
        std::string out;
        while (pos_ < text_.size() && peek() != '"') {
            char c = peek();
            if (c == '\n') break;
            if (c == '\\') {
                advance();
                switch (peek()) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case '\\': out += '\\'; break;
                    case '"': out += '"'; break;
                    default:
                        diags_.push_back({here(1), true, "unknown escape in string"});
                        out += peek();
                }
                advance();
                continue;
            }
            out += c;
            advance();
        }
        if (peek() != '"') {
            diags_.push_back({start, true, "unterminated string"});
            return {Tok::bad, out, 0.0, start};
        }
        advance();  // closing quote
        return {Tok::str, out, 0.0, start};
    }

    const std::string& text_;
    std::string file_;
    std::vector<Diagnostic>& diags_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;
};

const std::set<std::string>& top_keywords() {
    static const std::set<std::string> kw = {"mode",       "buffer",      "param",   "env",
                                            "wm",         "dm",          "production",
                                            "elaboration", "propose",    "evaluate", "apply"};
    return kw;
}

const std::set<std::string>& action_keywords() {
    static const std::set<std::string> kw = {"make", "remove", "clear", "command", "prefer"};
    return kw;
}

class Parser {
public:
    Parser(std::vector<Token> toks, SymbolTable& syms, std::vector<Diagnostic>& diags)
        : toks_(std::move(toks)), syms_(syms), diags_(diags) {}

    ModelAst run() {
        ModelAst ast;
        while (peek().kind != Tok::eof) {
            if (peek().kind != Tok::ident) {
                error(peek().span, "expected a declaration keyword");
                sync_toplevel();
                continue;
            }
            const std::string& kw = peek().text;
            if (kw == "mode") parse_mode(ast);
            else if (kw == "buffer") parse_buffer(ast);
            else if (kw == "param") parse_param(ast);
            else if (kw == "env") parse_env(ast);
            else if (kw == "wm") parse_wm_block(ast);
            else if (kw == "dm") parse_dm_block(ast);
            else if (top_keywords().count(kw)) parse_production(ast);
            else {
                std::string hint = suggest_name(kw, {top_keywords().begin(), top_keywords().end()});
                error(peek().span, "unknown declaration '" + kw + "'" +
                                       (hint.empty() ? "" : " (did you mean '" + hint + "'?)"));
                sync_toplevel();
            }
        }
        return ast;
    }

private:
    const Token& peek(size_t ahead = 0) const {
        size_t i = pos_ + ahead;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    Token take() {
        Token t = peek();
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }
    bool at(Tok k) const { return peek().kind == k; }
    bool at_ident(const char* text) const { return at(Tok::ident) && peek().text == text; }

    void error(const SourceSpan& s, std::string msg) { diags_.push_back({s, true, std::move(msg)}); }

    // Skips to the next top-level declaration keyword at brace depth zero.
    void sync_toplevel() {
        int depth = 0;
        while (!at(Tok::eof)) {
            if (at(Tok::lbrace)) ++depth;
            else if (at(Tok::rbrace)) {
                if (depth > 0) --depth;
                take();
                if (depth == 0) {
                    if (at(Tok::ident) && top_keywords().count(peek().text)) return;
                    continue;
                }
                continue;
            } else if (depth == 0 && at(Tok::ident) && top_keywords().count(peek().text)) {
                return;
            }
            take();
        }
    }

    bool expect(Tok k, const char* what) {
        if (at(k)) return true;
        error(peek().span, std::string("expected ") + what);
        return false;
    }

    std::optional<Symbol> take_name(const char* what) {
        if (!expect(Tok::ident, what)) return std::nullopt;
        Token t = take();
        try {
            return syms_.intern(t.text);
        } catch (const KernelError&) {
            error(t.span, "'" + t.text + "' is reserved architecture vocabulary");
            return std::nullopt;
        }
    }

    std::optional<Value> take_value() {
        if (at(Tok::ident)) return Value::sym(syms_.resolve(take().text));
        if (at(Tok::number)) return Value::num(take().num);
        if (at(Tok::str)) return Value::str(take().text);
        error(peek().span, "expected a value (symbol, number, or string)");
        return std::nullopt;
    }

    std::optional<Term> take_term() {
        if (at(Tok::var)) return Term::variable(syms_.resolve(take().text));
        auto v = take_value();
        if (!v) return std::nullopt;
        return Term::lit(*v);
    }

    void parse_mode(ModelAst& ast) {
        Token kw = take();
        if (ast.has_mode) error(kw.span, "duplicate mode declaration");
        if (!expect(Tok::ident, "'actr' or 'soar'")) return;
        Token m = take();
        if (m.text == "actr") ast.mode = Mode::actr;
        else if (m.text == "soar") ast.mode = Mode::soar;
        else {
            error(m.span, "mode must be 'actr' or 'soar'");
            return;
        }
        ast.has_mode = true;
        ast.mode_span = kw.span;
    }

    void parse_buffer(ModelAst& ast) {
        Token kw = take();
        if (!expect(Tok::ident, "a buffer name")) return;
        Token n = take();
        Symbol name = syms_.resolve(n.text);  // defaults include innate texts (percept, motor)
        for (const auto& b : ast.buffers)
            if (b.name == name) error(n.span, "duplicate buffer '" + n.text + "'");
        ast.buffers.push_back({name, kw.span});
    }

    void parse_param(ModelAst& ast) {
        Token kw = take();
        if (!expect(Tok::ident, "a parameter name")) return;
        Token n = take();
        if (!expect(Tok::number, "a numeric parameter value")) return;
        Token v = take();
        ast.params.push_back({n.text, v.num, kw.span});
    }

    void parse_env(ModelAst& ast) {
        Token kw = take();
        if (!expect(Tok::str, "a quoted script path")) return;
        Token p = take();
        if (ast.has_env) error(kw.span, "duplicate env declaration");
        ast.env_script = p.text;
        ast.has_env = true;
        ast.env_span = kw.span;
    }

    void parse_wm_block(ModelAst& ast) {
        take();  // wm
        if (!expect(Tok::lbrace, "'{'")) return;
        take();
        while (!at(Tok::rbrace) && !at(Tok::eof)) {
            if (!at(Tok::lparen)) {
                error(peek().span, "expected '(node ^edge value)'");
                sync_toplevel();
                return;
            }
            SourceSpan span = peek().span;
            take();
            if (at(Tok::var)) {
                error(peek().span, "initial elements must be ground (no variables)");
                sync_toplevel();
                return;
            }
            if (!expect(Tok::ident, "a node symbol")) { sync_toplevel(); return; }
            Symbol node = syms_.resolve(take().text);
            if (!expect(Tok::caret, "'^'")) { sync_toplevel(); return; }
            take();
            if (!expect(Tok::ident, "an edge symbol")) { sync_toplevel(); return; }
            Symbol edge = syms_.resolve(take().text);
            if (at(Tok::var)) { error(peek().span, "initial elements must be ground (no variables)"); take(); continue; }
            auto value = take_value();
            if (!value) { sync_toplevel(); return; }
            if (!expect(Tok::rparen, "')'")) { sync_toplevel(); return; }
            take();
            ast.wm.push_back({node, edge, *value, span});
        }
        if (expect(Tok::rbrace, "'}'")) take();
    }

    void parse_dm_block(ModelAst& ast) {
        take();  // dm
        if (!expect(Tok::lbrace, "'{'")) return;
        take();
        while (!at(Tok::rbrace) && !at(Tok::eof)) {
            if (!at_ident("chunk")) {
                error(peek().span, "expected 'chunk <name> { ... }'");
                sync_toplevel();
                return;
            }
            SourceSpan span = peek().span;
            take();
            auto name = take_name("a chunk name");
            if (!name) { sync_toplevel(); return; }
            for (const auto& c : ast.dm)
                if (c.name == *name)
                    error(span, "duplicate chunk '" + syms_.text(*name) + "'");
            AstChunk chunk{*name, {}, span};
            if (!expect(Tok::lbrace, "'{'")) { sync_toplevel(); return; }
            take();
            while (at(Tok::caret)) {
                SourceSpan sspan = peek().span;
                take();
                if (!expect(Tok::ident, "a slot name")) { sync_toplevel(); return; }
                Symbol edge = syms_.resolve(take().text);
                auto value = take_value();
                if (!value) { sync_toplevel(); return; }
                chunk.slots.push_back({edge, *value, sspan});
            }
            if (!expect(Tok::rbrace, "'}' after chunk slots")) { sync_toplevel(); return; }
            take();
            ast.dm.push_back(std::move(chunk));
        }
        if (expect(Tok::rbrace, "'}'")) take();
    }

    std::optional<Condition> parse_condition() {
        Condition c;
        if (at_ident("not")) {
            take();
            c.polarity = Polarity::negative;
        }
        if (!expect(Tok::lparen, "'('")) return std::nullopt;
        take();
        auto node = take_term();
        if (!node) return std::nullopt;
        c.node = *node;
        if (!expect(Tok::caret, "'^'")) return std::nullopt;
        take();
        auto edge = take_term();
        if (!edge) return std::nullopt;
        c.edge = *edge;
        auto value = take_term();
        if (!value) return std::nullopt;
        c.value = *value;
        while (at(Tok::op_ne) || at(Tok::op_lt) || at(Tok::op_gt) || at(Tok::op_le) ||
               at(Tok::op_ge)) {
            Token op = take();
            auto rhs = take_term();
            if (!rhs) return std::nullopt;
            TestOp to = TestOp::ne;
            if (op.kind == Tok::op_lt) to = TestOp::lt;
            else if (op.kind == Tok::op_gt) to = TestOp::gt;
            else if (op.kind == Tok::op_le) to = TestOp::le;
            else if (op.kind == Tok::op_ge) to = TestOp::ge;
            c.tests.push_back({to, *rhs});
        }
        if (!expect(Tok::rparen, "')'")) return std::nullopt;
        take();
        return c;
    }

    std::optional<std::vector<CueTest>> parse_cue_block() {
        if (!expect(Tok::lbrace, "'{' opening the cue")) return std::nullopt;
        take();
        std::vector<CueTest> out;
        while (at(Tok::caret)) {
            take();
            if (!expect(Tok::ident, "a cue slot name")) return std::nullopt;
            Symbol edge = syms_.resolve(take().text);
            CueTest t{edge, CueTestKind::present, Term{}};
            if (at(Tok::caret) || at(Tok::rbrace)) {
                out.push_back(t);
                continue;
            }
            if (at(Tok::op_le) || at(Tok::op_ge)) {
                error(peek().span, "cue tests support only =, !=, <, >");
                return std::nullopt;
            }
            if (at(Tok::op_eq)) take(), t.kind = CueTestKind::eq;
            else if (at(Tok::op_ne)) take(), t.kind = CueTestKind::ne;
            else if (at(Tok::op_lt)) take(), t.kind = CueTestKind::lt;
            else if (at(Tok::op_gt)) take(), t.kind = CueTestKind::gt;
            else t.kind = CueTestKind::eq;
            auto rhs = take_term();
            if (!rhs) return std::nullopt;
            t.rhs = *rhs;
            out.push_back(t);
        }
        if (!expect(Tok::rbrace, "'}' closing the cue")) return std::nullopt;
        take();
        return out;
    }

    bool parse_depth_clause(Action& a) {
        if (!at_ident("depth")) return true;
        take();
        if (!expect(Tok::number, "a depth count")) return false;
        Token d = take();
        if (d.num < 1 || d.num != static_cast<int>(d.num)) {
            error(d.span, "depth must be a positive integer");
            return false;
        }
        a.depth = static_cast<int>(d.num);
        return true;
    }

    std::optional<Action> parse_command() {
        take();  // command
        if (!expect(Tok::ident, "a command name")) return std::nullopt;
        Token n = take();
        Symbol cmd = syms_.lookup(n.text);
        Action a;
        a.kind = ActionKind::command;
        if (!cmd.valid() || syms_.kind(cmd) != SymbolKind::innate ||
            !Innate(syms_).is_command(cmd)) {
            std::vector<std::string> cmds;
            for (auto v : SymbolTable::innate_vocabulary()) cmds.emplace_back(v);
            cmds.erase(cmds.begin(), cmds.end() - 9);  // commands live at the tail
            std::string hint = suggest_name(n.text, cmds);
            error(n.span, "unknown command '" + n.text + "'" +
                              (hint.empty() ? "" : " (did you mean '" + hint + "'?)"));
            return std::nullopt;
        }
        a.command = cmd;
        const std::string& name = n.text;
        if (name == "retrieve" || name == "retrieve-blend") {
            if (!parse_depth_clause(a)) return std::nullopt;
            auto cue = parse_cue_block();
            if (!cue) return std::nullopt;
            a.cue = std::move(*cue);
        } else if (name == "retrieve-name" || name == "store") {
            auto arg = take_term();
            if (!arg) return std::nullopt;
            a.arg = *arg;
            a.has_arg = true;
            if (!parse_depth_clause(a)) return std::nullopt;
        } else if (name == "motor") {
            auto arg = take_term();
            if (!arg) return std::nullopt;
            a.arg = *arg;
            a.has_arg = true;
            if (at(Tok::ident) && !action_keywords().count(peek().text) && peek().text != "depth") {
                a.arg2 = Term::lit(Value::sym(syms_.resolve(take().text)));
                a.has_arg2 = true;
            } else if (at(Tok::var)) {
                a.arg2 = Term::variable(syms_.resolve(take().text));
                a.has_arg2 = true;
            } else if (at(Tok::number)) {
                a.arg2 = Term::lit(Value::num(take().num));
                a.has_arg2 = true;
            } else if (at(Tok::str)) {
                a.arg2 = Term::lit(Value::str(take().text));
                a.has_arg2 = true;
            }
        } else if (name == "em-query") {
            if (!expect(Tok::lbrace, "'{' opening the episodic cue")) return std::nullopt;
            take();
            while (at(Tok::lparen)) {
                take();
                auto nd = take_term();
                if (!nd) return std::nullopt;
                if (!expect(Tok::caret, "'^'")) return std::nullopt;
                take();
                auto ed = take_term();
                if (!ed) return std::nullopt;
                auto vl = take_term();
                if (!vl) return std::nullopt;
                if (!expect(Tok::rparen, "')'")) return std::nullopt;
                take();
                a.em_cue.push_back({*nd, *ed, *vl});
            }
            if (!expect(Tok::rbrace, "'}' closing the episodic cue")) return std::nullopt;
            take();
        }
        // em-next, em-prev, halt take nothing
        return a;
    }

    std::optional<Action> parse_action() {
        if (at_ident("make") || at_ident("remove")) {
            bool is_make = peek().text == "make";
            take();
            Action a;
            a.kind = is_make ? ActionKind::make : ActionKind::remove;
            if (!expect(Tok::lparen, "'('")) return std::nullopt;
            take();
            auto node = take_term();
            if (!node) return std::nullopt;
            a.node = *node;
            if (!expect(Tok::caret, "'^'")) return std::nullopt;
            take();
            auto edge = take_term();
            if (!edge) return std::nullopt;
            a.edge = *edge;
            auto value = take_term();
            if (!value) return std::nullopt;
            a.value = *value;
            if (!expect(Tok::rparen, "')'")) return std::nullopt;
            take();
            return a;
        }
        if (at_ident("clear")) {
            take();
            if (!expect(Tok::ident, "a buffer name")) return std::nullopt;
            Action a;
            a.kind = ActionKind::clear;
            a.buffer = syms_.resolve(take().text);
            return a;
        }
        if (at_ident("command")) return parse_command();
        if (at_ident("prefer")) {
            take();
            if (!expect(Tok::ident, "a preference kind")) return std::nullopt;
            Token k = take();
            Action a;
            a.kind = ActionKind::prefer;
            if (k.text == "acceptable") a.pref = PrefKind::acceptable;
            else if (k.text == "reject") a.pref = PrefKind::reject;
            else if (k.text == "better") a.pref = PrefKind::better;
            else if (k.text == "worse") a.pref = PrefKind::worse;
            else if (k.text == "best") a.pref = PrefKind::best;
            else if (k.text == "worst") a.pref = PrefKind::worst;
            else if (k.text == "indifferent") a.pref = PrefKind::indifferent;
            else {
                std::string hint = suggest_name(k.text, {"acceptable", "reject", "better", "worse",
                                                         "best", "worst", "indifferent"});
                error(k.span, "unknown preference kind '" + k.text + "'" +
                                  (hint.empty() ? "" : " (did you mean '" + hint + "'?)"));
                return std::nullopt;
            }
            auto subject = take_term();
            if (!subject) return std::nullopt;
            a.pref_subject = *subject;
            if (a.pref == PrefKind::better || a.pref == PrefKind::worse) {
                auto object = take_term();
                if (!object) return std::nullopt;
                a.pref_object = *object;
                a.has_pref_object = true;
            }
            return a;
        }
        error(peek().span, "expected an action (make, remove, clear, command, prefer)");
        return std::nullopt;
    }

    void parse_production(ModelAst& ast) {
        Token role_tok = take();
        AstProduction out;
        out.span = role_tok.span;
        Production& p = out.rule;
        if (role_tok.text == "production") p.role = Role::plain;
        else if (role_tok.text == "elaboration") p.role = Role::elaboration;
        else if (role_tok.text == "propose") p.role = Role::proposal;
        else if (role_tok.text == "evaluate") p.role = Role::evaluation;
        else p.role = Role::application;  // apply

        auto name = take_name("a production name");
        if (!name) { sync_toplevel(); return; }
        p.name = *name;
        for (const auto& existing : ast.productions)
            if (existing.rule.name == p.name)
                error(role_tok.span, "duplicate production '" + syms_.text(p.name) + "'");

        while (at(Tok::ident) && (peek().text == "rl" || peek().text == "utility")) {
            if (peek().text == "rl") {
                take();
                p.rl = true;
            } else {
                take();
                if (!expect(Tok::number, "a utility value")) { sync_toplevel(); return; }
                p.utility = take().num;
            }
        }

        if (!expect(Tok::lbrace, "'{'")) { sync_toplevel(); return; }
        take();
        if (!at_ident("when")) {
            error(peek().span, "expected 'when { ... }'");
            sync_toplevel();
            return;
        }
        take();
        if (!expect(Tok::lbrace, "'{'")) { sync_toplevel(); return; }
        take();
        while (!at(Tok::rbrace) && !at(Tok::eof)) {
            SourceSpan span = peek().span;
            auto c = parse_condition();
            if (!c) { sync_toplevel(); return; }
            p.conditions.push_back(std::move(*c));
            out.cond_spans.push_back(span);
        }
        if (!expect(Tok::rbrace, "'}' after conditions")) { sync_toplevel(); return; }
        take();
        if (!at_ident("then")) {
            error(peek().span, "expected 'then { ... }'");
            sync_toplevel();
            return;
        }
        take();
        if (!expect(Tok::lbrace, "'{'")) { sync_toplevel(); return; }
        take();
        while (!at(Tok::rbrace) && !at(Tok::eof)) {
            SourceSpan span = peek().span;
            auto a = parse_action();
            if (!a) { sync_toplevel(); return; }
            p.actions.push_back(std::move(*a));
            out.action_spans.push_back(span);
        }
        if (!expect(Tok::rbrace, "'}' after actions")) { sync_toplevel(); return; }
        take();
        if (!expect(Tok::rbrace, "'}' closing the production")) { sync_toplevel(); return; }
        take();
        ast.productions.push_back(std::move(out));
    }

    std::vector<Token> toks_;
    SymbolTable& syms_;
    std::vector<Diagnostic>& diags_;
    size_t pos_ = 0;
};

}  // namespace

ParseResult parse_model(const std::string& text, const std::string& filename, SymbolTable& syms) {
    ParseResult res;
    Lexer lexer(text, filename, res.diagnostics);
    auto tokens = lexer.run();
    Parser parser(std::move(tokens), syms, res.diagnostics);
    res.ast = parser.run();
    return res;
}

bool ast_equal(const ModelAst& a, const ModelAst& b) {
    if (a.has_mode != b.has_mode || (a.has_mode && a.mode != b.mode)) return false;
    if (a.has_env != b.has_env || (a.has_env && a.env_script != b.env_script)) return false;
    if (a.buffers.size() != b.buffers.size() || a.params.size() != b.params.size() ||
        a.wm.size() != b.wm.size() || a.dm.size() != b.dm.size() ||
        a.productions.size() != b.productions.size())
        return false;
    for (size_t i = 0; i < a.buffers.size(); ++i)
        if (a.buffers[i].name != b.buffers[i].name) return false;
    for (size_t i = 0; i < a.params.size(); ++i)
        if (a.params[i].name != b.params[i].name || a.params[i].value != b.params[i].value)
            return false;
    for (size_t i = 0; i < a.wm.size(); ++i) {
        const auto& x = a.wm[i];
        const auto& y = b.wm[i];
        if (x.node != y.node || x.edge != y.edge || !(x.value == y.value)) return false;
    }
    for (size_t i = 0; i < a.dm.size(); ++i) {
        const auto& x = a.dm[i];
        const auto& y = b.dm[i];
        if (x.name != y.name || x.slots.size() != y.slots.size()) return false;
        for (size_t j = 0; j < x.slots.size(); ++j)
            if (x.slots[j].edge != y.slots[j].edge || !(x.slots[j].value == y.slots[j].value))
                return false;
    }
    for (size_t i = 0; i < a.productions.size(); ++i)
        if (!(a.productions[i].rule == b.productions[i].rule)) return false;
    return true;
}

}  // namespace cogk
