#include <string>

#include "cogk/dsl.hpp"

namespace cogk {

namespace {

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += '"';
    return out;
}

std::string render(const Value& v, const SymbolTable& syms) {
    switch (v.kind()) {
        case ValueKind::sym: return syms.text(v.as_sym());
        case ValueKind::num: return format_number(v.as_num());
        case ValueKind::str: return quote(v.as_str());
    }
    return "";
}

std::string render(const Term& t, const SymbolTable& syms) {
    if (t.is_var) return "?" + syms.text(t.var);
    return render(t.constant, syms);
}

std::string render(const Condition& c, const SymbolTable& syms) {
    std::string out;
    if (c.polarity == Polarity::negative) out += "not ";
    out += "(" + render(c.node, syms) + " ^" + render(c.edge, syms) + " " + render(c.value, syms);
    for (const auto& t : c.tests) {
        switch (t.op) {
            case TestOp::ne: out += " !="; break;
            case TestOp::lt: out += " <"; break;
            case TestOp::gt: out += " >"; break;
            case TestOp::le: out += " <="; break;
            case TestOp::ge: out += " >="; break;
        }
        out += " " + render(t.rhs, syms);
    }
    out += ")";
    return out;
}

const char* pref_name(PrefKind k) {
    switch (k) {
        case PrefKind::acceptable: return "acceptable";
        case PrefKind::reject: return "reject";
        case PrefKind::better: return "better";
        case PrefKind::worse: return "worse";
        case PrefKind::best: return "best";
        case PrefKind::worst: return "worst";
        case PrefKind::indifferent: return "indifferent";
    }
    return "";
}

void render_action(std::string& out, const Action& a, const SymbolTable& syms,
                   const std::string& pad) {
    switch (a.kind) {
        case ActionKind::make:
        case ActionKind::remove:
            out += pad + (a.kind == ActionKind::make ? "make (" : "remove (") +
                   render(a.node, syms) + " ^" + render(a.edge, syms) + " " +
                   render(a.value, syms) + ")\n";
            break;
        case ActionKind::clear:
            out += pad + "clear " + syms.text(a.buffer) + "\n";
            break;
        case ActionKind::prefer:
            out += pad + "prefer " + pref_name(a.pref) + " " + render(a.pref_subject, syms);
            if (a.has_pref_object) out += " " + render(a.pref_object, syms);
            out += "\n";
            break;
        case ActionKind::command: {
            out += pad + "command " + syms.text(a.command);
            const std::string& cmd = syms.text(a.command);
            if (a.has_arg) out += " " + render(a.arg, syms);
            if (a.has_arg2) out += " " + render(a.arg2, syms);
            if (a.depth != 1) out += " depth " + std::to_string(a.depth);
            if (cmd == "retrieve" || cmd == "retrieve-blend") {
                out += " {\n";
                for (const auto& t : a.cue) {
                    out += pad + "  ^" + syms.text(t.edge);
                    switch (t.kind) {
                        case CueTestKind::present: break;
                        case CueTestKind::eq: out += " " + render(t.rhs, syms); break;
                        case CueTestKind::ne: out += " != " + render(t.rhs, syms); break;
                        case CueTestKind::lt: out += " < " + render(t.rhs, syms); break;
                        case CueTestKind::gt: out += " > " + render(t.rhs, syms); break;
                    }
                    out += "\n";
                }
                out += pad + "}\n";
            } else if (cmd == "em-query") {
                out += " {\n";
                for (const auto& triple : a.em_cue)
                    out += pad + "  (" + render(triple[0], syms) + " ^" + render(triple[1], syms) +
                           " " + render(triple[2], syms) + ")\n";
                out += pad + "}\n";
            } else {
                out += "\n";
            }
            break;
        }
    }
}

}  // namespace

std::string print_production(const Production& p, const SymbolTable& syms, int indent) {
    std::string pad(indent, ' ');
    std::string out;
    if (p.origin == RuleOrigin::compiled) out += pad + "# learned: compiled\n";
    else if (p.origin == RuleOrigin::chunked) out += pad + "# learned: chunked\n";

    const char* role = "production";
    switch (p.role) {
        case Role::plain: role = "production"; break;
        case Role::elaboration: role = "elaboration"; break;
        case Role::proposal: role = "propose"; break;
        case Role::evaluation: role = "evaluate"; break;
        case Role::application: role = "apply"; break;
    }
    out += pad + role + " " + syms.text(p.name);
    if (p.rl) out += " rl";
    if (p.utility != 0.0) out += " utility " + format_number(p.utility);
    out += " {\n";
    out += pad + "  when {\n";
    for (const auto& c : p.conditions) out += pad + "    " + render(c, syms) + "\n";
    out += pad + "  }\n";
    out += pad + "  then {\n";
    for (const auto& a : p.actions) render_action(out, a, syms, pad + "    ");
    out += pad + "  }\n";
    out += pad + "}\n";
    return out;
}

std::string print_model(const ModelAst& ast, const SymbolTable& syms) {
    std::vector<std::string> groups;
    if (ast.has_mode) groups.push_back(std::string("mode ") +
                                       (ast.mode == Mode::actr ? "actr" : "soar") + "\n");
    if (!ast.buffers.empty()) {
        std::string g;
        for (const auto& b : ast.buffers) g += "buffer " + syms.text(b.name) + "\n";
        groups.push_back(g);
    }
    if (!ast.params.empty()) {
        std::string g;
        for (const auto& p : ast.params) g += "param " + p.name + " " + format_number(p.value) + "\n";
        groups.push_back(g);
    }
    if (ast.has_env) groups.push_back("env " + quote(ast.env_script) + "\n");
    if (!ast.wm.empty()) {
        std::string g = "wm {\n";
        for (const auto& t : ast.wm)
            g += "  (" + syms.text(t.node) + " ^" + syms.text(t.edge) + " " +
                 render(t.value, syms) + ")\n";
        g += "}\n";
        groups.push_back(g);
    }
    if (!ast.dm.empty()) {
        std::string g = "dm {\n";
        for (const auto& c : ast.dm) {
            g += "  chunk " + syms.text(c.name) + " {\n";
            for (const auto& s : c.slots)
                g += "    ^" + syms.text(s.edge) + " " + render(s.value, syms) + "\n";
            g += "  }\n";
        }
        g += "}\n";
        groups.push_back(g);
    }
    for (const auto& p : ast.productions) groups.push_back(print_production(p.rule, syms));

    std::string out;
    for (size_t i = 0; i < groups.size(); ++i) {
        if (i) out += "\n";
        out += groups[i];
    }
    return out;
}

}  // namespace cogk
