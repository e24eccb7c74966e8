#include <set>
#include <string>

#include "cogk/dsl.hpp"

namespace cogk {

namespace {

class Validator {
public:
    Validator(const ModelAst& ast, const SymbolTable& syms) : ast_(ast), syms_(syms) {}

    std::vector<Diagnostic> run() {
        if (!ast_.has_mode) {
            SourceSpan s;
            if (!ast_.productions.empty()) s.file = ast_.productions.front().span.file;
            else if (!ast_.params.empty()) s.file = ast_.params.front().span.file;
            error(s, "model declares no mode (expected 'mode actr' or 'mode soar')");
        }
        check_params();
        check_buffers();
        collect_known_nodes();
        check_wm_block();
        for (const auto& p : ast_.productions) check_production(p);
        return std::move(diags_);
    }

private:
    void error(const SourceSpan& s, std::string msg) { diags_.push_back({s, true, std::move(msg)}); }

    bool soar() const { return ast_.has_mode && ast_.mode == Mode::soar; }
    bool actr() const { return ast_.has_mode && ast_.mode == Mode::actr; }

    std::string text(Symbol s) const { return syms_.text(s); }

    void check_params() {
        std::vector<std::string> names;
        for (const auto& [n, v] : param_table()) names.push_back(n);
        for (const auto& p : ast_.params) {
            bool known = false;
            for (const auto& n : names) known = known || n == p.name;
            if (!known) {
                std::string hint = suggest_name(p.name, names);
                error(p.span, "unknown parameter '" + p.name + "'" +
                                  (hint.empty() ? "" : " (did you mean '" + hint + "'?)"));
                continue;
            }
            if (p.name == "cycle-cost" && p.value <= 0)
                error(p.span, "cycle-cost must be positive");
            if (p.name == "elaboration-limit" && p.value < 1)
                error(p.span, "elaboration-limit must be at least 1");
            if ((p.name == "utility-noise" || p.name == "dm-noise") && p.value < 0)
                error(p.span, p.name + " must be nonnegative");
            if ((p.name == "latency-factor" || p.name == "blend-temperature" ||
                 p.name == "selection-temperature" || p.name == "forget-decay") &&
                p.value <= 0)
                error(p.span, p.name + " must be positive");
        }
    }

    void check_buffers() {
        if (soar())
            for (const auto& b : ast_.buffers)
                error(b.span, "buffer declarations are an actr-mode construct; soar working "
                              "memory has fixed module buffers");
    }

    // Node symbols a rule or wm block may legitimately reference by literal.
    void collect_known_nodes() {
        if (actr()) {
            if (ast_.buffers.empty())
                for (const auto& n : default_actr_buffers()) known_nodes_.insert(n);
            for (const auto& b : ast_.buffers) known_nodes_.insert(text(b.name));
            // module interfaces the kernel declares regardless of the buffer list
            for (const char* n : {"percept", "motor", "reward"}) known_nodes_.insert(n);
        } else {
            for (const char* n : {"s1", "dm", "em", "percept", "motor", "reward"})
                known_nodes_.insert(n);
        }
        buffer_nodes_ = known_nodes_;
        for (const auto& t : ast_.wm) {
            known_nodes_.insert(text(t.node));
            if (t.value.is_sym()) known_nodes_.insert(text(t.value.as_sym()));
        }
        for (const auto& c : ast_.dm) {
            known_nodes_.insert(text(c.name));
            for (const auto& s : c.slots)
                if (s.value.is_sym()) known_nodes_.insert(text(s.value.as_sym()));
        }
    }

    void check_wm_block() {
        std::set<std::string> seen = buffer_nodes_;
        for (const auto& t : ast_.wm) {
            if (forbidden_field(t.edge))
                error(t.span, "field '" + text(t.edge) + "' is written by the architecture");
            if (!seen.count(text(t.node)))
                error(t.span, actr() ? "'" + text(t.node) +
                                           "' is not a declared buffer or previously created chunk"
                                     : "'" + text(t.node) +
                                           "' is not linked to the state by any earlier element");
            if (t.value.is_sym()) seen.insert(text(t.value.as_sym()));
        }
    }

    // Fields only the architecture may create.
    bool forbidden_field(Symbol edge) const {
        for (const char* f : {"status", "retrieved", "percept", "cue", "command"})
            if (edge == syms_.lookup(f)) return true;
        return false;
    }

    void add_term_vars(const Term& t, std::set<Symbol>& vars) const {
        if (t.is_var) vars.insert(t.var);
    }

    void check_production(const AstProduction& ap) {
        const Production& p = ap.rule;
        if (actr() && p.role != Role::plain)
            error(ap.span, "rule roles (elaboration, propose, evaluate, apply) are soar-mode "
                           "constructs; use 'production'");
        if (soar() && p.role == Role::plain)
            error(ap.span, "soar rules declare a role: elaboration, propose, evaluate, or apply");
        if (p.rl && actr())
            error(ap.span, "the rl flag is a soar-mode construct");
        if (p.rl && soar() && p.role != Role::evaluation)
            error(ap.span, "the rl flag belongs on evaluate rules only");

        std::set<Symbol> bound;
        for (size_t i = 0; i < p.conditions.size(); ++i) {
            const Condition& c = p.conditions[i];
            if (c.polarity == Polarity::positive) {
                add_term_vars(c.node, bound);
                add_term_vars(c.edge, bound);
                add_term_vars(c.value, bound);
            }
        }
        for (size_t i = 0; i < p.conditions.size(); ++i) {
            const Condition& c = p.conditions[i];
            const SourceSpan& span = ap.cond_spans[i];
            for (const auto& tst : c.tests)
                if (tst.rhs.is_var && !bound.count(tst.rhs.var))
                    error(span, "test variable ?" + text(tst.rhs.var) +
                                    " is never bound by a positive condition");
            if (actr() && !c.node.is_var && c.node.constant.is_sym() &&
                !known_nodes_.count(text(c.node.constant.as_sym())))
                error(span, "'" + text(c.node.constant.as_sym()) +
                                "' is not a declared buffer or known chunk");
        }

        for (size_t i = 0; i < p.actions.size(); ++i)
            check_action(p, p.actions[i], ap.action_spans[i], bound);
    }

    void require_bound(const Term& t, const std::set<Symbol>& bound, const SourceSpan& span) {
        if (t.is_var && !bound.count(t.var))
            error(span, "action variable ?" + text(t.var) + " is never bound");
    }

    void check_action(const Production& p, const Action& a, const SourceSpan& span,
                      std::set<Symbol>& bound) {
        switch (a.kind) {
            case ActionKind::make: {
                if (!a.edge.is_var && a.edge.constant.is_sym() &&
                    forbidden_field(a.edge.constant.as_sym()))
                    error(span, "rules cannot write the '" + text(a.edge.constant.as_sym()) +
                                    "' field; it is created by a module");
                if (a.node.is_var && !bound.count(a.node.var))
                    bound.insert(a.node.var);  // fresh node minted at firing
                else
                    require_bound(a.node, bound, span);
                require_bound(a.edge, bound, span);
                require_bound(a.value, bound, span);
                if (actr() && !a.node.is_var && a.node.constant.is_sym() &&
                    !known_nodes_.count(text(a.node.constant.as_sym())))
                    error(span, "'" + text(a.node.constant.as_sym()) +
                                    "' is not a declared buffer or known chunk");
                break;
            }
            case ActionKind::remove: {
                if (!a.edge.is_var && a.edge.constant.is_sym() &&
                    forbidden_field(a.edge.constant.as_sym()))
                    error(span, "rules cannot remove the '" + text(a.edge.constant.as_sym()) +
                                    "' field; it is managed by a module");
                require_bound(a.node, bound, span);
                require_bound(a.edge, bound, span);
                require_bound(a.value, bound, span);
                break;
            }
            case ActionKind::clear: {
                if (!buffer_nodes_.count(text(a.buffer)))
                    error(span, actr() ? "clear targets undeclared buffer '" + text(a.buffer) + "'"
                                       : "clear targets unknown module buffer '" + text(a.buffer) +
                                             "'");
                break;
            }
            case ActionKind::command: {
                std::string cmd = text(a.command);
                if (actr() && (cmd == "retrieve-name" || cmd == "em-query" || cmd == "em-next" ||
                               cmd == "em-prev"))
                    error(span, "command '" + cmd + "' is a soar-mode operation");
                if (actr() && a.depth != 1)
                    error(span, "child-retrieval depth is a soar-mode option");
                if (actr() && cmd == "retrieve" && !buffer_nodes_.count("retrieval"))
                    error(span, "retrieve delivers to the 'retrieval' buffer, which this model "
                                "does not declare");
                if (actr() && cmd == "retrieve-blend" && !buffer_nodes_.count("blend"))
                    error(span, "retrieve-blend delivers to the 'blend' buffer, which this model "
                                "does not declare");
                for (const auto& ct : a.cue)
                    if (ct.kind != CueTestKind::present) require_bound(ct.rhs, bound, span);
                for (const auto& triple : a.em_cue)
                    for (const auto& term : triple) require_bound(term, bound, span);
                if (a.has_arg) require_bound(a.arg, bound, span);
                if (a.has_arg2) require_bound(a.arg2, bound, span);
                break;
            }
            case ActionKind::prefer: {
                if (actr()) {
                    error(span, "preferences are a soar-mode construct");
                    break;
                }
                if (p.role == Role::application)
                    error(span, "apply rules cannot create preferences; preferences need "
                                "persistent rule support");
                require_bound(a.pref_subject, bound, span);
                if (a.has_pref_object) require_bound(a.pref_object, bound, span);
                break;
            }
        }
    }

    const ModelAst& ast_;
    const SymbolTable& syms_;
    std::vector<Diagnostic> diags_;
    std::set<std::string> known_nodes_;
    std::set<std::string> buffer_nodes_;
};

}  // namespace

std::vector<Diagnostic> validate_model(const ModelAst& ast, const SymbolTable& syms) {
    return Validator(ast, syms).run();
}

}  // namespace cogk
