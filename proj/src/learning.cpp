#include "cogk/learning.hpp"

#include <algorithm>
#include <deque>

#include "cogk/activation.hpp"
#include "cogk/errors.hpp"

namespace cogk {

std::vector<UtilityDelta> update_utilities_actr(RuleSet& rules, std::vector<FiringRecord>& history,
                                                double amount, int64_t at, double alpha) {
    std::vector<UtilityDelta> out;
    for (const FiringRecord& f : history) {
        Production* p = rules.find(f.rule);
        if (!p) continue;
        double r = amount - static_cast<double>(at - f.at) / 1000.0;
        UtilityDelta d{f.rule, p->utility, 0.0};
        p->utility += alpha * (r - p->utility);
        d.after = p->utility;
        out.push_back(d);
    }
    history.clear();
    return out;
}

std::vector<UtilityDelta> update_rl_soar(RuleSet& rules, const RlDecisionRecord& prev,
                                         double reward, double q_curr, double alpha, double gamma) {
    std::vector<UtilityDelta> out;
    if (prev.contributors.empty()) return out;
    double share = alpha * (reward + gamma * q_curr - prev.q) /
                   static_cast<double>(prev.contributors.size());
    for (Symbol r : prev.contributors) {
        Production* p = rules.find(r);
        if (!p) continue;
        out.push_back({r, p->utility, p->utility + share});
        p->utility += share;
    }
    return out;
}

namespace {

// Union-find over space-tagged variables and literals. Two literals in one
// class must agree; the class representative prefers literal, then a first-
// rule variable, then a second-rule variable.
class Unifier {
public:
    explicit Unifier(const SymbolTable& syms) : syms_(syms) {}

    std::string var_key(int space, Symbol v) {
        std::string k = (space == 1 ? "1:" : "2:") + syms_.text(v);
        if (!info_.count(k)) {
            Info i;
            if (space == 1) {
                i.has_v1 = true;
                i.v1 = v;
            } else {
                i.has_v2 = true;
                i.v2 = v;
            }
            info_[k] = i;
            parent_[k] = k;
        }
        return k;
    }

    std::string lit_key(const Value& v) {
        std::string k = "L:" + v.sort_key(syms_);
        if (!info_.count(k)) {
            Info i;
            i.has_lit = true;
            i.lit = v;
            info_[k] = i;
            parent_[k] = k;
        }
        return k;
    }

    std::string term_key(int space, const Term& t) {
        return t.is_var ? var_key(space, t.var) : lit_key(t.constant);
    }

    bool unite(const std::string& a, const std::string& b) {
        std::string ra = find(a), rb = find(b);
        if (ra == rb) return true;
        Info& ia = info_[ra];
        Info& ib = info_[rb];
        if (ia.has_lit && ib.has_lit && !(ia.lit == ib.lit)) return false;
        Info merged = ia;
        if (!merged.has_lit && ib.has_lit) {
            merged.has_lit = true;
            merged.lit = ib.lit;
        }
        if (!merged.has_v1 && ib.has_v1) {
            merged.has_v1 = true;
            merged.v1 = ib.v1;
        }
        if (!merged.has_v2 && ib.has_v2) {
            merged.has_v2 = true;
            merged.v2 = ib.v2;
        }
        parent_[rb] = ra;
        info_[ra] = merged;
        return true;
    }

    // Output-space term for a class. p2-only variables get renamed away from
    // any first-rule variable name.
    Term rep(int space, const Term& t, SymbolTable& out_syms,
             const std::set<std::string>& p1_names) {
        if (!t.is_var) return t;
        const Info& i = info_[find(var_key(space, t.var))];
        if (i.has_lit) return Term::lit(i.lit);
        if (i.has_v1) return Term::variable(i.v1);
        std::string text = syms_.text(i.v2);
        while (p1_names.count(text)) text = "r-" + text;
        return Term::variable(out_syms.resolve(text));
    }

private:
    struct Info {
        bool has_lit = false;
        Value lit;
        bool has_v1 = false;
        Symbol v1;
        bool has_v2 = false;
        Symbol v2;
    };

    std::string find(const std::string& k) {
        std::string cur = k;
        while (parent_.at(cur) != cur) cur = parent_.at(cur);
        return cur;
    }

    const SymbolTable& syms_;
    std::map<std::string, std::string> parent_;
    std::map<std::string, Info> info_;
};

bool is_command(const SymbolTable& syms, const Action& a, const char* text) {
    return a.kind == ActionKind::command && syms.text(a.command) == text;
}

bool is_retrieval_command(const SymbolTable& syms, const Action& a) {
    if (a.kind != ActionKind::command) return false;
    std::string t = syms.text(a.command);
    return t == "retrieve" || t == "retrieve-blend" || t == "retrieve-name";
}

// Could the patterns describe the same triple? Variables match anything.
bool patterns_overlap(const Condition& c, const Action& a) {
    auto pos = [](const Term& x, const Term& y) {
        return x.is_var || y.is_var || x.constant == y.constant;
    };
    return pos(c.node, a.node) && pos(c.edge, a.edge) && pos(c.value, a.value);
}

std::set<std::string> var_names(const SymbolTable& syms, const Production& p) {
    std::set<std::string> out;
    auto scan = [&](const Term& t) {
        if (t.is_var) out.insert(syms.text(t.var));
    };
    for (const Condition& c : p.conditions) {
        scan(c.node);
        scan(c.edge);
        scan(c.value);
        for (const ValueTest& vt : c.tests) scan(vt.rhs);
    }
    for (const Action& a : p.actions) {
        scan(a.node);
        scan(a.edge);
        scan(a.value);
        for (const CueTest& ct : a.cue) scan(ct.rhs);
        for (const auto& tr : a.em_cue)
            for (const Term& t : tr) scan(t);
        scan(a.arg);
        scan(a.arg2);
        scan(a.pref_subject);
        scan(a.pref_object);
    }
    return out;
}

}  // namespace

std::map<ElementId, size_t> make_index(const Production& p, const Instantiation& inst) {
    std::map<ElementId, size_t> out;
    size_t next = 0;
    for (size_t k = 0; k < p.actions.size() && next < inst.created.size(); ++k)
        if (p.actions[k].kind == ActionKind::make) out[inst.created[next++]] = k;
    return out;
}

std::optional<Production> compile_pair(SymbolTable& syms, const PairContext& ctx,
                                       double init_utility) {
    const Production& p1 = *ctx.p1;
    const Production& p2 = *ctx.p2;
    const Instantiation& i2 = *ctx.i2;

    for (const Production* p : {&p1, &p2})
        for (const Action& a : p->actions)
            if (is_command(syms, a, "motor")) return std::nullopt;
    for (const Action& a : p1.actions) {
        if (a.kind == ActionKind::clear) return std::nullopt;
        if (is_command(syms, a, "halt")) return std::nullopt;
    }
    if (ctx.i1_request_pending) return std::nullopt;

    // a p2 negative that can alias a p1 write makes the composition order-
    // sensitive; decline conservatively
    for (const Condition& c : p2.conditions) {
        if (c.polarity != Polarity::negative) continue;
        for (const Action& a : p1.actions)
            if ((a.kind == ActionKind::make || a.kind == ActionKind::remove) &&
                patterns_overlap(c, a))
                return std::nullopt;
    }

    Unifier uf(syms);
    std::set<std::string> p1_names = var_names(syms, p1);
    std::vector<Condition> kept2;
    std::set<size_t> consumed;  // p1 action indices

    size_t pos = 0;
    for (const Condition& c : p2.conditions) {
        if (c.polarity == Polarity::negative) {
            kept2.push_back(c);
            continue;
        }
        if (pos >= i2.tested.size()) fail(Errc::internal, "tested list shorter than conditions");
        ElementId id = i2.tested[pos++];
        auto made = ctx.created_by_p1.find(id);
        if (made != ctx.created_by_p1.end()) {
            if (!c.tests.empty()) return std::nullopt;  // would lose the constraint
            const Action& a = p1.actions.at(made->second);
            if (!uf.unite(uf.term_key(2, c.node), uf.term_key(1, a.node))) return std::nullopt;
            if (!uf.unite(uf.term_key(2, c.edge), uf.term_key(1, a.edge))) return std::nullopt;
            if (!uf.unite(uf.term_key(2, c.value), uf.term_key(1, a.value))) return std::nullopt;
            consumed.insert(made->second);
            continue;
        }
        if (ctx.retrieved.count(id)) {
            if (!c.tests.empty()) return std::nullopt;
            for (const Term* t : {&c.node, &c.edge, &c.value})
                if (t->is_var) {
                    auto b = i2.bindings.find(t->var);
                    if (b == i2.bindings.end()) return std::nullopt;
                    if (!uf.unite(uf.var_key(2, t->var), uf.lit_key(b->second)))
                        return std::nullopt;
                }
            continue;
        }
        kept2.push_back(c);
    }

    auto map_term = [&](int space, const Term& t) { return uf.rep(space, t, syms, p1_names); };
    auto map_cond = [&](int space, const Condition& c) {
        Condition out = c;
        out.node = map_term(space, c.node);
        out.edge = map_term(space, c.edge);
        out.value = map_term(space, c.value);
        for (ValueTest& vt : out.tests) vt.rhs = map_term(space, vt.rhs);
        return out;
    };
    auto map_action = [&](int space, const Action& a) {
        Action out = a;
        out.node = map_term(space, a.node);
        out.edge = map_term(space, a.edge);
        out.value = map_term(space, a.value);
        for (CueTest& ct : out.cue) ct.rhs = map_term(space, ct.rhs);
        for (auto& tr : out.em_cue)
            for (Term& t : tr) t = map_term(space, t);
        out.arg = map_term(space, a.arg);
        out.arg2 = map_term(space, a.arg2);
        out.pref_subject = map_term(space, a.pref_subject);
        out.pref_object = map_term(space, a.pref_object);
        return out;
    };

    Production out;
    out.role = Role::plain;
    out.origin = RuleOrigin::compiled;
    out.utility = init_utility;

    for (const Condition& c : p1.conditions) {
        Condition m = map_cond(1, c);
        if (std::find(out.conditions.begin(), out.conditions.end(), m) == out.conditions.end())
            out.conditions.push_back(m);
    }
    for (const Condition& c : kept2) {
        Condition m = map_cond(2, c);
        if (std::find(out.conditions.begin(), out.conditions.end(), m) == out.conditions.end())
            out.conditions.push_back(m);
    }

    bool bake_retrieval = !ctx.retrieved.empty();
    for (size_t k = 0; k < p1.actions.size(); ++k) {
        const Action& a = p1.actions[k];
        if (a.kind == ActionKind::make && consumed.count(k)) continue;
        if (bake_retrieval && is_retrieval_command(syms, a)) continue;
        out.actions.push_back(map_action(1, a));
    }
    for (const Action& a : p2.actions) out.actions.push_back(map_action(2, a));

    // every action variable must be condition-bound, except a fresh make node
    std::set<Symbol> bound;
    for (const Condition& c : out.conditions) {
        if (c.polarity == Polarity::negative) continue;
        for (const Term* t : {&c.node, &c.edge, &c.value})
            if (t->is_var) bound.insert(t->var);
    }
    std::set<Symbol> minted;
    for (const Action& a : out.actions) {
        std::vector<const Term*> need;
        if (a.kind == ActionKind::make || a.kind == ActionKind::remove) {
            if (a.node.is_var && !bound.count(a.node.var) && !minted.count(a.node.var)) {
                if (a.kind == ActionKind::remove) return std::nullopt;
                minted.insert(a.node.var);
            }
            need = {&a.edge, &a.value};
        } else {
            need = {&a.arg, &a.arg2, &a.pref_subject, &a.pref_object};
            for (const CueTest& ct : a.cue) need.push_back(&ct.rhs);
            for (const auto& tr : a.em_cue)
                for (const Term& t : tr) need.push_back(&t);
        }
        for (const Term* t : need)
            if (t->is_var && !bound.count(t->var) && !minted.count(t->var)) return std::nullopt;
    }
    return out;
}

namespace {

std::string term_text(const SymbolTable& syms, const Term& t,
                      const std::map<Symbol, std::string>* renames) {
    if (!t.is_var) return t.constant.sort_key(syms);
    if (t.var == Symbol{}) return "?";  // masked variable in a sort skeleton
    if (renames) {
        auto it = renames->find(t.var);
        if (it != renames->end()) return "?" + it->second;
    }
    return "?" + syms.text(t.var);
}

std::string cond_text(const SymbolTable& syms, const Condition& c,
                      const std::map<Symbol, std::string>* renames) {
    std::string s = c.polarity == Polarity::negative ? "-(" : "(";
    s += term_text(syms, c.node, renames) + " " + term_text(syms, c.edge, renames) + " " +
         term_text(syms, c.value, renames);
    for (const ValueTest& vt : c.tests) {
        const char* ops[] = {"!=", "<", ">", "<=", ">="};
        s += std::string(" ") + ops[static_cast<int>(vt.op)] + term_text(syms, vt.rhs, renames);
    }
    return s + ")";
}

std::string action_text(const SymbolTable& syms, const Action& a,
                        const std::map<Symbol, std::string>* renames) {
    auto tt = [&](const Term& t) { return term_text(syms, t, renames); };
    switch (a.kind) {
        case ActionKind::make:
            return "make(" + tt(a.node) + " " + tt(a.edge) + " " + tt(a.value) + ")";
        case ActionKind::remove:
            return "remove(" + tt(a.node) + " " + tt(a.edge) + " " + tt(a.value) + ")";
        case ActionKind::clear: return "clear(" + syms.text(a.buffer) + ")";
        case ActionKind::command: {
            std::string s = "cmd(" + syms.text(a.command);
            for (const CueTest& ct : a.cue) {
                const char* ks[] = {"=", "!=", "<", ">", "?"};
                s += " " + syms.text(ct.edge) + ks[static_cast<int>(ct.kind)];
                if (ct.kind != CueTestKind::present) s += tt(ct.rhs);
            }
            for (const auto& tr : a.em_cue)
                s += " [" + tt(tr[0]) + " " + tt(tr[1]) + " " + tt(tr[2]) + "]";
            if (a.has_arg) s += " " + tt(a.arg);
            if (a.has_arg2) s += " " + tt(a.arg2);
            if (a.depth != 1) s += " depth=" + std::to_string(a.depth);
            return s + ")";
        }
        case ActionKind::prefer: {
            const char* ks[] = {"acceptable", "reject", "better", "worse", "best", "worst",
                                "indifferent"};
            std::string s = std::string("pref(") + ks[static_cast<int>(a.pref)] + " " +
                            tt(a.pref_subject);
            if (a.has_pref_object) s += " " + tt(a.pref_object);
            return s + ")";
        }
    }
    return "";
}

}  // namespace

std::string canonical_form(const SymbolTable& syms, const Production& p) {
    // sort conditions by a variable-blind skeleton first, then rename
    std::vector<size_t> order(p.conditions.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<std::string> skel;
    for (const Condition& c : p.conditions) {
        Condition masked = c;
        auto mask = [](Term& t) {
            if (t.is_var) t.var = Symbol{};
        };
        mask(masked.node);
        mask(masked.edge);
        mask(masked.value);
        for (ValueTest& vt : masked.tests) mask(vt.rhs);
        skel.push_back(cond_text(syms, masked, nullptr));
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return skel[a] < skel[b]; });

    std::map<Symbol, std::string> renames;
    int counter = 0;
    auto visit = [&](const Term& t) {
        if (t.is_var && !renames.count(t.var)) renames[t.var] = "x" + std::to_string(++counter);
    };
    for (size_t i : order) {
        const Condition& c = p.conditions[i];
        visit(c.node);
        visit(c.edge);
        visit(c.value);
        for (const ValueTest& vt : c.tests) visit(vt.rhs);
    }
    for (const Action& a : p.actions) {
        visit(a.node);
        visit(a.edge);
        visit(a.value);
        for (const CueTest& ct : a.cue) visit(ct.rhs);
        for (const auto& tr : a.em_cue)
            for (const Term& t : tr) visit(t);
        visit(a.arg);
        visit(a.arg2);
        visit(a.pref_subject);
        visit(a.pref_object);
    }

    std::string s = "role=" + std::to_string(static_cast<int>(p.role));
    if (p.has_operator_name) s += " op=" + syms.text(p.operator_name);
    s += p.rl ? " rl" : "";
    s += " |";
    for (size_t i : order) s += cond_text(syms, p.conditions[i], &renames);
    s += "|";
    for (const Action& a : p.actions) s += action_text(syms, a, &renames);
    return s;
}

void absorb_duplicate(Production& existing, double parent1_utility, double alpha) {
    existing.utility += alpha * (parent1_utility - existing.utility);
}

std::optional<Production> chunk_substate(SymbolTable& syms, const ChunkInput& in) {
    const auto& elems = *in.elements;
    const auto& steps = *in.steps;

    std::deque<uint64_t> queue;
    for (ElementId rid : in.results) {
        auto it = elems.find(rid);
        if (it == elems.end()) return std::nullopt;
        if (it->second.source_step == 0) return std::nullopt;  // underivable result
        queue.push_back(it->second.source_step);
    }

    std::set<uint64_t> done;
    std::vector<Triple> conds;
    std::set<Triple> cond_set;
    while (!queue.empty()) {
        uint64_t sid = queue.front();
        queue.pop_front();
        if (!done.insert(sid).second) continue;
        auto st = steps.find(sid);
        if (st == steps.end()) return std::nullopt;
        for (ElementId tid : st->second.tested) {
            auto er = elems.find(tid);
            if (er == elems.end()) return std::nullopt;
            const ElementRecord& r = er->second;
            if (r.level < in.substate_level) {
                if (cond_set.insert(r.t).second) conds.push_back(r.t);
                continue;
            }
            if (r.is_status || r.prov == Provenance::percept) return std::nullopt;
            if (r.prov == Provenance::architecture) continue;  // impasse bookkeeping
            if (r.source_step == 0) return std::nullopt;
            queue.push_back(r.source_step);
        }
    }
    if (conds.empty()) return std::nullopt;  // a chunk must test something

    std::sort(conds.begin(), conds.end());
    std::vector<Triple> results;
    for (ElementId rid : in.results) results.push_back(elems.at(rid).t);

    std::set<Symbol> nodes;
    for (const Triple& t : conds) nodes.insert(t.node);
    for (const Triple& t : results) nodes.insert(t.node);

    std::map<Symbol, Symbol> vars;
    int counter = 0;
    auto var_of = [&](Symbol n) {
        auto it = vars.find(n);
        if (it != vars.end()) return it->second;
        Symbol v = syms.resolve("v" + std::to_string(++counter));
        vars.emplace(n, v);
        return v;
    };
    auto node_term = [&](Symbol n) { return Term::variable(var_of(n)); };
    auto value_term = [&](const Value& v) {
        if (v.is_sym() && nodes.count(v.as_sym())) return Term::variable(var_of(v.as_sym()));
        return Term::lit(v);
    };

    Production p;
    p.role = Role::elaboration;
    p.origin = RuleOrigin::chunked;
    for (const Triple& t : conds) {
        Condition c;
        c.node = node_term(t.node);
        c.edge = Term::lit(Value::sym(t.edge));
        c.value = value_term(t.value);
        p.conditions.push_back(c);
    }

    // order the makes so every fresh node is minted (node position) before it
    // is referenced in value position
    std::set<Symbol> cond_nodes;
    for (const Triple& t : conds) cond_nodes.insert(t.node);
    std::set<Symbol> available = cond_nodes;
    std::vector<Triple> pending = results;
    while (!pending.empty()) {
        bool progress = false;
        for (auto it = pending.begin(); it != pending.end();) {
            bool ok = !it->value.is_sym() || !nodes.count(it->value.as_sym()) ||
                      available.count(it->value.as_sym()) || it->value.as_sym() == it->node;
            if (ok) {
                Action a;
                a.kind = ActionKind::make;
                a.node = node_term(it->node);
                a.edge = Term::lit(Value::sym(it->edge));
                a.value = value_term(it->value);
                p.actions.push_back(a);
                available.insert(it->node);
                it = pending.erase(it);
                progress = true;
            } else {
                ++it;
            }
        }
        if (!progress) return std::nullopt;  // mutually dependent fresh nodes
    }
    return p;
}

std::vector<Symbol> forget_rules(RuleSet& rules, double threshold, double decay, int64_t now) {
    std::vector<Symbol> removed;
    for (Production* p : rules.in_order()) {
        if (p->origin == RuleOrigin::hand_written) continue;
        if (bla(p->firings, now, decay) < threshold) removed.push_back(p->name);
    }
    for (Symbol name : removed) rules.remove(name);
    return removed;
}

}  // namespace cogk
