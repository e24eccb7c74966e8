#include "cogk/procedural.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cogk/errors.hpp"

namespace cogk {

Production* RuleSet::add(Production p) {
    if (by_name_.count(p.name)) fail(Errc::bad_model, "duplicate production name");
    rules_.push_back(std::make_unique<Production>(std::move(p)));
    Production* raw = rules_.back().get();
    by_name_[raw->name] = raw;
    return raw;
}

bool RuleSet::remove(Symbol name) {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) return false;
    by_name_.erase(it);
    rules_.erase(std::remove_if(rules_.begin(), rules_.end(),
                                [&](const std::unique_ptr<Production>& r) {
                                    return r->name == name;
                                }),
                 rules_.end());
    return true;
}

Production* RuleSet::find(Symbol name) {
    auto it = by_name_.find(name);
    return it == by_name_.end() ? nullptr : it->second;
}

const Production* RuleSet::find(Symbol name) const {
    auto it = by_name_.find(name);
    return it == by_name_.end() ? nullptr : it->second;
}

std::vector<Production*> RuleSet::in_order() const {
    std::vector<Production*> out;
    for (const auto& r : rules_) out.push_back(r.get());
    return out;
}

std::string selection_key(const SymbolTable& syms, const Instantiation& inst) {
    std::string key = syms.text(inst.production);
    key += '\x1f';
    std::vector<std::pair<std::string, std::string>> bs;
    for (const auto& [var, val] : inst.bindings)
        bs.emplace_back(syms.text(var), val.sort_key(syms));
    std::sort(bs.begin(), bs.end());
    for (auto& [v, k] : bs) {
        key += v;
        key += '=';
        key += k;
        key += ';';
    }
    key += '\x1f';
    for (ElementId id : inst.tested) {
        key += std::to_string(id);
        key += ',';
    }
    return key;
}

double logistic_noise(double sigma, std::mt19937_64& rng) {
    double u = std::uniform_real_distribution<double>(1e-12, 1.0 - 1e-12)(rng);
    return sigma * std::log(u / (1.0 - u));
}

size_t select_actr(const SymbolTable& syms, const RuleSet& rules,
                   std::span<const Instantiation> insts, double sigma, std::mt19937_64& rng) {
    if (insts.empty()) fail(Errc::internal, "select_actr on an empty conflict set");
    std::vector<size_t> order(insts.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<std::string> keys;
    keys.reserve(insts.size());
    for (const Instantiation& inst : insts) keys.push_back(selection_key(syms, inst));
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return keys[a] < keys[b]; });

    bool first = true;
    double best_score = 0.0;
    size_t best = order[0];
    for (size_t idx : order) {
        const Production* p = rules.find(insts[idx].production);
        double score = p ? p->utility : 0.0;
        if (sigma > 0.0) score += logistic_noise(sigma, rng);
        if (first || score > best_score) {
            first = false;
            best_score = score;
            best = idx;
        }
    }
    return best;
}

namespace {

bool reaches_itself(Symbol start, const std::map<Symbol, std::vector<Symbol>>& adj) {
    std::vector<Symbol> stack;
    std::set<Symbol> seen;
    auto it = adj.find(start);
    if (it == adj.end()) return false;
    for (Symbol n : it->second) stack.push_back(n);
    while (!stack.empty()) {
        Symbol n = stack.back();
        stack.pop_back();
        if (n == start) return true;
        if (!seen.insert(n).second) continue;
        auto jt = adj.find(n);
        if (jt != adj.end())
            for (Symbol m : jt->second) stack.push_back(m);
    }
    return false;
}

}  // namespace

Decision decide(const SymbolTable& syms, std::span<const Preference> prefs,
                const std::map<Symbol, double>& rl_values, double temperature,
                std::mt19937_64& rng) {
    std::set<Symbol> acc, rej, best, worst, indiff;
    std::vector<std::pair<Symbol, Symbol>> dom;  // first beats second
    for (const Preference& p : prefs) {
        switch (p.kind) {
            case PrefKind::acceptable: acc.insert(p.subject); break;
            case PrefKind::reject: rej.insert(p.subject); break;
            case PrefKind::best: best.insert(p.subject); break;
            case PrefKind::worst: worst.insert(p.subject); break;
            case PrefKind::indifferent: indiff.insert(p.subject); break;
            case PrefKind::better:
                if (p.has_object) dom.emplace_back(p.subject, p.object);
                break;
            case PrefKind::worse:
                if (p.has_object) dom.emplace_back(p.object, p.subject);
                break;
        }
    }

    auto by_text = [&](Symbol a, Symbol b) { return syms.text(a) < syms.text(b); };
    std::vector<Symbol> cands;
    for (Symbol c : acc)
        if (!rej.count(c)) cands.push_back(c);
    std::sort(cands.begin(), cands.end(), by_text);
    if (cands.empty()) return {DecisionKind::state_no_change, Symbol{}, {}};

    std::vector<Symbol> shortlist;
    for (Symbol c : cands)
        if (best.count(c)) shortlist.push_back(c);
    if (!shortlist.empty()) cands = shortlist;

    std::set<Symbol> live(cands.begin(), cands.end());
    std::map<Symbol, std::vector<Symbol>> adj;
    std::set<Symbol> dominated;
    for (auto& [a, b] : dom)
        if (live.count(a) && live.count(b) && !(a == b)) {
            adj[a].push_back(b);
            dominated.insert(b);
        }
    std::vector<Symbol> cyclic;
    for (Symbol c : cands)
        if (reaches_itself(c, adj)) cyclic.push_back(c);
    if (!cyclic.empty()) return {DecisionKind::conflict, Symbol{}, cyclic};

    std::vector<Symbol> undominated;
    for (Symbol c : cands)
        if (!dominated.count(c)) undominated.push_back(c);
    cands = undominated;  // nonempty: the relation is acyclic here

    std::vector<Symbol> non_worst;
    for (Symbol c : cands)
        if (!worst.count(c)) non_worst.push_back(c);
    if (!non_worst.empty()) cands = non_worst;

    if (cands.size() == 1) return {DecisionKind::selected, cands[0], {}};

    bool all_indiff = std::all_of(cands.begin(), cands.end(),
                                  [&](Symbol c) { return indiff.count(c) != 0; });
    if (!all_indiff) return {DecisionKind::tie, Symbol{}, cands};

    double qmax = -std::numeric_limits<double>::infinity();
    std::vector<double> q(cands.size(), 0.0);
    for (size_t i = 0; i < cands.size(); ++i) {
        auto it = rl_values.find(cands[i]);
        q[i] = it == rl_values.end() ? 0.0 : it->second;
        qmax = std::max(qmax, q[i]);
    }
    double total = 0.0;
    std::vector<double> w(cands.size());
    for (size_t i = 0; i < cands.size(); ++i) {
        w[i] = std::exp((q[i] - qmax) / temperature);
        total += w[i];
    }
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng) * total;
    double acc_w = 0.0;
    for (size_t i = 0; i < cands.size(); ++i) {
        acc_w += w[i];
        if (u < acc_w) return {DecisionKind::selected, cands[i], {}};
    }
    return {DecisionKind::selected, cands.back(), {}};
}

namespace {

Symbol as_node(const Value& v) {
    if (!v.is_sym()) fail(Errc::internal, "non-symbol in node position at firing time");
    return v.as_sym();
}

// resolves a make/remove pattern; fresh-binds unbound make-node variables
Triple resolve_triple(WorkingMemory& wm, const SymbolTable& syms, const Action& a,
                      Bindings& bindings, bool allow_fresh) {
    Value nv;
    if (a.node.is_var) {
        auto it = bindings.find(a.node.var);
        if (it != bindings.end()) {
            nv = it->second;
        } else if (allow_fresh) {
            Symbol fresh = wm.fresh_node(syms.text(a.node.var));
            nv = Value::sym(fresh);
            bindings.emplace(a.node.var, nv);
        } else {
            fail(Errc::internal, "unbound variable in remove action");
        }
    } else {
        nv = a.node.constant;
    }
    Value ev = substitute(a.edge, bindings);
    Value vv = substitute(a.value, bindings);
    if (!ev.is_sym()) fail(Errc::internal, "non-symbol in edge position at firing time");
    return Triple{as_node(nv), ev.as_sym(), vv};
}

Preference resolve_pref(const Action& a, const Instantiation& inst) {
    Preference p;
    p.kind = a.pref;
    Value subj = substitute(a.pref_subject, inst.bindings);
    p.subject = subj.is_sym() ? subj.as_sym() : Symbol{};
    if (a.has_pref_object) {
        Value obj = substitute(a.pref_object, inst.bindings);
        p.object = obj.is_sym() ? obj.as_sym() : Symbol{};
        p.has_object = true;
    }
    p.source_inst = inst.id;
    p.source_rule = inst.production;
    p.state = inst.state;
    return p;
}

}  // namespace

FireResult fire_one(WorkingMemory& wm, const Innate& in, const Production& p, Instantiation& inst,
                    Support support, int64_t now, const std::function<void(Symbol)>& on_clear) {
    (void)in;
    FireResult out;
    const SymbolTable& syms = wm.symbols();
    AddInfo ai;
    ai.prov = Provenance::rule;
    ai.inst = inst.id;
    ai.justified = support == Support::justified;
    // makes on a fresh node wait until a later make seats that node on a
    // buffer; resolution order stays the action order so fresh names are
    // deterministic
    std::vector<Triple> waiting;
    auto place = [&](const Triple& t) {
        ElementId id = wm.add(t.node, t.edge, t.value, ai, now);
        inst.created.push_back(id);
        out.created.push_back(id);
        for (size_t i = 0; i < waiting.size();) {
            if (wm.seated(waiting[i].node)) {
                Triple w = waiting[i];
                waiting.erase(waiting.begin() + static_cast<long>(i));
                ElementId wid = wm.add(w.node, w.edge, w.value, ai, now);
                inst.created.push_back(wid);
                out.created.push_back(wid);
                i = 0;
            } else {
                ++i;
            }
        }
    };
    for (const Action& a : p.actions) {
        switch (a.kind) {
            case ActionKind::make: {
                Triple t = resolve_triple(wm, syms, a, inst.bindings, true);
                if (!wm.seated(t.node))
                    waiting.push_back(t);
                else
                    place(t);
                break;
            }
            case ActionKind::remove: {
                Triple t = resolve_triple(wm, syms, a, inst.bindings, false);
                if (wm.remove_triple(t.node, t.edge, t.value))
                    out.removed.push_back(t);
                else
                    out.remove_noops.push_back(t);
                break;
            }
            case ActionKind::clear: {
                if (on_clear)
                    on_clear(a.buffer);
                else
                    wm.clear_buffer(a.buffer);
                out.cleared.push_back(a.buffer);
                break;
            }
            case ActionKind::command: {
                out.commands.push_back({a, inst.bindings, inst.id, inst.production});
                break;
            }
            case ActionKind::prefer: {
                out.prefs.push_back(resolve_pref(a, inst));
                break;
            }
        }
    }
    if (!waiting.empty())
        fail(Errc::placement, "rule '" + syms.text(p.name) + "' makes elements on '" +
                                  syms.text(waiting.front().node) +
                                  "' without seating it in a buffer");
    return out;
}

FireResult fire_wave(WorkingMemory& wm, const Innate& in, const RuleSet& rules,
                     std::span<Instantiation> insts, Support support, int64_t now) {
    (void)in;
    FireResult out;
    const SymbolTable& syms = wm.symbols();

    struct InstPlan {
        Instantiation* inst;
        std::vector<std::pair<Triple, bool>> ops;  // ordered, one entry per triple
    };
    std::vector<InstPlan> plans;

    for (Instantiation& inst : insts) {
        const Production* p = rules.find(inst.production);
        if (!p) continue;
        InstPlan plan{&inst, {}};
        for (const Action& a : p->actions) {
            switch (a.kind) {
                case ActionKind::make:
                case ActionKind::remove: {
                    bool create = a.kind == ActionKind::make;
                    Triple t = resolve_triple(wm, syms, a, inst.bindings, create);
                    auto same = std::find_if(plan.ops.begin(), plan.ops.end(),
                                             [&](const auto& op) { return op.first == t; });
                    if (same != plan.ops.end()) plan.ops.erase(same);
                    plan.ops.emplace_back(t, create);
                    break;
                }
                case ActionKind::clear:
                    wm.clear_buffer(a.buffer);  // not reachable from validated soar models
                    out.cleared.push_back(a.buffer);
                    break;
                case ActionKind::command:
                    out.commands.push_back({a, inst.bindings, inst.id, inst.production});
                    break;
                case ActionKind::prefer:
                    out.prefs.push_back(resolve_pref(a, inst));
                    break;
            }
        }
        plans.push_back(std::move(plan));
    }

    std::set<Triple> wave_removes;
    for (const InstPlan& plan : plans)
        for (const auto& [t, create] : plan.ops)
            if (!create) wave_removes.insert(t);

    for (const Triple& t : wave_removes) {
        if (wm.remove_triple(t.node, t.edge, t.value))
            out.removed.push_back(t);
        else
            out.remove_noops.push_back(t);
    }

    std::set<ElementId> seen;
    for (InstPlan& plan : plans)
        for (const auto& [t, create] : plan.ops) {
            if (!create) continue;
            if (wave_removes.count(t)) {
                out.wave_conflicts.push_back(t);
                continue;
            }
            AddInfo ai;
            ai.prov = Provenance::rule;
            ai.inst = plan.inst->id;
            ai.justified = support == Support::justified;
            ElementId id = wm.add(t.node, t.edge, t.value, ai, now);
            plan.inst->created.push_back(id);
            if (seen.insert(id).second) out.created.push_back(id);
        }
    return out;
}

}  // namespace cogk
