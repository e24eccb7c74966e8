#include <algorithm>
#include <sstream>

#include "cogk/errors.hpp"
#include "cogk/production.hpp"

namespace cogk {

Value substitute(const Term& t, const Bindings& b) {
    if (!t.is_var) return t.constant;
    auto it = b.find(t.var);
    if (it == b.end()) fail(Errc::internal, "unbound variable in substitution");
    return it->second;
}

bool term_matches(const Term& t, const Value& v, Bindings& b) {
    if (!t.is_var) return t.constant == v;
    auto it = b.find(t.var);
    if (it != b.end()) return it->second == v;
    b.emplace(t.var, v);
    return true;
}

namespace {

bool test_holds(const ValueTest& t, const Value& lhs, const Bindings& b) {
    if (t.rhs.is_var && !b.count(t.rhs.var)) return false;
    Value rhs = t.rhs.is_var ? b.at(t.rhs.var) : t.rhs.constant;
    if (t.op == TestOp::ne) return !(lhs == rhs);
    if (!lhs.is_num() || !rhs.is_num()) return false;  // order tests are numeric-only
    double a = lhs.as_num(), c = rhs.as_num();
    switch (t.op) {
        case TestOp::lt: return a < c;
        case TestOp::gt: return a > c;
        case TestOp::le: return a <= c;
        case TestOp::ge: return a >= c;
        default: return false;
    }
}

bool element_fits(const Element& e, const Condition& c, Bindings& b) {
    Bindings saved = b;
    if (!term_matches(c.node, Value::sym(e.node), b) ||
        !term_matches(c.edge, Value::sym(e.edge), b) || !term_matches(c.value, e.value, b)) {
        b = std::move(saved);
        return false;
    }
    for (const ValueTest& t : c.tests)
        if (!test_holds(t, e.value, b)) {
            b = std::move(saved);
            return false;
        }
    return true;
}

// candidate elements for a condition under current bindings, id order
std::vector<ElementId> candidates(const WorkingMemory& wm, const Condition& c, const Bindings& b) {
    Symbol node;
    if (!c.node.is_var && c.node.constant.is_sym())
        node = c.node.constant.as_sym();
    else if (c.node.is_var) {
        auto it = b.find(c.node.var);
        if (it != b.end()) {
            if (!it->second.is_sym()) return {};
            node = it->second.as_sym();
        }
    }
    if (!(node == Symbol{})) return wm.by_node(node);
    std::vector<ElementId> all;
    all.reserve(wm.size());
    for (const auto& [id, e] : wm.elements()) all.push_back(id);
    return all;
}

bool exists_match(const WorkingMemory& wm, const Condition& c, const Bindings& b) {
    for (ElementId id : candidates(wm, c, b)) {
        Bindings local = b;  // wildcard vars in negatives stay local
        if (element_fits(wm.get(id), c, local)) return true;
    }
    return false;
}

struct Enumerator {
    const WorkingMemory& wm;
    const Production& p;
    std::vector<const Condition*> positives;
    std::vector<const Condition*> negatives;
    std::vector<Instantiation> out;

    void run() {
        for (const Condition& c : p.conditions)
            (c.polarity == Polarity::positive ? positives : negatives).push_back(&c);
        Bindings b;
        std::vector<ElementId> tested;
        descend(0, b, tested);
    }

    void descend(size_t k, Bindings& b, std::vector<ElementId>& tested) {
        if (k == positives.size()) {
            for (const Condition* n : negatives)
                if (exists_match(wm, *n, b)) return;
            Instantiation inst;
            inst.production = p.name;
            inst.bindings = b;
            inst.tested = tested;
            out.push_back(std::move(inst));
            return;
        }
        for (ElementId id : candidates(wm, *positives[k], b)) {
            Bindings saved = b;
            if (element_fits(wm.get(id), *positives[k], b)) {
                tested.push_back(id);
                descend(k + 1, b, tested);
                tested.pop_back();
            }
            b = std::move(saved);
        }
    }
};

}  // namespace

std::vector<Instantiation> match_production(const WorkingMemory& wm, const Production& p) {
    Enumerator e{wm, p, {}, {}, {}};
    e.run();
    return e.out;
}

bool recheck(const WorkingMemory& wm, const Production& p, const Instantiation& inst) {
    for (ElementId id : inst.tested)
        if (!wm.has(id)) return false;
    for (const Condition& c : p.conditions)
        if (c.polarity == Polarity::negative && exists_match(wm, c, inst.bindings)) return false;
    return true;
}

// the tested elements pin down every binding a positive condition makes, so
// they identify the instantiation; bindings added while firing (fresh nodes)
// must not change the key
std::string instantiation_key(const SymbolTable& syms, const Instantiation& inst) {
    std::ostringstream os;
    os << syms.text(inst.production) << '|';
    for (ElementId id : inst.tested) os << id << ',';
    return os.str();
}

}  // namespace cogk
