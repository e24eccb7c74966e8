#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cogk/core.hpp"
#include "cogk/symbols.hpp"
#include "cogk/value.hpp"
#include "cogk/wm.hpp"

namespace cogk {

// A pattern term: either a variable (named without the '?') or a constant value.
struct Term {
    bool is_var = false;
    Symbol var;
    Value constant;

    static Term variable(Symbol v) {
        Term t;
        t.is_var = true;
        t.var = v;
        return t;
    }
    static Term lit(Value v) {
        Term t;
        t.constant = std::move(v);
        return t;
    }
    bool operator==(const Term& o) const {
        if (is_var != o.is_var) return false;
        return is_var ? var == o.var : constant == o.constant;
    }
};

enum class TestOp { ne, lt, gt, le, ge };

struct ValueTest {
    TestOp op;
    Term rhs;
    bool operator==(const ValueTest& o) const { return op == o.op && rhs == o.rhs; }
};

enum class Polarity { positive, negative };

struct Condition {
    Term node, edge, value;
    Polarity polarity = Polarity::positive;
    std::vector<ValueTest> tests;
    bool operator==(const Condition& o) const {
        return node == o.node && edge == o.edge && value == o.value && polarity == o.polarity &&
               tests == o.tests;
    }
};

enum class CueTestKind { eq, ne, lt, gt, present };

struct CueTest {
    Symbol edge;
    CueTestKind kind;
    Term rhs;  // unused for `present`
    bool operator==(const CueTest& o) const {
        return edge == o.edge && kind == o.kind && (kind == CueTestKind::present || rhs == o.rhs);
    }
};

// Concrete retrieval cue after binding substitution, handed to the DM module.
struct Cue {
    struct Constraint {
        Symbol edge;
        CueTestKind kind;
        Value value;
    };
    std::vector<Constraint> constraints;
    Symbol target_buffer;
    int depth = 1;
};

enum class ActionKind { make, remove, clear, command, prefer };
enum class PrefKind { acceptable, reject, better, worse, best, worst, indifferent };

struct Action {
    ActionKind kind = ActionKind::make;
    // make / remove
    Term node, edge, value;
    // clear
    Symbol buffer;
    // command
    Symbol command;                               // innate command atom
    std::vector<CueTest> cue;                     // retrieve / retrieve-blend
    std::vector<std::array<Term, 3>> em_cue;      // em-query
    Term arg;                                     // retrieve-name / store / motor name
    Term arg2;                                    // motor payload (optional: unset Term)
    bool has_arg = false, has_arg2 = false;
    int depth = 1;                                // retrieve / retrieve-name child depth
    // prefer
    PrefKind pref = PrefKind::acceptable;
    Term pref_subject, pref_object;
    bool has_pref_object = false;

    bool operator==(const Action&) const = default;
};

enum class Role { plain, elaboration, proposal, evaluation, application };
enum class RuleOrigin { hand_written, compiled, chunked };

struct Production {
    Symbol name;
    Role role = Role::plain;
    Symbol operator_name;  // role=application: the operator it applies (optional)
    bool has_operator_name = false;
    std::vector<Condition> conditions;
    std::vector<Action> actions;
    double utility = 0.0;
    bool rl = false;
    RuleOrigin origin = RuleOrigin::hand_written;
    std::vector<int64_t> firings;  // activation trace for rule forgetting

    bool operator==(const Production&) const = default;
};

using Bindings = std::map<Symbol, Value>;

struct Instantiation {
    uint64_t id = 0;
    Symbol production;
    Bindings bindings;
    std::vector<ElementId> tested;  // positive-condition matches, in condition order
    std::vector<ElementId> created;
    int64_t fired_at = -1;
    int level = 0;     // deepest state tested (soar)
    Symbol state;      // that state's node (soar)
};

struct Preference {
    Symbol subject;  // operator instance node
    PrefKind kind;
    Symbol object;  // better/worse/binary-indifferent target
    bool has_object = false;
    uint64_t source_inst = 0;
    Symbol source_rule;
    Symbol state;  // state the candidate was proposed at
};

// Substitutes bindings into a term; variables must be bound.
Value substitute(const Term& t, const Bindings& b);
bool term_matches(const Term& t, const Value& v, Bindings& b);  // binds free vars

// All maximal consistent bindings of `p` against the current WM. Results are
// ordered deterministically (element-id order along the condition chain).
std::vector<Instantiation> match_production(const WorkingMemory& wm, const Production& p);

// True while every tested element still exists and negatives/tests still hold.
bool recheck(const WorkingMemory& wm, const Production& p, const Instantiation& inst);

// Stable identity for refraction: production + tested ids + bindings.
std::string instantiation_key(const SymbolTable& syms, const Instantiation& inst);

}  // namespace cogk
