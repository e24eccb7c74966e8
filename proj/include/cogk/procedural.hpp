#pragma once

#include <functional>
#include <map>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cogk/production.hpp"
#include "cogk/symbols.hpp"
#include "cogk/wm.hpp"

namespace cogk {

struct ProceduralParams {
    double utility_alpha = 0.2;
    double utility_noise = 0.25;  // sigma for actr conflict resolution
    double init_utility = 0.0;    // learned-rule starting utility
    double rl_alpha = 0.3;
    double rl_gamma = 0.9;
    double selection_temperature = 1.0;  // indifferent-softmax
    int elaboration_limit = 100;
};

// Owns productions; pointers stay valid until the rule is removed.
class RuleSet {
public:
    Production* add(Production p);  // duplicate name is an error
    bool remove(Symbol name);
    Production* find(Symbol name);
    const Production* find(Symbol name) const;
    std::vector<Production*> in_order() const;  // insertion order
    size_t size() const { return by_name_.size(); }

private:
    std::vector<std::unique_ptr<Production>> rules_;
    std::map<Symbol, Production*> by_name_;
};

// Deterministic conflict-resolution order: production name text, then binding
// text, then tested element ids.
std::string selection_key(const SymbolTable& syms, const Instantiation& inst);

double logistic_noise(double sigma, std::mt19937_64& rng);

// argmax of utility + logistic noise over the candidates; exact ties go to the
// earliest selection key. Noise is drawn per candidate in key order, and only
// when sigma > 0. Returns an index into `insts`.
size_t select_actr(const SymbolTable& syms, const RuleSet& rules,
                   std::span<const Instantiation> insts, double sigma, std::mt19937_64& rng);

enum class DecisionKind { selected, tie, conflict, state_no_change };

struct Decision {
    DecisionKind kind = DecisionKind::state_no_change;
    Symbol winner;
    std::vector<Symbol> candidates;  // impasse membership, text-sorted
};

// Preference resolution for one state's candidate operators.
Decision decide(const SymbolTable& syms, std::span<const Preference> prefs,
                const std::map<Symbol, double>& rl_values, double temperature,
                std::mt19937_64& rng);

enum class Support { persistent, justified };

// A module command captured at firing time; interpreted at the cycle boundary.
struct CommandIssue {
    Action action;  // kind == command, copied out of the production
    Bindings bindings;
    uint64_t inst_id = 0;
    Symbol rule;
};

struct FireResult {
    std::vector<ElementId> created;
    std::vector<Triple> removed;
    std::vector<Triple> remove_noops;       // removes that found nothing
    std::vector<Triple> wave_conflicts;     // created by one rule, removed by another
    std::vector<CommandIssue> commands;
    std::vector<Preference> prefs;
    std::vector<Symbol> cleared;  // buffers cleared (actr)
};

// Applies one instantiation's actions in listed order (actr discipline).
// Unbound make-node variables allocate fresh nodes and are recorded back into
// inst.bindings so the firing stays replayable. `on_clear` (when set) runs in
// place of the plain buffer clear, letting the kernel harvest to DM first.
FireResult fire_one(WorkingMemory& wm, const Innate& in, const Production& p, Instantiation& inst,
                    Support support, int64_t now,
                    const std::function<void(Symbol)>& on_clear = {});

// Parallel wave (soar discipline): every instantiation was matched against the
// pre-wave WM; deltas apply as a union, with cross-rule remove-beats-create.
FireResult fire_wave(WorkingMemory& wm, const Innate& in, const RuleSet& rules,
                     std::span<Instantiation> insts, Support support, int64_t now);

}  // namespace cogk
