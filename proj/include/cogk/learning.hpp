#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cogk/procedural.hpp"
#include "cogk/production.hpp"
#include "cogk/symbols.hpp"
#include "cogk/wm.hpp"

namespace cogk {

struct FiringRecord {
    Symbol rule;
    int64_t at;
};

struct UtilityDelta {
    Symbol rule;
    double before = 0.0;
    double after = 0.0;
};

// TD sweep over everything fired since the last reward, oldest first; each
// firing at t earns amount - (at - t)/1000 seconds of delay penalty. Clears
// the history.
std::vector<UtilityDelta> update_utilities_actr(RuleSet& rules, std::vector<FiringRecord>& history,
                                                double amount, int64_t at, double alpha);

// One decision's worth of RL bookkeeping: which rl rules backed the winner and
// the summed value they gave it.
struct RlDecisionRecord {
    std::vector<Symbol> contributors;
    double q = 0.0;
};

// Q_prev absorbs alpha*(r + gamma*q_curr - q_prev), split evenly across the
// contributing rules. q_curr is 0 at episode end.
std::vector<UtilityDelta> update_rl_soar(RuleSet& rules, const RlDecisionRecord& prev,
                                         double reward, double q_curr, double alpha, double gamma);

// Everything compile_pair needs to know about two back-to-back firings.
struct PairContext {
    const Production* p1 = nullptr;
    const Instantiation* i1 = nullptr;
    const Production* p2 = nullptr;
    const Instantiation* i2 = nullptr;
    std::map<ElementId, size_t> created_by_p1;  // i2 tested element -> p1 action index
    std::set<ElementId> retrieved;              // i2 tested elements from i1's retrieval
    bool i1_request_pending = false;            // i1's retrieval never seen by i2
};

// Pairs each element a firing created with the make action that produced it
// (created ids append in make-action order).
std::map<ElementId, size_t> make_index(const Production& p, const Instantiation& inst);

// Composes the pair into one rule, or declines (nullopt) when the composition
// would touch the environment or lose determinism. The result carries a null
// name; the caller christens and registers it.
std::optional<Production> compile_pair(SymbolTable& syms, const PairContext& ctx,
                                       double init_utility);

// Canonical text of a production: conditions stably sorted, variables renamed
// by first occurrence. Two rules are duplicates iff their forms are equal.
std::string canonical_form(const SymbolTable& syms, const Production& p);

void absorb_duplicate(Production& existing, double parent1_utility, double alpha);

// Per-element creation record kept by the kernel for backtracing.
struct ElementRecord {
    Triple t;
    Provenance prov = Provenance::architecture;
    uint64_t source_step = 0;  // 0 = no derivation (architecture)
    int level = 0;             // substate index of the node at creation
    bool is_status = false;
};

// One derivation step: a rule firing, or a retrieval delivery (whose support
// is the elements tested by the instantiation that issued the cue).
struct StepRecord {
    bool is_retrieval = false;
    std::vector<ElementId> tested;
};

struct ChunkInput {
    std::vector<ElementId> results;
    int substate_level = 1;
    const std::map<ElementId, ElementRecord>* elements = nullptr;
    const std::map<uint64_t, StepRecord>* steps = nullptr;
};

// Backtraces the results to superstate support and builds the bypass rule.
// nullopt = chunk-refused (derivation runs through substate-local status or
// percept data, or never reaches superstate support).
std::optional<Production> chunk_substate(SymbolTable& syms, const ChunkInput& in);

// Excises learned rules whose firing-trace activation fell below threshold.
std::vector<Symbol> forget_rules(RuleSet& rules, double threshold, double decay, int64_t now);

}  // namespace cogk
