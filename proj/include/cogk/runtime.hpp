#pragma once
// The cognitive cycle: a deterministic discrete-event scheduler running the
// two mode loops (actr: match/select/fire; soar: elaborate/decide/apply),
// module command dispatch, the learning hooks, and trace emission.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cogk/declarative.hpp"
#include "cogk/dsl.hpp"
#include "cogk/env.hpp"
#include "cogk/learning.hpp"
#include "cogk/procedural.hpp"
#include "cogk/trace.hpp"
#include "cogk/wm.hpp"

namespace cogk {

struct RunConfig {
    uint64_t seed = 0;
    int64_t max_cycles = 1000;
};

enum class StopReason { running, halted, quiescence, max_cycles, failure };

std::string stop_reason_name(StopReason r);

struct RunResult {
    StopReason reason = StopReason::running;
    int64_t cycles = 0;
    int64_t final_time = 0;
    std::string error;
};

struct KernelParams {
    int64_t cycle_cost = 50;
    ProceduralParams proc;
    RetrievalParams dm;
    bool compilation = false;
    bool chunking = false;
    bool spontaneous = false;
    bool idle_wait = false;
    bool wm_decay_on = false;
    double wm_decay_threshold = 0.0;
    bool rule_forget_on = false;
    double rule_forget_threshold = 0.0;
    double rule_forget_decay = 0.5;
};

// Maps the model's `param` block onto the kernel parameter set. Thresholded
// features (wm-decay-threshold, forget-threshold) switch on by being present.
KernelParams params_from_ast(const ModelAst& ast);

class Kernel {
public:
    // The model must have passed validate_model; symbols must be the table the
    // model was parsed into.
    Kernel(SymbolTable& syms, const ModelAst& ast, EnvScript env, const RunConfig& cfg);

    Mode mode() const { return wm_.mode(); }
    bool finished() const { return reason_ != StopReason::running; }
    StopReason reason() const { return reason_; }
    const std::string& failure_detail() const { return error_; }
    int64_t cycle() const { return cycle_; }
    int64_t now() const { return now_; }
    int impasse_count() const { return impasse_count_; }

    // Executes exactly one cognitive cycle and returns its trace record.
    // Quiescence yields a final phase="quiescence" record. Throws Errc::halted
    // once finished; run failures throw after appending an error record.
    Json step();

    // Cycles until halt, quiescence, failure, or max-cycles.
    RunResult run();

    const std::vector<Json>& trace() const { return trace_; }

    // DM persistence; call at cycle boundaries only.
    void load_store(const std::string& path);
    void save_store(const std::string& path) const;

    WorkingMemory& wm() { return wm_; }
    const WorkingMemory& wm() const { return wm_; }
    RuleSet& rules() { return rules_; }
    SemanticStore& semantic() { return sm_; }
    EpisodicStore& episodic() { return em_; }
    const KernelParams& params() const { return params_; }

    std::vector<const Production*> learned_rules() const;
    void adopt_rule(const Production& p);  // pre-run rule injection

private:
    enum class EvKind { percept_arrival, reward, retrieval_complete, motor_complete };

    struct Pending {
        int64_t at = 0;
        uint64_t seq = 0;
        EvKind kind = EvKind::percept_arrival;
        Symbol buffer;                      // delivery target
        bool success = true;
        std::vector<Chunk> chunks;          // retrieval payload, root first
        bool synthetic = false;             // blend result: no copy-of
        uint64_t issuer = 0;                // issuing instantiation
        double amount = 0.0;                // reward
        std::optional<EnvPercept> percept;  // percept payload
        double activation = 0.0;
        int64_t latency = 0;
        bool spontaneous = false;

        friend bool operator<(const Pending& a, const Pending& b) {
            if (a.at != b.at) return a.at < b.at;
            return a.seq < b.seq;
        }
    };

    struct JustifiedInst {
        Instantiation inst;
    };

    struct ImpasseInfo {
        Symbol type;
        std::vector<Symbol> candidates;
        Symbol stuck_operator;  // operator-no-change only
    };

    struct RlChain {
        RlDecisionRecord record;
        bool live = false;
    };

    // construction
    void load_buffers(const ModelAst& ast);
    void load_wm_block(const ModelAst& ast);
    void load_dm_block(const ModelAst& ast);
    void schedule_timeline();

    // event plumbing
    void schedule(Pending ev);
    void apply_due_events(Json& rec);
    void deliver_percept(const EnvPercept& p, int64_t at, Json* rec);
    void deliver_retrieval(const Pending& ev, Json& rec);
    void clear_field(Symbol buf, Symbol edge);

    // shared cycle pieces
    void end_cycle(Json& rec, const std::vector<std::string>& before, int64_t t);
    void admit(Instantiation& inst, const std::map<Symbol, int>& levels);
    void note_created(const std::vector<ElementId>& ids);
    void run_commands(std::vector<CommandIssue>& cmds, Json& rec, int64_t t);
    void do_retrieve(const CommandIssue& c, bool blend, Json& rec, int64_t t);
    void do_retrieve_name(const CommandIssue& c, Json& rec, int64_t t);
    void do_store(const CommandIssue& c, Json& rec, int64_t t);
    void do_motor(const CommandIssue& c, Json& rec, int64_t t);
    void do_em(const CommandIssue& c, Json& rec, int64_t t);
    void deliver_episode(const EpisodicStore::Episode& ep, uint64_t step_id, int issuer_level,
                         int64_t t);
    void consume_reward(Json& rec, int64_t t);
    void sweep_strays();
    std::string motor_key(const CommandIssue& c) const;
    Cue resolve_cue(const CommandIssue& c) const;

    // actr: returns false on quiescence (no unrefracted match)
    bool cycle_actr(Json& rec, int64_t t);
    void try_compile(const Production& p2, const Instantiation& i2, Json& rec, int64_t t);
    void harvest_buffer(Symbol buf, int64_t t);
    void spontaneous_check(Json& rec, int64_t t);

    // soar
    void cycle_soar(Json& rec, int64_t t);
    void retract_support(uint64_t inst_id);
    void elaborate_fixpoint(Json& rec, std::vector<CommandIssue>& cmds, int64_t t);
    Symbol decision_walk(Json& rec, int64_t t);  // returns the apply-target state
    void apply_wave(Json& rec, Symbol target, std::vector<CommandIssue>& cmds, int64_t t);
    void install_operator(Symbol state, Symbol op, int64_t t);
    void uninstall_operator(Symbol state);
    std::optional<ElementId> operator_element(Symbol state) const;
    void resolve_from(size_t index, Json& rec, int64_t t);
    void attempt_chunk(Symbol state, int index, Json& rec, int64_t t);
    void record_episode_delta(int64_t end_time);
    void register_new_rule(Production p, RuleOrigin origin, double parent_utility, Json& rec,
                           int64_t t);
    void rl_on_decision(Symbol state, double q, std::vector<Symbol> contributors, Json& rec);
    void rl_flush();

    void finish(StopReason r);

    SymbolTable& syms_;
    Innate in_;
    KernelParams params_;
    RunConfig cfg_;
    WorkingMemory wm_;
    RuleSet rules_;
    SemanticStore sm_;
    EpisodicStore em_;
    EnvScript env_;
    std::mt19937_64 rng_;

    int64_t now_ = 0;
    int64_t cycle_ = 0;
    uint64_t next_seq_ = 1;
    uint64_t next_inst_ = 1;
    StopReason reason_ = StopReason::running;
    std::string error_;
    bool halt_requested_ = false;
    int impasse_count_ = 0;
    std::set<Pending> queue_;
    std::vector<Json> trace_;

    // cached atoms
    Symbol operator_sym_, item_sym_, candidate_sym_, content_sym_, cycle_sym_;
    Symbol retrieval_buf_, blend_buf_, dm_buf_, em_buf_, motor_buf_, reward_buf_, percept_buf_;

    // actr state
    std::set<std::string> fired_keys_;
    std::vector<FiringRecord> history_;
    std::optional<Instantiation> prev_inst_;
    bool prev_request_pending_ = false;
    std::vector<ElementId> prev_delivered_;
    bool cycle_issued_request_ = false;
    int compiled_count_ = 0;

    // module request state
    struct PendingRequest {
        uint64_t issuer = 0;
        std::vector<ElementId> issuer_tested;
        int issuer_level = 0;
    };
    std::map<Symbol, PendingRequest> requests_;  // busy buffer -> issuing context
    double env_reward_ = 0.0;
    bool reward_seen_ = false;

    // soar state
    std::map<std::string, JustifiedInst> justified_;
    std::vector<Preference> live_prefs_;
    std::map<Symbol, Symbol> installed_;  // state -> operator
    std::map<Symbol, ImpasseInfo> impasse_of_;
    std::set<std::string> app_fired_keys_;
    std::map<Symbol, RlChain> rl_chains_;
    double rl_pending_ = 0.0;
    bool rl_reward_seen_ = false;
    std::map<ElementId, ElementRecord> element_recs_;
    std::map<uint64_t, StepRecord> steps_;
    std::map<uint64_t, int> step_level_;
    std::set<Triple> em_snapshot_;
    std::optional<int64_t> em_cursor_;  // last delivered episode cycle
    int chunked_count_ = 0;
};

}  // namespace cogk
