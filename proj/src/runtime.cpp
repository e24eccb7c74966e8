#include "cogk/runtime.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <utility>

#include "cogk/activation.hpp"
#include "cogk/errors.hpp"
#include "cogk/persist.hpp"

namespace cogk {

namespace {

const char* status_text(StatusState s) {
    switch (s) {
        case StatusState::free_: return "free";
        case StatusState::busy: return "busy";
        case StatusState::success: return "success";
        case StatusState::failure: return "failure";
    }
    return "free";
}

const char* mode_name(Mode m) { return m == Mode::actr ? "actr" : "soar"; }

int64_t latency_of(double activation, double factor) {
    return static_cast<int64_t>(std::ceil(factor * std::exp(-activation)));
}

Json bindings_json(const SymbolTable& syms, const Bindings& b) {
    Json j = Json::object();
    for (const auto& [var, val] : b) j[syms.text(var)] = val.show(syms);
    return j;
}

// Motor arguments render without string quotes so they line up with the
// environment script's keys.
std::string arg_text(const SymbolTable& syms, const Value& v) {
    if (v.is_str()) return v.as_str();
    return v.show(syms);
}

// Root chunk plus slot-referenced DM chunks out to `depth` levels.
std::vector<Chunk> chunks_to_depth(const SemanticStore& sm, Symbol root, int depth) {
    std::vector<Chunk> out;
    std::set<Symbol> seen;
    std::vector<std::pair<Symbol, int>> frontier{{root, 1}};
    for (size_t i = 0; i < frontier.size(); ++i) {
        auto [name, lvl] = frontier[i];
        if (!seen.insert(name).second) continue;
        const StoredChunk* sc = sm.get(name);
        if (!sc) continue;
        out.push_back(sm.as_chunk(*sc));
        if (lvl >= depth) continue;
        for (const StoredSlot& s : sc->slots)
            if (s.val.is_sym() && sm.has(s.val.as_sym()))
                frontier.emplace_back(s.val.as_sym(), lvl + 1);
    }
    return out;
}

void diff_wm(Json& rec, const std::vector<std::string>& before,
             const std::vector<std::string>& after) {
    std::vector<std::string> added, removed;
    std::set_difference(after.begin(), after.end(), before.begin(), before.end(),
                        std::back_inserter(added));
    std::set_difference(before.begin(), before.end(), after.begin(), after.end(),
                        std::back_inserter(removed));
    if (added.empty() && removed.empty()) return;
    Json j = Json::object();
    if (!added.empty()) j["added"] = added;
    if (!removed.empty()) j["removed"] = removed;
    rec["wm"] = std::move(j);
}

}  // namespace

std::string stop_reason_name(StopReason r) {
    switch (r) {
        case StopReason::running: return "running";
        case StopReason::halted: return "halted";
        case StopReason::quiescence: return "quiescence";
        case StopReason::max_cycles: return "max-cycles";
        case StopReason::failure: return "failure";
    }
    return "running";
}

KernelParams params_from_ast(const ModelAst& ast) {
    KernelParams k;
    for (const AstParam& p : ast.params) {
        const std::string& n = p.name;
        double v = p.value;
        if (n == "cycle-cost") k.cycle_cost = static_cast<int64_t>(v);
        else if (n == "utility-alpha") k.proc.utility_alpha = v;
        else if (n == "utility-noise") k.proc.utility_noise = v;
        else if (n == "init-utility") k.proc.init_utility = v;
        else if (n == "rl-alpha") k.proc.rl_alpha = v;
        else if (n == "rl-gamma") k.proc.rl_gamma = v;
        else if (n == "selection-temperature") k.proc.selection_temperature = v;
        else if (n == "elaboration-limit") k.proc.elaboration_limit = static_cast<int>(v);
        else if (n == "decay") k.dm.decay = v;
        else if (n == "tau") k.dm.tau = v;
        else if (n == "tau-spontaneous") k.dm.tau_s = v;
        else if (n == "latency-factor") k.dm.latency_factor = v;
        else if (n == "assoc-strength") k.dm.assoc_strength = v;
        else if (n == "spread-depth") k.dm.spread_depth = static_cast<int>(v);
        else if (n == "blend-temperature") k.dm.blend_temp = v;
        else if (n == "inhibition-window") k.dm.inhibition_window = static_cast<int64_t>(v);
        else if (n == "dm-noise") k.dm.noise = v;
        else if (n == "compilation") k.compilation = v != 0.0;
        else if (n == "chunking") k.chunking = v != 0.0;
        else if (n == "spontaneous-retrieval") k.spontaneous = v != 0.0;
        else if (n == "idle-wait") k.idle_wait = v != 0.0;
        else if (n == "wm-decay-threshold") { k.wm_decay_on = true; k.wm_decay_threshold = v; }
        else if (n == "forget-threshold") { k.rule_forget_on = true; k.rule_forget_threshold = v; }
        else if (n == "forget-decay") k.rule_forget_decay = v;
    }
    return k;
}

Kernel::Kernel(SymbolTable& syms, const ModelAst& ast, EnvScript env, const RunConfig& cfg)
    : syms_(syms),
      in_(syms),
      params_(params_from_ast(ast)),
      cfg_(cfg),
      wm_(syms, in_, ast.mode),
      sm_(syms),
      env_(std::move(env)),
      rng_(cfg.seed) {
    operator_sym_ = syms_.resolve("operator");
    item_sym_ = syms_.resolve("item");
    candidate_sym_ = syms_.resolve("candidate");
    content_sym_ = syms_.resolve("content");
    cycle_sym_ = syms_.resolve("cycle");
    retrieval_buf_ = syms_.resolve("retrieval");
    blend_buf_ = syms_.resolve("blend");
    dm_buf_ = syms_.resolve("dm");
    em_buf_ = syms_.resolve("em");
    motor_buf_ = syms_.resolve("motor");
    reward_buf_ = syms_.resolve("reward");
    percept_buf_ = in_.percept;

    if (wm_.mode() == Mode::actr) load_buffers(ast);
    load_wm_block(ast);
    load_dm_block(ast);
    for (const AstProduction& ap : ast.productions) rules_.add(ap.rule);
    schedule_timeline();

    if (wm_.mode() == Mode::soar) {
        std::vector<ElementId> all;
        for (const auto& [id, e] : wm_.elements()) all.push_back(id);
        note_created(all);
        record_episode_delta(0);  // cycle-0 baseline episode
    }
}

void Kernel::load_buffers(const ModelAst& ast) {
    if (!ast.buffers.empty()) {
        for (const AstBuffer& b : ast.buffers) wm_.declare_buffer(b.name, Symbol{}, 0);
    } else {
        for (const std::string& n : default_actr_buffers())
            wm_.declare_buffer(syms_.resolve(n), Symbol{}, 0);
    }
    // module interfaces exist regardless of the declared set
    for (Symbol b : {percept_buf_, motor_buf_, reward_buf_})
        if (!wm_.is_buffer(b)) wm_.declare_buffer(b, Symbol{}, 0);
}

void Kernel::load_wm_block(const ModelAst& ast) {
    for (const AstTriple& tr : ast.wm) wm_.add(tr.node, tr.edge, tr.value, {}, 0);
}

void Kernel::load_dm_block(const ModelAst& ast) {
    for (const AstChunk& c : ast.dm) {
        Chunk ch;
        ch.name = c.name;
        for (const AstSlot& s : c.slots) {
            Element e;
            e.node = c.name;
            e.edge = s.edge;
            e.value = s.value;
            ch.elements.push_back(std::move(e));
        }
        Symbol n = sm_.store(ch, 0);
        sm_.note_associations(n, 0);
    }
}

void Kernel::schedule_timeline() {
    for (const TimedEnvEvent& e : env_.timeline) {
        Pending p;
        p.at = e.at;
        if (e.is_reward) {
            p.kind = EvKind::reward;
            p.amount = e.amount;
        } else {
            p.kind = EvKind::percept_arrival;
            p.percept = e.percept;
        }
        schedule(std::move(p));
    }
}

std::vector<const Production*> Kernel::learned_rules() const {
    std::vector<const Production*> out;
    for (Production* p : rules_.in_order())
        if (p->origin != RuleOrigin::hand_written) out.push_back(p);
    return out;
}

void Kernel::adopt_rule(const Production& p) { rules_.add(p); }

void Kernel::load_store(const std::string& path) { load_dm(sm_, em_, syms_, path); }

void Kernel::save_store(const std::string& path) const { save_dm(sm_, em_, syms_, path); }

// ---------------------------------------------------------------- stepping

Json Kernel::step() {
    if (finished())
        fail(Errc::halted, "run already finished: " + stop_reason_name(reason_));
    Json rec = Json::object();
    rec["mode"] = mode_name(wm_.mode());
    std::vector<std::string> before = wm_.dump();
    try {
        if (wm_.mode() == Mode::actr) {
            for (;;) {
                int64_t t = now_;
                apply_due_events(rec);
                sweep_strays();
                spontaneous_check(rec, t);
                if (cycle_actr(rec, t)) {
                    end_cycle(rec, before, t);
                    return trace_.back();
                }
                if (params_.idle_wait && !queue_.empty()) {
                    now_ = std::max(now_, queue_.begin()->at);
                    continue;
                }
                rec["cycle"] = cycle_;
                rec["time"] = t;
                rec["phase"] = "quiescence";
                consume_reward(rec, t);  // outstanding rewards still reach the learner
                diff_wm(rec, before, wm_.dump());
                finish(StopReason::quiescence);
                trace_.push_back(std::move(rec));
                return trace_.back();
            }
        }
        int64_t t = now_;
        apply_due_events(rec);
        cycle_soar(rec, t);
        end_cycle(rec, before, t);
        return trace_.back();
    } catch (const KernelError& e) {
        if (e.code() == Errc::halted) throw;
        Json err = Json::object();
        err["cycle"] = cycle_;
        err["time"] = now_;
        err["phase"] = "error";
        err["mode"] = mode_name(wm_.mode());
        err["error"] = e.what();
        error_ = e.what();
        trace_.push_back(std::move(err));
        finish(StopReason::failure);
        throw;
    }
}

RunResult Kernel::run() {
    while (!finished() && cycle_ < cfg_.max_cycles) {
        try {
            step();
        } catch (const KernelError&) {
            break;
        }
    }
    if (!finished()) finish(StopReason::max_cycles);
    return {reason_, cycle_, now_, error_};
}

void Kernel::end_cycle(Json& rec, const std::vector<std::string>& before, int64_t t) {
    rec["cycle"] = cycle_ + 1;
    rec["time"] = t;
    rec["phase"] = "cycle";
    ++cycle_;
    now_ = t + params_.cycle_cost;
    if (wm_.mode() == Mode::soar) record_episode_delta(now_);
    Json bufs = Json::object();
    for (Symbol b : wm_.buffer_names()) bufs[syms_.text(b)] = status_text(wm_.status(b));
    rec["buffers"] = std::move(bufs);
    diff_wm(rec, before, wm_.dump());
    if (halt_requested_) {
        rec["halted"] = true;
        finish(StopReason::halted);
    }
    trace_.push_back(std::move(rec));
}

void Kernel::finish(StopReason r) {
    if (reason_ != StopReason::running) return;
    reason_ = r;
    if (wm_.mode() == Mode::soar) rl_flush();
}

// ---------------------------------------------------------------- events

void Kernel::schedule(Pending ev) {
    ev.seq = next_seq_++;
    queue_.insert(std::move(ev));
}

void Kernel::apply_due_events(Json& rec) {
    while (!queue_.empty() && queue_.begin()->at <= now_) {
        Pending ev = *queue_.begin();
        queue_.erase(queue_.begin());
        switch (ev.kind) {
            case EvKind::percept_arrival:
                if (ev.percept) deliver_percept(*ev.percept, ev.at, &rec);
                break;
            case EvKind::reward:
                env_reward_ += ev.amount;
                reward_seen_ = true;
                rec["events"].push_back({{"kind", "reward"}, {"amount", ev.amount}});
                break;
            case EvKind::retrieval_complete:
                deliver_retrieval(ev, rec);
                break;
            case EvKind::motor_complete:
                wm_.set_status(motor_buf_,
                               ev.success ? StatusState::success : StatusState::failure, ev.at);
                rec["events"].push_back(
                    {{"kind", "motor-complete"}, {"status", ev.success ? "success" : "failure"}});
                if (ev.percept) deliver_percept(*ev.percept, ev.at, &rec);
                break;
        }
    }
}

void Kernel::deliver_percept(const EnvPercept& p, int64_t at, Json* rec) {
    clear_field(percept_buf_, in_.percept);
    if (wm_.mode() == Mode::actr) sweep_strays();
    Symbol node = wm_.fresh_node(p.stem);
    AddInfo ai;
    ai.prov = Provenance::percept;
    std::vector<ElementId> ids;
    ids.push_back(wm_.add(percept_buf_, in_.percept, Value::sym(node), ai, at));
    for (const auto& [edge, value] : p.slots) ids.push_back(wm_.add(node, edge, value, ai, at));
    note_created(ids);
    if (rec)
        (*rec)["events"].push_back({{"kind", "percept-arrival"}, {"node", syms_.text(node)}});
}

void Kernel::deliver_retrieval(const Pending& ev, Json& rec) {
    Symbol buf = ev.buffer;
    std::vector<ElementId> req_tested;
    int req_level = 0;
    if (auto it = requests_.find(buf); it != requests_.end()) {
        req_tested = it->second.issuer_tested;
        req_level = it->second.issuer_level;
        requests_.erase(it);
    }
    clear_field(buf, in_.retrieved);
    if (wm_.mode() == Mode::actr) sweep_strays();
    Json j{{"kind", ev.spontaneous ? "spontaneous-retrieval" : "retrieval-complete"},
           {"buffer", syms_.text(buf)},
           {"status", ev.success ? "success" : "failure"}};
    std::vector<ElementId> ids;
    if (ev.success) {
        uint64_t sid = 0;
        if (wm_.mode() == Mode::soar) {
            sid = next_inst_++;
            steps_[sid] = {true, req_tested};
            step_level_[sid] = req_level;
        }
        const Chunk& root = ev.chunks.front();
        AddInfo link;
        link.prov = Provenance::dm;
        link.inst = sid;
        if (!ev.synthetic) link.copy_of = root.name;
        ids.push_back(wm_.add(buf, in_.retrieved, Value::sym(root.name), link, ev.at));
        for (const Chunk& c : ev.chunks) {
            AddInfo ai;
            ai.prov = Provenance::dm;
            ai.inst = sid;
            if (!ev.synthetic) ai.copy_of = c.name;
            for (const Element& e : c.elements)
                ids.push_back(wm_.add(c.name, e.edge, e.value, ai, ev.at));
            if (!ev.synthetic) sm_.touch_chunk(c.name, ev.at);
        }
        if (!ev.synthetic) sm_.mark_retrieved(root.name, ev.at);
        wm_.set_status(buf, StatusState::success, ev.at);
        if (wm_.mode() == Mode::soar) {
            note_created(ids);
            for (ElementId id : ids) {
                auto it = element_recs_.find(id);
                if (it != element_recs_.end()) it->second.level = req_level;
            }
        }
        j["chunk"] = syms_.text(root.name);
        j["activation"] = ev.activation;
        j["latency"] = ev.latency;
    } else {
        wm_.set_status(buf, StatusState::failure, ev.at);
        j["latency"] = ev.latency;
    }
    if (prev_inst_ && ev.issuer != 0 && ev.issuer == prev_inst_->id) {
        prev_request_pending_ = false;
        prev_delivered_ = ev.success ? ids : std::vector<ElementId>{};
    }
    rec["events"].push_back(std::move(j));
}

void Kernel::clear_field(Symbol buf, Symbol edge) {
    for (ElementId id : wm_.by_node(buf))
        if (wm_.has(id) && wm_.get(id).edge == edge) wm_.remove(id);
}

// ---------------------------------------------------------------- shared

void Kernel::admit(Instantiation& inst, const std::map<Symbol, int>& levels) {
    inst.id = next_inst_++;
    if (wm_.mode() != Mode::soar) return;
    int lvl = 0;
    for (ElementId id : inst.tested) {
        if (!wm_.has(id)) continue;
        auto it = levels.find(wm_.get(id).node);
        if (it != levels.end()) lvl = std::max(lvl, it->second);
    }
    inst.level = lvl;
    const auto& states = wm_.states();
    inst.state = states[std::min<size_t>(static_cast<size_t>(lvl), states.size() - 1)];
    steps_[inst.id] = {false, inst.tested};
    step_level_[inst.id] = lvl;
}

void Kernel::note_created(const std::vector<ElementId>& ids) {
    if (wm_.mode() != Mode::soar || ids.empty()) return;
    std::map<Symbol, int> lv = wm_.compute_levels();
    for (ElementId id : ids) {
        if (!wm_.has(id) || element_recs_.count(id)) continue;
        const Element& e = wm_.get(id);
        const WmMeta& m = wm_.meta(id);
        ElementRecord r;
        r.t = {e.node, e.edge, e.value};
        r.prov = m.prov;
        r.source_step = m.source_inst;
        auto it = lv.find(e.node);
        r.level = it != lv.end() ? it->second : static_cast<int>(wm_.states().size());
        r.is_status = e.edge == in_.status;
        element_recs_.emplace(id, std::move(r));
    }
}

void Kernel::run_commands(std::vector<CommandIssue>& cmds, Json& rec, int64_t t) {
    for (const CommandIssue& c : cmds) {
        Symbol cmd = c.action.command;
        if (cmd == in_.cmd_retrieve) {
            do_retrieve(c, false, rec, t);
        } else if (cmd == in_.cmd_retrieve_blend) {
            do_retrieve(c, true, rec, t);
        } else if (cmd == in_.cmd_retrieve_name) {
            do_retrieve_name(c, rec, t);
        } else if (cmd == in_.cmd_store) {
            do_store(c, rec, t);
        } else if (cmd == in_.cmd_motor) {
            do_motor(c, rec, t);
        } else if (cmd == in_.cmd_halt) {
            halt_requested_ = true;
            rec["commands"].push_back({{"command", "halt"}, {"outcome", "accepted"}});
        } else {
            do_em(c, rec, t);
        }
    }
}

Cue Kernel::resolve_cue(const CommandIssue& c) const {
    Cue cue;
    cue.depth = c.action.depth;
    for (const CueTest& ct : c.action.cue) {
        Cue::Constraint k;
        k.edge = ct.edge;
        k.kind = ct.kind;
        if (ct.kind != CueTestKind::present) k.value = substitute(ct.rhs, c.bindings);
        cue.constraints.push_back(std::move(k));
    }
    return cue;
}

void Kernel::do_retrieve(const CommandIssue& c, bool blend_mode, Json& rec, int64_t t) {
    Symbol target = wm_.mode() == Mode::actr ? (blend_mode ? blend_buf_ : retrieval_buf_)
                                             : dm_buf_;
    Json j{{"command", blend_mode ? "retrieve-blend" : "retrieve"},
           {"buffer", syms_.text(target)}};
    if (!wm_.is_buffer(target)) {
        j["outcome"] = "no-buffer";
        rec["commands"].push_back(std::move(j));
        return;
    }
    if (requests_.count(target) || wm_.status(target) == StatusState::busy) {
        j["outcome"] = "rejected-busy";
        rec["commands"].push_back(std::move(j));
        return;
    }
    Cue cue = resolve_cue(c);
    cue.target_buffer = target;
    std::map<Symbol, double> spread =
        wm_.mode() == Mode::actr ? spread_actr(wm_, sm_, params_.dm.assoc_strength)
                                 : spread_soar(wm_, sm_, params_.dm.spread_depth, t);
    Pending ev;
    ev.kind = EvKind::retrieval_complete;
    ev.buffer = target;
    ev.issuer = c.inst_id;
    if (blend_mode) {
        BlendOutcome b = blend(sm_, cue, params_.dm, spread, t, wm_.fresh_node("blend"));
        ev.success = b.success;
        ev.synthetic = true;
        ev.activation = b.activation;
        ev.latency = b.latency_ms;
        if (b.success) ev.chunks.push_back(std::move(b.chunk));
    } else {
        RetrievalOutcome r =
            retrieve(sm_, cue, params_.dm, spread, t, params_.dm.noise > 0 ? &rng_ : nullptr);
        ev.success = r.success;
        ev.activation = r.activation;
        ev.latency = r.latency_ms;
        if (r.success) ev.chunks = chunks_to_depth(sm_, r.name, cue.depth);
    }
    ev.at = t + std::max<int64_t>(ev.latency, 0);
    wm_.set_status(target, StatusState::busy, t);
    PendingRequest pr;
    pr.issuer = c.inst_id;
    if (wm_.mode() == Mode::soar) {
        if (auto it = steps_.find(c.inst_id); it != steps_.end()) pr.issuer_tested = it->second.tested;
        if (auto it = step_level_.find(c.inst_id); it != step_level_.end())
            pr.issuer_level = it->second;
    }
    requests_[target] = std::move(pr);
    j["outcome"] = "scheduled";
    j["latency"] = ev.latency;
    schedule(std::move(ev));
    cycle_issued_request_ = true;
    rec["commands"].push_back(std::move(j));
}

void Kernel::do_retrieve_name(const CommandIssue& c, Json& rec, int64_t t) {
    Symbol target = dm_buf_;
    Json j{{"command", "retrieve-name"}, {"buffer", syms_.text(target)}};
    if (requests_.count(target) || wm_.status(target) == StatusState::busy) {
        j["outcome"] = "rejected-busy";
        rec["commands"].push_back(std::move(j));
        return;
    }
    Value v = substitute(c.action.arg, c.bindings);
    const StoredChunk* sc = v.is_sym() ? sm_.get(v.as_sym()) : nullptr;
    Pending ev;
    ev.kind = EvKind::retrieval_complete;
    ev.buffer = target;
    ev.issuer = c.inst_id;
    if (sc) {
        ev.success = true;
        ev.activation = bla(sc->accesses, t, params_.dm.decay);
        ev.latency = latency_of(ev.activation, params_.dm.latency_factor);
        ev.chunks = chunks_to_depth(sm_, sc->name, c.action.depth);
    } else {
        ev.success = false;
        ev.activation = params_.dm.tau;
        ev.latency = latency_of(params_.dm.tau, params_.dm.latency_factor);
    }
    ev.at = t + std::max<int64_t>(ev.latency, 0);
    wm_.set_status(target, StatusState::busy, t);
    PendingRequest pr;
    pr.issuer = c.inst_id;
    if (auto it = steps_.find(c.inst_id); it != steps_.end()) pr.issuer_tested = it->second.tested;
    if (auto it = step_level_.find(c.inst_id); it != step_level_.end())
        pr.issuer_level = it->second;
    requests_[target] = std::move(pr);
    j["outcome"] = "scheduled";
    j["latency"] = ev.latency;
    schedule(std::move(ev));
    rec["commands"].push_back(std::move(j));
}

void Kernel::do_store(const CommandIssue& c, Json& rec, int64_t t) {
    Json j{{"command", "store"}};
    Value v = substitute(c.action.arg, c.bindings);
    if (!v.is_sym()) {
        j["outcome"] = "invalid-argument";
        rec["commands"].push_back(std::move(j));
        return;
    }
    Chunk ch;
    ch.name = v.as_sym();
    for (ElementId id : wm_.by_node(v.as_sym())) {
        const Element& e = wm_.get(id);
        if (e.edge == in_.status) continue;
        ch.elements.push_back(e);
    }
    if (ch.elements.empty()) {
        j["outcome"] = "empty-chunk";
        rec["commands"].push_back(std::move(j));
        return;
    }
    Symbol n = sm_.store(ch, t);
    sm_.note_associations(n, t);
    j["outcome"] = "stored";
    j["chunk"] = syms_.text(n);
    rec["commands"].push_back(std::move(j));
}

void Kernel::do_motor(const CommandIssue& c, Json& rec, int64_t t) {
    std::string key = motor_key(c);
    Json j{{"command", "motor"}, {"detail", key}};
    if (wm_.status(motor_buf_) == StatusState::busy) {
        j["outcome"] = "rejected-busy";
        rec["commands"].push_back(std::move(j));
        return;
    }
    auto it = env_.motor.find(key);
    if (it == env_.motor.end()) {
        rec["commands"].push_back({{"command", "motor"}, {"detail", key}, {"outcome", "unknown"}});
        fail(Errc::unknown_environment_response, "no environment response for motor '" + key + "'");
    }
    const MotorResponse& resp = it->second;
    wm_.set_status(motor_buf_, StatusState::busy, t);
    Pending ev;
    ev.kind = EvKind::motor_complete;
    ev.buffer = motor_buf_;
    ev.success = resp.succeeds;
    ev.percept = resp.percept;
    ev.at = t + std::max<int64_t>(resp.latency, 0);
    schedule(std::move(ev));
    j["outcome"] = "scheduled";
    j["latency"] = resp.latency;
    rec["commands"].push_back(std::move(j));
}

std::string Kernel::motor_key(const CommandIssue& c) const {
    std::string key = arg_text(syms_, substitute(c.action.arg, c.bindings));
    if (c.action.has_arg2) key += " " + arg_text(syms_, substitute(c.action.arg2, c.bindings));
    return key;
}

void Kernel::do_em(const CommandIssue& c, Json& rec, int64_t t) {
    Symbol cmd = c.action.command;
    Json j{{"command", syms_.text(cmd)}};
    std::optional<EpisodicStore::Episode> ep;
    if (cmd == in_.cmd_em_query) {
        std::vector<Triple> cue;
        for (const auto& terms : c.action.em_cue) {
            Value n = substitute(terms[0], c.bindings);
            Value e = substitute(terms[1], c.bindings);
            if (!n.is_sym() || !e.is_sym()) continue;
            cue.push_back({n.as_sym(), e.as_sym(), substitute(terms[2], c.bindings)});
        }
        ep = em_.query(cue);
    } else {
        int dir = cmd == in_.cmd_em_next ? 1 : -1;
        if (em_cursor_) ep = em_.step(*em_cursor_, dir);
    }
    wm_.clear_buffer(em_buf_);
    if (ep) {
        uint64_t sid = 0;
        int lvl = 0;
        if (wm_.mode() == Mode::soar) {
            sid = next_inst_++;
            std::vector<ElementId> tested;
            if (auto it = steps_.find(c.inst_id); it != steps_.end()) tested = it->second.tested;
            steps_[sid] = {true, std::move(tested)};
            if (auto it = step_level_.find(c.inst_id); it != step_level_.end()) lvl = it->second;
            step_level_[sid] = lvl;
        }
        deliver_episode(*ep, sid, lvl, t);
        wm_.set_status(em_buf_, StatusState::success, t);
        j["outcome"] = "success";
        j["episode"] = ep->cycle;
    } else {
        wm_.set_status(em_buf_, StatusState::failure, t);
        j["outcome"] = "failure";
    }
    rec["commands"].push_back(std::move(j));
}

void Kernel::deliver_episode(const EpisodicStore::Episode& ep, uint64_t step_id, int issuer_level,
                             int64_t t) {
    std::set<Symbol> nodes;
    for (const Triple& tr : ep.triples) nodes.insert(tr.node);
    std::map<Symbol, Symbol> remap;
    Symbol epn = wm_.fresh_node("e");
    for (Symbol n : nodes) remap[n] = wm_.fresh_node("e");
    std::set<Symbol> valued;
    for (const Triple& tr : ep.triples)
        if (tr.value.is_sym() && nodes.count(tr.value.as_sym())) valued.insert(tr.value.as_sym());
    AddInfo ai;
    ai.prov = Provenance::dm;
    ai.inst = step_id;
    std::vector<ElementId> ids;
    ids.push_back(wm_.add(em_buf_, in_.retrieved, Value::sym(epn), ai, t));
    ids.push_back(wm_.add(epn, cycle_sym_, Value::num(static_cast<double>(ep.cycle)), ai, t));
    for (Symbol n : nodes)
        if (!valued.count(n))
            ids.push_back(wm_.add(epn, content_sym_, Value::sym(remap[n]), ai, t));
    for (const Triple& tr : ep.triples) {
        Value v = tr.value;
        if (v.is_sym() && nodes.count(v.as_sym())) v = Value::sym(remap[v.as_sym()]);
        ids.push_back(wm_.add(remap[tr.node], tr.edge, v, ai, t));
    }
    if (wm_.mode() == Mode::soar) {
        note_created(ids);
        for (ElementId id : ids) {
            auto it = element_recs_.find(id);
            if (it != element_recs_.end()) it->second.level = issuer_level;
        }
    }
    em_cursor_ = ep.cycle;
}

void Kernel::consume_reward(Json& rec, int64_t t) {
    double total = env_reward_;
    bool seen = reward_seen_;
    env_reward_ = 0.0;
    reward_seen_ = false;
    std::vector<ElementId> consumed;
    for (ElementId id : wm_.by_node(reward_buf_)) {
        const Element& e = wm_.get(id);
        if (e.edge == in_.payload && e.value.is_num()) {
            total += e.value.as_num();
            seen = true;
            consumed.push_back(id);
        }
    }
    for (ElementId id : consumed) wm_.remove(id);
    if (!seen) return;
    rec["learning"].push_back({{"kind", "reward"}, {"amount", total}});
    if (wm_.mode() == Mode::actr) {
        auto deltas =
            update_utilities_actr(rules_, history_, total, t, params_.proc.utility_alpha);
        for (const UtilityDelta& d : deltas)
            rec["learning"].push_back({{"kind", "utility"},
                                       {"rule", syms_.text(d.rule)},
                                       {"before", d.before},
                                       {"after", d.after}});
    } else {
        rl_pending_ += total;
        rl_reward_seen_ = true;
    }
}

void Kernel::sweep_strays() {
    if (wm_.mode() != Mode::actr) return;
    for (;;) {
        std::set<Symbol> seated;
        for (Symbol b : wm_.buffer_names()) {
            seated.insert(b);
            for (ElementId id : wm_.by_node(b)) {
                const Element& e = wm_.get(id);
                if (e.value.is_sym()) seated.insert(e.value.as_sym());
            }
        }
        std::vector<ElementId> doomed;
        for (const auto& [id, e] : wm_.elements())
            if (!seated.count(e.node)) doomed.push_back(id);
        if (doomed.empty()) return;
        for (ElementId id : doomed) wm_.remove(id);
    }
}

// ---------------------------------------------------------------- actr

bool Kernel::cycle_actr(Json& rec, int64_t t) {
    std::vector<Instantiation> cands;
    for (Production* p : rules_.in_order()) {
        if (p->role != Role::plain) continue;
        for (Instantiation& m : match_production(wm_, *p)) {
            if (fired_keys_.count(instantiation_key(syms_, m))) continue;
            cands.push_back(std::move(m));
        }
    }
    if (cands.empty()) return false;
    size_t win = select_actr(syms_, rules_, cands, params_.proc.utility_noise, rng_);
    Instantiation inst = std::move(cands[win]);
    Production* p = rules_.find(inst.production);
    admit(inst, {});
    inst.fired_at = t;
    fired_keys_.insert(instantiation_key(syms_, inst));
    for (ElementId id : inst.tested) wm_.touch(id, t);
    cycle_issued_request_ = false;
    FireResult fr = fire_one(wm_, in_, *p, inst, Support::persistent, t,
                             [this, t](Symbol b) { harvest_buffer(b, t); });
    p->firings.push_back(t);
    history_.push_back({p->name, t});
    rec["fired"].push_back(
        {{"rule", syms_.text(p->name)}, {"bindings", bindings_json(syms_, inst.bindings)}});
    run_commands(fr.commands, rec, t);
    consume_reward(rec, t);
    if (params_.compilation) try_compile(*p, inst, rec, t);
    prev_inst_ = std::move(inst);
    prev_request_pending_ = cycle_issued_request_;
    prev_delivered_.clear();
    if (params_.wm_decay_on) wm_.forget(params_.wm_decay_threshold, params_.dm.decay, t);
    if (params_.rule_forget_on) {
        auto names =
            forget_rules(rules_, params_.rule_forget_threshold, params_.rule_forget_decay, t);
        for (Symbol n : names)
            rec["learning"].push_back({{"kind", "forgot-rule"}, {"rule", syms_.text(n)}});
    }
    sweep_strays();
    wm_.audit();
    return true;
}

void Kernel::try_compile(const Production& p2, const Instantiation& i2, Json& rec, int64_t t) {
    if (!prev_inst_) return;
    const Production* p1 = rules_.find(prev_inst_->production);
    if (!p1) return;
    PairContext ctx;
    ctx.p1 = p1;
    ctx.i1 = &*prev_inst_;
    ctx.p2 = &p2;
    ctx.i2 = &i2;
    ctx.created_by_p1 = make_index(*p1, *prev_inst_);
    for (ElementId id : i2.tested)
        if (std::find(prev_delivered_.begin(), prev_delivered_.end(), id) !=
            prev_delivered_.end())
            ctx.retrieved.insert(id);
    ctx.i1_request_pending = prev_request_pending_;
    auto composed = compile_pair(syms_, ctx, params_.proc.init_utility);
    if (!composed) return;
    register_new_rule(std::move(*composed), RuleOrigin::compiled, p1->utility, rec, t);
}

void Kernel::harvest_buffer(Symbol buf, int64_t t) {
    Chunk direct;
    direct.name = buf;
    std::vector<Symbol> children;
    for (ElementId id : wm_.by_node(buf)) {
        const Element& e = wm_.get(id);
        if (e.edge == in_.status) continue;
        if (!in_.is_buffer_field(e.edge)) direct.elements.push_back(e);
        if (e.value.is_sym()) {
            Symbol v = e.value.as_sym();
            if (!wm_.is_buffer(v) && !wm_.by_node(v).empty()) children.push_back(v);
        }
    }
    std::sort(children.begin(), children.end());
    children.erase(std::unique(children.begin(), children.end()), children.end());
    for (Symbol c : children) {
        Chunk ch = wm_.chunk_at(c);
        std::erase_if(ch.elements, [&](const Element& e) { return e.edge == in_.status; });
        if (ch.elements.empty()) continue;
        Symbol n = sm_.store(ch, t);
        sm_.note_associations(n, t);
    }
    if (!direct.elements.empty()) {
        Symbol n = sm_.store(direct, t);
        sm_.note_associations(n, t);
    }
    wm_.clear_buffer(buf);
    wm_.set_status(buf, StatusState::free_, t);
}

void Kernel::spontaneous_check(Json& rec, int64_t t) {
    if (!params_.spontaneous || wm_.mode() != Mode::actr) return;
    if (!wm_.is_buffer(retrieval_buf_) || requests_.count(retrieval_buf_)) return;
    if (wm_.status(retrieval_buf_) == StatusState::busy) return;
    if (!wm_.buffer_content(retrieval_buf_).empty()) return;
    auto cand = spontaneous_candidate(sm_, params_.dm, t);
    if (!cand) return;
    const StoredChunk* sc = sm_.get(*cand);
    Pending ev;
    ev.at = t;
    ev.kind = EvKind::retrieval_complete;
    ev.buffer = retrieval_buf_;
    ev.success = true;
    ev.spontaneous = true;
    ev.activation = bla(sc->accesses, t, params_.dm.decay);
    ev.chunks = chunks_to_depth(sm_, *cand, 1);
    deliver_retrieval(ev, rec);
}

// ---------------------------------------------------------------- soar

void Kernel::cycle_soar(Json& rec, int64_t t) {
    std::vector<CommandIssue> cmds;
    elaborate_fixpoint(rec, cmds, t);
    Symbol target = decision_walk(rec, t);
    apply_wave(rec, target, cmds, t);
    run_commands(cmds, rec, t);
    consume_reward(rec, t);
    if (params_.wm_decay_on) wm_.forget(params_.wm_decay_threshold, params_.dm.decay, t);
    if (params_.rule_forget_on) {
        auto names =
            forget_rules(rules_, params_.rule_forget_threshold, params_.rule_forget_decay, t);
        for (Symbol n : names)
            rec["learning"].push_back({{"kind", "forgot-rule"}, {"rule", syms_.text(n)}});
    }
    wm_.collect_orphans();
    wm_.audit();
}

void Kernel::retract_support(uint64_t inst_id) {
    std::vector<ElementId> doomed;
    for (const auto& [id, e] : wm_.elements()) {
        if (!wm_.meta(id).justified) continue;
        auto& sup = wm_.meta_mut(id).supports;
        auto it = std::find(sup.begin(), sup.end(), inst_id);
        if (it == sup.end()) continue;
        sup.erase(it);
        if (sup.empty()) doomed.push_back(id);
    }
    for (ElementId id : doomed) wm_.remove(id);
}

void Kernel::elaborate_fixpoint(Json& rec, std::vector<CommandIssue>& cmds, int64_t t) {
    int waves = 0;
    for (;;) {
        if (++waves > params_.proc.elaboration_limit)
            fail(Errc::runaway_elaboration,
                 "elaboration passed " + std::to_string(params_.proc.elaboration_limit) +
                     " waves without settling");
        bool changed = false;
        std::vector<std::string> stale;
        for (const auto& [key, j] : justified_) {
            const Production* p = rules_.find(j.inst.production);
            if (!p || !recheck(wm_, *p, j.inst)) stale.push_back(key);
        }
        for (const std::string& key : stale) {
            uint64_t id = justified_.at(key).inst.id;
            justified_.erase(key);
            retract_support(id);
            std::erase_if(live_prefs_, [&](const Preference& p) { return p.source_inst == id; });
            changed = true;
        }
        std::map<Symbol, int> lv = wm_.compute_levels();
        std::vector<Instantiation> wave;
        for (Production* p : rules_.in_order()) {
            if (p->role != Role::elaboration && p->role != Role::proposal &&
                p->role != Role::evaluation)
                continue;
            for (Instantiation& m : match_production(wm_, *p)) {
                if (justified_.count(instantiation_key(syms_, m))) continue;
                admit(m, lv);
                m.fired_at = t;
                wave.push_back(std::move(m));
            }
        }
        if (!wave.empty()) {
            for (Instantiation& i : wave)
                for (ElementId id : i.tested) wm_.touch(id, t);
            FireResult fr = fire_wave(wm_, in_, rules_, wave, Support::justified, t);
            for (Instantiation& i : wave) {
                rules_.find(i.production)->firings.push_back(t);
                rec["fired"].push_back({{"rule", syms_.text(i.production)},
                                        {"bindings", bindings_json(syms_, i.bindings)},
                                        {"wave", "elaboration"}});
                std::string key = instantiation_key(syms_, i);
                justified_[key] = {std::move(i)};
            }
            for (Preference& pr : fr.prefs) live_prefs_.push_back(std::move(pr));
            for (CommandIssue& c : fr.commands) cmds.push_back(std::move(c));
            note_created(fr.created);
            changed = true;
        }
        // keep candidate operator structures linked while their proposals
        // live, so evaluations can reach them before selection
        std::vector<ElementId> linked;
        for (const Preference& p : live_prefs_) {
            if (p.kind != PrefKind::acceptable) continue;
            AddInfo ai;
            ai.prov = Provenance::rule;
            ai.inst = p.source_inst;
            ai.justified = true;
            linked.push_back(wm_.add(p.state, candidate_sym_, Value::sym(p.subject), ai, t));
        }
        note_created(linked);
        if (!changed) break;
    }
}

Symbol Kernel::decision_walk(Json& rec, int64_t t) {
    struct Pool {
        std::vector<Preference> prefs;
        std::map<Symbol, double> q;
        std::map<Symbol, std::vector<Symbol>> contrib;
        std::set<Symbol> acceptable, rejected;
    };
    std::map<Symbol, Pool> pools;
    // preferences act at the state where their subject was proposed
    std::map<Symbol, Symbol> home;
    for (const Preference& p : live_prefs_)
        if (p.kind == PrefKind::acceptable) home.emplace(p.subject, p.state);
    for (const Preference& p : live_prefs_) {
        Symbol st = p.state;
        if (p.kind != PrefKind::acceptable) {
            auto h = home.find(p.subject);
            if (h != home.end()) st = h->second;
        }
        Pool& pool = pools[st];
        pool.prefs.push_back(p);
        if (p.kind == PrefKind::acceptable) pool.acceptable.insert(p.subject);
        if (p.kind == PrefKind::reject) pool.rejected.insert(p.subject);
        if (p.kind == PrefKind::indifferent) {
            const Production* r = rules_.find(p.source_rule);
            if (r && r->rl) {
                auto& c = pool.contrib[p.subject];
                if (std::find(c.begin(), c.end(), p.source_rule) == c.end()) {
                    c.push_back(p.source_rule);
                    pool.q[p.subject] += r->utility;
                }
            }
        }
    }
    size_t k = 0;
    for (;;) {
        Symbol s = wm_.states()[k];
        Pool& pool = pools[s];
        auto inc_it = installed_.find(s);
        Symbol inc = inc_it != installed_.end() ? inc_it->second : Symbol{};
        Decision d;
        if (inc.valid() && pool.acceptable.count(inc) && !pool.rejected.count(inc)) {
            // an installed operator persists while still proposed and unrejected
            d.kind = DecisionKind::selected;
            d.winner = inc;
        } else {
            d = decide(syms_, pool.prefs, pool.q, params_.proc.selection_temperature, rng_);
        }
        Json dj;
        dj["state"] = syms_.text(s);
        if (d.kind == DecisionKind::selected) {
            dj["kind"] = "selected";
            dj["operator"] = syms_.text(d.winner);
            rec["decisions"].push_back(std::move(dj));
            if (!(inc == d.winner)) {
                if (inc.valid()) uninstall_operator(s);
                install_operator(s, d.winner, t);
                std::vector<Symbol> contrib;
                if (auto c = pool.contrib.find(d.winner); c != pool.contrib.end())
                    contrib = c->second;
                double q = 0.0;
                if (auto qi = pool.q.find(d.winner); qi != pool.q.end()) q = qi->second;
                rl_on_decision(s, q, std::move(contrib), rec);
            }
            if (k + 1 < wm_.states().size()) {
                Symbol child = wm_.states()[k + 1];
                auto ii = impasse_of_.find(child);
                if (ii != impasse_of_.end() && ii->second.type == in_.operator_no_change &&
                    ii->second.stuck_operator == d.winner) {
                    ++k;
                    continue;
                }
                resolve_from(k + 1, rec, t);
            }
            return s;
        }
        Symbol itype = d.kind == DecisionKind::tie        ? in_.tie
                       : d.kind == DecisionKind::conflict ? in_.conflict
                                                          : in_.state_no_change;
        dj["kind"] = syms_.text(itype);
        Json cands = Json::array();
        for (Symbol c : d.candidates) cands.push_back(syms_.text(c));
        if (!d.candidates.empty()) dj["candidates"] = cands;
        rec["decisions"].push_back(std::move(dj));
        if (inc.valid()) uninstall_operator(s);
        if (k + 1 < wm_.states().size()) {
            Symbol child = wm_.states()[k + 1];
            auto ii = impasse_of_.find(child);
            if (ii != impasse_of_.end() && ii->second.type == itype &&
                ii->second.candidates == d.candidates) {
                ++k;
                continue;
            }
            resolve_from(k + 1, rec, t);
        }
        Symbol sub = wm_.create_substate(itype, d.candidates, t);
        impasse_of_[sub] = {itype, d.candidates, Symbol{}};
        ++impasse_count_;
        Json ij{{"state", syms_.text(sub)}, {"type", syms_.text(itype)}};
        if (!d.candidates.empty()) ij["candidates"] = cands;
        rec["impasses"].push_back(std::move(ij));
        note_created(wm_.by_node(sub));
        return Symbol{};
    }
}

void Kernel::apply_wave(Json& rec, Symbol target, std::vector<CommandIssue>& cmds, int64_t t) {
    std::map<ElementId, Symbol> op_elems;
    for (const auto& [s, op] : installed_)
        if (auto id = operator_element(s)) op_elems[*id] = s;
    std::map<Symbol, int> lv = wm_.compute_levels();
    std::vector<Instantiation> wave;
    for (Production* p : rules_.in_order()) {
        if (p->role != Role::application) continue;
        for (Instantiation& m : match_production(wm_, *p)) {
            bool touches = false;
            for (ElementId id : m.tested)
                if (op_elems.count(id)) {
                    touches = true;
                    break;
                }
            if (!touches) continue;
            std::string key = instantiation_key(syms_, m);
            if (!app_fired_keys_.insert(key).second) continue;
            admit(m, lv);
            m.fired_at = t;
            wave.push_back(std::move(m));
        }
    }
    std::set<Symbol> applied;
    for (const Instantiation& i : wave)
        for (ElementId id : i.tested)
            if (auto it = op_elems.find(id); it != op_elems.end()) applied.insert(it->second);
    if (!wave.empty()) {
        for (Instantiation& i : wave)
            for (ElementId id : i.tested) wm_.touch(id, t);
        FireResult fr = fire_wave(wm_, in_, rules_, wave, Support::persistent, t);
        for (const Instantiation& i : wave) {
            if (Production* p = rules_.find(i.production)) p->firings.push_back(t);
            rec["fired"].push_back({{"rule", syms_.text(i.production)},
                                    {"bindings", bindings_json(syms_, i.bindings)},
                                    {"wave", "apply"}});
        }
        for (CommandIssue& c : fr.commands) cmds.push_back(std::move(c));
        note_created(fr.created);
    }
    if (target.valid() && installed_.count(target) && !applied.count(target) &&
        target == wm_.states().back()) {
        // nothing can advance the selected operator: operator-no-change
        Symbol op = installed_[target];
        Symbol sub = wm_.create_substate(in_.operator_no_change, {}, t);
        impasse_of_[sub] = {in_.operator_no_change, {}, op};
        ++impasse_count_;
        rec["impasses"].push_back({{"state", syms_.text(sub)},
                                   {"type", "operator-no-change"},
                                   {"operator", syms_.text(op)}});
        note_created(wm_.by_node(sub));
    }
}

void Kernel::install_operator(Symbol state, Symbol op, int64_t t) {
    uint64_t src = 0;
    for (const Preference& p : live_prefs_)
        if (p.kind == PrefKind::acceptable && p.subject == op) {
            src = p.source_inst;
            break;
        }
    AddInfo ai;
    ai.prov = Provenance::rule;
    ai.inst = src;
    ElementId id = wm_.add(state, operator_sym_, Value::sym(op), ai, t);
    installed_[state] = op;
    note_created({id});
}

void Kernel::uninstall_operator(Symbol state) {
    auto it = installed_.find(state);
    if (it == installed_.end()) return;
    if (auto id = operator_element(state)) wm_.remove(*id);
    installed_.erase(it);
}

std::optional<ElementId> Kernel::operator_element(Symbol state) const {
    auto it = installed_.find(state);
    if (it == installed_.end()) return std::nullopt;
    return wm_.find_triple(state, operator_sym_, Value::sym(it->second));
}

void Kernel::resolve_from(size_t index, Json& rec, int64_t t) {
    while (wm_.states().size() > index) {
        Symbol s = wm_.states().back();
        if (params_.chunking) attempt_chunk(s, static_cast<int>(wm_.states().size() - 1), rec, t);
        wm_.resolve_substate(s);
        rec["resolved"].push_back(syms_.text(s));
        installed_.erase(s);
        impasse_of_.erase(s);
        rl_chains_.erase(s);
    }
}

void Kernel::attempt_chunk(Symbol state, int index, Json& rec, int64_t t) {
    std::map<Symbol, int> lv = wm_.compute_levels();
    std::vector<ElementId> results;
    for (const auto& [id, e] : wm_.elements()) {
        auto rit = element_recs_.find(id);
        if (rit == element_recs_.end()) continue;
        const ElementRecord& r = rit->second;
        if (r.prov != Provenance::rule || r.source_step == 0) continue;
        auto sl = step_level_.find(r.source_step);
        if (sl == step_level_.end() || sl->second < index) continue;
        auto nl = lv.find(e.node);
        if (nl == lv.end() || nl->second >= index) continue;
        results.push_back(id);
    }
    if (results.empty()) return;
    ChunkInput in;
    in.results = std::move(results);
    in.substate_level = index;
    in.elements = &element_recs_;
    in.steps = &steps_;
    auto p = chunk_substate(syms_, in);
    if (!p) {
        rec["learning"].push_back({{"kind", "chunk-refused"}, {"state", syms_.text(state)}});
        return;
    }
    register_new_rule(std::move(*p), RuleOrigin::chunked, 0.0, rec, t);
}

void Kernel::record_episode_delta(int64_t end_time) {
    std::map<Symbol, int> lv = wm_.compute_levels();
    std::set<Triple> cur;
    for (const auto& [id, e] : wm_.elements()) {
        auto it = lv.find(e.node);
        if (it == lv.end() || it->second != 0) continue;
        if (e.edge == in_.status || e.edge == operator_sym_ || e.edge == item_sym_ ||
            e.edge == candidate_sym_)
            continue;
        cur.insert({e.node, e.edge, e.value});
    }
    std::vector<Triple> added, removed;
    std::set_difference(cur.begin(), cur.end(), em_snapshot_.begin(), em_snapshot_.end(),
                        std::back_inserter(added));
    std::set_difference(em_snapshot_.begin(), em_snapshot_.end(), cur.begin(), cur.end(),
                        std::back_inserter(removed));
    em_.record(added, removed, cycle_, end_time);
    em_snapshot_ = std::move(cur);
}

void Kernel::register_new_rule(Production p, RuleOrigin origin, double parent_utility, Json& rec,
                               int64_t t) {
    std::string form = canonical_form(syms_, p);
    for (Production* r : rules_.in_order()) {
        if (canonical_form(syms_, *r) != form) continue;
        if (origin == RuleOrigin::compiled) {
            double before = r->utility;
            absorb_duplicate(*r, parent_utility, params_.proc.utility_alpha);
            rec["learning"].push_back({{"kind", "duplicate-rule"},
                                       {"rule", syms_.text(r->name)},
                                       {"before", before},
                                       {"after", r->utility}});
        } else {
            rec["learning"].push_back(
                {{"kind", "duplicate-rule"}, {"rule", syms_.text(r->name)}});
        }
        return;
    }
    const char* stem = origin == RuleOrigin::compiled ? "compiled-" : "chunked-";
    int& n = origin == RuleOrigin::compiled ? compiled_count_ : chunked_count_;
    std::string name;
    do {
        name = stem + std::to_string(++n);
    } while (syms_.has(name));
    p.name = syms_.intern(name);
    p.origin = origin;
    p.firings.push_back(t);
    rules_.add(std::move(p));
    rec["learning"].push_back(
        {{"kind", "new-rule"},
         {"rule", name},
         {"origin", origin == RuleOrigin::compiled ? "compiled" : "chunked"}});
}

void Kernel::rl_on_decision(Symbol state, double q, std::vector<Symbol> contributors, Json& rec) {
    RlChain& ch = rl_chains_[state];
    if (ch.live) {
        auto deltas = update_rl_soar(rules_, ch.record, rl_pending_, q, params_.proc.rl_alpha,
                                     params_.proc.rl_gamma);
        for (const UtilityDelta& d : deltas)
            rec["learning"].push_back({{"kind", "rl"},
                                       {"rule", syms_.text(d.rule)},
                                       {"before", d.before},
                                       {"after", d.after}});
    }
    rl_pending_ = 0.0;
    rl_reward_seen_ = false;
    ch.record = {std::move(contributors), q};
    ch.live = true;
}

void Kernel::rl_flush() {
    if (!rl_reward_seen_) return;
    auto it = rl_chains_.find(wm_.top_state());
    if (it == rl_chains_.end() || !it->second.live) return;
    update_rl_soar(rules_, it->second.record, rl_pending_, 0.0, params_.proc.rl_alpha,
                   params_.proc.rl_gamma);
    rl_pending_ = 0.0;
    rl_reward_seen_ = false;
    it->second.live = false;
}

}  // namespace cogk
