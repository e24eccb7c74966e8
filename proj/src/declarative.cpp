#include "cogk/declarative.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include "cogk/activation.hpp"
#include "cogk/errors.hpp"

namespace cogk {

namespace {

bool slot_less(const SymbolTable& t, const StoredSlot& a, const StoredSlot& b) {
    std::string ta = t.text(a.edge), tb = t.text(b.edge);
    if (ta != tb) return ta < tb;
    return a.val.sort_key(t) < b.val.sort_key(t);
}

}  // namespace

std::string SemanticStore::content_key(const Chunk& chunk) const {
    std::vector<std::string> parts;
    for (const Element& e : chunk.elements)
        parts.push_back(syms_.text(e.edge) + "\x1f" + e.value.sort_key(syms_));
    std::sort(parts.begin(), parts.end());
    std::string key;
    for (const auto& p : parts) key += p + "\x1e";
    return key;
}

Symbol SemanticStore::store(const Chunk& chunk, int64_t now) {
    if (chunk.elements.empty()) fail(Errc::empty_chunk, "cannot store an empty chunk");
    std::string key = content_key(chunk);
    auto hit = by_content_.find(key);
    if (hit != by_content_.end()) {
        chunks_.at(hit->second).accesses.push_back(now);
        return hit->second;
    }
    Symbol name = chunk.name;
    if (chunks_.count(name)) {
        std::string base = syms_.text(name);
        for (int k = 2;; ++k) {
            std::string cand = base + "~" + std::to_string(k);
            if (!syms_.has(cand)) {
                name = syms_.intern(cand);
                break;
            }
            Symbol s = syms_.lookup(cand);
            if (!chunks_.count(s)) {
                name = s;
                break;
            }
        }
    }
    StoredChunk c;
    c.name = name;
    for (const Element& e : chunk.elements) c.slots.push_back({e.edge, e.value, {}});
    std::sort(c.slots.begin(), c.slots.end(),
              [&](const StoredSlot& a, const StoredSlot& b) { return slot_less(syms_, a, b); });
    c.accesses.push_back(now);
    chunks_.emplace(name, std::move(c));
    by_content_.emplace(std::move(key), name);
    return name;
}

const StoredChunk* SemanticStore::get(Symbol name) const {
    auto it = chunks_.find(name);
    return it == chunks_.end() ? nullptr : &it->second;
}

StoredChunk* SemanticStore::get_mut(Symbol name) {
    auto it = chunks_.find(name);
    return it == chunks_.end() ? nullptr : &it->second;
}

std::vector<Symbol> SemanticStore::names_sorted() const {
    std::vector<Symbol> out;
    for (const auto& [n, c] : chunks_) out.push_back(n);
    std::sort(out.begin(), out.end(),
              [&](Symbol a, Symbol b) { return syms_.text(a) < syms_.text(b); });
    return out;
}

void SemanticStore::touch_chunk(Symbol name, int64_t now) {
    auto it = chunks_.find(name);
    if (it != chunks_.end()) it->second.accesses.push_back(now);
}

void SemanticStore::touch_slot(Symbol name, Symbol edge, const Value& v, int64_t now) {
    auto it = chunks_.find(name);
    if (it == chunks_.end()) return;
    for (StoredSlot& s : it->second.slots)
        if (s.edge == edge && s.val == v) {
            s.accesses.push_back(now);
            return;
        }
}

void SemanticStore::mark_retrieved(Symbol name, int64_t now) {
    auto it = chunks_.find(name);
    if (it != chunks_.end()) it->second.last_retrieved_at = now;
}

int SemanticStore::fan(Symbol j) const {
    int n = 0;
    for (const auto& [name, c] : chunks_)
        for (const StoredSlot& s : c.slots)
            if (s.val.is_sym() && s.val.as_sym() == j) {
                ++n;
                break;
            }
    return n;
}

bool SemanticStore::satisfies(const StoredChunk& c, const Cue& cue) const {
    for (const Cue::Constraint& k : cue.constraints) {
        bool ok = false;
        for (const StoredSlot& s : c.slots) {
            if (!(s.edge == k.edge)) continue;
            switch (k.kind) {
                case CueTestKind::present: ok = true; break;
                case CueTestKind::eq: ok = s.val == k.value; break;
                case CueTestKind::ne: ok = !(s.val == k.value); break;
                case CueTestKind::lt:
                    ok = s.val.is_num() && k.value.is_num() && s.val.as_num() < k.value.as_num();
                    break;
                case CueTestKind::gt:
                    ok = s.val.is_num() && k.value.is_num() && s.val.as_num() > k.value.as_num();
                    break;
            }
            if (ok) break;
        }
        if (!ok) return false;
    }
    return true;
}

Chunk SemanticStore::as_chunk(const StoredChunk& c) const {
    Chunk out;
    out.name = c.name;
    for (const StoredSlot& s : c.slots) out.elements.push_back({0, c.name, s.edge, s.val});
    return out;
}

void SemanticStore::note_associations(Symbol name, int64_t now) {
    auto it = chunks_.find(name);
    if (it == chunks_.end()) return;
    for (const StoredSlot& s : it->second.slots)
        if (s.val.is_sym() && chunks_.count(s.val.as_sym()))
            assoc_[{name, s.val.as_sym()}].push_back(now);
}

double SemanticStore::association_strength(Symbol a, Symbol b, int64_t now, double d) const {
    auto it = assoc_.find({a, b});
    if (it == assoc_.end()) return -std::numeric_limits<double>::infinity();
    return bla(it->second, now, d);
}

void SemanticStore::insert_raw(StoredChunk c) {
    Chunk probe;
    probe.name = c.name;
    for (const StoredSlot& s : c.slots) probe.elements.push_back({0, c.name, s.edge, s.val});
    by_content_[content_key(probe)] = c.name;
    chunks_[c.name] = std::move(c);
}

std::map<Symbol, double> spread_actr(const WorkingMemory& wm, const SemanticStore& sm, double S) {
    std::set<Symbol> sources;
    for (Symbol buf : wm.buffer_names())
        for (ElementId id : wm.buffer_content(buf)) {
            const Element& e = wm.get(id);
            if (e.value.is_sym() && sm.has(e.value.as_sym())) sources.insert(e.value.as_sym());
        }
    std::map<Symbol, double> out;
    if (sources.empty()) return out;
    double W = 1.0 / static_cast<double>(sources.size());
    for (Symbol j : sources) {
        double sji = std::max(0.0, S - std::log(static_cast<double>(sm.fan(j))));
        for (const auto& [name, c] : sm.chunks())
            for (const StoredSlot& s : c.slots)
                if (s.val.is_sym() && s.val.as_sym() == j) {
                    out[name] += W * sji;
                    break;
                }
    }
    return out;
}

namespace {

// recency weight of one outgoing edge; falls back to the chunk's own history
double edge_recency(const StoredSlot& s, const StoredChunk& c, int64_t now) {
    int64_t last;
    if (!s.accesses.empty())
        last = s.accesses.back();
    else if (!c.accesses.empty())
        last = c.accesses.back();
    else
        return 0.0;
    double age_s = std::max(0.001, static_cast<double>(now - last) / 1000.0);
    return 1.0 / (1.0 + age_s);
}

}  // namespace

std::map<Symbol, double> spread_soar(const WorkingMemory& wm, const SemanticStore& sm, int depth,
                                     int64_t now) {
    std::set<Symbol> sources;
    for (const auto& [id, e] : wm.elements()) {
        const WmMeta& m = wm.meta(id);
        if (!(m.copy_of == Symbol{}) && sm.has(m.copy_of)) sources.insert(m.copy_of);
    }
    std::map<Symbol, double> out;
    for (Symbol src : sources) {
        // path-sum walk: every path of length <= depth contributes its product
        std::deque<std::pair<Symbol, double>> frontier{{src, 1.0}};
        for (int hop = 0; hop < depth; ++hop) {
            std::deque<std::pair<Symbol, double>> next;
            while (!frontier.empty()) {
                auto [name, w] = frontier.front();
                frontier.pop_front();
                const StoredChunk* c = sm.get(name);
                if (!c) continue;
                std::vector<std::pair<Symbol, double>> edges;
                double total = 0.0;
                for (const StoredSlot& s : c->slots)
                    if (s.val.is_sym() && sm.has(s.val.as_sym())) {
                        double r = edge_recency(s, *c, now);
                        edges.emplace_back(s.val.as_sym(), r);
                        total += r;
                    }
                if (total <= 0.0) continue;
                for (auto& [target, r] : edges) {
                    double contrib = w * 0.5 * (r / total);
                    out[target] += contrib;
                    next.emplace_back(target, contrib);
                }
            }
            frontier = std::move(next);
        }
    }
    return out;
}

RetrievalOutcome retrieve(const SemanticStore& sm, const Cue& cue, const RetrievalParams& p,
                          const std::map<Symbol, double>& spread, int64_t now,
                          std::mt19937_64* rng) {
    RetrievalOutcome out;
    out.activation = p.tau;
    for (Symbol name : sm.names_sorted()) {
        const StoredChunk& c = *sm.get(name);
        if (p.inhibition_window > 0 && now - c.last_retrieved_at < p.inhibition_window) continue;
        if (!sm.satisfies(c, cue)) continue;
        double a = bla(c.accesses, now, p.decay);
        auto sp = spread.find(name);
        if (sp != spread.end()) a += sp->second;
        if (p.noise > 0.0 && rng) {
            double u = std::uniform_real_distribution<double>(1e-12, 1.0 - 1e-12)(*rng);
            a += p.noise * std::log(u / (1.0 - u));
        }
        out.scores.emplace_back(name, a);
    }
    const std::pair<Symbol, double>* best = nullptr;
    for (const auto& s : out.scores)
        if (!best || s.second > best->second) best = &s;  // name order breaks exact ties
    if (best && best->second >= p.tau) {
        out.success = true;
        out.name = best->first;
        out.chunk = sm.as_chunk(*sm.get(best->first));
        out.activation = best->second;
    }
    out.latency_ms = static_cast<int64_t>(std::ceil(p.latency_factor * std::exp(-out.activation)));
    return out;
}

BlendOutcome blend(const SemanticStore& sm, const Cue& cue, const RetrievalParams& p,
                   const std::map<Symbol, double>& spread, int64_t now, Symbol fresh_name) {
    BlendOutcome out;
    std::vector<std::pair<Symbol, double>> scored;
    for (Symbol name : sm.names_sorted()) {
        const StoredChunk& c = *sm.get(name);
        if (p.inhibition_window > 0 && now - c.last_retrieved_at < p.inhibition_window) continue;
        if (!sm.satisfies(c, cue)) continue;
        double a = bla(c.accesses, now, p.decay);
        auto sp = spread.find(name);
        if (sp != spread.end()) a += sp->second;
        scored.emplace_back(name, a);
    }
    if (scored.empty()) {
        out.latency_ms = static_cast<int64_t>(std::ceil(p.latency_factor * std::exp(-p.tau)));
        return out;
    }

    double a_max = scored[0].second;
    for (auto& s : scored) a_max = std::max(a_max, s.second);
    std::vector<double> w(scored.size());
    double z = 0.0;
    for (size_t i = 0; i < scored.size(); ++i) {
        w[i] = std::exp((scored[i].second - a_max) / p.blend_temp);
        z += w[i];
    }
    for (double& x : w) x /= z;

    // union of edges; numeric slots take the weighted mean, others the max-weight value
    std::vector<const StoredChunk*> cs;
    for (auto& [name, a] : scored) cs.push_back(sm.get(name));
    std::set<Symbol> edge_set;
    for (const StoredChunk* c : cs)
        for (const StoredSlot& s : c->slots) edge_set.insert(s.edge);

    out.chunk.name = fresh_name;
    for (Symbol edge : edge_set) {
        bool all_numeric = true;
        bool any = false;
        double num = 0.0, wsum = 0.0;
        const StoredSlot* top = nullptr;
        double top_w = -1.0;
        for (size_t i = 0; i < cs.size(); ++i) {
            for (const StoredSlot& s : cs[i]->slots) {
                if (!(s.edge == edge)) continue;
                any = true;
                if (s.val.is_num()) {
                    num += w[i] * s.val.as_num();
                    wsum += w[i];
                } else {
                    all_numeric = false;
                }
                if (w[i] > top_w) {
                    top_w = w[i];
                    top = &s;
                }
                break;  // first slot per edge per chunk feeds the blend
            }
        }
        if (!any) continue;
        if (all_numeric && wsum > 0.0)
            out.chunk.elements.push_back({0, fresh_name, edge, Value::num(num / wsum)});
        else
            out.chunk.elements.push_back({0, fresh_name, edge, top->val});
    }
    out.success = true;
    out.activation = a_max;
    out.latency_ms = static_cast<int64_t>(std::ceil(p.latency_factor * std::exp(-a_max)));
    for (auto& [name, a] : scored) out.contributors.push_back(name);
    return out;
}

std::optional<Symbol> spontaneous_candidate(const SemanticStore& sm, const RetrievalParams& p,
                                            int64_t now) {
    std::optional<Symbol> best;
    double best_a = p.tau_s;
    for (Symbol name : sm.names_sorted()) {
        double a = bla(sm.get(name)->accesses, now, p.decay);
        if (a > best_a) {
            best_a = a;
            best = name;
        }
    }
    return best;
}

void EpisodicStore::record(std::span<const Triple> added, std::span<const Triple> removed,
                           int64_t cycle, int64_t now) {
    for (const Triple& t : removed) {
        auto it = open_.find(t);
        if (it != open_.end()) {
            events_[it->second].removed_at = now;
            open_.erase(it);
        }
    }
    for (const Triple& t : added) {
        if (open_.count(t)) continue;
        open_[t] = events_.size();
        events_.push_back({t, now, std::numeric_limits<int64_t>::max()});
    }
    index_.emplace_back(cycle, now);
}

int64_t EpisodicStore::first_cycle() const { return index_.empty() ? -1 : index_.front().first; }
int64_t EpisodicStore::last_cycle() const { return index_.empty() ? -1 : index_.back().first; }

std::optional<int64_t> EpisodicStore::time_of(int64_t cycle) const {
    for (const auto& [c, t] : index_)
        if (c == cycle) return t;
    return std::nullopt;
}

std::vector<Triple> EpisodicStore::reconstruct(int64_t cycle) const {
    std::vector<Triple> out;
    auto t = time_of(cycle);
    if (!t) return out;
    for (const Event& e : events_)
        if (e.added_at <= *t && *t < e.removed_at) out.push_back(e.t);
    return out;
}

std::optional<EpisodicStore::Episode> EpisodicStore::query(std::span<const Triple> cue) const {
    if (index_.empty()) return std::nullopt;
    int64_t best_cycle = -1;
    size_t best_score = 0;
    bool best_full = false;
    for (const auto& [cycle, t] : index_) {  // ascending: later entries win ties by recency
        size_t score = 0;
        for (const Triple& c : cue)
            for (const Event& e : events_)
                if (e.t == c && e.added_at <= t && t < e.removed_at) {
                    ++score;
                    break;
                }
        bool full = score == cue.size();
        if (full) {
            if (!best_full || cycle >= best_cycle) {
                best_full = true;
                best_cycle = cycle;
                best_score = score;
            }
        } else if (!best_full && (best_cycle < 0 || score >= best_score)) {
            best_cycle = cycle;
            best_score = score;
        }
    }
    if (best_cycle < 0) return std::nullopt;
    Episode ep;
    ep.cycle = best_cycle;
    ep.time = *time_of(best_cycle);
    ep.triples = reconstruct(best_cycle);
    return ep;
}

std::optional<EpisodicStore::Episode> EpisodicStore::step(int64_t cycle, int direction) const {
    int64_t target = cycle + direction;
    auto t = time_of(target);
    if (!t) return std::nullopt;
    Episode ep;
    ep.cycle = target;
    ep.time = *t;
    ep.triples = reconstruct(target);
    return ep;
}

void EpisodicStore::restore(std::vector<Event> events,
                            std::vector<std::pair<int64_t, int64_t>> index) {
    events_ = std::move(events);
    index_ = std::move(index);
    open_.clear();
    for (size_t i = 0; i < events_.size(); ++i)
        if (events_[i].removed_at == std::numeric_limits<int64_t>::max()) open_[events_[i].t] = i;
}

}  // namespace cogk
