#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cogk/core.hpp"
#include "cogk/production.hpp"
#include "cogk/symbols.hpp"
#include "cogk/value.hpp"

namespace cogk {

struct RetrievalParams {
    double decay = 0.5;
    double tau = 0.0;
    double tau_s = 2.0;  // spontaneous-retrieval threshold
    double latency_factor = 1000.0;
    double assoc_strength = 2.0;  // S in the fan equation
    int spread_depth = 1;
    double blend_temp = 1.0;
    int64_t inhibition_window = 0;
    double noise = 0.0;  // sigma for retrieval scoring
};

struct StoredSlot {
    Symbol edge;
    Value val;
    std::vector<int64_t> accesses;  // element-level usage (soar spreading)
};

struct StoredChunk {
    Symbol name;
    std::vector<StoredSlot> slots;  // canonical order
    std::vector<int64_t> accesses;
    int64_t last_retrieved_at = std::numeric_limits<int64_t>::min() / 4;
};

class SemanticStore {
public:
    explicit SemanticStore(SymbolTable& syms) : syms_(syms) {}

    // Content-addressed: an identical-content chunk merges (one more access
    // stamp); a fresh one is copied in. A taken name with new content gets a
    // `~k` suffix. Returns the surviving name.
    Symbol store(const Chunk& chunk, int64_t now);
    bool has(Symbol name) const { return chunks_.count(name) != 0; }
    const StoredChunk* get(Symbol name) const;
    StoredChunk* get_mut(Symbol name);
    size_t size() const { return chunks_.size(); }
    std::vector<Symbol> names_sorted() const;  // by text
    const std::map<Symbol, StoredChunk>& chunks() const { return chunks_; }

    void touch_chunk(Symbol name, int64_t now);
    void touch_slot(Symbol name, Symbol edge, const Value& v, int64_t now);
    void mark_retrieved(Symbol name, int64_t now);

    int fan(Symbol j) const;  // DM chunks containing j as a value
    bool satisfies(const StoredChunk& c, const Cue& cue) const;
    Chunk as_chunk(const StoredChunk& c) const;
    std::string content_key(const Chunk& chunk) const;  // name-free canonical form

    // co-occurrence stamps: (chunk, referenced chunk) appended at store time
    void note_associations(Symbol name, int64_t now);
    const std::map<std::pair<Symbol, Symbol>, std::vector<int64_t>>& associations() const {
        return assoc_;
    }
    std::map<std::pair<Symbol, Symbol>, std::vector<int64_t>>& associations_mut() { return assoc_; }
    double association_strength(Symbol a, Symbol b, int64_t now, double d) const;

    void insert_raw(StoredChunk c);  // deserialization path; rebuilds the content index

private:
    SymbolTable& syms_;
    std::map<Symbol, StoredChunk> chunks_;
    std::map<std::string, Symbol> by_content_;
    std::map<std::pair<Symbol, Symbol>, std::vector<int64_t>> assoc_;
};

// one-level fan spread from buffer contents (actr discipline)
std::map<Symbol, double> spread_actr(const WorkingMemory& wm, const SemanticStore& sm, double S);

// multi-hop path-sum spread from WM-resident DM copies (soar discipline)
std::map<Symbol, double> spread_soar(const WorkingMemory& wm, const SemanticStore& sm, int depth,
                                     int64_t now);

struct RetrievalOutcome {
    bool success = false;
    Symbol name;
    Chunk chunk;
    double activation = 0.0;  // winner's A; tau on failure
    int64_t latency_ms = 0;
    std::vector<std::pair<Symbol, double>> scores;  // candidate scoring, name-sorted
};

// Pure scoring: access stamps and inhibition marks are applied by the caller
// at delivery time. rng is only drawn from when params.noise > 0.
RetrievalOutcome retrieve(const SemanticStore& sm, const Cue& cue, const RetrievalParams& p,
                          const std::map<Symbol, double>& spread, int64_t now,
                          std::mt19937_64* rng);

struct BlendOutcome {
    bool success = false;
    Chunk chunk;  // fresh-named synthesis
    double activation = 0.0;
    int64_t latency_ms = 0;
    std::vector<Symbol> contributors;
};

BlendOutcome blend(const SemanticStore& sm, const Cue& cue, const RetrievalParams& p,
                   const std::map<Symbol, double>& spread, int64_t now, Symbol fresh_name);

// argmax-BLA candidate for spontaneous delivery, if any clears tau_s
std::optional<Symbol> spontaneous_candidate(const SemanticStore& sm, const RetrievalParams& p,
                                            int64_t now);

// interval-stamped record of top-state history
class EpisodicStore {
public:
    struct Event {
        Triple t;
        int64_t added_at;
        int64_t removed_at;  // INT64_MAX while open
    };
    struct Episode {
        int64_t cycle;
        int64_t time;
        std::vector<Triple> triples;
    };

    void record(std::span<const Triple> added, std::span<const Triple> removed, int64_t cycle,
                int64_t now);
    bool empty() const { return index_.empty(); }
    int64_t first_cycle() const;
    int64_t last_cycle() const;
    std::optional<int64_t> time_of(int64_t cycle) const;
    std::vector<Triple> reconstruct(int64_t cycle) const;
    std::optional<Episode> query(std::span<const Triple> cue) const;
    std::optional<Episode> step(int64_t cycle, int direction) const;  // +1 next, -1 prev

    const std::vector<Event>& events() const { return events_; }
    const std::vector<std::pair<int64_t, int64_t>>& index() const { return index_; }
    void restore(std::vector<Event> events, std::vector<std::pair<int64_t, int64_t>> index);

private:
    std::vector<Event> events_;
    std::vector<std::pair<int64_t, int64_t>> index_;  // (cycle, time), append-only
    std::map<Triple, size_t> open_;
};

}  // namespace cogk
