#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "cogk/activation.hpp"
#include "cogk/declarative.hpp"
#include "cogk/errors.hpp"
#include "cogk/wm.hpp"
#include "doctest.h"

using namespace cogk;

namespace {

Chunk mk_chunk(SymbolTable& t, const std::string& name,
               std::vector<std::pair<std::string, Value>> slots) {
    Chunk c;
    c.name = t.resolve(name);
    for (auto& [e, v] : slots) c.elements.push_back({0, c.name, t.resolve(e), v});
    return c;
}

Cue eq_cue(SymbolTable& t, std::vector<std::pair<std::string, Value>> eqs) {
    Cue cue;
    for (auto& [e, v] : eqs) cue.constraints.push_back({t.resolve(e), CueTestKind::eq, v});
    return cue;
}

}  // namespace

TEST_CASE("semantic store merges on identical content") {
    SymbolTable t;
    SemanticStore sm(t);
    Symbol a = sm.store(mk_chunk(t, "fact1", {{"kind", Value::sym(t.resolve("cat"))}}), 1000);
    Symbol b = sm.store(mk_chunk(t, "fact1", {{"kind", Value::sym(t.resolve("cat"))}}), 2000);
    CHECK(a == b);
    CHECK(sm.size() == 1);
    CHECK(sm.get(a)->accesses == std::vector<int64_t>{1000, 2000});

    // same content under a different name still merges; the first name survives
    Symbol c = sm.store(mk_chunk(t, "other", {{"kind", Value::sym(t.resolve("cat"))}}), 3000);
    CHECK(c == a);
    CHECK(sm.size() == 1);
}

TEST_CASE("semantic store renames on content collision") {
    SymbolTable t;
    SemanticStore sm(t);
    Symbol a = sm.store(mk_chunk(t, "fact", {{"n", Value::num(1)}}), 0);
    Symbol b = sm.store(mk_chunk(t, "fact", {{"n", Value::num(2)}}), 0);
    CHECK(!(a == b));
    CHECK(t.text(a) == "fact");
    CHECK(t.text(b) == "fact~2");
    Symbol c = sm.store(mk_chunk(t, "fact", {{"n", Value::num(3)}}), 0);
    CHECK(t.text(c) == "fact~3");
    CHECK(sm.size() == 3);
}

TEST_CASE("empty chunk is rejected") {
    SymbolTable t;
    SemanticStore sm(t);
    Chunk c;
    c.name = t.resolve("hollow");
    CHECK_THROWS_AS(sm.store(c, 0), KernelError);
}

TEST_CASE("cue satisfaction covers every test kind") {
    SymbolTable t;
    SemanticStore sm(t);
    Symbol n = sm.store(mk_chunk(t, "x", {{"size", Value::num(5)}, {"hue", Value::sym(t.resolve("red"))}}), 0);
    const StoredChunk& c = *sm.get(n);

    Cue cue;
    cue.constraints.push_back({t.resolve("size"), CueTestKind::gt, Value::num(4)});
    CHECK(sm.satisfies(c, cue));
    cue.constraints.push_back({t.resolve("size"), CueTestKind::lt, Value::num(6)});
    CHECK(sm.satisfies(c, cue));
    cue.constraints.push_back({t.resolve("hue"), CueTestKind::ne, Value::sym(t.resolve("blue"))});
    CHECK(sm.satisfies(c, cue));
    cue.constraints.push_back({t.resolve("hue"), CueTestKind::present, Value{}});
    CHECK(sm.satisfies(c, cue));
    cue.constraints.push_back({t.resolve("weight"), CueTestKind::present, Value{}});
    CHECK(!sm.satisfies(c, cue));

    Cue bad;
    bad.constraints.push_back({t.resolve("hue"), CueTestKind::lt, Value::num(3)});
    CHECK(!sm.satisfies(c, bad));  // ordering tests never pass on symbols
}

TEST_CASE("fan counts chunks containing a value") {
    SymbolTable t;
    SemanticStore sm(t);
    Symbol red = t.resolve("red");
    sm.store(mk_chunk(t, "a", {{"hue", Value::sym(red)}, {"alt", Value::sym(red)}}), 0);
    sm.store(mk_chunk(t, "b", {{"hue", Value::sym(red)}}), 0);
    sm.store(mk_chunk(t, "c", {{"hue", Value::sym(t.resolve("blue"))}}), 0);
    CHECK(sm.fan(red) == 2);  // duplicate slots inside one chunk count once
    CHECK(sm.fan(t.resolve("green")) == 0);
}

TEST_CASE("actr spreading from buffer values") {
    SymbolTable t;
    Innate in(t);
    WorkingMemory wm(t, in, Mode::actr);
    SemanticStore sm(t);

    SUBCASE("empty buffers give an empty map") {
        wm.declare_buffer(t.resolve("goal"), Symbol{}, 0);
        CHECK(spread_actr(wm, sm, 2.0).empty());
    }

    SUBCASE("fan 1 and S=2 gives per-source spread 2W") {
        Symbol dog = t.resolve("dog");
        sm.store(mk_chunk(t, "dog", {{"legs", Value::num(4)}}), 0);
        sm.store(mk_chunk(t, "barker", {{"animal", Value::sym(dog)}}), 0);

        Symbol goal = t.resolve("goal");
        wm.declare_buffer(goal, Symbol{}, 0);
        wm.add(goal, t.resolve("focus"), Value::sym(dog), {}, 0);

        auto sp = spread_actr(wm, sm, 2.0);
        // one source, W=1, fan(dog)=1 so S(j,i)=2; only "barker" contains dog
        REQUIRE(sp.size() == 1);
        CHECK(sp.at(t.resolve("barker")) == doctest::Approx(2.0).epsilon(1e-12));
    }

    SUBCASE("strength falls as fan rises, floored at zero") {
        Symbol hub = t.resolve("hub");
        sm.store(mk_chunk(t, "hub", {{"k", Value::num(0)}}), 0);
        Symbol goal = t.resolve("goal");
        wm.declare_buffer(goal, Symbol{}, 0);
        wm.add(goal, t.resolve("focus"), Value::sym(hub), {}, 0);

        double prev = std::numeric_limits<double>::infinity();
        for (int fan = 1; fan <= 50; ++fan) {
            sm.store(mk_chunk(t, "spoke" + std::to_string(fan),
                              {{"to", Value::sym(hub)}, {"n", Value::num(fan)}}),
                     0);
            auto sp = spread_actr(wm, sm, 2.0);
            double got = sp.at(t.resolve("spoke1"));
            double want = std::max(0.0, 2.0 - std::log(static_cast<double>(fan)));
            CHECK(got == doctest::Approx(want).epsilon(1e-12));
            CHECK(got <= prev);
            if (want > 0.0 && fan > 1) CHECK(got < prev);
            prev = got;
        }
        CHECK(prev == 0.0);  // ln(50) > 2 so the floor engages
    }
}

TEST_CASE("soar spreading walks value edges with per-hop decay") {
    SymbolTable t;
    Innate in(t);
    WorkingMemory wm(t, in, Mode::soar);
    SemanticStore sm(t);
    int64_t now = 10'000;

    Symbol a = sm.store(mk_chunk(t, "a", {{"next", Value::sym(t.resolve("b"))}}), 1000);
    Symbol b = sm.store(mk_chunk(t, "b", {{"next", Value::sym(t.resolve("c"))}}), 1000);
    Symbol c = sm.store(mk_chunk(t, "c", {{"leaf", Value::num(1)}}), 1000);

    // a's copy lives in WM, so a is the lone spread source
    AddInfo ai;
    ai.prov = Provenance::dm;
    ai.copy_of = a;
    wm.add(wm.top_state(), t.resolve("recalled"), Value::sym(a), ai, now);

    auto one = spread_soar(wm, sm, 1, now);
    REQUIRE(one.count(b));
    CHECK(!one.count(c));  // depth 1 stops at the first hop
    CHECK(one.at(b) == doctest::Approx(0.5).epsilon(1e-12));  // single edge normalizes to 1

    auto two = spread_soar(wm, sm, 2, now);
    CHECK(two.at(b) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(two.at(c) == doctest::Approx(0.25).epsilon(1e-12));

    SUBCASE("deeper spread never loses activation") {
        std::mt19937_64 rng(41);
        for (int trial = 0; trial < 100; ++trial) {
            SymbolTable t2;
            Innate in2(t2);
            WorkingMemory wm2(t2, in2, Mode::soar);
            SemanticStore sm2(t2);
            int n = 3 + static_cast<int>(rng() % 6);
            std::vector<Symbol> names;
            for (int i = 0; i < n; ++i)
                names.push_back(t2.resolve("g" + std::to_string(trial) + "_" + std::to_string(i)));
            for (int i = 0; i < n; ++i) {
                std::vector<std::pair<std::string, Value>> slots;
                slots.push_back({"self", Value::num(i)});
                for (int j = 0; j < n; ++j)
                    if (i != j && rng() % 3 == 0)
                        slots.push_back({"to" + std::to_string(j), Value::sym(names[j])});
                sm2.store(mk_chunk(t2, t2.text(names[i]), slots),
                          static_cast<int64_t>(rng() % 5000));
            }
            AddInfo ai2;
            ai2.prov = Provenance::dm;
            ai2.copy_of = names[0];
            wm2.add(wm2.top_state(), t2.resolve("recalled"), Value::sym(names[0]), ai2, 6000);
            std::map<Symbol, double> prev;
            for (int depth = 1; depth <= 4; ++depth) {
                auto cur = spread_soar(wm2, sm2, depth, 6000);
                for (auto& [name, v] : prev) {
                    REQUIRE(cur.count(name));
                    CHECK(cur.at(name) >= v - 1e-12);
                }
                prev = std::move(cur);
            }
        }
    }
}

TEST_CASE("retrieval picks the activation argmax above threshold") {
    SymbolTable t;
    SemanticStore sm(t);
    RetrievalParams p;

    Symbol red = t.resolve("red");
    sm.store(mk_chunk(t, "old", {{"hue", Value::sym(red)}, {"n", Value::num(1)}}), 0);
    sm.store(mk_chunk(t, "fresh", {{"hue", Value::sym(red)}, {"n", Value::num(2)}}), 9000);

    Cue cue = eq_cue(t, {{"hue", Value::sym(red)}});
    auto out = retrieve(sm, cue, p, {}, 10'000, nullptr);
    REQUIRE(out.success);
    CHECK(t.text(out.name) == "fresh");
    CHECK(out.activation == doctest::Approx(bla(sm.get(out.name)->accesses, 10'000, 0.5)));
    CHECK(out.latency_ms ==
          static_cast<int64_t>(std::ceil(1000.0 * std::exp(-out.activation))));

    SUBCASE("no candidate gives failure with threshold latency") {
        Cue miss = eq_cue(t, {{"hue", Value::sym(t.resolve("green"))}});
        auto fail = retrieve(sm, miss, p, {}, 10'000, nullptr);
        CHECK(!fail.success);
        CHECK(fail.latency_ms == 1000);  // ceil(F * e^0)
    }

    SUBCASE("threshold excludes weak candidates") {
        RetrievalParams strict = p;
        strict.tau = 10.0;
        auto fail = retrieve(sm, cue, strict, {}, 10'000, nullptr);
        CHECK(!fail.success);
    }

    SUBCASE("inhibition window masks a recent retrieval") {
        RetrievalParams inh = p;
        inh.inhibition_window = 5000;
        inh.tau = -10.0;  // "old" alone sits below the default threshold
        sm.mark_retrieved(t.resolve("fresh"), 9500);
        auto out2 = retrieve(sm, cue, inh, {}, 10'000, nullptr);
        REQUIRE(out2.success);
        CHECK(t.text(out2.name) == "old");
    }
}

TEST_CASE("retrieval agrees with a brute-force scoring oracle") {
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 300; ++trial) {
        SymbolTable t;
        SemanticStore sm(t);
        RetrievalParams p;
        Symbol key = t.resolve("key");
        int n = 2 + static_cast<int>(rng() % 8);
        int64_t now = 100'000;
        for (int i = 0; i < n; ++i) {
            std::vector<std::pair<std::string, Value>> slots{
                {"key", Value::sym(key)}, {"idx", Value::num(i)}};
            Chunk c = mk_chunk(t, "c" + std::to_string(i), slots);
            int hits = 1 + static_cast<int>(rng() % 4);
            Symbol name{};
            for (int h = 0; h < hits; ++h)
                name = sm.store(c, static_cast<int64_t>(rng() % 90'000));
            std::sort(sm.get_mut(name)->accesses.begin(), sm.get_mut(name)->accesses.end());
        }
        Cue cue = eq_cue(t, {{"key", Value::sym(key)}});
        auto out = retrieve(sm, cue, p, {}, now, nullptr);

        Symbol best{};
        double best_a = -std::numeric_limits<double>::infinity();
        for (Symbol name : sm.names_sorted()) {
            double a = bla(sm.get(name)->accesses, now, p.decay);
            if (a > best_a) {
                best_a = a;
                best = name;
            }
        }
        REQUIRE(out.success == (best_a >= p.tau));
        if (out.success) {
            CHECK(out.name == best);
            CHECK(out.activation == doctest::Approx(best_a).epsilon(1e-9));
        }
    }
}

TEST_CASE("blending averages numeric slots by activation weight") {
    SymbolTable t;
    SemanticStore sm(t);
    RetrievalParams p;
    Symbol est = t.resolve("estimate");
    Symbol fresh = t.resolve("blend-1");

    SUBCASE("equal activations average to the midpoint") {
        sm.store(mk_chunk(t, "lo", {{"kind", Value::sym(est)}, {"n", Value::num(2)}}), 1000);
        sm.store(mk_chunk(t, "hi", {{"kind", Value::sym(est)}, {"n", Value::num(4)}}), 1000);
        auto out = blend(sm, eq_cue(t, {{"kind", Value::sym(est)}}), p, {}, 2000, fresh);
        REQUIRE(out.success);
        REQUIRE(out.chunk.name == fresh);
        bool found = false;
        for (auto& e : out.chunk.elements)
            if (t.text(e.edge) == "n") {
                CHECK(e.value.as_num() == doctest::Approx(3.0).epsilon(1e-12));
                found = true;
            }
        CHECK(found);
        CHECK(out.contributors.size() == 2);
    }

    SUBCASE("one-to-three weights give 3.5") {
        // ages 9s vs 1s at d=0.5 put the activations exactly ln(3) apart
        sm.store(mk_chunk(t, "lo", {{"kind", Value::sym(est)}, {"n", Value::num(2)}}), 1000);
        sm.store(mk_chunk(t, "hi", {{"kind", Value::sym(est)}, {"n", Value::num(4)}}), 9000);
        auto out = blend(sm, eq_cue(t, {{"kind", Value::sym(est)}}), p, {}, 10'000, fresh);
        REQUIRE(out.success);
        for (auto& e : out.chunk.elements)
            if (t.text(e.edge) == "n")
                CHECK(e.value.as_num() == doctest::Approx(3.5).epsilon(1e-9));
    }

    SUBCASE("single match degenerates to that chunk") {
        sm.store(mk_chunk(t, "only", {{"kind", Value::sym(est)}, {"n", Value::num(7)},
                                      {"tag", Value::sym(t.resolve("solo"))}}),
                 1000);
        auto out = blend(sm, eq_cue(t, {{"kind", Value::sym(est)}}), p, {}, 2000, fresh);
        REQUIRE(out.success);
        REQUIRE(out.chunk.elements.size() == 3);
        for (auto& e : out.chunk.elements) {
            if (t.text(e.edge) == "n") CHECK(e.value.as_num() == doctest::Approx(7.0));
            if (t.text(e.edge) == "tag") CHECK(t.text(e.value.as_sym()) == "solo");
        }
    }

    SUBCASE("non-numeric slots take the heaviest contributor") {
        sm.store(mk_chunk(t, "weak", {{"kind", Value::sym(est)}, {"tag", Value::sym(t.resolve("wa"))}}),
                 1000);
        sm.store(mk_chunk(t, "strong", {{"kind", Value::sym(est)}, {"tag", Value::sym(t.resolve("sb"))}}),
                 9500);
        auto out = blend(sm, eq_cue(t, {{"kind", Value::sym(est)}}), p, {}, 10'000, fresh);
        REQUIRE(out.success);
        for (auto& e : out.chunk.elements)
            if (t.text(e.edge) == "tag") CHECK(t.text(e.value.as_sym()) == "sb");
    }

    SUBCASE("no match reports failure") {
        auto out = blend(sm, eq_cue(t, {{"kind", Value::sym(t.resolve("nothing"))}}), p, {},
                         1000, fresh);
        CHECK(!out.success);
    }
}

TEST_CASE("spontaneous candidate needs to clear its own threshold") {
    SymbolTable t;
    SemanticStore sm(t);
    RetrievalParams p;  // tau_s = 2.0

    sm.store(mk_chunk(t, "dull", {{"n", Value::num(1)}}), 0);
    CHECK(!spontaneous_candidate(sm, p, 1'000'000).has_value());

    // 40 rapid accesses at ~1s age push BLA past 2
    Symbol hot = t.resolve("hot");
    for (int i = 0; i < 40; ++i) sm.store(mk_chunk(t, "hot", {{"n", Value::num(2)}}), 999'000);
    auto got = spontaneous_candidate(sm, p, 1'000'000);
    REQUIRE(got.has_value());
    CHECK(*got == hot);

    SUBCASE("matches an argmax scan") {
        std::mt19937_64 rng(7);
        for (int trial = 0; trial < 100; ++trial) {
            SymbolTable t2;
            SemanticStore sm2(t2);
            int n = 1 + static_cast<int>(rng() % 6);
            for (int i = 0; i < n; ++i) {
                Chunk c = mk_chunk(t2, "s" + std::to_string(i), {{"n", Value::num(i)}});
                int hits = 1 + static_cast<int>(rng() % 30);
                for (int h = 0; h < hits; ++h)
                    sm2.store(c, 50'000 + static_cast<int64_t>(rng() % 9'000));
            }
            auto pick = spontaneous_candidate(sm2, p, 60'000);
            Symbol best{};
            double best_a = p.tau_s;
            for (Symbol name : sm2.names_sorted()) {
                double a = bla(sm2.get(name)->accesses, 60'000, p.decay);
                if (a > best_a) {
                    best_a = a;
                    best = name;
                }
            }
            if (best == Symbol{})
                CHECK(!pick.has_value());
            else {
                REQUIRE(pick.has_value());
                CHECK(*pick == best);
            }
        }
    }
}

TEST_CASE("association stamps accrue at store time") {
    SymbolTable t;
    SemanticStore sm(t);
    Symbol base = sm.store(mk_chunk(t, "base", {{"n", Value::num(0)}}), 0);
    Symbol ref = sm.store(mk_chunk(t, "ref", {{"of", Value::sym(base)}}), 1000);
    sm.note_associations(ref, 1000);
    sm.note_associations(ref, 2000);
    CHECK(sm.association_strength(ref, base, 3000, 0.5) ==
          doctest::Approx(bla(std::vector<int64_t>{1000, 2000}, 3000, 0.5)));
    CHECK(sm.association_strength(base, ref, 3000, 0.5) ==
          -std::numeric_limits<double>::infinity());
}

namespace {

Triple trip(SymbolTable& t, const std::string& n, const std::string& e, int v) {
    return Triple{t.resolve(n), t.resolve(e), Value::num(v)};
}

}  // namespace

TEST_CASE("episodic intervals open and close with the deltas") {
    SymbolTable t;
    EpisodicStore em;
    Triple red = trip(t, "s", "color", 1);

    em.record(std::vector<Triple>{red}, {}, 3, 150);
    em.record({}, {}, 4, 200);
    em.record({}, std::vector<Triple>{red}, 7, 350);

    REQUIRE(em.events().size() == 1);
    CHECK(em.events()[0].added_at == 150);
    CHECK(em.events()[0].removed_at == 350);
    CHECK(em.index().size() == 3);

    CHECK(em.reconstruct(3) == std::vector<Triple>{red});
    CHECK(em.reconstruct(4) == std::vector<Triple>{red});
    CHECK(em.reconstruct(7).empty());  // removal lands before the cycle's snapshot instant
}

TEST_CASE("episodic query prefers recent full matches then best partial") {
    SymbolTable t;
    EpisodicStore em;
    Triple a = trip(t, "s", "a", 1), b = trip(t, "s", "b", 1), c = trip(t, "s", "c", 1);

    // cycle 1: {a,b}; cycle 2: {b}; cycle 3: {a,b}; cycle 4: {a,c}
    em.record(std::vector<Triple>{a, b}, {}, 1, 100);
    em.record({}, std::vector<Triple>{a}, 2, 200);
    em.record(std::vector<Triple>{a}, {}, 3, 300);
    em.record(std::vector<Triple>{c}, std::vector<Triple>{b}, 4, 400);

    SUBCASE("full match at cycles 1 and 3 answers 3") {
        auto ep = em.query(std::vector<Triple>{a, b});
        REQUIRE(ep.has_value());
        CHECK(ep->cycle == 3);
    }

    SUBCASE("partial tie breaks by recency") {
        Triple d = trip(t, "s", "d", 1);
        auto ep = em.query(std::vector<Triple>{a, b, c, d});
        REQUIRE(ep.has_value());
        CHECK(ep->cycle == 4);  // cycles 1,3 score 2; cycle 4 scores 2; latest wins
    }

    SUBCASE("stepping walks the cycle index") {
        auto ep = em.query(std::vector<Triple>{b});
        REQUIRE(ep.has_value());
        CHECK(ep->cycle == 3);
        auto nxt = em.step(ep->cycle, 1);
        REQUIRE(nxt.has_value());
        CHECK(nxt->cycle == 4);
        CHECK(!em.step(4, 1).has_value());
        auto back = em.step(nxt->cycle, -1);
        REQUIRE(back.has_value());
        CHECK(back->cycle == 3);
        CHECK(!em.step(1, -1).has_value());
    }
}

TEST_CASE("episodic store matches a linear-scan oracle on random streams") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        SymbolTable t;
        EpisodicStore em;
        std::vector<Triple> pool;
        for (int i = 0; i < 6; ++i) pool.push_back(trip(t, "s", "e" + std::to_string(i), 1));

        std::set<Triple> live;
        std::vector<std::set<Triple>> snaps;
        int cycles = 3 + static_cast<int>(rng() % 10);
        for (int cyc = 1; cyc <= cycles; ++cyc) {
            std::vector<Triple> added, removed;
            for (const Triple& tr : pool) {
                int r = static_cast<int>(rng() % 4);
                if (r == 0 && !live.count(tr)) {
                    added.push_back(tr);
                    live.insert(tr);
                } else if (r == 1 && live.count(tr)) {
                    removed.push_back(tr);
                    live.erase(tr);
                }
            }
            em.record(added, removed, cyc, cyc * 50);
            snaps.push_back(live);
        }

        for (int cyc = 1; cyc <= cycles; ++cyc) {
            auto rec = em.reconstruct(cyc);
            std::set<Triple> got(rec.begin(), rec.end());
            CHECK(got == snaps[static_cast<size_t>(cyc - 1)]);
        }

        for (int probe = 0; probe < 10; ++probe) {
            std::vector<Triple> cue;
            for (const Triple& tr : pool)
                if (rng() % 3 == 0) cue.push_back(tr);
            if (cue.empty()) cue.push_back(pool[0]);

            int64_t want = -1;
            size_t want_score = 0;
            bool want_full = false;
            for (int cyc = 1; cyc <= cycles; ++cyc) {
                const auto& snap = snaps[static_cast<size_t>(cyc - 1)];
                size_t score = 0;
                for (const Triple& tr : cue) score += snap.count(tr);
                bool full = score == cue.size();
                if (full) {
                    want_full = true;
                    want = cyc;
                    want_score = score;
                } else if (!want_full && score >= want_score) {
                    want = cyc;
                    want_score = score;
                }
            }
            auto got = em.query(cue);
            REQUIRE(got.has_value());
            CHECK(got->cycle == want);
        }
    }
}

TEST_CASE("episodic restore rebuilds open intervals") {
    SymbolTable t;
    EpisodicStore em;
    Triple a = trip(t, "s", "a", 1);
    em.record(std::vector<Triple>{a}, {}, 1, 100);

    EpisodicStore other;
    other.restore(em.events(), em.index());
    other.record({}, std::vector<Triple>{a}, 2, 200);
    CHECK(other.events()[0].removed_at == 200);
    CHECK(other.reconstruct(2).empty());
}
