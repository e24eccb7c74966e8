#include <random>
#include <string>

#include "cogk/dsl.hpp"
#include "doctest.h"

using namespace cogk;

namespace {

const char* kMinimal = R"(
mode actr

buffer goal

production start {
  when {
    (goal ^task count)
  }
  then {
    make (goal ^step one)
  }
}
)";

ParseResult parse_ok(const std::string& text, SymbolTable& syms) {
    auto res = parse_model(text, "test.cogm", syms);
    for (const auto& d : res.diagnostics) INFO(d.show());
    REQUIRE(res.ok());
    return res;
}

std::vector<std::string> validate_messages(const std::string& text) {
    SymbolTable syms;
    auto res = parse_model(text, "test.cogm", syms);
    REQUIRE(res.ok());
    std::vector<std::string> out;
    for (const auto& d : validate_model(res.ast, syms)) out.push_back(d.show());
    return out;
}

bool any_contains(const std::vector<std::string>& msgs, const std::string& needle) {
    for (const auto& m : msgs)
        if (m.find(needle) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST_CASE("minimal model parses and round-trips") {
    SymbolTable syms;
    auto res = parse_ok(kMinimal, syms);
    CHECK(res.ast.has_mode);
    CHECK(res.ast.mode == Mode::actr);
    REQUIRE(res.ast.productions.size() == 1);
    CHECK(res.ast.productions[0].rule.conditions.size() == 1);
    CHECK(validate_model(res.ast, syms).empty());

    auto printed = print_model(res.ast, syms);
    auto again = parse_ok(printed, syms);
    CHECK(ast_equal(res.ast, again.ast));
    CHECK(print_model(again.ast, syms) == printed);  // canonical after one pass
}

TEST_CASE("empty model prints as the bare mode line") {
    SymbolTable syms;
    auto res = parse_ok("mode soar", syms);
    CHECK(print_model(res.ast, syms) == "mode soar\n");
}

TEST_CASE("parse errors carry positions and do not stop recovery") {
    SymbolTable syms;
    auto res = parse_model("production p {\n  when { (a ^b c }\n}\nmode actr\n", "m.cogm", syms);
    REQUIRE(!res.ok());
    CHECK(res.diagnostics[0].span.file == "m.cogm");
    CHECK(res.diagnostics[0].span.line == 2);
    // recovery still saw the mode declaration after the broken production
    CHECK(res.ast.has_mode);

    SUBCASE("duplicate production names are reported") {
        auto dup = parse_model("mode actr\n"
                               "production step { when { (goal ^a b) } then { } }\n"
                               "production step { when { (goal ^a b) } then { } }\n",
                               "m.cogm", syms);
        REQUIRE(!dup.ok());
        CHECK(any_contains({dup.diagnostics[0].message}, "duplicate production 'step'"));
        CHECK(dup.diagnostics[0].span.line == 3);
    }

    SUBCASE("unknown commands suggest the nearest real one") {
        auto bad = parse_model("mode actr\nproduction p { when { (goal ^a b) } then { command "
                               "retrive { ^x 1 } } }\n",
                               "m.cogm", syms);
        REQUIRE(!bad.ok());
        CHECK(any_contains({bad.diagnostics[0].message}, "did you mean 'retrieve'"));
    }

    SUBCASE("reserved vocabulary cannot name a production") {
        auto bad = parse_model("mode actr\nproduction busy { when { } then { } }\n", "m.cogm",
                               syms);
        REQUIRE(!bad.ok());
        CHECK(any_contains({bad.diagnostics[0].message}, "reserved architecture vocabulary"));
    }
}

TEST_CASE("validator rejects wall and binding violations") {
    SUBCASE("unbound action variable") {
        auto msgs = validate_messages(
            "mode actr\nproduction p { when { (goal ^a b) } then { make (goal ^x ?z) } }\n");
        CHECK(any_contains(msgs, "?z is never bound"));
    }
    SUBCASE("fresh make-node variables are the exception") {
        auto msgs = validate_messages(
            "mode actr\nproduction p { when { (goal ^a b) } then { make (?new ^x 1) make (goal "
            "^obj ?new) } }\n");
        CHECK(msgs.empty());
    }
    SUBCASE("status writes are wall violations") {
        auto msgs = validate_messages(
            "mode actr\nproduction p { when { (goal ^a b) } then { make (goal ^status success) } "
            "}\n");
        CHECK(any_contains(msgs, "'status'"));
        CHECK(any_contains(msgs, "created by a module"));
    }
    SUBCASE("reading status is fine") {
        auto msgs = validate_messages(
            "mode actr\nbuffer goal\nbuffer retrieval\nproduction p { when { (retrieval ^status "
            "success) } then { make (goal ^seen yes) } }\n");
        CHECK(msgs.empty());
    }
    SUBCASE("undeclared buffer in actr mode") {
        auto msgs = validate_messages(
            "mode actr\nbuffer goal\nproduction p { when { (scratch ^a b) } then { make (goal ^x "
            "1) } }\n");
        CHECK(any_contains(msgs, "'scratch' is not a declared buffer"));
    }
    SUBCASE("default buffers apply when none are declared") {
        auto msgs = validate_messages(
            "mode actr\nproduction p { when { (imaginal ^a b) } then { make (blend ^x 1) } }\n");
        CHECK(msgs.empty());
    }
    SUBCASE("unknown parameter with suggestion") {
        auto msgs = validate_messages("mode actr\nparam utilty-noise 0.3\n");
        CHECK(any_contains(msgs, "did you mean 'utility-noise'"));
    }
    SUBCASE("rl flag is soar-only and evaluate-only") {
        CHECK(any_contains(
            validate_messages(
                "mode actr\nproduction p rl { when { (goal ^a b) } then { make (goal ^x 1) } }\n"),
            "soar-mode construct"));
        CHECK(any_contains(
            validate_messages(
                "mode soar\npropose p rl { when { (s1 ^a b) } then { prefer acceptable ?o } }\n"),
            "evaluate rules only"));
    }
    SUBCASE("preferences rejected in actr mode") {
        auto msgs = validate_messages(
            "mode actr\nproduction p { when { (goal ^op ?o) } then { prefer acceptable ?o } }\n");
        CHECK(any_contains(msgs, "soar-mode construct"));
    }
    SUBCASE("plain productions rejected in soar mode") {
        auto msgs = validate_messages(
            "mode soar\nproduction p { when { (s1 ^a b) } then { make (s1 ^x 1) } }\n");
        CHECK(any_contains(msgs, "declare a role"));
    }
    SUBCASE("buffer declarations rejected in soar mode") {
        auto msgs = validate_messages("mode soar\nbuffer goal\n");
        CHECK(any_contains(msgs, "actr-mode construct"));
    }
    SUBCASE("retrieve needs its delivery buffer declared") {
        auto msgs = validate_messages(
            "mode actr\nbuffer goal\nproduction p { when { (goal ^a b) } then { command retrieve "
            "{ ^a b } } }\n");
        CHECK(any_contains(msgs, "'retrieval' buffer"));
        auto blend = validate_messages(
            "mode actr\nbuffer goal\nbuffer retrieval\nproduction p { when { (goal ^a b) } then "
            "{ command retrieve-blend { ^a b } } }\n");
        CHECK(any_contains(blend, "'blend' buffer"));
        auto ok = validate_messages(
            "mode actr\nproduction p { when { (goal ^a b) } then { command retrieve { ^a b } } "
            "}\n");
        CHECK(ok.empty());
    }
    SUBCASE("episodic commands rejected in actr mode") {
        auto msgs = validate_messages(
            "mode actr\nproduction p { when { (goal ^a b) } then { command em-next } }\n");
        CHECK(any_contains(msgs, "soar-mode operation"));
    }
    SUBCASE("missing mode is an error") {
        auto msgs = validate_messages("param tau 0.5\n");
        CHECK(any_contains(msgs, "declares no mode"));
    }
    SUBCASE("wm placement is checked in declaration order") {
        auto ok = validate_messages(
            "mode actr\nbuffer goal\nwm { (goal ^obj o1) (o1 ^size 2) }\n");
        CHECK(ok.empty());
        auto bad = validate_messages("mode actr\nbuffer goal\nwm { (o1 ^size 2) }\n");
        CHECK(any_contains(bad, "'o1'"));
    }
}

TEST_CASE("soar constructs parse and validate") {
    SymbolTable syms;
    const char* text = R"(
mode soar

param chunking 1

dm {
  chunk count-fact {
    ^first one
    ^second two
  }
}

elaboration note {
  when {
    (s1 ^task count)
  }
  then {
    make (s1 ^phase counting)
  }
}

propose step {
  when {
    (s1 ^phase counting)
  }
  then {
    make (?op ^name advance)
    prefer acceptable ?op
  }
}

evaluate pick rl utility 0.5 {
  when {
    (s1 ^operator ?op)
  }
  then {
    prefer indifferent ?op
  }
}

apply advance {
  when {
    (s1 ^operator ?op)
    (?op ^name advance)
  }
  then {
    command retrieve-name count-fact depth 2
    command em-query {
      (s1 ^phase counting)
    }
  }
}
)";
    auto res = parse_ok(text, syms);
    CHECK(validate_model(res.ast, syms).empty());
    REQUIRE(res.ast.productions.size() == 4);
    CHECK(res.ast.productions[0].rule.role == Role::elaboration);
    CHECK(res.ast.productions[1].rule.role == Role::proposal);
    CHECK(res.ast.productions[2].rule.role == Role::evaluation);
    CHECK(res.ast.productions[2].rule.rl);
    CHECK(res.ast.productions[2].rule.utility == 0.5);
    CHECK(res.ast.productions[3].rule.role == Role::application);
    CHECK(res.ast.productions[3].rule.actions[0].depth == 2);

    auto printed = print_model(res.ast, syms);
    auto again = parse_ok(printed, syms);
    CHECK(ast_equal(res.ast, again.ast));
}

TEST_CASE("learned rules print with a provenance comment") {
    SymbolTable syms;
    Production p;
    p.name = syms.resolve("auto-1");
    p.origin = RuleOrigin::compiled;
    Condition c;
    c.node = Term::lit(Value::sym(syms.resolve("goal")));
    c.edge = Term::lit(Value::sym(syms.resolve("a")));
    c.value = Term::lit(Value::sym(syms.resolve("b")));
    p.conditions = {c};
    auto text = print_production(p, syms);
    CHECK(text.find("# learned: compiled") == 0);
}

namespace {

// Random structurally valid models for the round-trip property.
struct AstFuzzer {
    std::mt19937_64 rng;
    SymbolTable& syms;
    int counter = 0;

    explicit AstFuzzer(uint64_t seed, SymbolTable& s) : rng(seed), syms(s) {}

    int roll(int n) { return static_cast<int>(rng() % static_cast<uint64_t>(n)); }
    bool coin() { return roll(2) == 0; }

    Symbol fresh(const char* stem) {
        return syms.resolve(std::string(stem) + std::to_string(counter++));
    }
    Symbol pick_sym(const char* stem, int n) {
        return syms.resolve(std::string(stem) + std::to_string(roll(n)));
    }

    Value rand_value() {
        switch (roll(4)) {
            case 0: return Value::sym(pick_sym("sym", 6));
            case 1: return Value::num(roll(200) - 100);
            case 2: return Value::num(std::uniform_real_distribution<double>(-5, 5)(rng));
            default: return Value::str(roll(3) == 0 ? "two words" : "plain");
        }
    }

    Term rand_term(bool allow_var = true) {
        if (allow_var && roll(3) == 0) return Term::variable(pick_sym("v", 4));
        return Term::lit(rand_value());
    }

    Condition rand_condition() {
        Condition c;
        c.node = roll(3) ? Term::variable(pick_sym("v", 4)) : Term::lit(Value::sym(pick_sym("node", 4)));
        c.edge = roll(4) ? Term::lit(Value::sym(pick_sym("e", 6))) : Term::variable(pick_sym("v", 4));
        c.value = rand_term();
        if (roll(5) == 0) c.polarity = Polarity::negative;
        int tests = roll(3);
        for (int i = 0; i < tests; ++i) {
            ValueTest t;
            t.op = static_cast<TestOp>(roll(5));
            t.rhs = rand_term();
            c.tests.push_back(t);
        }
        return c;
    }

    Action rand_action(Mode mode) {
        Action a;
        switch (roll(mode == Mode::soar ? 6 : 5)) {
            case 0:
            case 1:
                a.kind = coin() ? ActionKind::make : ActionKind::remove;
                a.node = rand_term();
                a.edge = roll(4) ? Term::lit(Value::sym(pick_sym("e", 6)))
                                 : Term::variable(pick_sym("v", 4));
                a.value = rand_term();
                break;
            case 2:
                a.kind = ActionKind::clear;
                a.buffer = pick_sym("buf", 3);
                break;
            case 3:
            case 4: {
                a.kind = ActionKind::command;
                switch (roll(6)) {
                    case 0: {
                        a.command = syms.resolve(coin() ? "retrieve" : "retrieve-blend");
                        if (roll(3) == 0) a.depth = 2 + roll(3);
                        int n = roll(4);
                        for (int i = 0; i < n; ++i) {
                            CueTest t;
                            t.edge = pick_sym("e", 6);
                            t.kind = static_cast<CueTestKind>(roll(5));
                            if (t.kind != CueTestKind::present) t.rhs = rand_term();
                            a.cue.push_back(t);
                        }
                        break;
                    }
                    case 1:
                        a.command = syms.resolve("retrieve-name");
                        a.arg = rand_term();
                        a.has_arg = true;
                        if (coin()) a.depth = 2;
                        break;
                    case 2:
                        a.command = syms.resolve("store");
                        a.arg = rand_term();
                        a.has_arg = true;
                        break;
                    case 3:
                        a.command = syms.resolve("motor");
                        a.arg = Term::lit(Value::sym(pick_sym("key", 3)));
                        a.has_arg = true;
                        if (coin()) {
                            a.arg2 = coin() ? Term::lit(Value::num(roll(9)))
                                            : Term::variable(pick_sym("v", 4));
                            a.has_arg2 = true;
                        }
                        break;
                    case 4: {
                        a.command = syms.resolve("em-query");
                        int n = 1 + roll(2);
                        for (int i = 0; i < n; ++i)
                            a.em_cue.push_back({rand_term(), rand_term(), rand_term()});
                        break;
                    }
                    default:
                        a.command = syms.resolve(roll(3) == 0   ? "halt"
                                                 : roll(2) == 0 ? "em-next"
                                                                : "em-prev");
                        break;
                }
                break;
            }
            default:
                a.kind = ActionKind::prefer;
                a.pref = static_cast<PrefKind>(roll(7));
                a.pref_subject = Term::variable(pick_sym("v", 4));
                if (a.pref == PrefKind::better || a.pref == PrefKind::worse) {
                    a.pref_object = rand_term();
                    a.has_pref_object = true;
                }
                break;
        }
        return a;
    }

    ModelAst make() {
        ModelAst ast;
        ast.has_mode = true;
        ast.mode = coin() ? Mode::actr : Mode::soar;
        if (ast.mode == Mode::actr && coin()) {
            int n = 1 + roll(3);
            for (int i = 0; i < n; ++i) ast.buffers.push_back({fresh("buf"), {}});
        }
        int params = roll(3);
        for (int i = 0; i < params; ++i) {
            const auto& table = param_table();
            const auto& entry = table[roll(static_cast<int>(table.size()))];
            ast.params.push_back({entry.first,
                                  std::uniform_real_distribution<double>(0.01, 10)(rng),
                                  {}});
        }
        if (roll(4) == 0) {
            ast.has_env = true;
            ast.env_script = coin() ? "scripts/run.env" : "a \"quoted\" path";
        }
        int wm = roll(3);
        for (int i = 0; i < wm; ++i)
            ast.wm.push_back({pick_sym("node", 4), pick_sym("e", 6), rand_value(), {}});
        int dm = roll(3);
        for (int i = 0; i < dm; ++i) {
            AstChunk c{fresh("chunk"), {}, {}};
            int slots = 1 + roll(3);
            for (int j = 0; j < slots; ++j) c.slots.push_back({pick_sym("e", 6), rand_value(), {}});
            ast.dm.push_back(std::move(c));
        }
        int prods = roll(4);
        for (int i = 0; i < prods; ++i) {
            AstProduction ap;
            Production& p = ap.rule;
            p.name = fresh("rule");
            if (ast.mode == Mode::soar)
                p.role = static_cast<Role>(1 + roll(4));
            if (p.role == Role::evaluation && coin()) p.rl = true;
            if (roll(3) == 0) p.utility = roll(10) - 5;
            int conds = 1 + roll(3);
            for (int j = 0; j < conds; ++j) {
                p.conditions.push_back(rand_condition());
                ap.cond_spans.push_back({});
            }
            int acts = 1 + roll(3);
            for (int j = 0; j < acts; ++j) {
                p.actions.push_back(rand_action(ast.mode));
                ap.action_spans.push_back({});
            }
            ast.productions.push_back(std::move(ap));
        }
        return ast;
    }
};

}  // namespace

TEST_CASE("fuzzed ASTs round-trip through print and parse") {
    SymbolTable syms;
    AstFuzzer fuzz(20260822, syms);
    for (int trial = 0; trial < 1000; ++trial) {
        ModelAst ast = fuzz.make();
        std::string printed = print_model(ast, syms);
        auto res = parse_model(printed, "fuzz.cogm", syms);
        for (const auto& d : res.diagnostics) INFO(printed << "\n" << d.show());
        REQUIRE(res.ok());
        REQUIRE(ast_equal(ast, res.ast));
        // one more pass is a fixed point
        REQUIRE(print_model(res.ast, syms) == printed);
    }
}

TEST_CASE("arbitrary bytes never crash the parser") {
    std::mt19937_64 rng(7);
    const std::string alphabet =
        "(){}^?!<>=\"#abcxyz0123456789 \n\t-_~.moded productionwhenthen";
    for (int trial = 0; trial < 500; ++trial) {
        SymbolTable syms;
        size_t len = rng() % 300;
        std::string text;
        for (size_t i = 0; i < len; ++i) {
            if (rng() % 20 == 0)
                text += static_cast<char>(rng() % 256);  // raw bytes too
            else
                text += alphabet[rng() % alphabet.size()];
        }
        auto res = parse_model(text, "fuzz.cogm", syms);
        (void)res;  // terminating without throwing is the property
    }
}
