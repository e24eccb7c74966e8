#include "cogk/env.hpp"
#include "cogk/trace.hpp"
#include "doctest.h"

using namespace cogk;

TEST_CASE("environment scripts parse the motor table and timeline") {
    SymbolTable syms;
    const char* text = R"(
# sample environment
motor press-a {
  latency 200
  status success
  percept beep { ^tone high ^volume 3 }
}

motor press-b {
  latency 50
  status failure
}

at 500 reward 10
at 300 percept light { ^color red }
at 500 reward -2.5
)";
    auto res = parse_env(text, "w.env", syms);
    for (const auto& d : res.diagnostics) INFO(d.show());
    REQUIRE(res.ok());

    REQUIRE(res.script.motor.count("press-a"));
    const auto& pa = res.script.motor.at("press-a");
    CHECK(pa.latency == 200);
    CHECK(pa.succeeds);
    REQUIRE(pa.percept.has_value());
    CHECK(pa.percept->stem == "beep");
    REQUIRE(pa.percept->slots.size() == 2);
    CHECK(pa.percept->slots[1].second == Value::num(3));
    CHECK_FALSE(res.script.motor.at("press-b").succeeds);

    // timeline sorted by time, declaration order preserved within a tick
    REQUIRE(res.script.timeline.size() == 3);
    CHECK(res.script.timeline[0].at == 300);
    CHECK(res.script.timeline[0].percept.has_value());
    CHECK(res.script.timeline[1].amount == 10.0);
    CHECK(res.script.timeline[2].amount == -2.5);

    SUBCASE("unknown fields and duplicates are diagnosed") {
        auto bad = parse_env("motor a { speed 3 }\nmotor b { latency 1 }\nmotor b { latency 2 }\n",
                             "w.env", syms);
        REQUIRE(!bad.ok());
        CHECK(bad.diagnostics.size() == 2);
        CHECK(bad.diagnostics[0].message.find("unknown motor field") != std::string::npos);
        CHECK(bad.diagnostics[1].message.find("duplicate motor entry") != std::string::npos);
    }
}

TEST_CASE("trace records serialize canonically and check against a schema") {
    Json rec = {{"cycle", 1}, {"time", 50}, {"phase", "cycle"}, {"mode", "actr"}};
    // nlohmann::json sorts keys, so insertion order is irrelevant
    Json rec2;
    rec2["mode"] = "actr";
    rec2["time"] = 50;
    rec2["phase"] = "cycle";
    rec2["cycle"] = 1;
    CHECK(trace_line(rec) == trace_line(rec2));
    CHECK(trace_line(rec).back() == '\n');

    Json schema = {
        {"type", "object"},
        {"required", {"cycle", "time", "phase", "mode"}},
        {"additionalProperties", false},
        {"properties",
         {{"cycle", {{"type", "integer"}}},
          {"time", {{"type", "integer"}}},
          {"phase", {{"type", "string"}, {"enum", {"cycle"}}}},
          {"mode", {{"type", "string"}}},
          {"fired", {{"type", "array"}, {"items", {{"type", "object"}}}}}}},
    };
    CHECK(schema_violations(schema, rec).empty());

    Json missing = {{"cycle", 1}, {"time", 50}, {"phase", "cycle"}};
    CHECK(!schema_violations(schema, missing).empty());

    Json wrong_type = rec;
    wrong_type["cycle"] = "one";
    CHECK(!schema_violations(schema, wrong_type).empty());

    Json extra = rec;
    extra["surprise"] = 1;
    CHECK(!schema_violations(schema, extra).empty());

    Json bad_enum = rec;
    bad_enum["phase"] = "weird";
    CHECK(!schema_violations(schema, bad_enum).empty());

    Json arr = rec;
    arr["fired"] = Json::array({Json::object(), 7});
    CHECK(!schema_violations(schema, arr).empty());
}
