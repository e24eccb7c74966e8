#pragma once
// Environment scripts (.env): the deterministic table answering motor
// commands, plus a timeline of scheduled percepts and rewards.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cogk/dsl.hpp"
#include "cogk/symbols.hpp"
#include "cogk/value.hpp"

namespace cogk {

struct EnvPercept {
    std::string stem;  // WM node stem; each arrival mints a fresh node
    std::vector<std::pair<Symbol, Value>> slots;
};

struct MotorResponse {
    int64_t latency = 0;
    bool succeeds = true;
    std::optional<EnvPercept> percept;  // delivered at completion
};

struct TimedEnvEvent {
    int64_t at = 0;
    bool is_reward = false;
    double amount = 0.0;                // reward
    std::optional<EnvPercept> percept;  // percept arrival
};

struct EnvScript {
    // keyed by the motor command's rendered arguments ("press-a", "press a 2")
    std::map<std::string, MotorResponse> motor;
    std::vector<TimedEnvEvent> timeline;  // sorted by (at, declaration order)
};

struct EnvParseResult {
    EnvScript script;
    std::vector<Diagnostic> diagnostics;
    bool ok() const {
        for (const auto& d : diagnostics)
            if (d.is_error) return false;
        return true;
    }
};

// Same lexical conventions as the model language:
//   motor press-a { latency 200 status success percept beep { ^tone high } }
//   at 300 percept light { ^color red }
//   at 500 reward 10
EnvParseResult parse_env(const std::string& text, const std::string& filename, SymbolTable& syms);

}  // namespace cogk
