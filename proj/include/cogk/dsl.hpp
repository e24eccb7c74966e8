#pragma once
// The .cogm model language: parser, validator, canonical printer.
//
// One surface grammar serves both modes; mode-specific constructs are parsed
// unconditionally and rejected by the validator when the mode forbids them.
// docs/grammar.ebnf is the normative grammar.

#include <optional>
#include <string>
#include <vector>

#include "cogk/production.hpp"
#include "cogk/symbols.hpp"
#include "cogk/value.hpp"
#include "cogk/wm.hpp"

namespace cogk {

struct SourceSpan {
    std::string file;
    int line = 1;
    int col = 1;
    int length = 0;
};

struct Diagnostic {
    SourceSpan span;
    bool is_error = true;  // false: warning
    std::string message;

    // "file:line:col: severity: message"
    std::string show() const;
};

struct AstSlot {
    Symbol edge;
    Value value;
    SourceSpan span;
};

struct AstChunk {
    Symbol name;
    std::vector<AstSlot> slots;
    SourceSpan span;
};

// Ground triple from a `wm { ... }` block.
struct AstTriple {
    Symbol node;
    Symbol edge;
    Value value;
    SourceSpan span;
};

struct AstParam {
    std::string name;
    double value = 0.0;
    SourceSpan span;
};

struct AstBuffer {
    Symbol name;
    SourceSpan span;
};

struct AstProduction {
    Production rule;
    SourceSpan span;
    std::vector<SourceSpan> cond_spans;    // parallel to rule.conditions
    std::vector<SourceSpan> action_spans;  // parallel to rule.actions
};

struct ModelAst {
    Mode mode = Mode::actr;
    bool has_mode = false;
    SourceSpan mode_span;
    std::vector<AstBuffer> buffers;
    std::vector<AstParam> params;
    std::vector<AstTriple> wm;
    std::vector<AstChunk> dm;
    std::string env_script;
    bool has_env = false;
    SourceSpan env_span;
    std::vector<AstProduction> productions;
};

// Structural equality ignoring source spans.
bool ast_equal(const ModelAst& a, const ModelAst& b);

struct ParseResult {
    ModelAst ast;
    std::vector<Diagnostic> diagnostics;
    bool ok() const {
        for (const auto& d : diagnostics)
            if (d.is_error) return false;
        return true;
    }
};

// Never throws on malformed input; recovers at declaration boundaries so one
// pass reports multiple errors. Symbols are interned into `syms`.
ParseResult parse_model(const std::string& text, const std::string& filename, SymbolTable& syms);

// Semantic checks on a parsed model; returns one diagnostic per violation.
std::vector<Diagnostic> validate_model(const ModelAst& ast, const SymbolTable& syms);

// Canonical text; parse_model(print_model(ast)) yields an ast_equal model.
std::string print_model(const ModelAst& ast, const SymbolTable& syms);

// Canonical text of one rule, used by print_model and the learned-rules dump.
// Learned rules carry their origin in a leading comment line.
std::string print_production(const Production& p, const SymbolTable& syms, int indent = 0);

// ACT-R buffer set used when a model declares none.
const std::vector<std::string>& default_actr_buffers();

// Recognized `param` names with their default values.
const std::vector<std::pair<std::string, double>>& param_table();

// Closest name from a candidate list, or empty when nothing is near (edit
// distance > 3). Backs the unknown-command and unknown-param suggestions.
std::string suggest_name(const std::string& got, const std::vector<std::string>& candidates);

}  // namespace cogk
