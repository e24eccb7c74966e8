#pragma once
// Canonical JSONL trace records. nlohmann::json keeps object keys sorted, so
// dumping a record is deterministic; one record per cognitive cycle.

#include <string>
#include <vector>

#include "json.hpp"

namespace cogk {

using Json = nlohmann::json;

// Compact single-line serialization with a trailing newline.
std::string trace_line(const Json& record);

// Checks `record` against the subset of JSON Schema used by
// docs/trace-schema.json (type, required, properties, items, enum,
// additionalProperties). Returns one message per violation.
std::vector<std::string> schema_violations(const Json& schema, const Json& record);

}  // namespace cogk
