#include "cogk/trace.hpp"

namespace cogk {

std::string trace_line(const Json& record) { return record.dump() + "\n"; }

namespace {

bool type_matches(const std::string& type, const Json& v) {
    if (type == "object") return v.is_object();
    if (type == "array") return v.is_array();
    if (type == "string") return v.is_string();
    if (type == "integer") return v.is_number_integer();
    if (type == "number") return v.is_number();
    if (type == "boolean") return v.is_boolean();
    if (type == "null") return v.is_null();
    return false;
}

void check(const Json& schema, const Json& v, const std::string& path,
           std::vector<std::string>& out) {
    if (schema.contains("type")) {
        const auto& t = schema["type"];
        if (t.is_string() && !type_matches(t.get<std::string>(), v)) {
            out.push_back(path + ": expected " + t.get<std::string>());
            return;
        }
    }
    if (schema.contains("enum")) {
        bool hit = false;
        for (const auto& e : schema["enum"]) hit = hit || e == v;
        if (!hit) out.push_back(path + ": value not in enum");
    }
    if (v.is_object()) {
        if (schema.contains("required"))
            for (const auto& r : schema["required"])
                if (!v.contains(r.get<std::string>()))
                    out.push_back(path + ": missing required key '" + r.get<std::string>() + "'");
        const Json* props = schema.contains("properties") ? &schema["properties"] : nullptr;
        for (auto it = v.begin(); it != v.end(); ++it) {
            if (props && props->contains(it.key())) {
                check((*props)[it.key()], it.value(), path + "/" + it.key(), out);
            } else if (schema.contains("additionalProperties")) {
                const auto& ap = schema["additionalProperties"];
                if (ap.is_boolean() && !ap.get<bool>())
                    out.push_back(path + ": unexpected key '" + it.key() + "'");
                else if (ap.is_object())
                    check(ap, it.value(), path + "/" + it.key(), out);
            }
        }
    }
    if (v.is_array() && schema.contains("items")) {
        for (size_t i = 0; i < v.size(); ++i)
            check(schema["items"], v[i], path + "/" + std::to_string(i), out);
    }
}

}  // namespace

std::vector<std::string> schema_violations(const Json& schema, const Json& record) {
    std::vector<std::string> out;
    check(schema, record, "", out);
    return out;
}

}  // namespace cogk
