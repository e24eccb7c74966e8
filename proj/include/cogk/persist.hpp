#pragma once
// Declarative-memory snapshots: one versioned, checksummed text file holding
// the semantic store (chunks, access stamps, associations) and the episodic
// event log. load(save(x)) is the identity, timestamps included.

#include <string>

#include "cogk/declarative.hpp"
#include "cogk/symbols.hpp"

namespace cogk {

// Writes atomically (temp file, then rename).
void save_dm(const SemanticStore& sm, const EpisodicStore& em, const SymbolTable& syms,
             const std::string& path);

// Parses and verifies the whole file before mutating anything; on checksum or
// format errors the target stores are left untouched and a KernelError with
// Errc::checksum_mismatch / Errc::bad_model / Errc::io is thrown.
void load_dm(SemanticStore& sm, EpisodicStore& em, SymbolTable& syms, const std::string& path);

}  // namespace cogk
