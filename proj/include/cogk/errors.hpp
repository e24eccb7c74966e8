#pragma once
// Error codes shared across the kernel.

#include <stdexcept>
#include <string>

namespace cogk {

enum class Errc {
    vocabulary_collision,
    unknown_innate,
    heterogeneous_node,
    empty_chunk,
    placement,
    wall_violation,
    unknown_id,
    unsupported_mode,
    cannot_remove,
    runaway_elaboration,
    unknown_environment_response,
    module_busy,
    halted,
    checksum_mismatch,
    bad_model,
    io,
    internal,
};

class KernelError : public std::runtime_error {
public:
    KernelError(Errc code, const std::string& msg)
        : std::runtime_error(msg), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) {
    throw KernelError(code, msg);
}

}  // namespace cogk
