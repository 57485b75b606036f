#pragma once

#include <stdexcept>
#include <string>

namespace leiad {

enum class ErrorCode {
    invalid_argument,
    io,
    parse,
    not_found,
    conflict,
    out_of_range,
    precondition,
};

const char* to_string(ErrorCode code);

/// Exception type thrown by every leiad module. The code is machine readable
/// and is what the HTTP facade maps onto status codes.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
    if (!condition) throw Error(code, message);
}

}  // namespace leiad
