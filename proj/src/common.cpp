#include "leiad/error.hpp"
#include "leiad/log.hpp"

#include <iostream>
#include <mutex>

namespace leiad {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid_argument";
        case ErrorCode::io: return "io";
        case ErrorCode::parse: return "parse";
        case ErrorCode::not_found: return "not_found";
        case ErrorCode::conflict: return "conflict";
        case ErrorCode::out_of_range: return "out_of_range";
        case ErrorCode::precondition: return "precondition";
    }
    return "unknown";
}

namespace {

std::mutex& handler_mutex() {
    static std::mutex m;
    return m;
}

WarningHandler& current_handler() {
    static WarningHandler handler;
    return handler;
}

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
    std::lock_guard lock(handler_mutex());
    WarningHandler previous = std::move(current_handler());
    current_handler() = std::move(handler);
    return previous;
}

void warn(const std::string& message) {
    std::lock_guard lock(handler_mutex());
    if (current_handler()) {
        current_handler()(message);
    } else {
        std::cerr << "leiad: warning: " << message << '\n';
    }
}

}  // namespace leiad
