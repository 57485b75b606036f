#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "leiad/coredata.hpp"
#include "leiad/log.hpp"

namespace leiad::testing {

/// Collects warnings for the lifetime of the guard instead of printing them.
struct WarningCapture {
    std::vector<std::string> messages;
    WarningHandler previous;

    WarningCapture() {
        previous = set_warning_handler([this](const std::string& m) { messages.push_back(m); });
    }
    ~WarningCapture() { set_warning_handler(previous); }
};

inline Series make_series(std::string id, std::vector<double> values, std::vector<std::int8_t> truth = {}) {
    Series s;
    s.id = std::move(id);
    for (std::size_t i = 0; i < values.size(); ++i) s.timestamps.push_back(static_cast<std::int64_t>(i));
    s.values = std::move(values);
    s.truth = std::move(truth);
    return s;
}

}  // namespace leiad::testing
