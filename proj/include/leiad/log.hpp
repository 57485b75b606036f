#pragma once

#include <functional>
#include <string>

namespace leiad {

using WarningHandler = std::function<void(const std::string&)>;

/// Replace the process-wide warning sink. Passing an empty handler restores
/// the default, which writes to stderr. Returns the previous handler.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(const std::string& message);

}  // namespace leiad
