#pragma once

#include <string_view>

namespace relctl::log {

/// Emits a warning line on stderr. set_quiet(true) suppresses output
/// (used by tests and the sweep's inner runs).
void warn(std::string_view msg);
void set_quiet(bool quiet);
bool quiet();

} // namespace relctl::log
