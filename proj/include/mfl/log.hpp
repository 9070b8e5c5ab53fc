#pragma once

#include <string_view>

namespace mfl {

// Warnings go to stderr unless silenced.
void set_quiet(bool quiet);
bool quiet();
void warn(std::string_view message);
void info(std::string_view message);

}  // namespace mfl
