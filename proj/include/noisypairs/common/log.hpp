#pragma once

#include <string>

// Plain-string logging entry points. Code that includes libtorch uses these
// instead of spdlog directly, because libtorch ships its own fmt headers.
namespace noisypairs::log {

void info(const std::string& message);
void warn(const std::string& message);
void error(const std::string& message);

/// printf-style formatting into a std::string.
std::string format(const char* fmt, ...) __attribute__((format(printf, 1, 2)));

}  // namespace noisypairs::log
