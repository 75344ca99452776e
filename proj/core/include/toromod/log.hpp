#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace toromod {

enum class LogLevel : int { kError = 0, kInfo = 1, kDebug = 2 };

/// Level comes from TOROMOD_LOG in {error, info, debug}; default error.
inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("TOROMOD_LOG");
    if (env == nullptr) return LogLevel::kError;
    if (std::strcmp(env, "debug") == 0) return LogLevel::kDebug;
    if (std::strcmp(env, "info") == 0) return LogLevel::kInfo;
    return LogLevel::kError;
  }();
  return level;
}

inline void log_line(LogLevel level, const std::string& msg) {
  if (static_cast<int>(level) > static_cast<int>(log_level())) return;
  const char* tag = level == LogLevel::kError  ? "error"
                    : level == LogLevel::kInfo ? "info"
                                               : "debug";
  std::fprintf(stderr, "[toromod %s] %s\n", tag, msg.c_str());
}

#define TOROMOD_LOG_INFO(msg) ::toromod::log_line(::toromod::LogLevel::kInfo, (msg))
#define TOROMOD_LOG_DEBUG(msg) ::toromod::log_line(::toromod::LogLevel::kDebug, (msg))
#define TOROMOD_LOG_ERROR(msg) ::toromod::log_line(::toromod::LogLevel::kError, (msg))

}  // namespace toromod
