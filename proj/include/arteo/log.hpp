#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace arteo {

/// Verbosity is set once per process through the ARTEO_LOG environment
/// variable: error, warn, info (default), or debug.
enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

inline LogLevel log_threshold() {
  static const LogLevel level = [] {
    const char* env = std::getenv("ARTEO_LOG");
    if (!env) return LogLevel::Info;
    if (std::strcmp(env, "error") == 0) return LogLevel::Error;
    if (std::strcmp(env, "warn") == 0) return LogLevel::Warn;
    if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
    return LogLevel::Info;
  }();
  return level;
}

inline void log_line(LogLevel level, const std::string& message) {
  if (level > log_threshold()) return;
  static const char* const names[] = {"error", "warn", "info", "debug"};
  std::fprintf(stderr, "[%s] %s\n", names[static_cast<int>(level)], message.c_str());
}

inline void log_error(const std::string& m) { log_line(LogLevel::Error, m); }
inline void log_warn(const std::string& m) { log_line(LogLevel::Warn, m); }
inline void log_info(const std::string& m) { log_line(LogLevel::Info, m); }
inline void log_debug(const std::string& m) { log_line(LogLevel::Debug, m); }

}  // namespace arteo
