#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>

// Log level from the CHOREA_LOG environment variable: debug|info|warn|error|off.

namespace chorea {

enum class LogLevel { Debug = 0, Info, Warn, Error, Off };

inline LogLevel log_level() {
    static LogLevel lvl = [] {
        const char* env = std::getenv("CHOREA_LOG");
        if (!env) return LogLevel::Warn;
        if (!std::strcmp(env, "debug")) return LogLevel::Debug;
        if (!std::strcmp(env, "info")) return LogLevel::Info;
        if (!std::strcmp(env, "warn")) return LogLevel::Warn;
        if (!std::strcmp(env, "error")) return LogLevel::Error;
        if (!std::strcmp(env, "off")) return LogLevel::Off;
        return LogLevel::Warn;
    }();
    return lvl;
}

template <typename... Args>
inline void log_at(LogLevel lvl, const char* tag, const char* fmt, Args... args) {
    if (lvl < log_level()) return;
    char buf[1024];
    if constexpr (sizeof...(Args) == 0)
        std::snprintf(buf, sizeof(buf), "%s", fmt);
    else
        std::snprintf(buf, sizeof(buf), fmt, args...);
    std::fprintf(stderr, "[chorea %s] %s\n", tag, buf);
}

#define CHOREA_LOG_DEBUG(...) ::chorea::log_at(::chorea::LogLevel::Debug, "debug", __VA_ARGS__)
#define CHOREA_LOG_INFO(...) ::chorea::log_at(::chorea::LogLevel::Info, "info", __VA_ARGS__)
#define CHOREA_LOG_WARN(...) ::chorea::log_at(::chorea::LogLevel::Warn, "warn", __VA_ARGS__)
#define CHOREA_LOG_ERROR(...) ::chorea::log_at(::chorea::LogLevel::Error, "error", __VA_ARGS__)

}  // namespace chorea
