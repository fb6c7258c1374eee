#pragma once

// Stderr logging. Verbosity comes from ELA_LOG_LEVEL: error, warn (default), info, debug, or 0-3.

#include <cstdlib>
#include <iostream>
#include <string>

namespace ela::log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

inline Level level_from_env() {
    const char* v = std::getenv("ELA_LOG_LEVEL");
    if (!v) return Level::warn;
    const std::string s(v);
    if (s == "error" || s == "0") return Level::error;
    if (s == "info" || s == "2") return Level::info;
    if (s == "debug" || s == "3") return Level::debug;
    return Level::warn;
}

inline Level& threshold() {
    static Level lvl = level_from_env();
    return lvl;
}

inline void write(Level l, const std::string& msg) {
    if (static_cast<int>(l) > static_cast<int>(threshold())) return;
    static const char* tags[] = {"error", "warn", "info", "debug"};
    std::cerr << "[" << tags[static_cast<int>(l)] << "] " << msg << '\n';
}

inline void error(const std::string& m) { write(Level::error, m); }
inline void warn(const std::string& m) { write(Level::warn, m); }
inline void info(const std::string& m) { write(Level::info, m); }
inline void debug(const std::string& m) { write(Level::debug, m); }

}  // namespace ela::log
