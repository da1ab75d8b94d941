#include "log.hpp"

#include <cstdio>
#include <cstdlib>
#include <mutex>

namespace liketally::log {

namespace {

Level parse_level(const char* s) {
    if (!s) return Level::warn;
    std::string v(s);
    if (v == "debug") return Level::debug;
    if (v == "info") return Level::info;
    if (v == "warn" || v == "warning") return Level::warn;
    if (v == "error") return Level::error;
    if (v == "off" || v == "none") return Level::off;
    return Level::warn;
}

const char* level_tag(Level level) {
    switch (level) {
        case Level::debug: return "debug";
        case Level::info: return "info";
        case Level::warn: return "warn";
        case Level::error: return "error";
        default: return "?";
    }
}

std::mutex g_mutex;

}  // namespace

Level threshold() {
    static Level level = parse_level(std::getenv("LIKETALLY_LOG"));
    return level;
}

void write(Level level, const std::string& message) {
    if (level < threshold()) return;
    std::lock_guard<std::mutex> lock(g_mutex);
    std::fprintf(stderr, "liketally [%s] %s\n", level_tag(level), message.c_str());
}

}  // namespace liketally::log
