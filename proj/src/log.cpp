#include "strutforge/log.hpp"

#include <cstdlib>
#include <cstring>

namespace strutforge {

LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("STRUTFORGE_LOG");
        if (!env) return LogLevel::Quiet;
        if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
        if (std::strcmp(env, "info") == 0) return LogLevel::Info;
        return LogLevel::Quiet;
    }();
    return level;
}

}  // namespace strutforge
