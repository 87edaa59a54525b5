#pragma once

#include <iostream>
#include <sstream>

namespace strutforge {

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

// Controlled by STRUTFORGE_LOG={quiet|info|debug}; default quiet.
LogLevel log_level();

}  // namespace strutforge

#define SFLOG_INFO(expr)                                              \
    do {                                                              \
        if (::strutforge::log_level() >= ::strutforge::LogLevel::Info) \
            std::cerr << "[strutforge] " << expr << "\n";             \
    } while (0)

#define SFLOG_DEBUG(expr)                                              \
    do {                                                               \
        if (::strutforge::log_level() >= ::strutforge::LogLevel::Debug) \
            std::cerr << "[strutforge] " << expr << "\n";              \
    } while (0)
