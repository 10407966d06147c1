#include "specgen/reports.hpp"

namespace specgen {

const char* to_string(GoalStatus status) noexcept {
    switch (status) {
    case GoalStatus::Proved:
        return "proved";
    case GoalStatus::Unproved:
        return "unproved";
    case GoalStatus::Timeout:
        return "timeout";
    }
    return "unknown";
}

const char* to_string(EquivalenceVerdict verdict) noexcept {
    switch (verdict) {
    case EquivalenceVerdict::Equivalent:
        return "equivalent";
    case EquivalenceVerdict::NotShown:
        return "not_shown";
    case EquivalenceVerdict::ToolUnavailable:
        return "tool_unavailable";
    }
    return "unknown";
}

const char* to_string(Severity severity) noexcept {
    switch (severity) {
    case Severity::Violation:
        return "violation";
    case Severity::Advisory:
        return "advisory";
    }
    return "unknown";
}

} // namespace specgen
