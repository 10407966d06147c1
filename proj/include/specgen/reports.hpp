#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace specgen {

struct Diagnostic {
    std::string file;
    std::size_t line{0};
    std::string text;

    bool operator==(const Diagnostic&) const = default;
};

struct CompileReport {
    bool success{false};
    std::vector<Diagnostic> warnings;
    std::vector<Diagnostic> errors;
    std::string tool_version;

    bool operator==(const CompileReport&) const = default;
};

enum class GoalStatus { Proved, Unproved, Timeout };

struct Goal {
    std::string name;
    GoalStatus status{GoalStatus::Unproved};

    bool operator==(const Goal&) const = default;
};

struct VerificationReport {
    std::size_t proved{0};
    std::size_t total{0};
    std::vector<Goal> goals;
    std::string solver_log_path;
    std::string tool_version;

    [[nodiscard]] bool fully_proved() const noexcept { return total > 0 && proved == total; }

    bool operator==(const VerificationReport&) const = default;
};

enum class EquivalenceVerdict { Equivalent, NotShown, ToolUnavailable };

struct EquivalenceResult {
    EquivalenceVerdict verdict{EquivalenceVerdict::ToolUnavailable};
    std::string detail;

    bool operator==(const EquivalenceResult&) const = default;
};

enum class Severity { Violation, Advisory };

struct RuleFinding {
    int rule_id{0};
    Severity severity{Severity::Violation};
    std::size_t line{0};
    std::string message;

    bool operator==(const RuleFinding&) const = default;
};

struct QualityReport {
    std::size_t loc{0};
    std::vector<RuleFinding> findings;
    std::size_t compiler_warning_count{0};
    bool conforms{false};

    bool operator==(const QualityReport&) const = default;
};

[[nodiscard]] const char* to_string(GoalStatus status) noexcept;
[[nodiscard]] const char* to_string(EquivalenceVerdict verdict) noexcept;
[[nodiscard]] const char* to_string(Severity severity) noexcept;

} // namespace specgen
