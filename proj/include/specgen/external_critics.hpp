#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "specgen/reports.hpp"
#include "specgen/spec_model.hpp"

namespace specgen {

/// Tool locations, flags and limits. Tool names are looked up on PATH.
struct ToolchainConfig {
    std::string compiler{"gcc"};
    std::vector<std::string> compiler_flags{"-std=c99",      "-pedantic",          "-Wall",
                                            "-Wextra",       "-Wshadow",           "-Wstrict-prototypes",
                                            "-Wcast-qual",   "-Wundef",            "-fdiagnostics-plain-output",
                                            "-fno-diagnostics-color"};
    std::chrono::seconds compile_timeout{60};

    std::string verifier{"frama-c"};
    std::vector<std::string> provers{"alt-ergo", "z3"};
    std::chrono::seconds goal_timeout{10};
    std::chrono::seconds cell_timeout{300};
    std::vector<std::string> verifier_extra_args;

    std::string equivalence_tool{"diffkemp"};
    /// `{src}` and `{snapshot}` are substituted per program.
    std::vector<std::string> equivalence_build_args{"build", "{src}", "{snapshot}"};
    /// `{old}` and `{new}` are the two snapshot directories.
    std::vector<std::string> equivalence_compare_args{"compare", "{old}", "{new}", "--report-stat"};
    std::chrono::seconds equivalence_timeout{300};
};

/// `signature` with exactly one trailing semicolon.
[[nodiscard]] std::string prototype_of(std::string_view signature);

/// Translation unit given to the compiler and the verifier. `#line` markers map
/// diagnostics back to header.h, globals.h, contract.acsl, signature.h and
/// candidate.c. An empty `contract` leaves the contract section out.
[[nodiscard]] std::string assemble_unit(const InterfaceContext& interface, std::string_view candidate,
                                        std::string_view contract = {});

/// File name used for candidate lines in diagnostics.
inline constexpr std::string_view kCandidateFile = "candidate.c";

struct ParsedDiagnostics {
    std::vector<Diagnostic> warnings;
    std::vector<Diagnostic> errors;
};

/// Parses `file:line[:col]: (error|fatal error|warning): text` lines; notes are dropped.
[[nodiscard]] ParsedDiagnostics parse_compiler_diagnostics(std::string_view output);

/// Compiles header + globals + prototype + candidate without linking.
/// Throws EnvironmentError when the compiler is missing.
[[nodiscard]] CompileReport run_compile(std::string_view source, const InterfaceContext& interface,
                                        const std::filesystem::path& workdir, const ToolchainConfig& config = {});

struct WpSummary {
    std::size_t proved{0};
    std::size_t total{0};
    std::vector<Goal> goals;

    bool operator==(const WpSummary&) const = default;
};

/// Reads the "Proved goals: X / Y" summary and per-goal status lines. Goals the
/// tool did not list are added as "goal_<n>" so the counts stay consistent.
/// Throws ParseError (carrying the output) when no summary is present or the
/// listed goals contradict it.
[[nodiscard]] WpSummary parse_wp_output(std::string_view output);

/// Runs WP with every configured prover on the contract-annotated unit.
/// Throws ContractError for an empty contract, EnvironmentError when the
/// verifier is missing, VerificationInfraError when it yields no summary.
[[nodiscard]] VerificationReport run_verify(std::string_view source, std::string_view contract,
                                            const InterfaceContext& interface, const std::filesystem::path& workdir,
                                            const ToolchainConfig& config = {});

/// Maps equivalence-tool statistics ("Equal:", "Not equal:", "Unknown:", "Errors:").
[[nodiscard]] EquivalenceResult parse_equivalence_output(std::string_view output);

/// Identical sources are Equivalent and sources writing different global sets
/// are NotShown, both without the tool. Otherwise the tool decides; a missing
/// tool gives ToolUnavailable and a crash gives NotShown "tool error: ...".
[[nodiscard]] EquivalenceResult run_equivalence(std::string_view candidate, std::string_view reference,
                                                const InterfaceContext& interface,
                                                const std::filesystem::path& workdir,
                                                const ToolchainConfig& config = {});

/// First line of `program --version` style output, cached per program.
[[nodiscard]] std::string tool_version(const std::string& program, const std::string& flag);

} // namespace specgen
