#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace specgen {

struct ProcessResult {
    int exit_code{-1};       // -1 when killed by a signal
    bool timed_out{false};
    std::string out;
    std::string err;

    [[nodiscard]] bool ok() const noexcept { return exit_code == 0 && !timed_out; }
};

/// Absolute path of `program` found on PATH (or `program` itself when it
/// contains a slash and is executable).
[[nodiscard]] std::optional<std::filesystem::path> find_executable(const std::string& program);

/// Runs `argv` in `cwd` and captures both streams. The child gets its own
/// process group, which is killed as a whole on timeout.
/// Throws EnvironmentError when argv[0] cannot be found or started.
[[nodiscard]] ProcessResult run_process(const std::vector<std::string>& argv, const std::filesystem::path& cwd,
                                        std::chrono::milliseconds timeout);

} // namespace specgen
