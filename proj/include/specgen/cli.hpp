#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "specgen/external_critics.hpp"
#include "specgen/llm_gateway.hpp"
#include "specgen/pipeline.hpp"

namespace specgen {

inline constexpr int kExitOk = 0;
inline constexpr int kExitEvaluatedFailure = 1;
inline constexpr int kExitUsageOrInfra = 2;

/// Fully resolved settings of a `run`.
struct RunConfig {
    std::vector<std::filesystem::path> bundles;
    std::vector<std::string> models;
    std::vector<SpecCombination> combinations;  // defaults to all seven
    unsigned max_iterations{0};
    GenerationParams params;
    ToolchainConfig tools;
    RemoteConfig remote;
    double rate_limit{0.0};
    unsigned parallelism{1};
    std::filesystem::path output_dir{"specgen-run"};
    std::optional<std::filesystem::path> mock_scenario;
    bool offline{false};
    bool chain_of_thought{true};
    std::set<Critic> critics{Critic::Compile, Critic::Verify, Critic::Equivalence, Critic::Quality};
};

/// Dotted config keys ("generation.temperature") with their command-line text.
/// A list key may repeat; together its occurrences replace the file's list.
using ConfigOverrides = std::vector<std::pair<std::string, std::string>>;

/// Reads the optional TOML file, applies `overrides` on top and checks the
/// result. Relative paths in the file are taken relative to the file.
/// Throws UsageError naming the key on an unknown key, a type mismatch or a
/// missing required value ("bundles", "models").
[[nodiscard]] RunConfig parse_config(const std::optional<std::filesystem::path>& file,
                                     const ConfigOverrides& overrides = {});

[[nodiscard]] nlohmann::json to_json(const RunConfig& config);

/// Entry point of the `specgen` executable. Returns the process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace specgen
