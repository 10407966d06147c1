#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "specgen/external_critics.hpp"
#include "specgen/llm_gateway.hpp"
#include "specgen/reports.hpp"
#include "specgen/spec_model.hpp"

namespace specgen {

enum class Verdict { Pass, CompileFail, VerifyFail, ExtractFail, InfraError };

[[nodiscard]] const char* to_string(Verdict verdict) noexcept;
[[nodiscard]] std::optional<Verdict> parse_verdict(std::string_view text) noexcept;

enum class Critic { Compile, Verify, Equivalence, Quality };

[[nodiscard]] const char* to_string(Critic critic) noexcept;
[[nodiscard]] std::optional<Critic> parse_critic(std::string_view text) noexcept;

struct CellConfig {
    std::string model_id;
    SpecCombination combination{SpecKind::HLNL};
    unsigned max_iterations{0};  // 0 = single generation, no backprompting
    GenerationParams params;
    /// Compile and verify are mandatory; equivalence and quality may be dropped.
    std::set<Critic> critics_enabled{Critic::Compile, Critic::Verify, Critic::Equivalence, Critic::Quality};
    bool chain_of_thought{true};

    /// Throws ContractError when a mandatory critic is missing or params are invalid.
    void validate() const;
};

/// Outcome of one (bundle, model, combination, sample). Reports are absent
/// ("n/a") for stages that did not run.
struct CellResult {
    std::string bundle_name;
    std::string model_id;
    std::string combination_label;
    unsigned sample_index{0};
    unsigned iterations_used{0};

    std::optional<CompileReport> compile;
    std::optional<VerificationReport> verification;
    std::optional<EquivalenceResult> equivalence;
    std::optional<QualityReport> quality;
    std::optional<GeneratedCandidate> candidate;
    std::string response_text;     // last raw model response
    std::string extraction_error;  // set when the response held no usable code
    std::string infra_detail;      // set for InfraError
    Verdict verdict{Verdict::InfraError};

    PromptPair prompt;  // initial prompt of the cell
    std::string prompt_fingerprint;

    // Volatile fields, excluded from determinism comparisons.
    std::string workdir;
    std::chrono::milliseconds elapsed{0};

    /// (bundle, model, combination, sample) identity.
    [[nodiscard]] std::string key() const;
};

/// Throws ContractError when the verdict algebra or skip-on-failure rule is broken.
void check_cell_invariants(const CellResult& cell);

struct ResultSet {
    std::vector<CellResult> cells;
    std::string created_at;
    nlohmann::json config_snapshot = nlohmann::json::object();

    /// Throws ContractError on duplicate cell keys or broken cell invariants.
    void validate() const;
};

/// Critic back ends used by the pipeline; tests substitute stubs.
class CriticSuite {
public:
    virtual ~CriticSuite() = default;

    virtual CompileReport compile(std::string_view source, const InterfaceContext& interface,
                                  const std::filesystem::path& workdir) = 0;
    virtual VerificationReport verify(std::string_view source, std::string_view contract,
                                      const InterfaceContext& interface, const std::filesystem::path& workdir) = 0;
    virtual EquivalenceResult equivalence(std::string_view candidate, std::string_view reference,
                                          const InterfaceContext& interface,
                                          const std::filesystem::path& workdir) = 0;
    virtual QualityReport quality(std::string_view source, const InterfaceContext& interface,
                                  const CompileReport& compile_report);
};

/// Critics backed by the real compiler, verifier and equivalence tool.
class ToolchainCritics final : public CriticSuite {
public:
    explicit ToolchainCritics(ToolchainConfig config = {}) : config_(std::move(config)) {}

    CompileReport compile(std::string_view source, const InterfaceContext& interface,
                          const std::filesystem::path& workdir) override;
    VerificationReport verify(std::string_view source, std::string_view contract, const InterfaceContext& interface,
                              const std::filesystem::path& workdir) override;
    EquivalenceResult equivalence(std::string_view candidate, std::string_view reference,
                                  const InterfaceContext& interface, const std::filesystem::path& workdir) override;

private:
    ToolchainConfig config_;
};

struct PipelineOptions {
    std::filesystem::path run_dir;  // empty: keep artifacts in a temporary directory
    unsigned parallelism{1};
};

class Pipeline {
public:
    Pipeline(Gateway& gateway, CriticSuite& critics, PipelineOptions options = {});

    /// Runs every sample of the cell (params.samples of them), each with its own
    /// backprompting loop.
    [[nodiscard]] std::vector<CellResult> run_cell_samples(const CaseBundle& bundle, const CellConfig& config);

    /// First sample of the cell.
    [[nodiscard]] CellResult run_cell(const CaseBundle& bundle, const CellConfig& config);

    /// Every bundle × model × combination cell, in that canonical order
    /// regardless of scheduling. A failing cell never aborts its siblings.
    [[nodiscard]] ResultSet run_matrix(const std::vector<CaseBundle>& bundles, const std::vector<std::string>& models,
                                       const std::vector<SpecCombination>& combinations, const CellConfig& defaults);

private:
    CellResult run_sample(const CaseBundle& bundle, const CellConfig& config, unsigned sample_index);
    [[nodiscard]] std::filesystem::path cell_dir(const CaseBundle& bundle, const CellConfig& config,
                                                 unsigned sample_index) const;

    Gateway& gateway_;
    CriticSuite& critics_;
    PipelineOptions options_;
};

/// True iff one of the first k samples passed. Throws ContractError when k is
/// 0 or exceeds the number of samples.
[[nodiscard]] bool compute_pass_at_k(const std::vector<CellResult>& samples, std::size_t k);

/// Feedback lines a failed attempt contributes to the next prompt.
[[nodiscard]] FeedbackBundle feedback_from(const CellResult& attempt, std::string prior_code, unsigned iteration);

/// Directory-safe form of a model id or bundle name.
[[nodiscard]] std::string path_component(std::string_view text);

[[nodiscard]] std::string utc_timestamp();

// JSON forms. `with_volatile = false` drops timestamps, latencies and paths so
// two runs can be compared for equality.
[[nodiscard]] nlohmann::json to_json(const CellResult& cell, bool with_volatile = true);
[[nodiscard]] nlohmann::json to_json(const ResultSet& results, bool with_volatile = true);
[[nodiscard]] CellResult cell_from_json(const nlohmann::json& j);
[[nodiscard]] ResultSet result_set_from_json(const nlohmann::json& j);

inline constexpr std::string_view kResultsFile = "results.json";

/// Writes `<run_dir>/results.json`.
void write_results(const ResultSet& results, const std::filesystem::path& run_dir);

/// Reads `<run_dir>/results.json`. Throws IoError when missing or unreadable.
[[nodiscard]] ResultSet load_results(const std::filesystem::path& run_dir);

} // namespace specgen
