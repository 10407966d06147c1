#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "specgen/prompt_builder.hpp"

namespace specgen {

/// Sampling configuration. Defaults are the settings used for the
/// reference experiments.
struct GenerationParams {
    unsigned max_tokens{4096};
    double temperature{0.8};
    double presence_penalty{0.5};
    double frequency_penalty{1.0};
    double top_p{1.0};
    std::string model_id;
    unsigned samples{1};

    /// Throws ContractError on out-of-range values.
    void validate() const;

    bool operator==(const GenerationParams&) const = default;
};

struct ChatMessage {
    std::string role;  // "system", "user" or "assistant"
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

/// A chat transcript. Backprompting appends an assistant turn and a new user turn.
struct Conversation {
    std::vector<ChatMessage> messages;

    [[nodiscard]] static Conversation from(const PromptPair& prompts);
    [[nodiscard]] std::size_t user_turns() const;
    [[nodiscard]] const std::string& last_user_text() const;

    bool operator==(const Conversation&) const = default;
};

/// OpenAI-compatible chat-completions request body. Carries exactly the
/// sampling fields of `params` (not `samples`, which is a client-side count).
[[nodiscard]] nlohmann::json request_body(const Conversation& conversation, const GenerationParams& params);

[[nodiscard]] std::string sha256_hex(std::string_view data);
[[nodiscard]] std::string request_fingerprint(const Conversation& conversation, const GenerationParams& params);
[[nodiscard]] std::string prompt_fingerprint(const PromptPair& prompts);

struct RawResponse {
    std::string text;
    std::string model_id;
    std::string request_fingerprint;
    std::chrono::milliseconds latency{0};
    std::string finish_reason;
    bool truncated{false};
    unsigned sample_index{0};
};

struct GeneratedCandidate {
    std::string source;
    RawResponse origin;
    unsigned sample_index{0};
};

/// What a backend hands back for one request.
struct Completion {
    std::string text;
    std::string finish_reason{"stop"};
    std::string model_id;
};

class Backend {
public:
    virtual ~Backend() = default;

    /// Throws GatewayError on failure.
    virtual Completion complete(const Conversation& conversation, const GenerationParams& params,
                                unsigned sample_index) = 0;

    /// Removes credentials from text that is about to be logged.
    [[nodiscard]] virtual std::string redact(std::string text) const { return text; }
};

/// Replays canned responses. Lookup order: exact request fingerprint, then the
/// first matching rule, then the default response. Read-only after load.
class MockBackend final : public Backend {
public:
    struct Rule {
        std::optional<std::string> model;
        std::optional<std::string> user_contains;
        std::optional<std::size_t> turn;  // number of user messages, 1 = initial prompt
        std::optional<unsigned> sample;
        Completion response;
    };

    MockBackend() = default;

    /// Loads a JSON scenario; response files are resolved relative to it.
    [[nodiscard]] static std::shared_ptr<MockBackend> load(const std::filesystem::path& scenario);

    void add_fingerprint(std::string fingerprint, Completion response);
    void add_rule(Rule rule);
    void set_default(Completion response);

    Completion complete(const Conversation& conversation, const GenerationParams& params,
                        unsigned sample_index) override;

private:
    std::vector<std::pair<std::string, Completion>> by_fingerprint_;
    std::vector<Rule> rules_;
    std::optional<Completion> default_;
};

struct RemoteConfig {
    std::string endpoint{"https://api.openai.com/v1/chat/completions"};
    std::string api_key_env{"OPENAI_API_KEY"};
    std::chrono::seconds timeout{120};
};

/// HTTP chat-completions client. The API key is read from the environment only.
class RemoteBackend final : public Backend {
public:
    explicit RemoteBackend(RemoteConfig config);

    Completion complete(const Conversation& conversation, const GenerationParams& params,
                        unsigned sample_index) override;
    [[nodiscard]] std::string redact(std::string text) const override;

private:
    RemoteConfig config_;
};

/// Thread-safe token bucket; `rate` tokens per second, capacity `burst`.
class TokenBucket {
public:
    TokenBucket(double rate, double burst);
    void acquire();

private:
    std::mutex mutex_;
    double rate_;
    double burst_;
    double tokens_;
    std::chrono::steady_clock::time_point last_;
};

struct GatewayOptions {
    double rate_limit{0.0};  // requests per second, 0 disables limiting
    std::chrono::milliseconds retry_backoff{500};
};

/// Shared entry point for all generation requests.
class Gateway {
public:
    explicit Gateway(std::shared_ptr<Backend> backend, GatewayOptions options = {});

    /// Returns `params.samples` responses with sample indices 0..samples-1.
    std::vector<RawResponse> generate(const PromptPair& prompts, const GenerationParams& params,
                                      const std::optional<std::filesystem::path>& log_dir = std::nullopt);
    std::vector<RawResponse> generate(const Conversation& conversation, const GenerationParams& params,
                                      const std::optional<std::filesystem::path>& log_dir = std::nullopt);
    RawResponse generate_one(const Conversation& conversation, const GenerationParams& params, unsigned sample_index,
                             const std::optional<std::filesystem::path>& log_dir = std::nullopt);

    [[nodiscard]] std::size_t request_count() const noexcept { return requests_.load(); }
    /// Every conversation sent so far, in submission order.
    [[nodiscard]] std::vector<Conversation> sent_requests() const;

private:
    Completion call_with_retry(const Conversation& conversation, const GenerationParams& params, unsigned sample_index);

    std::shared_ptr<Backend> backend_;
    GatewayOptions options_;
    std::unique_ptr<TokenBucket> bucket_;
    std::atomic<std::size_t> requests_{0};
    mutable std::mutex log_mutex_;
    std::vector<Conversation> sent_;
};

/// Picks the C code for `function_name` out of a model response: the first
/// fenced block defining it (else the first fenced block mentioning it), else
/// the bare definition from its return-type line to the balanced closing brace.
/// Throws ExtractionError when nothing matches.
[[nodiscard]] GeneratedCandidate extract_code(const RawResponse& response, std::string_view function_name);

} // namespace specgen
