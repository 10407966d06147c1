#include "specgen/llm_gateway.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include "specgen/error.hpp"

namespace specgen {

namespace fs = std::filesystem;
using json = nlohmann::json;

void GenerationParams::validate() const {
    if (!(temperature >= 0.0 && temperature <= 2.0)) {
        throw ContractError("temperature must lie in [0, 2]");
    }
    if (!(top_p > 0.0 && top_p <= 1.0)) {
        throw ContractError("top_p must lie in (0, 1]");
    }
    if (samples < 1) {
        throw ContractError("samples must be at least 1");
    }
    if (max_tokens < 1) {
        throw ContractError("max_tokens must be at least 1");
    }
}

Conversation Conversation::from(const PromptPair& prompts) {
    return Conversation{{{"system", prompts.system_text}, {"user", prompts.user_text}}};
}

std::size_t Conversation::user_turns() const {
    return static_cast<std::size_t>(
        std::count_if(messages.begin(), messages.end(), [](const ChatMessage& m) { return m.role == "user"; }));
}

const std::string& Conversation::last_user_text() const {
    for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
        if (it->role == "user") {
            return it->content;
        }
    }
    static const std::string empty;
    return empty;
}

json request_body(const Conversation& conversation, const GenerationParams& params) {
    json messages = json::array();
    for (const auto& m : conversation.messages) {
        messages.push_back({{"role", m.role}, {"content", m.content}});
    }
    return json{{"model", params.model_id},
                {"messages", std::move(messages)},
                {"max_tokens", params.max_tokens},
                {"temperature", params.temperature},
                {"presence_penalty", params.presence_penalty},
                {"frequency_penalty", params.frequency_penalty},
                {"top_p", params.top_p}};
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 digest failed");
    }
    std::ostringstream out;
    for (unsigned int i = 0; i < length; ++i) {
        out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return out.str();
}

std::string request_fingerprint(const Conversation& conversation, const GenerationParams& params) {
    return sha256_hex(request_body(conversation, params).dump());
}

std::string prompt_fingerprint(const PromptPair& prompts) {
    return sha256_hex(json{{"system", prompts.system_text}, {"user", prompts.user_text}}.dump());
}

// ---------------------------------------------------------------------------
// MockBackend

namespace {

Completion load_completion(const json& entry, const fs::path& base) {
    Completion c;
    if (entry.contains("file")) {
        const fs::path path = base / entry.at("file").get<std::string>();
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw Error("mock scenario: cannot read response file " + path.string());
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        c.text = ss.str();
    } else if (entry.contains("text")) {
        c.text = entry.at("text").get<std::string>();
    } else {
        throw Error("mock scenario: response entry needs \"file\" or \"text\"");
    }
    c.finish_reason = entry.value("finish_reason", std::string("stop"));
    c.model_id = entry.value("model", std::string{});
    return c;
}

} // namespace

std::shared_ptr<MockBackend> MockBackend::load(const fs::path& scenario) {
    std::ifstream in(scenario);
    if (!in) {
        throw Error("cannot read mock scenario " + scenario.string());
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError("mock scenario " + scenario.string() + ": " + e.what());
    }
    const fs::path base = scenario.parent_path();
    auto mock = std::make_shared<MockBackend>();
    if (doc.contains("fingerprints")) {
        for (const auto& [fp, entry] : doc.at("fingerprints").items()) {
            mock->add_fingerprint(fp, load_completion(entry, base));
        }
    }
    if (doc.contains("rules")) {
        for (const auto& entry : doc.at("rules")) {
            Rule rule;
            if (entry.contains("model")) {
                rule.model = entry.at("model").get<std::string>();
            }
            if (entry.contains("user_contains")) {
                rule.user_contains = entry.at("user_contains").get<std::string>();
            }
            if (entry.contains("turn")) {
                rule.turn = entry.at("turn").get<std::size_t>();
            }
            if (entry.contains("sample")) {
                rule.sample = entry.at("sample").get<unsigned>();
            }
            rule.response = load_completion(entry, base);
            mock->add_rule(std::move(rule));
        }
    }
    if (doc.contains("default")) {
        mock->set_default(load_completion(doc.at("default"), base));
    }
    return mock;
}

void MockBackend::add_fingerprint(std::string fingerprint, Completion response) {
    by_fingerprint_.emplace_back(std::move(fingerprint), std::move(response));
}

void MockBackend::add_rule(Rule rule) {
    rules_.push_back(std::move(rule));
}

void MockBackend::set_default(Completion response) {
    default_ = std::move(response);
}

Completion MockBackend::complete(const Conversation& conversation, const GenerationParams& params,
                                 unsigned sample_index) {
    const std::string fp = request_fingerprint(conversation, params);
    Completion out;
    bool found = false;
    for (const auto& [key, response] : by_fingerprint_) {
        if (key == fp) {
            out = response;
            found = true;
            break;
        }
    }
    if (!found) {
        const std::string& user = conversation.last_user_text();
        const std::size_t turn = conversation.user_turns();
        for (const auto& rule : rules_) {
            if (rule.model && *rule.model != params.model_id) {
                continue;
            }
            if (rule.turn && *rule.turn != turn) {
                continue;
            }
            if (rule.sample && *rule.sample != sample_index) {
                continue;
            }
            if (rule.user_contains && user.find(*rule.user_contains) == std::string::npos) {
                continue;
            }
            out = rule.response;
            found = true;
            break;
        }
    }
    if (!found && default_) {
        out = *default_;
        found = true;
    }
    if (!found) {
        throw GatewayError(GatewayError::Kind::NoMockResponse, "mock backend has no response for request " + fp);
    }
    if (out.model_id.empty()) {
        out.model_id = params.model_id;
    }
    return out;
}

// ---------------------------------------------------------------------------
// TokenBucket

TokenBucket::TokenBucket(double rate, double burst)
    : rate_(rate), burst_(std::max(1.0, burst)), tokens_(std::max(1.0, burst)),
      last_(std::chrono::steady_clock::now()) {}

void TokenBucket::acquire() {
    std::unique_lock lock(mutex_);
    while (true) {
        const auto now = std::chrono::steady_clock::now();
        const double elapsed = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        tokens_ = std::min(burst_, tokens_ + elapsed * rate_);
        if (tokens_ >= 1.0) {
            tokens_ -= 1.0;
            return;
        }
        const double wait = (1.0 - tokens_) / rate_;
        lock.unlock();
        std::this_thread::sleep_for(std::chrono::duration<double>(wait));
        lock.lock();
    }
}

// ---------------------------------------------------------------------------
// Gateway

Gateway::Gateway(std::shared_ptr<Backend> backend, GatewayOptions options)
    : backend_(std::move(backend)), options_(options) {
    if (!backend_) {
        throw ContractError("gateway needs a backend");
    }
    if (options_.rate_limit > 0.0) {
        bucket_ = std::make_unique<TokenBucket>(options_.rate_limit, 1.0);
    }
}

Completion Gateway::call_with_retry(const Conversation& conversation, const GenerationParams& params,
                                    unsigned sample_index) {
    for (int attempt = 0;; ++attempt) {
        if (bucket_) {
            bucket_->acquire();
        }
        requests_.fetch_add(1);
        {
            std::lock_guard lock(log_mutex_);
            sent_.push_back(conversation);
        }
        try {
            return backend_->complete(conversation, params, sample_index);
        } catch (const GatewayError& e) {
            if (e.kind() != GatewayError::Kind::Transport || attempt >= 1) {
                throw;
            }
            std::this_thread::sleep_for(options_.retry_backoff * (1 << attempt));
        }
    }
}

RawResponse Gateway::generate_one(const Conversation& conversation, const GenerationParams& params,
                                  unsigned sample_index, const std::optional<fs::path>& log_dir) {
    params.validate();
    const std::string fp = request_fingerprint(conversation, params);
    const std::string tag = std::to_string(conversation.user_turns()) + "_" + std::to_string(sample_index);
    if (log_dir) {
        fs::create_directories(*log_dir);
        std::ofstream(*log_dir / ("request_" + tag + ".json"))
            << backend_->redact(request_body(conversation, params).dump(2)) << "\n";
    }

    const auto start = std::chrono::steady_clock::now();
    Completion completion = call_with_retry(conversation, params, sample_index);
    const auto latency =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);

    RawResponse raw;
    raw.text = std::move(completion.text);
    raw.model_id = completion.model_id.empty() ? params.model_id : completion.model_id;
    raw.request_fingerprint = fp;
    raw.latency = latency;
    raw.finish_reason = completion.finish_reason;
    raw.truncated = completion.finish_reason == "length";
    raw.sample_index = sample_index;

    if (log_dir) {
        const json logged{{"model", raw.model_id},
                          {"finish_reason", raw.finish_reason},
                          {"request_fingerprint", raw.request_fingerprint},
                          {"content", raw.text}};
        std::ofstream(*log_dir / ("response_" + tag + ".json")) << backend_->redact(logged.dump(2)) << "\n";
    }
    return raw;
}

std::vector<RawResponse> Gateway::generate(const Conversation& conversation, const GenerationParams& params,
                                           const std::optional<fs::path>& log_dir) {
    params.validate();
    std::vector<RawResponse> out;
    out.reserve(params.samples);
    for (unsigned i = 0; i < params.samples; ++i) {
        out.push_back(generate_one(conversation, params, i, log_dir));
    }
    return out;
}

std::vector<RawResponse> Gateway::generate(const PromptPair& prompts, const GenerationParams& params,
                                           const std::optional<fs::path>& log_dir) {
    return generate(Conversation::from(prompts), params, log_dir);
}

std::vector<Conversation> Gateway::sent_requests() const {
    std::lock_guard lock(log_mutex_);
    return sent_;
}

// ---------------------------------------------------------------------------
// extract_code

namespace {

struct Region {
    std::size_t begin;
    std::size_t end;
};

bool is_word_char(char c) noexcept {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool mentions(std::string_view text, std::string_view name) {
    std::size_t pos = 0;
    while ((pos = text.find(name, pos)) != std::string_view::npos) {
        const std::size_t after = pos + name.size();
        if ((pos == 0 || !is_word_char(text[pos - 1])) && (after >= text.size() || !is_word_char(text[after]))) {
            return true;
        }
        pos = after;
    }
    return false;
}

std::vector<Region> find_fences(std::string_view text) {
    std::vector<Region> blocks;
    bool open = false;
    std::size_t content_begin = 0;
    std::size_t line_begin = 0;
    while (line_begin <= text.size()) {
        std::size_t line_end = text.find('\n', line_begin);
        if (line_end == std::string_view::npos) {
            line_end = text.size();
        }
        std::string_view line = text.substr(line_begin, line_end - line_begin);
        std::size_t indent = 0;
        while (indent < line.size() && indent < 3 && line[indent] == ' ') {
            ++indent;
        }
        line.remove_prefix(indent);
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
            line.remove_suffix(1);
        }
        const bool fence = line.starts_with("```");
        if (fence && !open) {
            open = true;
            content_begin = std::min(line_end + 1, text.size());
        } else if (fence && open && line.find_first_not_of('`') == std::string_view::npos) {
            open = false;
            std::size_t content_end = line_begin;
            if (content_end > content_begin && text[content_end - 1] == '\n') {
                --content_end;
            }
            if (content_end > content_begin && text[content_end - 1] == '\r') {
                --content_end;
            }
            blocks.push_back({content_begin, std::max(content_begin, content_end)});
        }
        if (line_end == text.size()) {
            break;
        }
        line_begin = line_end + 1;
    }
    if (open) {
        // Truncated response: keep what arrived.
        std::size_t end = text.size();
        while (end > content_begin && (text[end - 1] == '\n' || text[end - 1] == '\r')) {
            --end;
        }
        blocks.push_back({content_begin, end});
    }
    return blocks;
}

/// Position just past the brace that closes the one at `open`, skipping
/// comments and literals; npos when unbalanced.
std::size_t close_brace(std::string_view text, std::size_t open) {
    int depth = 0;
    for (std::size_t i = open; i < text.size(); ++i) {
        const char c = text[i];
        if (text.substr(i).starts_with("//")) {
            i = text.find('\n', i);
            if (i == std::string_view::npos) {
                return std::string_view::npos;
            }
            continue;
        }
        if (text.substr(i).starts_with("/*")) {
            i = text.find("*/", i + 2);
            if (i == std::string_view::npos) {
                return std::string_view::npos;
            }
            ++i;
            continue;
        }
        if (c == '"' || c == '\'') {
            std::size_t j = i + 1;
            while (j < text.size() && text[j] != c && text[j] != '\n') {
                j += text[j] == '\\' ? 2 : 1;
            }
            if (j < text.size() && text[j] == c) {
                i = j;
            }
            continue;
        }
        if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) {
                return i + 1;
            }
        }
    }
    return std::string_view::npos;
}

std::optional<Region> find_definition(std::string_view text, std::string_view name) {
    std::size_t pos = 0;
    while ((pos = text.find(name, pos)) != std::string_view::npos) {
        const std::size_t after = pos + name.size();
        const std::size_t here = pos;
        pos = after;
        if ((here > 0 && is_word_char(text[here - 1])) || (after < text.size() && is_word_char(text[after]))) {
            continue;
        }
        std::size_t i = after;
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])) != 0) {
            ++i;
        }
        if (i >= text.size() || text[i] != '(') {
            continue;
        }
        int depth = 0;
        for (; i < text.size(); ++i) {
            if (text[i] == '(') {
                ++depth;
            } else if (text[i] == ')' && --depth == 0) {
                break;
            }
        }
        if (i >= text.size()) {
            continue;
        }
        ++i;
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])) != 0) {
            ++i;
        }
        if (i >= text.size() || text[i] != '{') {
            continue;
        }
        const std::size_t end = close_brace(text, i);
        if (end == std::string_view::npos) {
            continue;
        }

        std::size_t begin = text.rfind('\n', here);
        begin = begin == std::string_view::npos ? 0 : begin + 1;
        const bool name_leads_line = text.substr(begin, here - begin).find_first_not_of(" \t") == std::string_view::npos;
        if (name_leads_line && begin > 0) {
            // Return type on the previous line, e.g. "static void\nfoo(void)".
            const std::size_t prev_end = begin - 1;
            std::size_t prev_begin = text.rfind('\n', prev_end == 0 ? 0 : prev_end - 1);
            prev_begin = prev_begin == std::string_view::npos || prev_end == 0 ? 0 : prev_begin + 1;
            std::string_view prev = text.substr(prev_begin, prev_end - prev_begin);
            while (!prev.empty() && std::isspace(static_cast<unsigned char>(prev.back())) != 0) {
                prev.remove_suffix(1);
            }
            const bool looks_like_type = !prev.empty() && prev.find_first_of(";{}#`") == std::string_view::npos &&
                                         !prev.ends_with("*/") && !prev.ends_with(":") && !prev.ends_with(".");
            if (looks_like_type) {
                begin = prev_begin;
            }
        }
        return Region{begin, end};
    }
    return std::nullopt;
}

} // namespace

GeneratedCandidate extract_code(const RawResponse& response, std::string_view function_name) {
    const std::string_view text = response.text;
    auto make = [&](Region r) {
        return GeneratedCandidate{std::string(text.substr(r.begin, r.end - r.begin)), response,
                                  response.sample_index};
    };

    const auto fences = find_fences(text);
    for (const auto& f : fences) {
        if (find_definition(text.substr(f.begin, f.end - f.begin), function_name)) {
            return make(f);
        }
    }
    for (const auto& f : fences) {
        if (mentions(text.substr(f.begin, f.end - f.begin), function_name)) {
            return make(f);
        }
    }
    if (const auto def = find_definition(text, function_name)) {
        return make(*def);
    }
    throw ExtractionError("no code region defining '" + std::string(function_name) + "' found in the response");
}

} // namespace specgen
