#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cstdlib>

#include "specgen/error.hpp"
#include "specgen/llm_gateway.hpp"

namespace specgen {

using json = nlohmann::json;

namespace {

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

Endpoint split_endpoint(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw ContractError("endpoint must be an absolute http(s) URL: " + url);
    }
    const auto path_begin = url.find('/', scheme_end + 3);
    if (path_begin == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, path_begin), url.substr(path_begin)};
}

std::string api_key(const std::string& env_name) {
    const char* value = std::getenv(env_name.c_str());
    if (value == nullptr || *value == '\0') {
        throw GatewayError(GatewayError::Kind::Credential, "credential missing: environment variable " + env_name +
                                                               " is not set");
    }
    return value;
}

std::string error_message_from(const std::string& body) {
    const auto doc = json::parse(body, nullptr, false);
    if (!doc.is_discarded() && doc.contains("error")) {
        const auto& err = doc.at("error");
        if (err.is_object() && err.contains("message")) {
            return err.at("message").get<std::string>();
        }
        if (err.is_string()) {
            return err.get<std::string>();
        }
    }
    return body.substr(0, 500);
}

} // namespace

RemoteBackend::RemoteBackend(RemoteConfig config) : config_(std::move(config)) {
    (void)split_endpoint(config_.endpoint);
}

std::string RemoteBackend::redact(std::string text) const {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
        return text;
    }
    const std::string needle(key);
    for (std::size_t pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos)) {
        text.replace(pos, needle.size(), "[REDACTED]");
    }
    return text;
}

Completion RemoteBackend::complete(const Conversation& conversation, const GenerationParams& params,
                                   unsigned /*sample_index*/) {
    const std::string key = api_key(config_.api_key_env);
    const Endpoint ep = split_endpoint(config_.endpoint);

    httplib::Client client(ep.origin);
    const auto seconds = static_cast<time_t>(config_.timeout.count());
    client.set_connection_timeout(seconds, 0);
    client.set_read_timeout(seconds, 0);
    client.set_write_timeout(seconds, 0);

    const httplib::Headers headers{{"Authorization", "Bearer " + key}};
    const auto res = client.Post(ep.path, headers, request_body(conversation, params).dump(), "application/json");
    if (!res) {
        throw GatewayError(GatewayError::Kind::Transport, "transport failure: " + httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
        throw GatewayError(GatewayError::Kind::HttpStatus,
                           "HTTP " + std::to_string(res->status) + ": " + error_message_from(res->body),
                           res->status);
    }

    const auto doc = json::parse(res->body, nullptr, false);
    if (doc.is_discarded() || !doc.contains("choices") || !doc.at("choices").is_array() ||
        doc.at("choices").empty()) {
        throw GatewayError(GatewayError::Kind::Protocol, "malformed chat-completions response");
    }
    const auto& choice = doc.at("choices").at(0);
    Completion out;
    if (choice.contains("message") && choice.at("message").contains("content") &&
        choice.at("message").at("content").is_string()) {
        out.text = choice.at("message").at("content").get<std::string>();
    }
    if (choice.contains("finish_reason") && choice.at("finish_reason").is_string()) {
        out.finish_reason = choice.at("finish_reason").get<std::string>();
    }
    out.model_id = doc.contains("model") && doc.at("model").is_string() ? doc.at("model").get<std::string>()
                                                                          : params.model_id;
    return out;
}

} // namespace specgen
