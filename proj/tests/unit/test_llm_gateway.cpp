#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <gtest/gtest.h>

#include <cstdlib>
#include <thread>

#include "specgen/error.hpp"
#include "specgen/llm_gateway.hpp"
#include "test_support.hpp"

namespace specgen {
namespace {

using json = nlohmann::json;
using test::fixture;
using test::read_text;
using test::TempDir;

PromptPair sample_prompts() { return {"system text", "user text mentioning Brak_10ms"}; }

GenerationParams sample_params(const std::string& model = "gpt-4o") {
    GenerationParams p;
    p.model_id = model;
    return p;
}

TEST(Fingerprint, Sha256KnownVectors) {
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Fingerprint, RequestBodyCarriesSamplingFieldsOnly) {
    GenerationParams p = sample_params();
    p.samples = 3;
    const json body = request_body(Conversation::from(sample_prompts()), p);
    EXPECT_EQ(body.at("model"), "gpt-4o");
    ASSERT_EQ(body.at("messages").size(), 2U);
    EXPECT_EQ(body.at("messages")[0].at("role"), "system");
    EXPECT_EQ(body.at("messages")[1].at("content"), "user text mentioning Brak_10ms");
    for (const char* key : {"max_tokens", "temperature", "presence_penalty", "frequency_penalty", "top_p"}) {
        EXPECT_TRUE(body.contains(key)) << key;
    }
    EXPECT_FALSE(body.contains("samples"));
    EXPECT_FALSE(body.contains("n"));
}

TEST(Fingerprint, RequestFingerprintTracksEveryField) {
    const Conversation c = Conversation::from(sample_prompts());
    const GenerationParams p = sample_params();
    const std::string base = request_fingerprint(c, p);
    EXPECT_EQ(base, request_fingerprint(c, p));
    EXPECT_EQ(base.size(), 64U);
    GenerationParams q = p;
    q.temperature = 0.1;
    EXPECT_NE(base, request_fingerprint(c, q));
    q = p;
    q.model_id = "gpt-3.5-turbo";
    EXPECT_NE(base, request_fingerprint(c, q));
    q = p;
    q.samples = 5;  // client-side count, not part of the wire request
    EXPECT_EQ(base, request_fingerprint(c, q));
    Conversation d = c;
    d.messages.push_back({"assistant", "x"});
    EXPECT_NE(base, request_fingerprint(d, p));
}

TEST(Fingerprint, PromptFingerprintIgnoresSamplingParams) {
    const PromptPair a = sample_prompts();
    PromptPair b = a;
    EXPECT_EQ(prompt_fingerprint(a), prompt_fingerprint(b));
    b.user_text += " ";
    EXPECT_NE(prompt_fingerprint(a), prompt_fingerprint(b));
    PromptPair swapped{a.user_text, a.system_text};
    EXPECT_NE(prompt_fingerprint(a), prompt_fingerprint(swapped));
}

TEST(GenerationParams, Validation) {
    GenerationParams p = sample_params();
    EXPECT_NO_THROW(p.validate());
    p.samples = 0;
    EXPECT_THROW(p.validate(), ContractError);
    p = sample_params();
    p.temperature = -0.5;
    EXPECT_THROW(p.validate(), ContractError);
    p = sample_params();
    p.top_p = 1.5;
    EXPECT_THROW(p.validate(), ContractError);
    p = sample_params();
    p.max_tokens = 0;
    EXPECT_THROW(p.validate(), ContractError);
}

TEST(Conversation, TurnsAndLastUserText) {
    Conversation c = Conversation::from(sample_prompts());
    EXPECT_EQ(c.user_turns(), 1U);
    c.messages.push_back({"assistant", "first"});
    c.messages.push_back({"user", "feedback"});
    EXPECT_EQ(c.user_turns(), 2U);
    EXPECT_EQ(c.last_user_text(), "feedback");
}

TEST(MockBackend, LookupOrderFingerprintRuleDefault) {
    auto mock = std::make_shared<MockBackend>();
    const Conversation c = Conversation::from(sample_prompts());
    const GenerationParams p = sample_params();
    mock->set_default({"default", "stop", ""});
    mock->add_rule({std::nullopt, std::string("Brak_10ms"), std::nullopt, std::nullopt, {"rule", "stop", ""}});
    EXPECT_EQ(mock->complete(c, p, 0).text, "rule");
    mock->add_fingerprint(request_fingerprint(c, p), {"exact", "stop", ""});
    EXPECT_EQ(mock->complete(c, p, 0).text, "exact");
    const Conversation other = Conversation::from({"system text", "something else"});
    EXPECT_EQ(mock->complete(other, p, 0).text, "default");
    EXPECT_EQ(mock->complete(other, p, 0).model_id, "gpt-4o");
}

TEST(MockBackend, RulesMatchModelTurnAndSample) {
    MockBackend mock;
    mock.add_rule({std::string("m1"), std::nullopt, std::nullopt, std::nullopt, {"model m1", "stop", ""}});
    mock.add_rule({std::nullopt, std::nullopt, std::size_t{2}, std::nullopt, {"turn two", "stop", ""}});
    mock.add_rule({std::nullopt, std::nullopt, std::nullopt, 1U, {"sample one", "stop", ""}});
    Conversation c = Conversation::from(sample_prompts());
    EXPECT_EQ(mock.complete(c, sample_params("m1"), 0).text, "model m1");
    EXPECT_EQ(mock.complete(c, sample_params("m2"), 1).text, "sample one");
    EXPECT_THROW((void)mock.complete(c, sample_params("m2"), 0), GatewayError);
    c.messages.push_back({"assistant", "a"});
    c.messages.push_back({"user", "b"});
    EXPECT_EQ(mock.complete(c, sample_params("m2"), 0).text, "turn two");
}

TEST(MockBackend, UnmatchedRequestIsNoMockResponse) {
    MockBackend mock;
    try {
        (void)mock.complete(Conversation::from(sample_prompts()), sample_params(), 0);
        FAIL() << "expected GatewayError";
    } catch (const GatewayError& e) {
        EXPECT_EQ(e.kind(), GatewayError::Kind::NoMockResponse);
        EXPECT_FALSE(e.retriable());
    }
}

TEST(MockBackend, LoadsShippedScenario) {
    const auto mock = MockBackend::load(test::data_path("scenarios/brak_backprompt.json"));
    Conversation c = Conversation::from(sample_prompts());
    EXPECT_EQ(mock->complete(c, sample_params(), 0).text,
              read_text(test::data_path("scenarios/responses/brak_compile_error.md")));
    c.messages.push_back({"assistant", "a"});
    c.messages.push_back({"user", "b"});
    EXPECT_EQ(mock->complete(c, sample_params(), 0).text,
              read_text(test::data_path("scenarios/responses/brak_reference.md")));
}

TEST(MockBackend, MalformedScenarioIsParseError) {
    TempDir tmp;
    test::write_text(tmp.path() / "bad.json", "{ \"rules\": [ ");
    EXPECT_THROW((void)MockBackend::load(tmp.path() / "bad.json"), ParseError);
}

class ScriptedBackend final : public Backend {
public:
    std::vector<std::optional<GatewayError::Kind>> failures;  // consumed per call
    int calls{0};

    Completion complete(const Conversation&, const GenerationParams& params, unsigned sample_index) override {
        const int call = calls++;
        if (static_cast<std::size_t>(call) < failures.size() && failures[static_cast<std::size_t>(call)]) {
            throw GatewayError(*failures[static_cast<std::size_t>(call)], "scripted failure");
        }
        return {"response " + std::to_string(sample_index), "stop", params.model_id};
    }
};

TEST(Gateway, SamplesAreIndexedAndLogged) {
    auto backend = std::make_shared<ScriptedBackend>();
    Gateway gw(backend);
    GenerationParams p = sample_params();
    p.samples = 3;
    TempDir tmp;
    const auto responses = gw.generate(sample_prompts(), p, tmp.path());
    ASSERT_EQ(responses.size(), 3U);
    for (unsigned i = 0; i < 3; ++i) {
        EXPECT_EQ(responses[i].sample_index, i);
        EXPECT_EQ(responses[i].text, "response " + std::to_string(i));
        EXPECT_EQ(responses[i].request_fingerprint, request_fingerprint(Conversation::from(sample_prompts()), p));
        EXPECT_TRUE(std::filesystem::exists(tmp.path() / ("request_1_" + std::to_string(i) + ".json")));
        EXPECT_TRUE(std::filesystem::exists(tmp.path() / ("response_1_" + std::to_string(i) + ".json")));
    }
    EXPECT_EQ(gw.request_count(), 3U);
    EXPECT_EQ(gw.sent_requests().size(), 3U);
}

TEST(Gateway, RetriesTransportOnce) {
    auto backend = std::make_shared<ScriptedBackend>();
    backend->failures = {GatewayError::Kind::Transport, std::nullopt};
    Gateway gw(backend, GatewayOptions{0.0, std::chrono::milliseconds(1)});
    EXPECT_EQ(gw.generate_one(Conversation::from(sample_prompts()), sample_params(), 0).text, "response 0");
    EXPECT_EQ(backend->calls, 2);

    backend->calls = 0;
    backend->failures = {GatewayError::Kind::Transport, GatewayError::Kind::Transport, std::nullopt};
    EXPECT_THROW((void)gw.generate_one(Conversation::from(sample_prompts()), sample_params(), 0), GatewayError);
    EXPECT_EQ(backend->calls, 2);
}

TEST(Gateway, NoRetryOnContentOrStatusErrors) {
    for (const auto kind : {GatewayError::Kind::HttpStatus, GatewayError::Kind::Protocol,
                            GatewayError::Kind::Credential}) {
        auto backend = std::make_shared<ScriptedBackend>();
        backend->failures = {kind, std::nullopt};
        Gateway gw(backend, GatewayOptions{0.0, std::chrono::milliseconds(1)});
        EXPECT_THROW((void)gw.generate_one(Conversation::from(sample_prompts()), sample_params(), 0), GatewayError);
        EXPECT_EQ(backend->calls, 1);
    }
}

TEST(Gateway, TruncationFlaggedFromFinishReason) {
    auto mock = std::make_shared<MockBackend>();
    mock->set_default({"```c\nvoid f(void)\n{", "length", ""});
    Gateway gw(mock);
    const RawResponse r = gw.generate_one(Conversation::from(sample_prompts()), sample_params(), 0);
    EXPECT_TRUE(r.truncated);
    EXPECT_EQ(r.finish_reason, "length");
}

TEST(Gateway, RateLimitSpacesRequests) {
    auto backend = std::make_shared<ScriptedBackend>();
    Gateway gw(backend, GatewayOptions{50.0, std::chrono::milliseconds(1)});
    GenerationParams p = sample_params();
    p.samples = 4;
    const auto start = std::chrono::steady_clock::now();
    (void)gw.generate(sample_prompts(), p);
    const auto elapsed = std::chrono::steady_clock::now() - start;
    // Burst of one, then 20 ms per request at 50 requests per second.
    EXPECT_GE(elapsed, std::chrono::milliseconds(55));
}

TEST(Gateway, NullBackendIsContractError) {
    EXPECT_THROW(Gateway(nullptr), ContractError);
}

class EnvGuard {
public:
    EnvGuard(const char* name, const char* value) : name_(name) {
        if (const char* old = std::getenv(name)) {
            old_ = old;
        }
        if (value != nullptr) {
            ::setenv(name, value, 1);
        } else {
            ::unsetenv(name);
        }
    }
    ~EnvGuard() {
        if (old_) {
            ::setenv(name_.c_str(), old_->c_str(), 1);
        } else {
            ::unsetenv(name_.c_str());
        }
    }

private:
    std::string name_;
    std::optional<std::string> old_;
};

TEST(RemoteBackend, MissingCredentialIsReportedWithoutNetwork) {
    EnvGuard env("SPECGEN_TEST_KEY", nullptr);
    RemoteBackend remote(RemoteConfig{"http://127.0.0.1:9/v1/chat/completions", "SPECGEN_TEST_KEY",
                                      std::chrono::seconds(1)});
    try {
        (void)remote.complete(Conversation::from(sample_prompts()), sample_params(), 0);
        FAIL() << "expected GatewayError";
    } catch (const GatewayError& e) {
        EXPECT_EQ(e.kind(), GatewayError::Kind::Credential);
        EXPECT_NE(std::string(e.what()).find("SPECGEN_TEST_KEY"), std::string::npos);
    }
}

TEST(RemoteBackend, RelativeEndpointRejected) {
    EXPECT_THROW(RemoteBackend(RemoteConfig{"api.example.com/v1", "X", std::chrono::seconds(1)}), ContractError);
}

class LocalServer {
public:
    explicit LocalServer(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
        server_.Post("/v1/chat/completions", std::move(handler));
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~LocalServer() {
        server_.stop();
        thread_.join();
    }
    [[nodiscard]] std::string endpoint() const {
        return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
    }

private:
    httplib::Server server_;
    int port_{0};
    std::thread thread_;
};

TEST(RemoteBackend, ChatCompletionsRoundTripAndRedaction) {
    EnvGuard env("SPECGEN_TEST_KEY", "sk-test-secret-123");
    std::string seen_auth;
    json seen_body;
    LocalServer server([&](const httplib::Request& req, httplib::Response& res) {
        seen_auth = req.get_header_value("Authorization");
        seen_body = json::parse(req.body);
        res.set_content(R"({"model":"gpt-4o-2024","choices":[{"message":{"role":"assistant","content":"hello"},)"
                        R"("finish_reason":null}]})",
                        "application/json");
    });
    RemoteBackend remote(RemoteConfig{server.endpoint(), "SPECGEN_TEST_KEY", std::chrono::seconds(5)});
    const Completion c = remote.complete(Conversation::from(sample_prompts()), sample_params(), 0);
    EXPECT_EQ(c.text, "hello");
    EXPECT_EQ(c.model_id, "gpt-4o-2024");
    EXPECT_EQ(c.finish_reason, "stop");
    EXPECT_EQ(seen_auth, "Bearer sk-test-secret-123");
    EXPECT_EQ(seen_body, request_body(Conversation::from(sample_prompts()), sample_params()));
    EXPECT_EQ(remote.redact("key=sk-test-secret-123;"), "key=[REDACTED];");
}

TEST(RemoteBackend, HttpErrorStatusAndMalformedBody) {
    EnvGuard env("SPECGEN_TEST_KEY", "k");
    int status = 429;
    LocalServer server([&](const httplib::Request&, httplib::Response& res) {
        res.status = status;
        res.set_content(status == 200 ? "not json" : R"({"error":{"message":"rate limited"}})", "application/json");
    });
    RemoteBackend remote(RemoteConfig{server.endpoint(), "SPECGEN_TEST_KEY", std::chrono::seconds(5)});
    try {
        (void)remote.complete(Conversation::from(sample_prompts()), sample_params(), 0);
        FAIL() << "expected GatewayError";
    } catch (const GatewayError& e) {
        EXPECT_EQ(e.kind(), GatewayError::Kind::HttpStatus);
        EXPECT_EQ(e.http_status(), 429);
        EXPECT_NE(std::string(e.what()).find("rate limited"), std::string::npos);
    }
    status = 200;
    try {
        (void)remote.complete(Conversation::from(sample_prompts()), sample_params(), 0);
        FAIL() << "expected GatewayError";
    } catch (const GatewayError& e) {
        EXPECT_EQ(e.kind(), GatewayError::Kind::Protocol);
    }
}

// ---------------------------------------------------------------------------
// Extraction corpus: <name>.response.txt with either <name>.expected.c (the
// exact code, plus one final newline) or <name>.error.

TEST(ExtractCode, Corpus) {
    std::size_t cases = 0;
    for (const auto& entry : std::filesystem::directory_iterator(fixture("extraction"))) {
        const std::string file = entry.path().filename().string();
        const std::string suffix = ".response.txt";
        if (!file.ends_with(suffix)) {
            continue;
        }
        ++cases;
        const std::string stem = file.substr(0, file.size() - suffix.size());
        RawResponse raw;
        raw.text = read_text(entry.path());
        const auto expected_path = fixture("extraction/" + stem + ".expected.c");
        if (std::filesystem::exists(expected_path)) {
            std::string expected = read_text(expected_path);
            expected.pop_back();
            try {
                EXPECT_EQ(extract_code(raw, "Brak_10ms").source, expected) << stem;
            } catch (const ExtractionError& e) {
                ADD_FAILURE() << stem << ": " << e.what();
            }
        } else {
            ASSERT_TRUE(std::filesystem::exists(fixture("extraction/" + stem + ".error"))) << stem;
            EXPECT_THROW((void)extract_code(raw, "Brak_10ms"), ExtractionError) << stem;
        }
    }
    EXPECT_EQ(cases, 20U);
}

TEST(ExtractCode, KeepsProvenance) {
    RawResponse raw;
    raw.text = test::fenced("void Brak_10ms(void)\n{\n}");
    raw.sample_index = 3;
    raw.model_id = "gpt-4o";
    const GeneratedCandidate c = extract_code(raw, "Brak_10ms");
    EXPECT_EQ(c.sample_index, 3U);
    EXPECT_EQ(c.origin.model_id, "gpt-4o");
    EXPECT_EQ(c.origin.text, raw.text);
}

} // namespace
} // namespace specgen
