#include "specgen/pipeline.hpp"

#include <stdlib.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <ctime>
#include <fstream>
#include <map>
#include <thread>

#include "specgen/error.hpp"
#include "specgen/prompt_builder.hpp"
#include "specgen/quality_critic.hpp"

namespace specgen {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr auto kVerdictNames = std::to_array<std::pair<Verdict, std::string_view>>({
    {Verdict::Pass, "Pass"},
    {Verdict::CompileFail, "CompileFail"},
    {Verdict::VerifyFail, "VerifyFail"},
    {Verdict::ExtractFail, "ExtractFail"},
    {Verdict::InfraError, "InfraError"},
});

constexpr auto kCriticNames = std::to_array<std::pair<Critic, std::string_view>>({
    {Critic::Compile, "compile"},
    {Critic::Verify, "verify"},
    {Critic::Equivalence, "equivalence"},
    {Critic::Quality, "quality"},
});

void write_text(const fs::path& path, std::string_view text) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

json diagnostics_json(const std::vector<Diagnostic>& ds) {
    json arr = json::array();
    for (const auto& d : ds) {
        arr.push_back({{"file", d.file}, {"line", d.line}, {"text", d.text}});
    }
    return arr;
}

std::vector<Diagnostic> diagnostics_from(const json& arr) {
    std::vector<Diagnostic> out;
    for (const auto& d : arr) {
        out.push_back({d.at("file").get<std::string>(), d.at("line").get<std::size_t>(), d.at("text").get<std::string>()});
    }
    return out;
}

json compile_json(const CompileReport& r) {
    return {{"success", r.success},
            {"warnings", diagnostics_json(r.warnings)},
            {"errors", diagnostics_json(r.errors)},
            {"tool_version", r.tool_version}};
}

CompileReport compile_from(const json& j) {
    return {j.at("success").get<bool>(), diagnostics_from(j.at("warnings")), diagnostics_from(j.at("errors")),
            j.value("tool_version", "")};
}

GoalStatus goal_status_from(const std::string& s) {
    if (s == "proved") {
        return GoalStatus::Proved;
    }
    if (s == "timeout") {
        return GoalStatus::Timeout;
    }
    if (s == "unproved") {
        return GoalStatus::Unproved;
    }
    throw ParseError("unknown goal status '" + s + "'");
}

json verification_json(const VerificationReport& r, bool with_volatile) {
    json goals = json::array();
    for (const auto& g : r.goals) {
        goals.push_back({{"name", g.name}, {"status", to_string(g.status)}});
    }
    json j{{"proved", r.proved}, {"total", r.total}, {"goals", goals}, {"tool_version", r.tool_version}};
    if (with_volatile) {
        j["solver_log_path"] = r.solver_log_path;
    }
    return j;
}

VerificationReport verification_from(const json& j) {
    VerificationReport r;
    r.proved = j.at("proved").get<std::size_t>();
    r.total = j.at("total").get<std::size_t>();
    for (const auto& g : j.at("goals")) {
        r.goals.push_back({g.at("name").get<std::string>(), goal_status_from(g.at("status").get<std::string>())});
    }
    r.tool_version = j.value("tool_version", "");
    r.solver_log_path = j.value("solver_log_path", "");
    return r;
}

EquivalenceVerdict equivalence_verdict_from(const std::string& s) {
    for (const auto v : {EquivalenceVerdict::Equivalent, EquivalenceVerdict::NotShown,
                         EquivalenceVerdict::ToolUnavailable}) {
        if (s == to_string(v)) {
            return v;
        }
    }
    throw ParseError("unknown equivalence verdict '" + s + "'");
}

json quality_json(const QualityReport& r) {
    json findings = json::array();
    for (const auto& f : r.findings) {
        findings.push_back(
            {{"rule_id", f.rule_id}, {"severity", to_string(f.severity)}, {"line", f.line}, {"message", f.message}});
    }
    return {{"loc", r.loc},
            {"findings", findings},
            {"compiler_warning_count", r.compiler_warning_count},
            {"conforms", r.conforms}};
}

QualityReport quality_from(const json& j) {
    QualityReport r;
    r.loc = j.at("loc").get<std::size_t>();
    for (const auto& f : j.at("findings")) {
        const auto sev = f.at("severity").get<std::string>();
        r.findings.push_back({f.at("rule_id").get<int>(), sev == "advisory" ? Severity::Advisory : Severity::Violation,
                              f.at("line").get<std::size_t>(), f.at("message").get<std::string>()});
    }
    r.compiler_warning_count = j.at("compiler_warning_count").get<std::size_t>();
    r.conforms = j.at("conforms").get<bool>();
    return r;
}

json candidate_json(const GeneratedCandidate& c, bool with_volatile) {
    json origin{{"text", c.origin.text},
                {"model_id", c.origin.model_id},
                {"request_fingerprint", c.origin.request_fingerprint},
                {"finish_reason", c.origin.finish_reason},
                {"truncated", c.origin.truncated},
                {"sample_index", c.origin.sample_index}};
    if (with_volatile) {
        origin["latency_ms"] = c.origin.latency.count();
    }
    return {{"source", c.source}, {"sample_index", c.sample_index}, {"origin", origin}};
}

GeneratedCandidate candidate_from(const json& j) {
    GeneratedCandidate c;
    c.source = j.at("source").get<std::string>();
    c.sample_index = j.at("sample_index").get<unsigned>();
    const auto& o = j.at("origin");
    c.origin.text = o.at("text").get<std::string>();
    c.origin.model_id = o.at("model_id").get<std::string>();
    c.origin.request_fingerprint = o.at("request_fingerprint").get<std::string>();
    c.origin.finish_reason = o.value("finish_reason", "");
    c.origin.truncated = o.value("truncated", false);
    c.origin.sample_index = o.value("sample_index", 0U);
    c.origin.latency = std::chrono::milliseconds(o.value("latency_ms", 0LL));
    return c;
}

std::string diagnostic_line(const Diagnostic& d, std::string_view severity) {
    std::string where;
    if (d.file == kCandidateFile || d.file.empty()) {
        where = d.line > 0 ? "line " + std::to_string(d.line) + ": " : "";
    } else {
        where = d.file + ":" + std::to_string(d.line) + ": ";
    }
    return where + std::string(severity) + ": " + d.text;
}

fs::path make_temp_run_dir() {
    std::string templ = (fs::temp_directory_path() / "specgen_run_XXXXXX").string();
    if (::mkdtemp(templ.data()) == nullptr) {
        throw EnvironmentError("cannot create a temporary run directory");
    }
    return templ;
}

} // namespace

const char* to_string(Verdict verdict) noexcept {
    for (const auto& [v, name] : kVerdictNames) {
        if (v == verdict) {
            return name.data();
        }
    }
    return "unknown";
}

std::optional<Verdict> parse_verdict(std::string_view text) noexcept {
    for (const auto& [v, name] : kVerdictNames) {
        if (name == text) {
            return v;
        }
    }
    return std::nullopt;
}

const char* to_string(Critic critic) noexcept {
    for (const auto& [c, name] : kCriticNames) {
        if (c == critic) {
            return name.data();
        }
    }
    return "unknown";
}

std::optional<Critic> parse_critic(std::string_view text) noexcept {
    for (const auto& [c, name] : kCriticNames) {
        if (name == text) {
            return c;
        }
    }
    return std::nullopt;
}

void CellConfig::validate() const {
    if (!critics_enabled.contains(Critic::Compile) || !critics_enabled.contains(Critic::Verify)) {
        throw ContractError("the compile and verify critics cannot be disabled");
    }
    params.validate();
}

std::string CellResult::key() const {
    return bundle_name + "|" + model_id + "|" + combination_label + "|" + std::to_string(sample_index);
}

void check_cell_invariants(const CellResult& cell) {
    auto fail = [&](const std::string& what) { throw ContractError("cell " + cell.key() + ": " + what); };
    const bool compiled = cell.compile && cell.compile->success;
    const bool proved = cell.verification && cell.verification->fully_proved();
    if ((cell.verdict == Verdict::Pass) != (compiled && proved)) {
        fail("Pass must coincide with a successful compile and a fully proved verification");
    }
    if (proved && !compiled) {
        fail("verification present without a successful compile");
    }
    if (cell.compile && !cell.compile->success && cell.compile->errors.empty()) {
        fail("failed compile without errors");
    }
    if (cell.compile && cell.compile->success && !cell.compile->errors.empty()) {
        fail("successful compile with errors");
    }
    // Skip-on-failure: once a stage is n/a, every later stage is n/a.
    const std::array<bool, 4> present{cell.compile.has_value(), cell.verification.has_value(),
                                      cell.equivalence.has_value(), cell.quality.has_value()};
    for (std::size_t i = 1; i < present.size(); ++i) {
        if (present[i] && !present[i - 1]) {
            fail("stage present after an n/a stage");
        }
    }
    if (cell.compile && !cell.compile->success && (present[1] || present[2] || present[3])) {
        fail("stages ran after a failed compile");
    }
    if (cell.verification && cell.verification->proved > cell.verification->total) {
        fail("proved exceeds total");
    }
    switch (cell.verdict) {
    case Verdict::CompileFail:
        if (compiled || !cell.compile) {
            fail("CompileFail without a failed compile report");
        }
        break;
    case Verdict::VerifyFail:
        if (!cell.verification || proved) {
            fail("VerifyFail without an incomplete verification");
        }
        break;
    case Verdict::ExtractFail:
        if (cell.candidate || cell.compile) {
            fail("ExtractFail with a candidate");
        }
        break;
    case Verdict::Pass:
    case Verdict::InfraError:
        break;
    }
}

void ResultSet::validate() const {
    std::set<std::string> keys;
    for (const auto& cell : cells) {
        if (!keys.insert(cell.key()).second) {
            throw ContractError("duplicate cell key " + cell.key());
        }
        check_cell_invariants(cell);
    }
}

QualityReport CriticSuite::quality(std::string_view source, const InterfaceContext& interface,
                                   const CompileReport& compile_report) {
    return check_power_of_10(source, interface, compile_report);
}

CompileReport ToolchainCritics::compile(std::string_view source, const InterfaceContext& interface,
                                        const fs::path& workdir) {
    return run_compile(source, interface, workdir, config_);
}

VerificationReport ToolchainCritics::verify(std::string_view source, std::string_view contract,
                                            const InterfaceContext& interface, const fs::path& workdir) {
    return run_verify(source, contract, interface, workdir, config_);
}

EquivalenceResult ToolchainCritics::equivalence(std::string_view candidate, std::string_view reference,
                                                const InterfaceContext& interface, const fs::path& workdir) {
    return run_equivalence(candidate, reference, interface, workdir, config_);
}

Pipeline::Pipeline(Gateway& gateway, CriticSuite& critics, PipelineOptions options)
    : gateway_(gateway), critics_(critics), options_(std::move(options)) {
    if (options_.parallelism == 0) {
        throw ContractError("parallelism must be at least 1");
    }
    if (options_.run_dir.empty()) {
        options_.run_dir = make_temp_run_dir();
    }
}

std::string path_component(std::string_view text) {
    std::string out;
    for (const char c : text) {
        const bool safe = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                          c == '_' || c == '.';
        out += safe ? c : '_';
    }
    if (out.empty() || out == "." || out == "..") {
        out = "_" + out;
    }
    return out;
}

fs::path Pipeline::cell_dir(const CaseBundle& bundle, const CellConfig& config, unsigned sample_index) const {
    return options_.run_dir / "cells" / path_component(bundle.name) / path_component(config.model_id) /
           config.combination.slug() / ("sample_" + std::to_string(sample_index));
}

FeedbackBundle feedback_from(const CellResult& attempt, std::string prior_code, unsigned iteration) {
    FeedbackBundle fb;
    fb.prior_code = std::move(prior_code);
    fb.iteration = iteration;
    if (!attempt.candidate) {
        fb.compile_findings.push_back("no C function definition could be extracted: " + attempt.extraction_error);
        return fb;
    }
    if (attempt.compile) {
        for (const auto& d : attempt.compile->errors) {
            fb.compile_findings.push_back(diagnostic_line(d, "error"));
        }
        for (const auto& d : attempt.compile->warnings) {
            fb.compile_findings.push_back(diagnostic_line(d, "warning"));
        }
    }
    if (attempt.verification) {
        for (const auto& g : attempt.verification->goals) {
            if (g.status != GoalStatus::Proved) {
                fb.unproved_goals.push_back(g.name + " (" + to_string(g.status) + ")");
            }
        }
    }
    if (attempt.quality) {
        for (const auto& f : attempt.quality->findings) {
            if (f.severity == Severity::Violation && f.rule_id != 10) {
                fb.quality_findings.push_back("rule " + std::to_string(f.rule_id) + ", line " +
                                              std::to_string(f.line) + ": " + f.message);
            }
        }
    }
    return fb;
}

CellResult Pipeline::run_sample(const CaseBundle& bundle, const CellConfig& config, unsigned sample_index) {
    const auto started = std::chrono::steady_clock::now();
    const fs::path base = cell_dir(bundle, config, sample_index);
    const InterfaceContext interface = bundle.degraded_interface();
    const std::string function_name = interface.function_name();
    const std::string contract = degrade_ghosts(bundle.acsl_contract);
    const std::optional<std::string> reference =
        bundle.reference_source ? std::optional<std::string>(degrade_ghosts(*bundle.reference_source)) : std::nullopt;

    CellResult cell;
    cell.bundle_name = bundle.name;
    cell.model_id = config.model_id;
    cell.combination_label = config.combination.label();
    cell.sample_index = sample_index;
    cell.prompt = build_prompt_pair(select_specs(bundle, config.combination), interface, config.chain_of_thought);
    cell.prompt_fingerprint = prompt_fingerprint(cell.prompt);
    cell.workdir = base.string();

    GenerationParams params = config.params;
    params.model_id = config.model_id;
    Conversation conversation = Conversation::from(cell.prompt);

    for (unsigned iteration = 0;; ++iteration) {
        const fs::path dir = base / ("iter_" + std::to_string(iteration));
        CellResult attempt = cell;
        attempt.iterations_used = iteration;

        RawResponse raw;
        try {
            raw = gateway_.generate_one(conversation, params, sample_index, dir);
        } catch (const Error& e) {
            attempt.verdict = Verdict::InfraError;
            attempt.infra_detail = std::string("generation failed: ") + e.what();
            cell = std::move(attempt);
            break;
        }
        write_text(dir / "response.txt", raw.text);
        attempt.response_text = raw.text;

        try {
            attempt.candidate = extract_code(raw, function_name);
            write_text(dir / "candidate.c", attempt.candidate->source);
        } catch (const ExtractionError& e) {
            attempt.extraction_error = e.what();
            attempt.verdict = Verdict::ExtractFail;
        }

        if (attempt.candidate) {
            const std::string& source = attempt.candidate->source;
            try {
                attempt.compile = critics_.compile(source, interface, dir / "compile");
                if (!attempt.compile->success) {
                    attempt.verdict = Verdict::CompileFail;
                } else {
                    attempt.verification = critics_.verify(source, contract, interface, dir / "verify");
                    attempt.verdict =
                        attempt.verification->fully_proved() ? Verdict::Pass : Verdict::VerifyFail;
                    if (!config.critics_enabled.contains(Critic::Equivalence)) {
                        attempt.equivalence = EquivalenceResult{EquivalenceVerdict::ToolUnavailable, "critic disabled"};
                    } else if (!reference) {
                        attempt.equivalence =
                            EquivalenceResult{EquivalenceVerdict::ToolUnavailable, "no reference program"};
                    } else {
                        attempt.equivalence = critics_.equivalence(source, *reference, interface, dir / "equivalence");
                    }
                    if (config.critics_enabled.contains(Critic::Quality)) {
                        try {
                            attempt.quality = critics_.quality(source, interface, *attempt.compile);
                        } catch (const MetricError& e) {
                            attempt.infra_detail = std::string("quality analysis skipped: ") + e.what();
                        } catch (const LexError& e) {
                            attempt.infra_detail = std::string("quality analysis skipped: ") + e.what();
                        }
                    }
                }
            } catch (const EnvironmentError& e) {
                attempt.verdict = Verdict::InfraError;
                attempt.infra_detail = e.what();
            } catch (const VerificationInfraError& e) {
                attempt.verdict = Verdict::InfraError;
                attempt.infra_detail = e.what();
            }
            if (attempt.verdict == Verdict::InfraError) {
                // Stages after an infrastructure failure are n/a.
                attempt.verification.reset();
                attempt.equivalence.reset();
                attempt.quality.reset();
            }
        }

        json reports = to_json(attempt);
        write_text(dir / "attempt.json", reports.dump(2) + "\n");

        const bool finished = attempt.verdict == Verdict::Pass || attempt.verdict == Verdict::InfraError ||
                              iteration >= config.max_iterations;
        if (finished) {
            cell = std::move(attempt);
            break;
        }
        const FeedbackBundle fb =
            feedback_from(attempt, attempt.candidate ? attempt.candidate->source : raw.text, iteration + 1);
        conversation.messages.push_back({"assistant", raw.text});
        conversation.messages.push_back({"user", build_feedback_prompt(fb)});
        cell = std::move(attempt);
    }

    cell.elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
    check_cell_invariants(cell);
    return cell;
}

std::vector<CellResult> Pipeline::run_cell_samples(const CaseBundle& bundle, const CellConfig& config) {
    config.validate();
    std::vector<CellResult> out;
    out.reserve(config.params.samples);
    for (unsigned s = 0; s < config.params.samples; ++s) {
        out.push_back(run_sample(bundle, config, s));
    }
    return out;
}

CellResult Pipeline::run_cell(const CaseBundle& bundle, const CellConfig& config) {
    config.validate();
    return run_sample(bundle, config, 0);
}

ResultSet Pipeline::run_matrix(const std::vector<CaseBundle>& bundles, const std::vector<std::string>& models,
                               const std::vector<SpecCombination>& combinations, const CellConfig& defaults) {
    if (bundles.empty() || models.empty() || combinations.empty()) {
        throw ContractError("run_matrix needs at least one bundle, model and combination");
    }
    defaults.validate();

    struct Task {
        const CaseBundle* bundle;
        CellConfig config;
    };
    std::vector<Task> tasks;
    for (const auto& bundle : bundles) {
        for (const auto& model : models) {
            for (const auto& combo : combinations) {
                CellConfig cfg = defaults;
                cfg.model_id = model;
                cfg.combination = combo;
                tasks.push_back({&bundle, std::move(cfg)});
            }
        }
    }

    std::vector<std::vector<CellResult>> slots(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            const Task& task = tasks[i];
            try {
                slots[i] = run_cell_samples(*task.bundle, task.config);
            } catch (const std::exception& e) {
                // Unexpected failures become InfraError cells; siblings continue.
                for (unsigned s = 0; s < task.config.params.samples; ++s) {
                    CellResult cell;
                    cell.bundle_name = task.bundle->name;
                    cell.model_id = task.config.model_id;
                    cell.combination_label = task.config.combination.label();
                    cell.sample_index = s;
                    cell.verdict = Verdict::InfraError;
                    cell.infra_detail = e.what();
                    slots[i].push_back(std::move(cell));
                }
            }
        }
    };
    const unsigned threads = std::min<std::size_t>(options_.parallelism, tasks.size());
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }

    ResultSet results;
    results.created_at = utc_timestamp();
    for (auto& slot : slots) {
        for (auto& cell : slot) {
            results.cells.push_back(std::move(cell));
        }
    }
    results.validate();
    return results;
}

bool compute_pass_at_k(const std::vector<CellResult>& samples, std::size_t k) {
    if (k == 0) {
        throw ContractError("pass@k requires k >= 1");
    }
    if (k > samples.size()) {
        throw ContractError("pass@" + std::to_string(k) + " requested with only " + std::to_string(samples.size()) +
                            " sample(s)");
    }
    return std::any_of(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(k),
                       [](const CellResult& c) { return c.verdict == Verdict::Pass; });
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    ::gmtime_r(&now, &tm);
    std::array<char, 32> buf{};
    const auto n = std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return std::string(buf.data(), n);
}

json to_json(const CellResult& cell, bool with_volatile) {
    json j{{"bundle", cell.bundle_name},
           {"model", cell.model_id},
           {"combination", cell.combination_label},
           {"sample_index", cell.sample_index},
           {"iterations_used", cell.iterations_used},
           {"verdict", to_string(cell.verdict)},
           {"prompt", {{"system", cell.prompt.system_text}, {"user", cell.prompt.user_text}}},
           {"prompt_fingerprint", cell.prompt_fingerprint}};
    j["compile"] = cell.compile ? compile_json(*cell.compile) : json(nullptr);
    j["verification"] = cell.verification ? verification_json(*cell.verification, with_volatile) : json(nullptr);
    j["equivalence"] = cell.equivalence ? json{{"verdict", to_string(cell.equivalence->verdict)},
                                                {"detail", cell.equivalence->detail}}
                                         : json(nullptr);
    j["quality"] = cell.quality ? quality_json(*cell.quality) : json(nullptr);
    j["candidate"] = cell.candidate ? candidate_json(*cell.candidate, with_volatile) : json(nullptr);
    j["response_text"] = cell.response_text;
    j["extraction_error"] = cell.extraction_error;
    if (with_volatile) {
        j["infra_detail"] = cell.infra_detail;
        j["timing"] = {{"elapsed_ms", cell.elapsed.count()}};
        j["workdir"] = cell.workdir;
    } else {
        // Infrastructure messages may embed paths; keep only whether one exists.
        j["has_infra_detail"] = !cell.infra_detail.empty();
    }
    return j;
}

json to_json(const ResultSet& results, bool with_volatile) {
    json cells = json::array();
    for (const auto& c : results.cells) {
        cells.push_back(to_json(c, with_volatile));
    }
    json j{{"schema_version", 1}, {"cells", cells}, {"config", results.config_snapshot}};
    if (with_volatile) {
        j["created_at"] = results.created_at;
    } else if (j["config"].is_object()) {
        j["config"].erase("output_dir");
    }
    return j;
}

CellResult cell_from_json(const json& j) {
    CellResult c;
    c.bundle_name = j.at("bundle").get<std::string>();
    c.model_id = j.at("model").get<std::string>();
    c.combination_label = j.at("combination").get<std::string>();
    c.sample_index = j.at("sample_index").get<unsigned>();
    c.iterations_used = j.at("iterations_used").get<unsigned>();
    const auto verdict = parse_verdict(j.at("verdict").get<std::string>());
    if (!verdict) {
        throw ParseError("unknown verdict '" + j.at("verdict").get<std::string>() + "'");
    }
    c.verdict = *verdict;
    c.prompt = {j.at("prompt").at("system").get<std::string>(), j.at("prompt").at("user").get<std::string>()};
    c.prompt_fingerprint = j.at("prompt_fingerprint").get<std::string>();
    if (!j.at("compile").is_null()) {
        c.compile = compile_from(j.at("compile"));
    }
    if (!j.at("verification").is_null()) {
        c.verification = verification_from(j.at("verification"));
    }
    if (!j.at("equivalence").is_null()) {
        c.equivalence = EquivalenceResult{equivalence_verdict_from(j.at("equivalence").at("verdict").get<std::string>()),
                                          j.at("equivalence").at("detail").get<std::string>()};
    }
    if (!j.at("quality").is_null()) {
        c.quality = quality_from(j.at("quality"));
    }
    if (!j.at("candidate").is_null()) {
        c.candidate = candidate_from(j.at("candidate"));
    }
    c.response_text = j.value("response_text", "");
    c.extraction_error = j.value("extraction_error", "");
    c.infra_detail = j.value("infra_detail", "");
    c.workdir = j.value("workdir", "");
    if (j.contains("timing")) {
        c.elapsed = std::chrono::milliseconds(j.at("timing").value("elapsed_ms", 0LL));
    }
    return c;
}

ResultSet result_set_from_json(const json& j) {
    ResultSet r;
    for (const auto& c : j.at("cells")) {
        r.cells.push_back(cell_from_json(c));
    }
    r.created_at = j.value("created_at", "");
    r.config_snapshot = j.value("config", json::object());
    return r;
}

void write_results(const ResultSet& results, const fs::path& run_dir) {
    fs::create_directories(run_dir);
    const fs::path path = run_dir / kResultsFile;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << to_json(results).dump(2) << '\n';
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
}

ResultSet load_results(const fs::path& run_dir) {
    const fs::path path = run_dir / kResultsFile;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("no " + std::string(kResultsFile) + " in " + run_dir.string());
    }
    const json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) {
        throw IoError(path.string() + " is not valid JSON");
    }
    try {
        ResultSet r = result_set_from_json(j);
        r.validate();
        return r;
    } catch (const json::exception& e) {
        throw IoError(path.string() + " has an unexpected layout: " + e.what());
    }
}

} // namespace specgen
