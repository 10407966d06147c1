#include "specgen/dataset_collector.hpp"

#include <array>
#include <fstream>
#include <mutex>

#include "specgen/error.hpp"

namespace specgen {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

constexpr auto kFailureNames = std::to_array<std::pair<FailureClass, std::string_view>>({
    {FailureClass::Compile, "compile"},
    {FailureClass::Verify, "verify"},
    {FailureClass::Extract, "extract"},
});

CellKey key_of(const CellResult& cell) {
    return {cell.bundle_name, cell.model_id, cell.combination_label, cell.sample_index, cell.iterations_used};
}

std::optional<FailureClass> failure_of(Verdict verdict) {
    switch (verdict) {
    case Verdict::CompileFail:
        return FailureClass::Compile;
    case Verdict::VerifyFail:
        return FailureClass::Verify;
    case Verdict::ExtractFail:
        return FailureClass::Extract;
    case Verdict::Pass:
    case Verdict::InfraError:
        break;
    }
    return std::nullopt;
}

std::string code_of(const CellResult& cell) {
    return cell.candidate ? cell.candidate->source : cell.response_text;
}

ojson prompt_json(const PromptPair& p) {
    ojson j;
    j["system"] = p.system_text;
    j["user"] = p.user_text;
    return j;
}

PromptPair prompt_from(const json& j) {
    return {j.at("system").get<std::string>(), j.at("user").get<std::string>()};
}

ojson key_json(const CellKey& k) {
    ojson j;
    j["bundle"] = k.bundle;
    j["model"] = k.model;
    j["combination"] = k.combination;
    j["sample_index"] = k.sample_index;
    j["iterations_used"] = k.iterations_used;
    return j;
}

CellKey key_from(const json& j) {
    return {j.at("bundle").get<std::string>(), j.at("model").get<std::string>(),
            j.at("combination").get<std::string>(), j.at("sample_index").get<unsigned>(),
            j.at("iterations_used").get<unsigned>()};
}

FailureClass failure_from(const json& j) {
    const auto f = parse_failure_class(j.get<std::string>());
    if (!f) {
        throw ParseError("unknown failure class '" + j.get<std::string>() + "'");
    }
    return *f;
}

void check_schema(const json& j) {
    if (!j.is_object() || !j.contains("schema_version") || j.at("schema_version") != kDatasetSchemaVersion) {
        throw ParseError("dataset record has an unsupported schema_version");
    }
}

std::mutex& path_mutex(const fs::path& path) {
    static std::mutex registry_mutex;
    static std::map<std::string, std::unique_ptr<std::mutex>> registry;
    const std::lock_guard lock(registry_mutex);
    auto& slot = registry[fs::absolute(path).lexically_normal().string()];
    if (!slot) {
        slot = std::make_unique<std::mutex>();
    }
    return *slot;
}

} // namespace

const char* to_string(FailureClass failure) noexcept {
    for (const auto& [f, name] : kFailureNames) {
        if (f == failure) {
            return name.data();
        }
    }
    return "unknown";
}

std::optional<FailureClass> parse_failure_class(std::string_view text) noexcept {
    for (const auto& [f, name] : kFailureNames) {
        if (name == text) {
            return f;
        }
    }
    return std::nullopt;
}

Annotations load_annotations(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read annotations " + path.string());
    }
    Annotations out;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw ParseError("annotation is not a JSON object", number);
        }
        try {
            CellResult probe;
            probe.bundle_name = j.at("bundle").get<std::string>();
            probe.model_id = j.at("model").get<std::string>();
            probe.combination_label = j.at("combination").get<std::string>();
            probe.sample_index = j.value("sample_index", 0U);
            out[probe.key()].push_back(j.at("note").get<std::string>());
        } catch (const json::exception& e) {
            throw ParseError(std::string("annotation is missing a field: ") + e.what(), number);
        }
    }
    return out;
}

CollectedRecords collect(const ResultSet& results, const Annotations& annotations) {
    CollectedRecords out;
    for (const auto& cell : results.cells) {
        if (cell.verdict == Verdict::Pass) {
            SftRecord r;
            r.prompt = cell.prompt;
            r.prompt_fingerprint = cell.prompt_fingerprint;
            r.combination_label = cell.combination_label;
            r.code = code_of(cell);
            r.proved = cell.verification->proved;
            r.total = cell.verification->total;
            r.provenance = key_of(cell);
            for (const auto& w : cell.compile->warnings) {
                r.compiler_warnings.push_back(w.file + ":" + std::to_string(w.line) + ": " + w.text);
            }
            out.sft.push_back(std::move(r));
            continue;
        }
        const auto failure = failure_of(cell.verdict);
        if (!failure) {
            continue;
        }
        FeedbackRecord r;
        r.prompt = cell.prompt;
        r.prompt_fingerprint = cell.prompt_fingerprint;
        r.combination_label = cell.combination_label;
        r.code = code_of(cell);
        r.failure_class = *failure;
        r.provenance = key_of(cell);
        if (*failure == FailureClass::Extract) {
            r.critic_outputs.extraction.push_back(cell.extraction_error);
        } else {
            const FeedbackBundle fb = feedback_from(cell, r.code, 1);
            r.critic_outputs.compile = fb.compile_findings;
            r.critic_outputs.verify = fb.unproved_goals;
            r.critic_outputs.quality = fb.quality_findings;
        }
        if (const auto it = annotations.find(cell.key()); it != annotations.end()) {
            r.human_annotations = it->second;
        }
        out.feedback.push_back(std::move(r));
    }
    return out;
}

std::vector<PreferencePair> build_preference_pairs(const ResultSet& results) {
    std::vector<std::string> order;
    std::map<std::string, std::vector<const CellResult*>> groups;
    for (const auto& cell : results.cells) {
        auto [it, inserted] = groups.try_emplace(cell.prompt_fingerprint);
        if (inserted) {
            order.push_back(cell.prompt_fingerprint);
        }
        it->second.push_back(&cell);
    }
    std::vector<PreferencePair> pairs;
    for (const auto& fingerprint : order) {
        const auto& group = groups.at(fingerprint);
        for (const CellResult* chosen : group) {
            if (chosen->verdict != Verdict::Pass) {
                continue;
            }
            for (const CellResult* rejected : group) {
                const auto failure = failure_of(rejected->verdict);
                if (!failure) {
                    continue;
                }
                PreferencePair p;
                p.prompt = chosen->prompt;
                p.prompt_fingerprint = fingerprint;
                p.chosen = code_of(*chosen);
                p.rejected = code_of(*rejected);
                p.chosen_proved = chosen->verification->proved;
                p.chosen_total = chosen->verification->total;
                p.rejected_failure = *failure;
                p.chosen_from = key_of(*chosen);
                p.rejected_from = key_of(*rejected);
                pairs.push_back(std::move(p));
            }
        }
    }
    return pairs;
}

ojson to_json(const SftRecord& r) {
    ojson j;
    j["schema_version"] = kDatasetSchemaVersion;
    j["kind"] = "sft";
    j["prompt"] = prompt_json(r.prompt);
    j["prompt_fingerprint"] = r.prompt_fingerprint;
    j["combination"] = r.combination_label;
    j["code"] = r.code;
    j["verification"] = {{"proved", r.proved}, {"total", r.total}};
    j["provenance"] = key_json(r.provenance);
    j["compiler_warnings"] = r.compiler_warnings;
    return j;
}

ojson to_json(const FeedbackRecord& r) {
    ojson j;
    j["schema_version"] = kDatasetSchemaVersion;
    j["kind"] = "feedback";
    j["prompt"] = prompt_json(r.prompt);
    j["prompt_fingerprint"] = r.prompt_fingerprint;
    j["combination"] = r.combination_label;
    j["code"] = r.code;
    ojson critics;
    critics["extraction"] = r.critic_outputs.extraction;
    critics["compile"] = r.critic_outputs.compile;
    critics["verify"] = r.critic_outputs.verify;
    critics["quality"] = r.critic_outputs.quality;
    j["critic_outputs"] = critics;
    j["failure_class"] = to_string(r.failure_class);
    j["provenance"] = key_json(r.provenance);
    j["human_annotations"] = r.human_annotations;
    return j;
}

ojson to_json(const PreferencePair& r) {
    ojson j;
    j["schema_version"] = kDatasetSchemaVersion;
    j["kind"] = "preference_pair";
    j["prompt"] = prompt_json(r.prompt);
    j["prompt_fingerprint"] = r.prompt_fingerprint;
    j["chosen"] = r.chosen;
    j["rejected"] = r.rejected;
    ojson evidence;
    evidence["proved"] = r.chosen_proved;
    evidence["total"] = r.chosen_total;
    j["chosen_evidence"] = evidence;
    j["rejected_evidence"] = to_string(r.rejected_failure);
    j["chosen_from"] = key_json(r.chosen_from);
    j["rejected_from"] = key_json(r.rejected_from);
    return j;
}

template <>
SftRecord record_from_json<SftRecord>(const json& j) {
    check_schema(j);
    try {
        SftRecord r;
        r.prompt = prompt_from(j.at("prompt"));
        r.prompt_fingerprint = j.at("prompt_fingerprint").get<std::string>();
        r.combination_label = j.at("combination").get<std::string>();
        r.code = j.at("code").get<std::string>();
        r.proved = j.at("verification").at("proved").get<std::size_t>();
        r.total = j.at("verification").at("total").get<std::size_t>();
        r.provenance = key_from(j.at("provenance"));
        r.compiler_warnings = j.at("compiler_warnings").get<std::vector<std::string>>();
        return r;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed SFT record: ") + e.what());
    }
}

template <>
FeedbackRecord record_from_json<FeedbackRecord>(const json& j) {
    check_schema(j);
    try {
        FeedbackRecord r;
        r.prompt = prompt_from(j.at("prompt"));
        r.prompt_fingerprint = j.at("prompt_fingerprint").get<std::string>();
        r.combination_label = j.at("combination").get<std::string>();
        r.code = j.at("code").get<std::string>();
        const auto& c = j.at("critic_outputs");
        r.critic_outputs.extraction = c.at("extraction").get<std::vector<std::string>>();
        r.critic_outputs.compile = c.at("compile").get<std::vector<std::string>>();
        r.critic_outputs.verify = c.at("verify").get<std::vector<std::string>>();
        r.critic_outputs.quality = c.at("quality").get<std::vector<std::string>>();
        r.failure_class = failure_from(j.at("failure_class"));
        r.provenance = key_from(j.at("provenance"));
        r.human_annotations = j.at("human_annotations").get<std::vector<std::string>>();
        return r;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed feedback record: ") + e.what());
    }
}

template <>
PreferencePair record_from_json<PreferencePair>(const json& j) {
    check_schema(j);
    try {
        PreferencePair r;
        r.prompt = prompt_from(j.at("prompt"));
        r.prompt_fingerprint = j.at("prompt_fingerprint").get<std::string>();
        r.chosen = j.at("chosen").get<std::string>();
        r.rejected = j.at("rejected").get<std::string>();
        r.chosen_proved = j.at("chosen_evidence").at("proved").get<std::size_t>();
        r.chosen_total = j.at("chosen_evidence").at("total").get<std::size_t>();
        r.rejected_failure = failure_from(j.at("rejected_evidence"));
        r.chosen_from = key_from(j.at("chosen_from"));
        r.rejected_from = key_from(j.at("rejected_from"));
        return r;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed preference pair: ") + e.what());
    }
}

template <typename Record>
std::size_t write_records(const std::vector<Record>& records, const fs::path& path, RecordFormat format) {
    if (format != RecordFormat::JsonLines) {
        throw ContractError("unsupported record format");
    }
    const std::lock_guard lock(path_mutex(path));
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for appending", 0);
    }
    std::size_t written = 0;
    for (const auto& record : records) {
        out << to_json(record).dump() << '\n';
        out.flush();
        if (!out) {
            throw IoError("write to " + path.string() + " failed", written);
        }
        ++written;
    }
    return written;
}

template <typename Record>
std::vector<Record> read_records(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    std::vector<Record> out;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty()) {
            continue;
        }
        const json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw ParseError("dataset line is not valid JSON", number);
        }
        out.push_back(record_from_json<Record>(j));
    }
    return out;
}

template std::size_t write_records(const std::vector<SftRecord>&, const fs::path&, RecordFormat);
template std::size_t write_records(const std::vector<FeedbackRecord>&, const fs::path&, RecordFormat);
template std::size_t write_records(const std::vector<PreferencePair>&, const fs::path&, RecordFormat);
template std::vector<SftRecord> read_records(const fs::path&);
template std::vector<FeedbackRecord> read_records(const fs::path&);
template std::vector<PreferencePair> read_records(const fs::path&);

} // namespace specgen
