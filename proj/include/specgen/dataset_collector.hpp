#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "specgen/pipeline.hpp"

namespace specgen {

inline constexpr int kDatasetSchemaVersion = 1;

enum class FailureClass { Compile, Verify, Extract };

[[nodiscard]] const char* to_string(FailureClass failure) noexcept;
[[nodiscard]] std::optional<FailureClass> parse_failure_class(std::string_view text) noexcept;

/// Where a record came from.
struct CellKey {
    std::string bundle;
    std::string model;
    std::string combination;
    unsigned sample_index{0};
    unsigned iterations_used{0};

    bool operator==(const CellKey&) const = default;
};

struct SftRecord {
    PromptPair prompt;
    std::string prompt_fingerprint;
    std::string combination_label;
    std::string code;
    std::size_t proved{0};
    std::size_t total{0};
    CellKey provenance;
    std::vector<std::string> compiler_warnings;

    bool operator==(const SftRecord&) const = default;
};

struct CriticOutputs {
    std::vector<std::string> extraction;
    std::vector<std::string> compile;
    std::vector<std::string> verify;
    std::vector<std::string> quality;

    bool operator==(const CriticOutputs&) const = default;
};

struct FeedbackRecord {
    PromptPair prompt;
    std::string prompt_fingerprint;
    std::string combination_label;
    std::string code;
    CriticOutputs critic_outputs;
    FailureClass failure_class{FailureClass::Compile};
    CellKey provenance;
    std::vector<std::string> human_annotations;

    bool operator==(const FeedbackRecord&) const = default;
};

struct PreferencePair {
    PromptPair prompt;
    std::string prompt_fingerprint;
    std::string chosen;
    std::string rejected;
    std::size_t chosen_proved{0};
    std::size_t chosen_total{0};
    FailureClass rejected_failure{FailureClass::Compile};
    CellKey chosen_from;
    CellKey rejected_from;

    bool operator==(const PreferencePair&) const = default;
};

/// Human review notes keyed by CellResult::key().
using Annotations = std::map<std::string, std::vector<std::string>>;

/// Reads a JSONL sidecar of {"bundle","model","combination","sample_index","note"} lines.
/// Throws IoError when unreadable, ParseError on a malformed line.
[[nodiscard]] Annotations load_annotations(const std::filesystem::path& path);

struct CollectedRecords {
    std::vector<SftRecord> sft;
    std::vector<FeedbackRecord> feedback;
};

/// One SftRecord per Pass cell and one FeedbackRecord per CompileFail,
/// VerifyFail or ExtractFail cell. InfraError cells contribute nothing.
[[nodiscard]] CollectedRecords collect(const ResultSet& results, const Annotations& annotations = {});

/// Every Pass × non-Pass pairing among evaluated cells sharing a prompt fingerprint.
[[nodiscard]] std::vector<PreferencePair> build_preference_pairs(const ResultSet& results);

[[nodiscard]] nlohmann::ordered_json to_json(const SftRecord& record);
[[nodiscard]] nlohmann::ordered_json to_json(const FeedbackRecord& record);
[[nodiscard]] nlohmann::ordered_json to_json(const PreferencePair& record);

/// Inverse of to_json. Throws ParseError on a wrong schema version or layout.
template <typename Record>
[[nodiscard]] Record record_from_json(const nlohmann::json& j);

enum class RecordFormat { JsonLines };

/// Appends one JSON line per record (creating the file) and returns the count.
/// Appends to the same path are serialized. Throws IoError carrying the number
/// of records written before the failure.
template <typename Record>
std::size_t write_records(const std::vector<Record>& records, const std::filesystem::path& path,
                          RecordFormat format = RecordFormat::JsonLines);

/// Reads every line of a JSONL dataset file.
template <typename Record>
[[nodiscard]] std::vector<Record> read_records(const std::filesystem::path& path);

inline constexpr std::string_view kSftFile = "sft.jsonl";
inline constexpr std::string_view kFeedbackFile = "feedback.jsonl";
inline constexpr std::string_view kPreferenceFile = "preference_pairs.jsonl";

} // namespace specgen
