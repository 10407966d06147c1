#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "specgen/spec_model.hpp"

namespace specgen {

struct PromptPair {
    std::string system_text;
    std::string user_text;

    bool operator==(const PromptPair&) const = default;
};

/// Critic output fed back to the model after a failed attempt.
struct FeedbackBundle {
    std::string prior_code;
    std::vector<std::string> compile_findings;
    std::vector<std::string> unproved_goals;
    std::vector<std::string> quality_findings;
    unsigned iteration{1};
};

struct CodingRule {
    int number;
    std::string_view text;
    bool active;
};

/// The ten safety-critical coding rules; rule 5 is listed but inactive.
[[nodiscard]] const std::vector<CodingRule>& coding_rules();

inline constexpr std::string_view kCotTrigger = "Let's think step by step";

[[nodiscard]] std::string build_system_prompt();

/// Throws ContractError when `selection` is empty.
[[nodiscard]] std::string build_user_prompt(const std::vector<SpecItem>& selection, const InterfaceContext& interface,
                                             bool cot = true);

[[nodiscard]] PromptPair build_prompt_pair(const std::vector<SpecItem>& selection, const InterfaceContext& interface,
                                           bool cot = true);

/// Throws ContractError when every finding list is empty or iteration is 0.
[[nodiscard]] std::string build_feedback_prompt(const FeedbackBundle& feedback);

} // namespace specgen
