#include "specgen/prompt_builder.hpp"

#include <sstream>

#include "specgen/error.hpp"

namespace specgen {

namespace {

constexpr std::string_view kRoleParagraph =
    "You are an experienced verification engineer with expertise in safe embedded C programming and writing "
    "ANSI/ISO C Specification Language (ACSL) specifications for safety-critical systems. Your role is to analyze "
    "C programs with accompanying ACSL and natural language specifications. Produce complete C functions that "
    "satisfy the given specifications by following these guidelines:";

constexpr std::string_view kGuidelines[] = {
    "Do not alter the provided specifications.",
    "Do not explain or comment on the code you produce.",
    "Do not modify any provided header files.",
};

constexpr std::string_view kTaskParagraph =
    "When given a task, focus only on implementing the required C function that meet the specifications. "
    "Prioritize safety and correctness in your implementations, ensuring that your code not only meets the given "
    "specifications but also adheres to best practices for safety-critical systems by following the 10 Rules for "
    "Developing Safety-Critical Code.";

std::string_view kind_adjective(SpecKind kind) {
    switch (kind) {
    case SpecKind::HLNL: return "high-level";
    case SpecKind::LLNL: return "low-level";
    case SpecKind::ACSL: return "ACSL";
    }
    return "";
}

std::string group_heading(SpecKind kind, std::size_t count) {
    std::string out;
    switch (kind) {
    case SpecKind::HLNL: out = "High-level"; break;
    case SpecKind::LLNL: out = "Low-level"; break;
    case SpecKind::ACSL: out = "ACSL"; break;
    }
    return out + (count == 1 ? " specification:" : " specifications:");
}

void render_item(std::ostringstream& out, const SpecItem& item) {
    if (item.kind == SpecKind::ACSL) {
        out << "```acsl\n" << item.text << "\n```\n";
    } else {
        out << "- " << item.text << "\n";
    }
}

void render_findings(std::ostringstream& out, std::string_view heading, const std::vector<std::string>& findings) {
    if (findings.empty()) {
        return;
    }
    out << heading << "\n";
    for (const auto& f : findings) {
        out << "- " << f << "\n";
    }
    out << "\n";
}

} // namespace

const std::vector<CodingRule>& coding_rules() {
    static const std::vector<CodingRule> rules{
        {1, "Avoid complex flow constructs, such as goto and recursion.", true},
        {2, "All loops must have fixed bounds.", true},
        {3, "Do not use dynamic memory allocation after initialization.", true},
        {4, "Restrict size of function to around 60 LOC.", true},
        {5, "Use a minimum of two runtime assertions per function.", false},
        {6, "Restrict the scope of data to the smallest possible.", true},
        {7, "Check the return value of all non-void functions, or cast to void to indicate the return value is "
            "useless.",
         true},
        {8, "Use the preprocessor sparingly.", true},
        {9, "Limit pointer use to a single dereference, and do not use function pointers.", true},
        {10, "Compile with all possible warnings active; all warnings should then be addressed before release of "
             "the software.",
         true},
    };
    return rules;
}

std::string build_system_prompt() {
    std::ostringstream out;
    out << kRoleParagraph << "\n";
    for (const auto g : kGuidelines) {
        out << "- " << g << "\n";
    }
    out << "\n" << kTaskParagraph << "\n";
    for (const auto& rule : coding_rules()) {
        if (rule.active) {
            out << "- " << rule.text << "\n";
        } else {
            out << "- (" << rule.text << ")\n";
        }
    }
    return out.str();
}

std::string build_user_prompt(const std::vector<SpecItem>& selection, const InterfaceContext& interface, bool cot) {
    if (selection.empty()) {
        throw ContractError("build_user_prompt requires at least one specification item");
    }

    std::vector<SpecKind> kinds;
    for (const auto kind : kAllSpecKinds) {
        for (const auto& item : selection) {
            if (item.kind == kind) {
                kinds.push_back(kind);
                break;
            }
        }
    }

    std::string kind_phrase;
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        if (i > 0) {
            kind_phrase += i + 1 == kinds.size() ? " and " : ", ";
        }
        kind_phrase += kind_adjective(kinds[i]);
    }

    std::ostringstream out;
    out << "Generate the C code for a function that implements the following " << kind_phrase
        << (selection.size() == 1 ? " specification." : " specifications.") << "\n";
    for (const auto kind : kinds) {
        std::size_t count = 0;
        for (const auto& item : selection) {
            count += item.kind == kind ? 1 : 0;
        }
        if (kinds.size() > 1) {
            out << "\n" << group_heading(kind, count) << "\n";
        }
        for (const auto& item : selection) {
            if (item.kind == kind) {
                render_item(out, item);
            }
        }
    }

    if (!interface.scheduler_note.empty()) {
        out << "\n" << interface.scheduler_note << "\n";
    }

    out << "\n```c\n";
    out << "//Header\n" << interface.header_source;
    if (!interface.header_source.empty() && interface.header_source.back() != '\n') {
        out << "\n";
    }
    out << "\n" << interface.globals_source;
    if (!interface.globals_source.empty() && interface.globals_source.back() != '\n') {
        out << "\n";
    }
    out << "\n//Function\n" << interface.function_signature << "\n```\n";

    if (cot) {
        out << "\n" << kCotTrigger << "\n";
    }
    return out.str();
}

PromptPair build_prompt_pair(const std::vector<SpecItem>& selection, const InterfaceContext& interface, bool cot) {
    return PromptPair{build_system_prompt(), build_user_prompt(selection, interface, cot)};
}

std::string build_feedback_prompt(const FeedbackBundle& feedback) {
    if (feedback.iteration == 0) {
        throw ContractError("feedback iteration must be at least 1");
    }
    if (feedback.compile_findings.empty() && feedback.unproved_goals.empty() && feedback.quality_findings.empty()) {
        throw ContractError("feedback needs at least one finding");
    }

    std::ostringstream out;
    out << "Critic feedback for iteration " << feedback.iteration << ".\n\n";
    out << "The previous code did not pass all checks.\n\n";
    out << "Previous code:\n```c\n" << feedback.prior_code;
    if (!feedback.prior_code.empty() && feedback.prior_code.back() != '\n') {
        out << "\n";
    }
    out << "```\n\n";
    render_findings(out, "Compiler diagnostics:", feedback.compile_findings);
    render_findings(out, "Unproved verification goals:", feedback.unproved_goals);
    render_findings(out, "Code quality findings:", feedback.quality_findings);
    out << "Fix every issue listed above. Respond with the corrected, complete C function definition only.\n";
    return out.str();
}

} // namespace specgen
