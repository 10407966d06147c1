#include <gtest/gtest.h>

#include <cstdlib>

#include "specgen/error.hpp"
#include "specgen/prompt_builder.hpp"
#include "test_support.hpp"

namespace specgen {
namespace {

using test::bundle_dir;
using test::golden;
using test::read_text;

bool update_golden() {
    const char* v = std::getenv("SPECGEN_UPDATE_GOLDEN");
    return v != nullptr && std::string_view(v) == "1";
}

void expect_golden(const std::string& actual, const std::string& name) {
    const auto path = golden(name);
    if (update_golden()) {
        test::write_text(path, actual);
        GTEST_SKIP() << "golden file regenerated: " << path;
    }
    ASSERT_TRUE(std::filesystem::exists(path)) << path;
    EXPECT_EQ(actual, read_text(path)) << "prompt drifted from " << path;
}

TEST(PromptBuilder, SystemPromptOpening) {
    const std::string s = build_system_prompt();
    EXPECT_TRUE(s.starts_with("You are an experienced verification engineer with expertise in safe embedded C "
                              "programming"));
    EXPECT_NE(s.find("- (Use a minimum of two runtime assertions per function.)\n"), std::string::npos);
    EXPECT_NE(s.find("- Do not alter the provided specifications.\n"), std::string::npos);
}

TEST(PromptBuilder, RulesListedInOrderWithRuleFiveInactive) {
    const auto& rules = coding_rules();
    ASSERT_EQ(rules.size(), 10U);
    const std::string s = build_system_prompt();
    std::size_t last = 0;
    for (std::size_t i = 0; i < rules.size(); ++i) {
        EXPECT_EQ(rules[i].number, static_cast<int>(i + 1));
        EXPECT_EQ(rules[i].active, rules[i].number != 5);
        const auto pos = s.find(rules[i].text);
        ASSERT_NE(pos, std::string::npos) << rules[i].number;
        EXPECT_GT(pos, last);
        last = pos;
    }
}

TEST(PromptBuilder, BrakHighLevelGolden) {
    const CaseBundle b = load_bundle(bundle_dir("brak"));
    const auto items = select_specs(b, SpecCombination{SpecKind::HLNL});
    expect_golden(build_system_prompt(), "brak_system.txt");
    expect_golden(build_user_prompt(items, b.interface, true), "brak_user_hlnl.txt");
}

TEST(PromptBuilder, BrakHighLevelStructure) {
    const CaseBundle b = load_bundle(bundle_dir("brak"));
    const std::string u = build_user_prompt(select_specs(b, SpecCombination{SpecKind::HLNL}), b.interface, true);
    EXPECT_TRUE(u.starts_with(
        "Generate the C code for a function that implements the following high-level specification.\n"
        "- If there is a brake light request, then the truck and trailer lights shall be activated.\n"));
    EXPECT_NE(u.find("//Header\n"), std::string::npos);
    EXPECT_NE(u.find("//Input variables\n"), std::string::npos);
    EXPECT_NE(u.find("//Function\nvoid Brak_10ms(void);\n"), std::string::npos);
    EXPECT_NE(u.find(b.interface.scheduler_note), std::string::npos);
    EXPECT_TRUE(u.ends_with(std::string(kCotTrigger) + "\n"));
}

TEST(PromptBuilder, CotTriggerOptional) {
    const CaseBundle b = load_bundle(bundle_dir("stee"));
    const auto items = select_specs(b, SpecCombination{SpecKind::LLNL});
    const std::string with = build_user_prompt(items, b.interface, true);
    const std::string without = build_user_prompt(items, b.interface, false);
    EXPECT_EQ(without.find(kCotTrigger), std::string::npos);
    EXPECT_EQ(with, without + "\n" + std::string(kCotTrigger) + "\n");
}

TEST(PromptBuilder, AcslItemsFencedAndNaturalLanguageBulleted) {
    const CaseBundle b = load_bundle(bundle_dir("stee"));
    const auto items = select_specs(b, SpecCombination{SpecKind::ACSL, SpecKind::LLNL});
    const std::string u = build_user_prompt(items, b.interface, false);
    EXPECT_TRUE(u.starts_with("Generate the C code for a function that implements the following low-level and "
                              "ACSL specifications.\n"));
    for (const auto& item : items) {
        const std::string expect = item.kind == SpecKind::ACSL ? "```acsl\n" + item.text + "\n```\n" : "- " + item.text + "\n";
        EXPECT_NE(u.find(expect), std::string::npos) << item.id;
    }
    EXPECT_LT(u.find("Low-level specifications:"), u.find("ACSL specifications:"));
}

TEST(PromptBuilder, EmptySelectionIsContractError) {
    const CaseBundle b = load_bundle(bundle_dir("stee"));
    EXPECT_THROW((void)build_user_prompt({}, b.interface), ContractError);
}

TEST(PromptBuilder, PromptPairCombinesBoth) {
    const CaseBundle b = load_bundle(bundle_dir("sfld"));
    const auto items = select_specs(b, SpecCombination{SpecKind::HLNL});
    const PromptPair p = build_prompt_pair(items, b.interface, true);
    EXPECT_EQ(p.system_text, build_system_prompt());
    EXPECT_EQ(p.user_text, build_user_prompt(items, b.interface, true));
}

TEST(PromptBuilder, FeedbackPromptCarriesFindingsVerbatim) {
    FeedbackBundle fb;
    fb.prior_code = "void f(void)\n{\n    x = 1\n}";
    fb.compile_findings = {"line 3: error: expected ';' before '}' token"};
    fb.unproved_goals = {"typed_f_ensures (timeout)"};
    fb.quality_findings = {"rule 2, line 4: while loop has no syntactic fixed bound"};
    fb.iteration = 2;
    const std::string p = build_feedback_prompt(fb);
    EXPECT_NE(p.find("iteration 2"), std::string::npos);
    EXPECT_NE(p.find("```c\n" + fb.prior_code + "\n```"), std::string::npos);
    for (const auto* s : {&fb.compile_findings[0], &fb.unproved_goals[0], &fb.quality_findings[0]}) {
        EXPECT_NE(p.find("- " + *s + "\n"), std::string::npos) << *s;
    }
}

TEST(PromptBuilder, FeedbackPreconditions) {
    FeedbackBundle fb;
    fb.prior_code = "int x;";
    EXPECT_THROW((void)build_feedback_prompt(fb), ContractError);
    fb.compile_findings = {"line 1: error: boom"};
    fb.iteration = 0;
    EXPECT_THROW((void)build_feedback_prompt(fb), ContractError);
    fb.iteration = 1;
    EXPECT_NO_THROW((void)build_feedback_prompt(fb));
}

} // namespace
} // namespace specgen
