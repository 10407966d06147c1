#include <gtest/gtest.h>

#include <thread>

#include "specgen/dataset_collector.hpp"
#include "specgen/error.hpp"
#include "specgen/reporting.hpp"
#include "test_support.hpp"

namespace specgen {
namespace {

using test::read_text;
using test::TempDir;

PromptPair prompt_for(const std::string& combo) { return {"system", "user prompt for " + combo}; }

CellResult make_cell(const std::string& model, const std::string& combo, Verdict v, unsigned sample = 0) {
    CellResult c;
    c.bundle_name = "Brak";
    c.model_id = model;
    c.combination_label = combo;
    c.sample_index = sample;
    c.verdict = v;
    c.prompt = prompt_for(combo);
    c.prompt_fingerprint = prompt_fingerprint(c.prompt);
    c.response_text = "response " + model;
    if (v == Verdict::ExtractFail) {
        c.extraction_error = "no fenced block defines Brak_10ms";
        return c;
    }
    if (v == Verdict::InfraError) {
        c.infra_detail = "verifier crashed";
        return c;
    }
    c.candidate = GeneratedCandidate{"void Brak_10ms(void) { /* " + model + " */ }", {}, sample};
    c.compile = CompileReport{v != Verdict::CompileFail, {}, {}, "gcc"};
    if (v == Verdict::CompileFail) {
        c.compile->errors.push_back({"candidate.c", 3, "expected ';'"});
        return c;
    }
    c.compile->warnings.push_back({"candidate.c", 2, "unused variable 'x'"});
    const std::size_t proved = v == Verdict::Pass ? 17 : 5;
    c.verification = VerificationReport{proved, 17, {}, "", "27.1"};
    if (v == Verdict::VerifyFail) {
        c.verification->goals.push_back({"typed_Brak_10ms_ensures_4", GoalStatus::Timeout});
    }
    c.equivalence = EquivalenceResult{v == Verdict::Pass ? EquivalenceVerdict::Equivalent : EquivalenceVerdict::NotShown,
                                      ""};
    c.quality = QualityReport{25, {}, 1, false};
    return c;
}

ResultSet sample_results() {
    ResultSet rs;
    rs.cells = {
        make_cell("gpt-4o", "HLNL", Verdict::CompileFail),
        make_cell("gpt-4o", "ACSL", Verdict::Pass),
        make_cell("gpt-4o", "LLNL", Verdict::VerifyFail),
        make_cell("gpt-3.5-turbo", "HLNL", Verdict::ExtractFail),
        make_cell("gpt-3.5-turbo", "ACSL", Verdict::InfraError),
        make_cell("gpt-3.5-turbo", "LLNL", Verdict::Pass),
    };
    rs.cells[1].equivalence->verdict = EquivalenceVerdict::ToolUnavailable;
    rs.validate();
    return rs;
}

TEST(ResultsTable, RowsFollowTableOrder) {
    const auto rows = table_rows(sample_results(), "Brak");
    ASSERT_EQ(rows.size(), 6U);
    // Model order is first appearance; combination order is the fixed table order.
    EXPECT_EQ(rows[0], (TableRow{"GPT-4o", "ACSL", "Yes", "—", "17 / 17", "25", true}));
    EXPECT_EQ(rows[1], (TableRow{"GPT-4o", "HLNL", "No", "n/a", "n/a", "n/a", false}));
    EXPECT_EQ(rows[2], (TableRow{"GPT-4o", "LLNL", "Yes", "Not Eq", "5 / 17", "25", false}));
    EXPECT_EQ(rows[3], (TableRow{"GPT-3.5-turbo", "ACSL", "n/a", "n/a", "n/a", "n/a", false}));
    EXPECT_EQ(rows[4], (TableRow{"GPT-3.5-turbo", "HLNL", "No", "n/a", "n/a", "n/a", false}));
    EXPECT_EQ(rows[5], (TableRow{"GPT-3.5-turbo", "LLNL", "Yes", "Eq", "17 / 17", "25", true}));
}

TEST(ResultsTable, ExplicitModelOrder) {
    const auto rs = sample_results();
    const auto rows = table_rows(rs, "Brak", std::vector<std::string>{"gpt-3.5-turbo"});
    ASSERT_EQ(rows.size(), 3U);
    EXPECT_EQ(rows[0].model, "GPT-3.5-turbo");
    EXPECT_TRUE(table_rows(rs, "Brak", std::vector<std::string>{}).empty());
}

TEST(ResultsTable, UnknownBundleNamesAvailableOnes) {
    try {
        (void)table_rows(sample_results(), "Sfld");
        FAIL() << "no error";
    } catch (const ContractError& e) {
        EXPECT_NE(std::string(e.what()).find("available: Brak"), std::string::npos) << e.what();
    }
}

TEST(ResultsTable, MarkdownAndCsv) {
    const auto rs = sample_results();
    const std::string md = render_results_table(rs, "Brak", TableFormat::Markdown);
    EXPECT_TRUE(md.starts_with("| Model | Specification Type | Compiled | Eq. Check | Verified (Proved Goals) | LoC |\n"
                               "|---|---|---|---|---|---|\n"));
    EXPECT_NE(md.find("| GPT-4o | ACSL | Yes | — | **17 / 17** ✔ | 25 |\n"), std::string::npos) << md;
    EXPECT_NE(md.find("| GPT-4o | LLNL | Yes | Not Eq | 5 / 17 | 25 |\n"), std::string::npos) << md;
    EXPECT_EQ(std::count(md.begin(), md.end(), '\n'), 8);

    const std::string csv = render_results_table(rs, "Brak", TableFormat::Csv);
    EXPECT_TRUE(csv.starts_with("model,specification_type,compiled,eq_check,verified,loc,fully_proved\n"));
    EXPECT_NE(csv.find("GPT-4o,ACSL,Yes,—,17 / 17,25,true\n"), std::string::npos) << csv;
    EXPECT_NE(csv.find("GPT-3.5-turbo,ACSL,n/a,n/a,n/a,n/a,false\n"), std::string::npos) << csv;
}

TEST(ResultsTable, OnlySampleZeroShown) {
    ResultSet rs;
    rs.cells = {make_cell("m", "HLNL", Verdict::CompileFail, 0), make_cell("m", "HLNL", Verdict::Pass, 1)};
    const auto rows = table_rows(rs, "Brak");
    ASSERT_EQ(rows.size(), 1U);
    EXPECT_EQ(rows[0].compiled, "No");
}

TEST(ResultsTable, DisplayNames) {
    EXPECT_EQ(display_model("gpt-4-turbo"), "GPT-4-turbo");
    EXPECT_EQ(display_model("llama-3"), "llama-3");
}

TEST(Summary, PerModelCounts) {
    const auto s = summarize_models(sample_results());
    ASSERT_EQ(s.size(), 2U);
    EXPECT_EQ(s[0].model, "gpt-4o");
    EXPECT_EQ(s[0].cells, 3U);
    EXPECT_EQ(s[0].evaluable, 3U);
    EXPECT_EQ(s[0].compiled, 2U);
    EXPECT_EQ(s[0].fully_verified, 1U);
    EXPECT_EQ(s[0].pass_at_1_hits, 1U);
    EXPECT_EQ(s[0].pass_at_1_cells, 3U);
    EXPECT_DOUBLE_EQ(*s[0].mean_loc, 25.0);
    EXPECT_EQ(s[1].evaluable, 2U);
    const std::string text = summarize(sample_results());
    EXPECT_NE(text.find("GPT-4o: 3 cells, 3 evaluable, 2 compiled, 1 fully verified, pass@1 = 1/3 (33.3%), mean LoC = 25.0"),
              std::string::npos)
        << text;
}

TEST(Summary, NothingEvaluable) {
    ResultSet rs;
    rs.cells = {make_cell("m", "HLNL", Verdict::InfraError)};
    const std::string text = summarize(rs);
    EXPECT_NE(text.find("0 evaluable cells; no metrics computed."), std::string::npos) << text;
}

TEST(Collect, RecordsPerVerdict) {
    const ResultSet rs = sample_results();
    Annotations notes;
    notes[rs.cells[0].key()] = {"missing semicolon after call"};
    const CollectedRecords r = collect(rs, notes);
    ASSERT_EQ(r.sft.size(), 2U);
    ASSERT_EQ(r.feedback.size(), 3U);  // the InfraError cell contributes nothing
    EXPECT_EQ(r.sft[0].proved, 17U);
    EXPECT_EQ(r.sft[0].provenance, (CellKey{"Brak", "gpt-4o", "ACSL", 0, 0}));
    EXPECT_EQ(r.sft[0].compiler_warnings, std::vector<std::string>{"candidate.c:2: unused variable 'x'"});
    EXPECT_EQ(r.feedback[0].failure_class, FailureClass::Compile);
    EXPECT_EQ(r.feedback[0].human_annotations, notes.begin()->second);
    EXPECT_FALSE(r.feedback[0].critic_outputs.compile.empty());
    EXPECT_EQ(r.feedback[1].failure_class, FailureClass::Verify);
    EXPECT_EQ(r.feedback[1].critic_outputs.verify, std::vector<std::string>{"typed_Brak_10ms_ensures_4 (timeout)"});
    EXPECT_EQ(r.feedback[2].failure_class, FailureClass::Extract);
    EXPECT_EQ(r.feedback[2].code, "response gpt-3.5-turbo");
    EXPECT_EQ(r.feedback[2].critic_outputs.extraction.size(), 1U);
}

TEST(Collect, PreferencePairsShareFingerprint) {
    const auto pairs = build_preference_pairs(sample_results());
    // ACSL: one Pass, the other cell is InfraError (excluded). LLNL: Pass x VerifyFail.
    ASSERT_EQ(pairs.size(), 1U);
    EXPECT_EQ(pairs[0].chosen_from.model, "gpt-3.5-turbo");
    EXPECT_EQ(pairs[0].rejected_from.model, "gpt-4o");
    EXPECT_EQ(pairs[0].rejected_failure, FailureClass::Verify);
    EXPECT_EQ(pairs[0].prompt_fingerprint, prompt_fingerprint(prompt_for("LLNL")));
    EXPECT_NE(pairs[0].chosen, pairs[0].rejected);
}

TEST(Datasets, JsonlRoundTrip) {
    const ResultSet rs = sample_results();
    const CollectedRecords r = collect(rs);
    const auto pairs = build_preference_pairs(rs);
    TempDir tmp;
    EXPECT_EQ(write_records(r.sft, tmp.path() / kSftFile), 2U);
    EXPECT_EQ(write_records(r.feedback, tmp.path() / kFeedbackFile), 3U);
    EXPECT_EQ(write_records(pairs, tmp.path() / kPreferenceFile), 1U);
    EXPECT_EQ(read_records<SftRecord>(tmp.path() / kSftFile), r.sft);
    EXPECT_EQ(read_records<FeedbackRecord>(tmp.path() / kFeedbackFile), r.feedback);
    EXPECT_EQ(read_records<PreferencePair>(tmp.path() / kPreferenceFile), pairs);

    const std::string text = read_text(tmp.path() / kSftFile);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
    EXPECT_TRUE(text.starts_with("{\"schema_version\":1,"));
}

TEST(Datasets, AppendsAreSerialized) {
    const CollectedRecords r = collect(sample_results());
    TempDir tmp;
    const auto path = tmp.path() / kFeedbackFile;
    {
        std::vector<std::jthread> writers;
        for (int i = 0; i < 4; ++i) {
            writers.emplace_back([&] { (void)write_records(r.feedback, path); });
        }
    }
    EXPECT_EQ(read_records<FeedbackRecord>(path).size(), 12U);
}

TEST(Datasets, ReadErrors) {
    TempDir tmp;
    EXPECT_THROW((void)read_records<SftRecord>(tmp.path() / "missing.jsonl"), IoError);
    test::write_text(tmp.path() / "bad.jsonl", "{\"schema_version\":1}\nnot json\n");
    EXPECT_THROW((void)read_records<SftRecord>(tmp.path() / "bad.jsonl"), ParseError);
    test::write_text(tmp.path() / "old.jsonl", "{\"schema_version\":0}\n");
    EXPECT_THROW((void)read_records<SftRecord>(tmp.path() / "old.jsonl"), ParseError);
}

TEST(Datasets, WriteFailureReportsCount) {
    const CollectedRecords r = collect(sample_results());
    try {
        (void)write_records(r.sft, "/proc/specgen-cannot-write/sft.jsonl");
        FAIL() << "no error";
    } catch (const IoError& e) {
        EXPECT_EQ(e.written(), 0U);
    }
}

TEST(Datasets, Annotations) {
    TempDir tmp;
    const auto path = tmp.path() / "notes.jsonl";
    test::write_text(path, "{\"bundle\":\"Brak\",\"model\":\"gpt-4o\",\"combination\":\"HLNL\",\"sample_index\":0,"
                           "\"note\":\"a\"}\n\n{\"bundle\":\"Brak\",\"model\":\"gpt-4o\",\"combination\":\"HLNL\","
                           "\"sample_index\":0,\"note\":\"b\"}\n");
    const Annotations a = load_annotations(path);
    ASSERT_EQ(a.size(), 1U);
    EXPECT_EQ(a.begin()->first, make_cell("gpt-4o", "HLNL", Verdict::CompileFail).key());
    EXPECT_EQ(a.begin()->second, (std::vector<std::string>{"a", "b"}));
    test::write_text(path, "{\"bundle\":\"Brak\"}\n");
    EXPECT_THROW((void)load_annotations(path), ParseError);
    EXPECT_THROW((void)load_annotations(tmp.path() / "missing"), IoError);
}

TEST(Datasets, FailureClassNames) {
    for (const auto f : {FailureClass::Compile, FailureClass::Verify, FailureClass::Extract}) {
        EXPECT_EQ(parse_failure_class(to_string(f)), f);
    }
}

} // namespace
} // namespace specgen
