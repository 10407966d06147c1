#include <gtest/gtest.h>

#include <algorithm>
#include <regex>

#include "specgen/c_lexer.hpp"
#include "specgen/error.hpp"
#include "specgen/spec_model.hpp"
#include "test_support.hpp"

namespace specgen {
namespace {

using test::bundle_dir;
using test::read_text;
using test::TempDir;
using test::write_text;

std::size_t count_kind(const CaseBundle& b, SpecKind kind) {
    return static_cast<std::size_t>(
        std::count_if(b.specs.begin(), b.specs.end(), [&](const SpecItem& s) { return s.kind == kind; }));
}

TEST(SpecModel, ShippedBundlesHaveDocumentedShape) {
    struct Expect {
        const char* slug;
        const char* name;
        std::size_t hlnl, llnl, acsl;
        const char* function;
    };
    for (const auto& e : {Expect{"sfld", "SFLD", 1, 11, 10, "Sfld_10ms"}, Expect{"brak", "BRAK", 1, 17, 17, "Brak_10ms"},
                          Expect{"stee", "STEE", 1, 5, 5, "Stee_10ms"}}) {
        const CaseBundle b = load_bundle(bundle_dir(e.slug));
        EXPECT_EQ(b.name, e.name);
        EXPECT_EQ(count_kind(b, SpecKind::HLNL), e.hlnl) << e.slug;
        EXPECT_EQ(count_kind(b, SpecKind::LLNL), e.llnl) << e.slug;
        EXPECT_EQ(count_kind(b, SpecKind::ACSL), e.acsl) << e.slug;
        EXPECT_EQ(b.interface.function_name(), e.function);
        EXPECT_TRUE(b.reference_source.has_value());
        EXPECT_TRUE(validate_bundle(b).empty()) << e.slug;
    }
    EXPECT_EQ(load_bundle(bundle_dir("brak")).specs.size(), 35U);
}

TEST(SpecModel, BrakHighLevelRequirementWording) {
    const CaseBundle b = load_bundle(bundle_dir("brak"));
    const auto items = select_specs(b, SpecCombination{SpecKind::HLNL});
    ASSERT_EQ(items.size(), 1U);
    EXPECT_EQ(items[0].text, "If there is a brake light request, then the truck and trailer lights shall be activated.");
}

class BundleCopy : public ::testing::Test {
protected:
    void SetUp() override { std::filesystem::copy(bundle_dir("stee"), dir(), std::filesystem::copy_options::recursive); }
    [[nodiscard]] std::filesystem::path dir() const { return tmp_.path() / "stee"; }
    void edit_manifest(const std::string& from, const std::string& to) {
        std::string m = read_text(dir() / "manifest.toml");
        const auto pos = m.find(from);
        ASSERT_NE(pos, std::string::npos) << from;
        m.replace(pos, from.size(), to);
        write_text(dir() / "manifest.toml", m);
    }
    TempDir tmp_;
};

template <typename Fn>
std::string load_error_key(Fn&& fn) {
    try {
        fn();
    } catch (const LoadError& e) {
        return e.key();
    }
    return "<no error>";
}

TEST_F(BundleCopy, MissingHeaderEntryNamesHeaderKey) {
    edit_manifest("header = \"header.h\"\n", "");
    EXPECT_EQ(load_error_key([&] { (void)load_bundle(dir()); }), "header");
}

TEST_F(BundleCopy, MissingHeaderFileNamesHeaderKey) {
    std::filesystem::remove(dir() / "header.h");
    EXPECT_EQ(load_error_key([&] { (void)load_bundle(dir()); }), "header");
}

TEST_F(BundleCopy, MissingManifest) {
    std::filesystem::remove(dir() / "manifest.toml");
    EXPECT_EQ(load_error_key([&] { (void)load_bundle(dir()); }), "manifest");
}

TEST_F(BundleCopy, DuplicateSpecIdRejected) {
    edit_manifest("{ id = \"llnl_02\"", "{ id = \"llnl_01\"");
    EXPECT_EQ(load_error_key([&] { (void)load_bundle(dir()); }), "specs.LLNL[1]");
}

TEST_F(BundleCopy, EmptySpecSetRejected) {
    std::string m = read_text(dir() / "manifest.toml");
    m = m.substr(0, m.find("[specs]")) + "[specs]\n";
    write_text(dir() / "manifest.toml", m);
    EXPECT_EQ(load_error_key([&] { (void)load_bundle(dir()); }), "specs");
}

TEST_F(BundleCopy, UnknownKindRejected) {
    edit_manifest("HLNL = [", "XXL = [");
    EXPECT_EQ(load_error_key([&] { (void)load_bundle(dir()); }), "specs.XXL");
}

TEST_F(BundleCopy, EmptyReferenceIsAbsent) {
    write_text(dir() / "reference.c", "\n");
    EXPECT_FALSE(load_bundle(dir()).reference_source.has_value());
}

TEST_F(BundleCopy, CrlfNewlinesAreUnified) {
    write_text(dir() / "specs/hlnl_01.txt", "Line one.\r\nLine two.\r\n");
    const CaseBundle b = load_bundle(dir());
    EXPECT_EQ(b.specs.front().text, "Line one.\nLine two.");
}

TEST(SpecModel, SaveLoadRoundTrip) {
    const CaseBundle original = load_bundle(bundle_dir("brak"));
    TempDir tmp;
    save_bundle(original, tmp.path() / "copy");
    EXPECT_EQ(load_bundle(tmp.path() / "copy"), original);
}

TEST(SpecModel, MinimalBundleWithoutReference) {
    CaseBundle b;
    b.name = "MINI";
    b.interface.header_source = "typedef unsigned char tU08;\n";
    b.interface.globals_source = "tU08 out;\n";
    b.interface.function_signature = "void Mini(void);";
    b.interface.scheduler_note = "Called once.";
    b.acsl_contract = "/*@ assigns out; */\n";
    b.specs = {{"h", SpecKind::HLNL, "Set the output."},
               {"l", SpecKind::LLNL, "Assign 1 to out."},
               {"a", SpecKind::ACSL, "ensures out == 1;"}};
    TempDir tmp;
    save_bundle(b, tmp.path());
    const CaseBundle loaded = load_bundle(tmp.path());
    EXPECT_FALSE(loaded.reference_source.has_value());
    EXPECT_EQ(loaded.specs.size(), 3U);
    EXPECT_TRUE(validate_bundle(loaded).empty());
}

TEST(SpecModel, ValidationFindings) {
    CaseBundle b = load_bundle(bundle_dir("stee"));
    b.specs.erase(std::remove_if(b.specs.begin(), b.specs.end(),
                                 [](const SpecItem& s) { return s.kind == SpecKind::HLNL; }),
                  b.specs.end());
    b.specs.push_back({"acsl_99", SpecKind::ACSL, "the output is positive"});
    b.interface.function_signature = "void a(void); void b(void);";
    b.interface.scheduler_note.clear();
    const auto findings = validate_bundle(b);
    auto has = [&](const std::string& field) {
        return std::any_of(findings.begin(), findings.end(), [&](const ValidationFinding& f) { return f.field == field; });
    };
    EXPECT_TRUE(has("specs"));
    EXPECT_TRUE(has("specs[acsl_99].text"));
    EXPECT_TRUE(has("interface.function_signature"));
    EXPECT_TRUE(has("interface.scheduler_note"));
}

TEST(SpecCombinations, CanonicalTableOrder) {
    const auto combos = enumerate_combinations();
    std::vector<std::string> labels;
    for (const auto& c : combos) {
        labels.push_back(c.label());
    }
    const std::vector<std::string> expected{"ACSL",        "HLNL",       "LLNL", "ACSL + HLNL + LLNL",
                                            "HLNL + LLNL", "ACSL + LLNL", "ACSL + HLNL"};
    EXPECT_EQ(labels, expected);
    for (const auto& c : combos) {
        EXPECT_FALSE(c.kinds().empty());
    }
}

TEST(SpecCombinations, ParseIsOrderAndCaseInsensitive) {
    EXPECT_EQ(parse_combination("llnl + HLNL"), (SpecCombination{SpecKind::HLNL, SpecKind::LLNL}));
    EXPECT_EQ(parse_combination("ACSL+HLNL+LLNL"), (SpecCombination{SpecKind::ACSL, SpecKind::HLNL, SpecKind::LLNL}));
    EXPECT_FALSE(parse_combination("").has_value());
    EXPECT_FALSE(parse_combination("HLNL + XYZ").has_value());
    for (const auto& c : enumerate_combinations()) {
        EXPECT_EQ(parse_combination(c.label()), c);
        EXPECT_EQ(parse_combination(c.slug()), c);
    }
}

TEST(SpecCombinations, EmptyCombinationIsContractError) {
    EXPECT_THROW((void)SpecCombination({}), ContractError);
    EXPECT_THROW((void)SpecCombination::from_mask(0), ContractError);
    EXPECT_THROW((void)SpecCombination::from_mask(8), ContractError);
}

TEST(SelectSpecs, KindMajorWithBundleOrder) {
    const CaseBundle b = load_bundle(bundle_dir("sfld"));
    const auto all = select_specs(b, SpecCombination{SpecKind::ACSL, SpecKind::HLNL, SpecKind::LLNL});
    ASSERT_EQ(all.size(), b.specs.size());
    const auto acsl = select_specs(b, SpecCombination{SpecKind::ACSL});
    ASSERT_EQ(acsl.size(), 10U);
    for (std::size_t i = 0; i < acsl.size(); ++i) {
        EXPECT_EQ(acsl[i].id, "acsl_" + std::string(i < 9 ? "0" : "") + std::to_string(i + 1));
    }
    const auto mixed = select_specs(b, SpecCombination{SpecKind::ACSL, SpecKind::HLNL});
    ASSERT_EQ(mixed.size(), 11U);
    EXPECT_EQ(mixed.front().kind, SpecKind::HLNL);
    EXPECT_EQ(mixed.back().kind, SpecKind::ACSL);
}

TEST(DegradeGhosts, DocumentedExamples) {
    EXPECT_EQ(degrade_ghosts("//@ ghost tU08 gh_x;"), "tU08 gh_x;");
    EXPECT_EQ(degrade_ghosts("int a;\n/* plain */\n"), "int a;\n/* plain */\n");
    EXPECT_EQ(degrade_ghosts("/*@ ghost tU08 gh_a; */\n/*@ ghost tB gh_b; */"), "tU08 gh_a;\ntB gh_b;");
}

TEST(DegradeGhosts, GhostStatementsAndContractsUntouched) {
    const std::string text = "/*@ ghost gh_x = 1; */\n//@ ghost gh_y[0] = 2;\n/*@ ensures \\result == 0; */\n";
    EXPECT_EQ(degrade_ghosts(text), text);
}

TEST(DegradeGhosts, UnterminatedAnnotationIsParseError) {
    EXPECT_THROW((void)degrade_ghosts("/*@ ghost int x;"), ParseError);
}

// Oracle: removing exactly the annotation delimiters must yield the output,
// and the C tokens of every touched declaration are unchanged.
TEST(DegradeGhosts, OnlyDelimitersRemovedAndIdempotent) {
    const std::vector<std::string> inputs{
        read_text(bundle_dir("sfld") / "globals.h"),
        "//@ ghost tU08 gh_a;\nint keep;\n/*@ ghost const tB gh_b[4]; */\n",
        "void f(void)\n{\n    //@ ghost gh_a = 3;\n}\n//@ ghost unsigned long gh_c;\n",
    };
    const std::regex block_form(R"(/\*@ ghost ([^*]*;) \*/)");
    const std::regex line_decl(R"(//@ ghost ([A-Za-z_][A-Za-z0-9_ ]* [A-Za-z_][A-Za-z0-9_\[\]]*;))");
    for (const auto& in : inputs) {
        const std::string out = degrade_ghosts(in);
        std::string oracle = std::regex_replace(in, block_form, "$1");
        oracle = std::regex_replace(oracle, line_decl, "$1");
        EXPECT_EQ(out, oracle) << in;
        EXPECT_EQ(degrade_ghosts(out), out);
        // Declarations keep their semicolon count.
        EXPECT_EQ(std::count(in.begin(), in.end(), ';'), std::count(out.begin(), out.end(), ';'));
    }
}

TEST(DegradeGhosts, DegradedInterfaceDeclaresGhostsConcretely) {
    const CaseBundle b = load_bundle(bundle_dir("sfld"));
    const InterfaceContext i = b.degraded_interface();
    EXPECT_NE(i.globals_source.find("\ntU08 gh_lowCounter;\n"), std::string::npos);
    EXPECT_EQ(i.globals_source.find("ghost"), std::string::npos);
    EXPECT_EQ(i.function_signature, b.interface.function_signature);
}

TEST(InterfaceContext, FunctionNameFromSignature) {
    InterfaceContext i;
    i.function_signature = "void Brak_10ms(void);";
    EXPECT_EQ(i.function_name(), "Brak_10ms");
    i.function_signature = "static tU08 *lookup(const tU08 *table, tU16 n)";
    EXPECT_EQ(i.function_name(), "lookup");
    i.function_signature = "";
    EXPECT_EQ(i.function_name(), "");
}

} // namespace
} // namespace specgen
