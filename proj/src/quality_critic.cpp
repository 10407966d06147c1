#include "specgen/quality_critic.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <set>

#include "specgen/c_analysis.hpp"
#include "specgen/c_lexer.hpp"
#include "specgen/error.hpp"
#include "specgen/external_critics.hpp"

namespace specgen {

namespace {

constexpr std::size_t npos = std::string::npos;

constexpr auto kFlowBreakers = std::to_array<std::string_view>({"goto", "setjmp", "longjmp"});
constexpr auto kAllocators = std::to_array<std::string_view>({"malloc", "calloc", "realloc", "free", "alloca", "strdup"});
constexpr auto kRelops = std::to_array<std::string_view>({"<", "<=", ">", ">=", "!="});

template <std::size_t N>
bool one_of(const std::array<std::string_view, N>& set, std::string_view text) {
    return std::find(set.begin(), set.end(), text) != set.end();
}

std::string rstrip(std::string_view s) {
    std::size_t end = s.size();
    while (end > 0 && (s[end - 1] == ' ' || s[end - 1] == '\t' || s[end - 1] == '\r' || s[end - 1] == '\f' ||
                       s[end - 1] == '\v')) {
        --end;
    }
    return std::string(s.substr(0, end));
}

FunctionDef locate(const TokenStream& tokens, std::string_view function_name) {
    const auto defs = find_function_definitions(tokens);
    const FunctionDef* found = nullptr;
    for (const auto& def : defs) {
        if (def.name == function_name) {
            if (found != nullptr) {
                throw MetricError("function '" + std::string(function_name) + "' is defined more than once");
            }
            found = &def;
        }
    }
    if (found == nullptr) {
        throw MetricError("function '" + std::string(function_name) + "' not found");
    }
    if (found->body_close == npos) {
        throw MetricError("function '" + std::string(function_name) + "' has unbalanced braces");
    }
    return *found;
}

TokenStream tokenize_for_metric(std::string_view source) {
    try {
        return tokenize(source);
    } catch (const LexError& e) {
        throw MetricError(std::string("cannot tokenize source: ") + e.what());
    }
}

bool is_integer_literal(const Token& t) {
    if (t.kind != TokenKind::Literal || t.text.empty()) {
        return false;
    }
    const char c = t.text.front();
    if (c < '0' || c > '9') {
        return false;
    }
    const bool hex = t.text.size() > 1 && (t.text[1] == 'x' || t.text[1] == 'X');
    if (hex) {
        return t.text.find_first_of(".pP") == npos;
    }
    return t.text.find_first_of(".eE") == npos;
}

/// True when the token ends an operand, so a following `*` is binary.
bool ends_operand(const Token& t, const Declarations& decls) {
    switch (t.kind) {
    case TokenKind::Identifier:
        return !decls.is_type_name(t.text);
    case TokenKind::Literal:
        return true;
    case TokenKind::Punctuator:
        return t.is(")") || t.is("]") || t.is("++") || t.is("--");
    default:
        return false;
    }
}

class Checker {
public:
    Checker(std::string_view source, const InterfaceContext& interface, const CompileReport& compile)
        : source_(source), interface_(interface), compile_(compile), tokens_(tokenize(source)) {
        const std::string iface_text =
            interface.header_source + "\n" + interface.globals_source + "\n" + interface.function_signature + ";\n";
        try {
            iface_ = collect_declarations(tokenize(iface_text));
        } catch (const LexError&) {
            // An interface that does not lex contributes no declarations.
        }
        own_ = collect_declarations(tokens_);
        decls_ = iface_;
        decls_.merge(own_);
        defs_ = find_function_definitions(tokens_);
    }

    QualityReport run() {
        QualityReport report;
        // Only the candidate's own warnings count; the interface is fixed input.
        std::copy_if(compile_.warnings.begin(), compile_.warnings.end(), std::back_inserter(warnings_),
                     [](const Diagnostic& d) { return d.file == kCandidateFile; });
        report.compiler_warning_count = warnings_.size();

        rule1();
        rule2();
        rule3();
        report.loc = rule4();
        rule6();
        rule7();
        rule8();
        rule9();
        rule10();

        std::stable_sort(findings_.begin(), findings_.end(), [](const RuleFinding& a, const RuleFinding& b) {
            return a.line != b.line ? a.line < b.line : a.rule_id < b.rule_id;
        });
        report.findings = std::move(findings_);
        report.conforms = report.compiler_warning_count == 0 &&
                          std::none_of(report.findings.begin(), report.findings.end(),
                                       [](const RuleFinding& f) { return f.severity == Severity::Violation; });
        return report;
    }

private:
    void add(int rule, std::size_t line, std::string message) {
        const Severity sev = (rule == 6 || rule == 8) ? Severity::Advisory : Severity::Violation;
        findings_.push_back({rule, sev, line, std::move(message)});
    }

    [[nodiscard]] bool in_any_body(std::size_t index) const {
        return std::any_of(defs_.begin(), defs_.end(), [index](const FunctionDef& d) {
            return index > d.body_open && (d.body_close == npos || index < d.body_close);
        });
    }

    [[nodiscard]] std::size_t body_end(const FunctionDef& d) const {
        return d.body_close == npos ? tokens_.size() : d.body_close;
    }

    void rule1() {
        for (const auto& t : tokens_) {
            if ((t.kind == TokenKind::Keyword || t.kind == TokenKind::Identifier) && one_of(kFlowBreakers, t.text)) {
                add(1, t.line, "complex flow construct '" + t.text + "'");
            }
        }
        std::map<std::string, std::set<std::string>> calls;
        std::map<std::string, std::size_t> def_line;
        for (const auto& d : defs_) {
            def_line.emplace(d.name, tokens_[d.name_index].line);
            auto& out = calls[d.name];
            for (std::size_t i = d.body_open + 1; i + 1 < body_end(d); ++i) {
                if (tokens_[i].kind == TokenKind::Identifier && tokens_[i + 1].is("(")) {
                    out.insert(tokens_[i].text);
                }
            }
        }
        for (const auto& [name, line] : def_line) {
            std::set<std::string> seen;
            std::function<bool(const std::string&)> reaches = [&](const std::string& from) {
                const auto it = calls.find(from);
                if (it == calls.end()) {
                    return false;
                }
                for (const auto& callee : it->second) {
                    if (callee == name) {
                        return true;
                    }
                    if (calls.contains(callee) && seen.insert(callee).second && reaches(callee)) {
                        return true;
                    }
                }
                return false;
            };
            if (reaches(name)) {
                add(1, line, "recursion: '" + name + "' is part of a call cycle");
            }
        }
    }

    [[nodiscard]] bool bounded_condition(std::size_t begin, std::size_t end, std::size_t incr_begin,
                                         std::size_t incr_end) const {
        if (end - begin != 3) {
            return false;
        }
        const Token& lhs = tokens_[begin];
        const Token& op = tokens_[begin + 1];
        const Token& rhs = tokens_[begin + 2];
        if (!one_of(kRelops, op.text)) {
            return false;
        }
        auto is_bound = [&](const Token& t) {
            return is_integer_literal(t) || (t.kind == TokenKind::Identifier && decls_.is_constant(t.text));
        };
        const Token* var = nullptr;
        if (lhs.kind == TokenKind::Identifier && !decls_.is_constant(lhs.text) && is_bound(rhs)) {
            var = &lhs;
        } else if (rhs.kind == TokenKind::Identifier && !decls_.is_constant(rhs.text) && is_bound(lhs)) {
            var = &rhs;
        }
        if (var == nullptr) {
            return false;
        }
        for (std::size_t i = incr_begin; i < incr_end; ++i) {
            if (tokens_[i].is_ident(var->text)) {
                return true;
            }
        }
        return false;
    }

    void rule2() {
        for (std::size_t i = 0; i < tokens_.size(); ++i) {
            const Token& t = tokens_[i];
            if (t.kind != TokenKind::Keyword) {
                continue;
            }
            if (t.is("for")) {
                if (i + 1 >= tokens_.size() || !tokens_[i + 1].is("(")) {
                    continue;
                }
                const std::size_t close = matching_close(tokens_, i + 1);
                if (close == npos) {
                    continue;
                }
                std::vector<std::size_t> semis;
                int depth = 0;
                for (std::size_t k = i + 2; k < close; ++k) {
                    if (tokens_[k].is("(") || tokens_[k].is("[") || tokens_[k].is("{")) {
                        ++depth;
                    } else if (tokens_[k].is(")") || tokens_[k].is("]") || tokens_[k].is("}")) {
                        --depth;
                    } else if (depth == 0 && tokens_[k].is(";")) {
                        semis.push_back(k);
                    }
                }
                if (semis.size() != 2 || !bounded_condition(semis[0] + 1, semis[1], semis[1] + 1, close)) {
                    add(2, t.line, "for-loop condition is not a fixed bound on the loop variable");
                }
            } else if (t.is("do")) {
                add(2, t.line, "do-while loop has no syntactic fixed bound");
            } else if (t.is("while")) {
                if (i > 0 && tokens_[i - 1].is("}")) {
                    // Skip the trailing while of a do { ... } while (...);
                    std::size_t open = npos;
                    int depth = 0;
                    for (std::size_t k = i - 1; k != npos; --k) {
                        if (tokens_[k].is("}")) {
                            ++depth;
                        } else if (tokens_[k].is("{") && --depth == 0) {
                            open = k;
                            break;
                        }
                        if (k == 0) {
                            break;
                        }
                    }
                    if (open != npos && open > 0 && tokens_[open - 1].is("do")) {
                        continue;
                    }
                }
                add(2, t.line, "while loop has no syntactic fixed bound");
            }
        }
    }

    void rule3() {
        for (std::size_t i = 0; i + 1 < tokens_.size(); ++i) {
            const Token& t = tokens_[i];
            if (t.kind == TokenKind::Identifier && one_of(kAllocators, t.text) && tokens_[i + 1].is("(")) {
                add(3, t.line, "dynamic memory call '" + t.text + "'");
            }
        }
    }

    std::size_t rule4() {
        std::size_t target_loc = 0;
        const std::string target = interface_.function_name();
        for (const auto& d : defs_) {
            if (d.body_close == npos) {
                continue;
            }
            const std::string text(source_.substr(tokens_[d.first].offset,
                                                  tokens_[d.body_close].end() - tokens_[d.first].offset));
            const std::size_t loc = strip_comments_and_blanks(text).size();
            if (d.name == target || (target.empty() && &d == &defs_.front())) {
                target_loc = loc;
            }
            if (loc > kMaxFunctionLoc) {
                add(4, tokens_[d.name_index].line,
                    "function '" + d.name + "' has " + std::to_string(loc) + " lines (limit " +
                        std::to_string(kMaxFunctionLoc) + ")");
            }
        }
        return target_loc;
    }

    void rule6() {
        for (const auto& var : own_.variables) {
            if (!var.is_mutable) {
                continue;
            }
            std::vector<std::string> users;
            for (const auto& d : defs_) {
                for (std::size_t i = d.body_open + 1; i < body_end(d); ++i) {
                    if (tokens_[i].is_ident(var.name) && !(tokens_[i - 1].is(".") || tokens_[i - 1].is("->"))) {
                        users.push_back(d.name);
                        break;
                    }
                }
            }
            if (users.size() == 1) {
                add(6, var.line,
                    "file-scope variable '" + var.name + "' is only used by '" + users.front() +
                        "'; declare it at the smallest scope");
            }
        }
    }

    [[nodiscard]] bool statement_start(std::size_t i) const {
        if (i == 0) {
            return true;
        }
        const Token& prev = tokens_[i - 1];
        if (prev.is(";") || prev.is("{") || prev.is("}") || prev.is("else") || prev.is("do")) {
            return true;
        }
        if (prev.is(":")) {
            // Labels and case/default arms, not the ternary operator.
            if (i >= 3 && tokens_[i - 2].kind == TokenKind::Identifier &&
                (tokens_[i - 3].is(";") || tokens_[i - 3].is("{") || tokens_[i - 3].is("}"))) {
                return true;  // label
            }
            for (std::size_t k = i - 1; k-- > 0;) {
                const Token& t = tokens_[k];
                if (t.is("case") || t.is("default")) {
                    return true;
                }
                if (t.is(";") || t.is("{") || t.is("}") || t.is("?")) {
                    return false;
                }
            }
            return false;
        }
        if (prev.is(")")) {
            // Closing parenthesis of a control header.
            int depth = 0;
            for (std::size_t k = i - 1;; --k) {
                if (tokens_[k].is(")")) {
                    ++depth;
                } else if (tokens_[k].is("(") && --depth == 0) {
                    return k > 0 && (tokens_[k - 1].is("if") || tokens_[k - 1].is("while") ||
                                     tokens_[k - 1].is("for") || tokens_[k - 1].is("switch"));
                }
                if (k == 0) {
                    return false;
                }
            }
        }
        return false;
    }

    void rule7() {
        for (const auto& d : defs_) {
            const std::size_t end = body_end(d);
            for (std::size_t i = d.body_open + 1; i + 1 < end; ++i) {
                const Token& t = tokens_[i];
                if (t.kind != TokenKind::Identifier || !tokens_[i + 1].is("(") || !statement_start(i)) {
                    continue;
                }
                const std::size_t close = matching_close(tokens_, i + 1);
                if (close == npos || close + 1 >= end || !tokens_[close + 1].is(";")) {
                    continue;
                }
                if (decls_.non_void_functions.contains(t.text) && !decls_.void_functions.contains(t.text)) {
                    add(7, t.line, "return value of '" + t.text + "' is discarded; cast the call to (void) or use it");
                }
            }
        }
    }

    void rule8() {
        for (std::size_t i = 0; i < tokens_.size(); ++i) {
            const Token& t = tokens_[i];
            if (t.kind != TokenKind::Preprocessor) {
                continue;
            }
            const Directive d = parse_directive(t.text);
            if (d.name == "define" && d.function_like) {
                add(8, t.line, "function-like macro '" + d.macro + "'");
            }
            if (d.token_paste) {
                add(8, t.line, "token pasting in macro '" + d.macro + "'");
            }
            if (d.name == "if" || d.name == "ifdef" || d.name == "ifndef" || d.name == "elif") {
                const bool guard = d.name == "ifndef" && i + 1 < tokens_.size() &&
                                   tokens_[i + 1].kind == TokenKind::Preprocessor && [&] {
                                       const Directive next = parse_directive(tokens_[i + 1].text);
                                       return next.name == "define" && next.macro == d.macro;
                                   }();
                if (!guard) {
                    add(8, t.line, "conditional compilation '#" + d.name + "'");
                }
            }
        }
    }

    void rule9() {
        for (std::size_t i = 0; i + 1 < tokens_.size(); ++i) {
            const Token& t = tokens_[i];
            if (t.is("*") && tokens_[i + 1].is("*") && (i == 0 || !ends_operand(tokens_[i - 1], decls_))) {
                add(9, t.line, "multi-level pointer dereference or declarator");
                ++i;
                continue;
            }
            if (t.is("(") && i + 3 < tokens_.size() && tokens_[i + 1].is("*") &&
                tokens_[i + 2].kind == TokenKind::Identifier && tokens_[i + 3].is(")") && i + 4 < tokens_.size() &&
                tokens_[i + 4].is("(")) {
                add(9, t.line, "function pointer '" + tokens_[i + 2].text + "'");
                continue;
            }
            if (t.is("->")) {
                std::size_t arrows = 1;
                std::size_t j = i + 2;
                while (j < tokens_.size()) {
                    if (tokens_[j].is("->") || tokens_[j].is(".")) {
                        arrows += tokens_[j].is("->") ? 1 : 0;
                        j += 2;
                    } else if (tokens_[j].is("[")) {
                        const std::size_t close = matching_close(tokens_, j);
                        if (close == npos) {
                            break;
                        }
                        j = close + 1;
                    } else {
                        break;
                    }
                }
                if (arrows > 1) {
                    add(9, t.line, "pointer chain dereferences " + std::to_string(arrows) + " levels");
                }
                i = j - 1;
            }
        }
    }

    void rule10() {
        if (!warnings_.empty()) {
            add(10, warnings_.front().line,
                std::to_string(warnings_.size()) + " compiler warning(s) at the pedantic level");
        }
    }

    std::string_view source_;
    const InterfaceContext& interface_;
    const CompileReport& compile_;
    std::vector<Diagnostic> warnings_;
    TokenStream tokens_;
    Declarations iface_;
    Declarations own_;
    Declarations decls_;
    std::vector<FunctionDef> defs_;
    std::vector<RuleFinding> findings_;
};

} // namespace

std::vector<StrippedLine> strip_comments_and_blanks(std::string_view source) {
    const std::string blanked = blank_comments(source);
    std::vector<StrippedLine> out;
    std::size_t line = 1;
    std::size_t begin = 0;
    while (begin <= blanked.size()) {
        std::size_t end = blanked.find('\n', begin);
        if (end == npos) {
            end = blanked.size();
        }
        std::string text = rstrip(std::string_view(blanked).substr(begin, end - begin));
        if (text.find_first_not_of(" \t\f\v") != npos) {
            out.push_back({line, std::move(text)});
        }
        if (end == blanked.size()) {
            break;
        }
        begin = end + 1;
        ++line;
    }
    return out;
}

std::string extract_function(std::string_view source, std::string_view function_name) {
    const TokenStream tokens = tokenize_for_metric(source);
    const FunctionDef def = locate(tokens, function_name);
    const std::size_t begin = tokens[def.first].offset;
    return std::string(source.substr(begin, tokens[def.body_close].end() - begin));
}

std::size_t count_loc(std::string_view source, std::string_view function_name) {
    return strip_comments_and_blanks(extract_function(source, function_name)).size();
}

QualityReport check_power_of_10(std::string_view source, const InterfaceContext& interface,
                                const CompileReport& compile_report) {
    if (!compile_report.success) {
        throw ContractError("quality analysis requires a successfully compiled source");
    }
    return Checker(source, interface, compile_report).run();
}

} // namespace specgen
