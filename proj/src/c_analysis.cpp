#include "specgen/c_analysis.hpp"

#include <algorithm>
#include <array>
#include <string_view>

namespace specgen {

namespace {

constexpr std::size_t npos = std::string::npos;

constexpr std::array<std::string_view, 11> kAssignOps{"=",  "+=", "-=", "*=",  "/=", "%=",
                                                      "&=", "|=", "^=", "<<=", ">>="};

constexpr std::array<std::string_view, 6> kQualifiers{"extern", "static", "inline", "const", "volatile", "register"};

bool is_assign_op(const Token& t) {
    return t.kind == TokenKind::Punctuator &&
           std::find(kAssignOps.begin(), kAssignOps.end(), t.text) != kAssignOps.end();
}

bool is_qualifier(const Token& t) {
    return std::find(kQualifiers.begin(), kQualifiers.end(), t.text) != kQualifiers.end();
}

void collect_enum_constants(const TokenStream& tokens, std::size_t open, std::size_t close, Declarations& out) {
    int depth = 0;
    bool expect_name = true;
    for (std::size_t i = open + 1; i < close; ++i) {
        const Token& t = tokens[i];
        if (t.is("(") || t.is("[") || t.is("{")) {
            ++depth;
        } else if (t.is(")") || t.is("]") || t.is("}")) {
            --depth;
        } else if (depth == 0 && t.is(",")) {
            expect_name = true;
        } else if (depth == 0 && expect_name && t.kind == TokenKind::Identifier) {
            out.enum_constants.insert(t.text);
            expect_name = false;
        }
    }
}

/// Handles one file-scope statement `[begin, end)` that is not a function body.
void process_statement(const TokenStream& tokens, std::size_t begin, std::size_t end, Declarations& out) {
    if (begin >= end) {
        return;
    }
    // Index ranges at nesting depth 0 inside the statement.
    std::vector<std::size_t> top;
    int depth = 0;
    for (std::size_t i = begin; i < end; ++i) {
        const Token& t = tokens[i];
        if (t.kind == TokenKind::Punctuator && (t.is(")") || t.is("]") || t.is("}"))) {
            --depth;
            if (depth == 0) {
                top.push_back(i);
            }
            continue;
        }
        if (depth == 0) {
            top.push_back(i);
        }
        if (t.kind == TokenKind::Punctuator && (t.is("(") || t.is("[") || t.is("{"))) {
            ++depth;
        }
    }

    if (tokens[begin].is("typedef")) {
        for (std::size_t i = begin; i + 3 < end; ++i) {
            if (tokens[i].is("(") && tokens[i + 1].is("*") && tokens[i + 2].kind == TokenKind::Identifier &&
                tokens[i + 3].is(")")) {
                out.typedef_names.insert(tokens[i + 2].text);
                return;
            }
        }
        for (auto it = top.rbegin(); it != top.rend(); ++it) {
            if (tokens[*it].kind == TokenKind::Identifier) {
                out.typedef_names.insert(tokens[*it].text);
                return;
            }
        }
        return;
    }

    // Function prototype: identifier directly followed by "(" at depth 0, before any "=".
    for (std::size_t k = 0; k + 1 < top.size(); ++k) {
        const Token& t = tokens[top[k]];
        if (t.is("=")) {
            break;
        }
        if (t.kind == TokenKind::Identifier && tokens[top[k] + 1].is("(") &&
            !(top[k] > begin && tokens[top[k] - 1].is("*") && top[k] >= begin + 2 &&
              tokens[top[k] - 2].is("("))) {
            std::vector<std::string> ret;
            for (std::size_t i = begin; i < top[k]; ++i) {
                if (!is_qualifier(tokens[i])) {
                    ret.push_back(tokens[i].text);
                }
            }
            if (ret.size() == 1 && ret.front() == "void") {
                out.void_functions.insert(t.text);
            } else {
                out.non_void_functions.insert(t.text);
            }
            return;
        }
    }

    // Variable declaration(s). Declarators follow the last aggregate body, if any.
    std::size_t decl_start = 0;
    for (std::size_t k = 0; k < top.size(); ++k) {
        if (tokens[top[k]].is("=")) {
            break;
        }
        if (tokens[top[k]].is("}")) {
            decl_start = k + 1;
        }
    }
    // A const in the specifiers (before any pointer declarator) makes the object immutable.
    bool is_mutable = true;
    for (const std::size_t k : top) {
        if (tokens[k].is("*") || tokens[k].is("=")) {
            break;
        }
        if (tokens[k].is("const")) {
            is_mutable = false;
        }
    }
    std::string candidate;
    std::size_t candidate_line = 0;
    bool in_init = false;
    auto flush = [&] {
        if (!candidate.empty()) {
            out.variables.push_back({candidate, candidate_line, is_mutable});
        }
        candidate.clear();
        in_init = false;
    };
    for (std::size_t k = decl_start; k < top.size(); ++k) {
        const Token& t = tokens[top[k]];
        if (t.is(",")) {
            flush();
            continue;
        }
        if (t.is("=")) {
            in_init = true;
            continue;
        }
        if (in_init) {
            continue;
        }
        if (t.kind == TokenKind::Identifier) {
            const bool after_tag = top[k] > begin && (tokens[top[k] - 1].is("struct") ||
                                                      tokens[top[k] - 1].is("union") ||
                                                      tokens[top[k] - 1].is("enum"));
            if (!after_tag && !out.typedef_names.contains(t.text)) {
                candidate = t.text;
                candidate_line = t.line;
            }
        }
    }
    flush();
}

} // namespace

void Declarations::merge(const Declarations& other) {
    typedef_names.insert(other.typedef_names.begin(), other.typedef_names.end());
    object_macros.insert(other.object_macros.begin(), other.object_macros.end());
    function_macros.insert(other.function_macros.begin(), other.function_macros.end());
    enum_constants.insert(other.enum_constants.begin(), other.enum_constants.end());
    void_functions.insert(other.void_functions.begin(), other.void_functions.end());
    non_void_functions.insert(other.non_void_functions.begin(), other.non_void_functions.end());
    variables.insert(variables.end(), other.variables.begin(), other.variables.end());
}

std::vector<FunctionDef> find_function_definitions(const TokenStream& tokens) {
    std::vector<FunctionDef> defs;
    std::size_t i = 0;
    while (i < tokens.size()) {
        const Token& t = tokens[i];
        if (t.is("{")) {
            const std::size_t close = matching_close(tokens, i);
            if (close == npos) {
                break;
            }
            i = close + 1;
            continue;
        }
        if (t.kind == TokenKind::Identifier && i + 1 < tokens.size() && tokens[i + 1].is("(")) {
            const std::size_t params_close = matching_close(tokens, i + 1);
            if (params_close == npos) {
                break;
            }
            if (params_close + 1 < tokens.size() && tokens[params_close + 1].is("{")) {
                FunctionDef def;
                def.name = t.text;
                def.name_index = i;
                def.body_open = params_close + 1;
                def.body_close = matching_close(tokens, def.body_open);
                std::size_t first = i;
                while (first > 0) {
                    const Token& prev = tokens[first - 1];
                    if (prev.is(";") || prev.is("}") || prev.is("{") || prev.kind == TokenKind::Preprocessor) {
                        break;
                    }
                    --first;
                }
                def.first = first;
                defs.push_back(def);
                if (def.body_close == npos) {
                    break;
                }
                i = def.body_close + 1;
                continue;
            }
            i = params_close + 1;
            continue;
        }
        ++i;
    }
    return defs;
}

Declarations collect_declarations(const TokenStream& tokens) {
    Declarations out;
    std::size_t stmt_begin = 0;
    std::size_t i = 0;
    while (i < tokens.size()) {
        const Token& t = tokens[i];
        if (t.kind == TokenKind::Preprocessor) {
            const Directive d = parse_directive(t.text);
            if (d.name == "define" && !d.macro.empty()) {
                (d.function_like ? out.function_macros : out.object_macros).insert(d.macro);
            }
            process_statement(tokens, stmt_begin, i, out);
            stmt_begin = ++i;
            continue;
        }
        if (t.is(";")) {
            process_statement(tokens, stmt_begin, i, out);
            stmt_begin = ++i;
            continue;
        }
        if (t.is("(")) {
            const std::size_t close = matching_close(tokens, i);
            if (close == npos) {
                break;
            }
            // Function definition?
            if (close + 1 < tokens.size() && tokens[close + 1].is("{") && i > 0 &&
                tokens[i - 1].kind == TokenKind::Identifier) {
                process_statement(tokens, stmt_begin, close + 1, out);
                const std::size_t body_close = matching_close(tokens, close + 1);
                if (body_close == npos) {
                    break;
                }
                i = body_close + 1;
                stmt_begin = i;
                continue;
            }
            i = close + 1;
            continue;
        }
        if (t.is("{")) {
            const std::size_t close = matching_close(tokens, i);
            if (close == npos) {
                break;
            }
            if (std::any_of(tokens.begin() + static_cast<std::ptrdiff_t>(stmt_begin),
                            tokens.begin() + static_cast<std::ptrdiff_t>(i), [](const Token& x) { return x.is("enum"); })) {
                collect_enum_constants(tokens, i, close, out);
            }
            i = close + 1;
            continue;
        }
        ++i;
    }
    process_statement(tokens, stmt_begin, tokens.size(), out);
    return out;
}

std::set<std::string> written_globals(const TokenStream& tokens, const FunctionDef& def,
                                      const std::set<std::string>& globals) {
    std::set<std::string> out;
    const std::size_t end = def.body_close == npos ? tokens.size() : def.body_close;
    for (std::size_t i = def.body_open + 1; i < end; ++i) {
        const Token& t = tokens[i];
        if (t.kind != TokenKind::Identifier || !globals.contains(t.text)) {
            continue;
        }
        if (i > 0 && (tokens[i - 1].is(".") || tokens[i - 1].is("->"))) {
            continue;  // member name, not a variable
        }
        if (i > 0 && (tokens[i - 1].is("++") || tokens[i - 1].is("--"))) {
            out.insert(t.text);
            continue;
        }
        if (i >= 2 && tokens[i - 1].is("&") &&
            (tokens[i - 2].is("(") || tokens[i - 2].is(",") || tokens[i - 2].is("=") || tokens[i - 2].is("return"))) {
            out.insert(t.text);
            continue;
        }
        // Walk the postfix chain: .member, ->member, [index]
        std::size_t j = i + 1;
        while (j < end) {
            if ((tokens[j].is(".") || tokens[j].is("->")) && j + 1 < end) {
                j += 2;
            } else if (tokens[j].is("[")) {
                const std::size_t close = matching_close(tokens, j);
                if (close == npos) {
                    break;
                }
                j = close + 1;
            } else {
                break;
            }
        }
        if (j < end && (is_assign_op(tokens[j]) || tokens[j].is("++") || tokens[j].is("--"))) {
            out.insert(t.text);
        }
    }
    return out;
}

} // namespace specgen
