#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace specgen {

enum class TokenKind { Identifier, Keyword, Punctuator, Literal, Preprocessor };

/// One C token. Comments and whitespace never produce tokens.
/// `line` and `column` are 1-based; `offset` is the byte offset into the source.
struct Token {
    TokenKind kind{TokenKind::Punctuator};
    std::string text;
    std::size_t line{0};
    std::size_t column{0};
    std::size_t offset{0};
    std::size_t length{0};

    [[nodiscard]] bool is(std::string_view s) const noexcept { return text == s; }
    [[nodiscard]] bool is_ident(std::string_view s) const noexcept {
        return kind == TokenKind::Identifier && text == s;
    }
    [[nodiscard]] std::size_t end() const noexcept { return offset + length; }
};

using TokenStream = std::vector<Token>;

/// Tokenizes C99 source. A preprocessor directive (including backslash
/// continuations) becomes a single Preprocessor token whose text has comments
/// replaced by a space. Throws LexError on unterminated comments or literals.
[[nodiscard]] TokenStream tokenize(std::string_view source);

[[nodiscard]] bool is_c_keyword(std::string_view word) noexcept;

/// Returns `source` with every comment replaced by one space. Newlines inside
/// block comments are kept so line numbers do not move. Literals are untouched.
[[nodiscard]] std::string blank_comments(std::string_view source);

/// Parsed view of a Preprocessor token.
struct Directive {
    std::string name;        // "define", "ifndef", ...
    std::string macro;       // first identifier after the name, if any
    bool function_like{false};
    bool token_paste{false};
};

[[nodiscard]] Directive parse_directive(std::string_view text);

/// Index of the token closing the bracket opened at `open`, or npos.
[[nodiscard]] std::size_t matching_close(const TokenStream& tokens, std::size_t open);

} // namespace specgen
