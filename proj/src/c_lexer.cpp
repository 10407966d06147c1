#include "specgen/c_lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "specgen/error.hpp"

namespace specgen {

namespace {

constexpr auto kKeywords = std::to_array<std::string_view>({
    "auto",     "break",    "case",     "char",   "const",    "continue", "default",  "do",
    "double",   "else",     "enum",     "extern", "float",    "for",      "goto",     "if",
    "inline",   "int",      "long",     "register", "restrict", "return", "short",    "signed",
    "sizeof",   "static",   "struct",   "switch", "typedef",  "union",    "unsigned", "void",
    "volatile", "while",    "_Bool",    "_Complex", "_Imaginary"});

// Longest first so that the greedy match picks e.g. "<<=" over "<<".
constexpr auto kPunctuators = std::to_array<std::string_view>({
    "%:%:", "...", "<<=", ">>=", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "*=",
    "/=",   "%=",  "+=",  "-=",  "&=", "^=", "|=", "##", "<:", ":>", "<%", "%>", "%:", "[",  "]",  "(",
    ")",    "{",   "}",   ".",   "&",  "*",  "+",  "-",  "~",  "!",  "/",  "%",  "<",  ">",  "^"});

constexpr auto kSinglePunct = std::to_array<std::string_view>({"|", "?", ":", ";", "=", ",", "#"});

bool is_ident_start(char c) noexcept {
    return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool is_ident_char(char c) noexcept {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

class Scanner {
public:
    explicit Scanner(std::string_view src) : src_(src) {}

    [[nodiscard]] bool done() const noexcept { return pos_ >= src_.size(); }
    [[nodiscard]] char peek(std::size_t ahead = 0) const noexcept {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }
    [[nodiscard]] bool starts_with(std::string_view s) const noexcept {
        return src_.substr(pos_).starts_with(s);
    }

    void advance(std::size_t count = 1) noexcept {
        for (std::size_t i = 0; i < count && pos_ < src_.size(); ++i) {
            if (src_[pos_] == '\n') {
                ++line_;
                column_ = 1;
            } else {
                ++column_;
            }
            ++pos_;
        }
    }

    /// Consumes a block comment starting at "/*". Returns the newlines it spanned.
    std::size_t skip_block_comment() {
        const std::size_t start_line = line_;
        const auto close = src_.find("*/", pos_ + 2);
        if (close == std::string_view::npos) {
            throw LexError("unterminated block comment", start_line);
        }
        advance(close + 2 - pos_);
        return line_ - start_line;
    }

    void skip_line_comment() noexcept {
        while (!done() && peek() != '\n') {
            advance();
        }
    }

    /// Consumes a string or character literal starting at the opening quote.
    void skip_quoted() {
        const char quote = peek();
        const std::size_t start_line = line_;
        advance();
        while (true) {
            if (done() || peek() == '\n') {
                throw LexError(quote == '"' ? "unterminated string literal" : "unterminated character literal",
                               start_line);
            }
            if (peek() == '\\') {
                advance(2);
                continue;
            }
            if (peek() == quote) {
                advance();
                return;
            }
            advance();
        }
    }

    /// Like skip_quoted, but leaves the quote unconsumed and returns false
    /// when the literal does not close on the same line.
    bool try_skip_quoted() noexcept {
        const char quote = peek();
        for (std::size_t i = pos_ + 1; i < src_.size() && src_[i] != '\n'; ++i) {
            if (src_[i] == '\\') {
                ++i;
                continue;
            }
            if (src_[i] == quote) {
                advance(i + 1 - pos_);
                return true;
            }
        }
        return false;
    }

    [[nodiscard]] std::size_t pos() const noexcept { return pos_; }
    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] std::size_t column() const noexcept { return column_; }
    [[nodiscard]] std::string_view source() const noexcept { return src_; }

private:
    std::string_view src_;
    std::size_t pos_{0};
    std::size_t line_{1};
    std::size_t column_{1};
};

bool is_literal_prefix(std::string_view word) noexcept {
    return word == "L" || word == "u" || word == "U" || word == "u8";
}

} // namespace

bool is_c_keyword(std::string_view word) noexcept {
    return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

TokenStream tokenize(std::string_view source) {
    TokenStream tokens;
    Scanner sc(source);
    bool line_start = true;

    auto push = [&](TokenKind kind, std::size_t start, std::size_t line, std::size_t col, std::string text) {
        tokens.push_back(Token{kind, std::move(text), line, col, start, sc.pos() - start});
    };

    while (!sc.done()) {
        const char c = sc.peek();
        if (c == '\n') {
            sc.advance();
            line_start = true;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c)) != 0) {
            sc.advance();
            continue;
        }
        if (sc.starts_with("//")) {
            sc.skip_line_comment();
            continue;
        }
        if (sc.starts_with("/*")) {
            sc.skip_block_comment();
            continue;
        }

        const std::size_t start = sc.pos();
        const std::size_t line = sc.line();
        const std::size_t col = sc.column();

        if (c == '#' && line_start) {
            std::string text;
            while (!sc.done()) {
                if (sc.peek() == '\\' && sc.peek(1) == '\n') {
                    text += ' ';
                    sc.advance(2);
                    continue;
                }
                if (sc.peek() == '\n') {
                    break;
                }
                if (sc.starts_with("//")) {
                    sc.skip_line_comment();
                    break;
                }
                if (sc.starts_with("/*")) {
                    sc.skip_block_comment();
                    text += ' ';
                    continue;
                }
                if (sc.peek() == '"' || sc.peek() == '\'') {
                    const std::size_t q = sc.pos();
                    if (sc.try_skip_quoted()) {
                        text.append(source.substr(q, sc.pos() - q));
                        continue;
                    }
                }
                text += sc.peek();
                sc.advance();
            }
            while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())) != 0) {
                text.pop_back();
            }
            push(TokenKind::Preprocessor, start, line, col, std::move(text));
            continue;
        }
        line_start = false;

        if (c == '"' || c == '\'') {
            sc.skip_quoted();
            push(TokenKind::Literal, start, line, col, std::string(source.substr(start, sc.pos() - start)));
            continue;
        }
        if (is_ident_start(c)) {
            while (!sc.done() && is_ident_char(sc.peek())) {
                sc.advance();
            }
            std::string word(source.substr(start, sc.pos() - start));
            if (is_literal_prefix(word) && (sc.peek() == '"' || sc.peek() == '\'')) {
                sc.skip_quoted();
                push(TokenKind::Literal, start, line, col, std::string(source.substr(start, sc.pos() - start)));
                continue;
            }
            const auto kind = is_c_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier;
            push(kind, start, line, col, std::move(word));
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) != 0 ||
            (c == '.' && std::isdigit(static_cast<unsigned char>(sc.peek(1))) != 0)) {
            while (!sc.done()) {
                const char d = sc.peek();
                if ((d == '+' || d == '-') && sc.pos() > start) {
                    const char prev = source[sc.pos() - 1];
                    if (prev == 'e' || prev == 'E' || prev == 'p' || prev == 'P') {
                        sc.advance();
                        continue;
                    }
                    break;
                }
                if (!is_ident_char(d) && d != '.') {
                    break;
                }
                sc.advance();
            }
            push(TokenKind::Literal, start, line, col, std::string(source.substr(start, sc.pos() - start)));
            continue;
        }

        bool matched = false;
        for (const auto p : kPunctuators) {
            if (sc.starts_with(p)) {
                sc.advance(p.size());
                push(TokenKind::Punctuator, start, line, col, std::string(p));
                matched = true;
                break;
            }
        }
        if (!matched) {
            for (const auto p : kSinglePunct) {
                if (sc.starts_with(p)) {
                    sc.advance(p.size());
                    push(TokenKind::Punctuator, start, line, col, std::string(p));
                    matched = true;
                    break;
                }
            }
        }
        if (!matched) {
            // Stray byte (e.g. '@' or '$'); keep it so positions stay meaningful.
            sc.advance();
            push(TokenKind::Punctuator, start, line, col, std::string(1, c));
        }
    }
    return tokens;
}

std::string blank_comments(std::string_view source) {
    std::string out;
    out.reserve(source.size());
    Scanner sc(source);
    bool line_start = true;
    bool in_directive = false;
    while (!sc.done()) {
        const char c = sc.peek();
        if (c == '\n') {
            if (!(in_directive && sc.pos() > 0 && source[sc.pos() - 1] == '\\')) {
                in_directive = false;
            }
            line_start = true;
            out += c;
            sc.advance();
            continue;
        }
        if (c == '#' && line_start) {
            in_directive = true;
        }
        if (std::isspace(static_cast<unsigned char>(c)) == 0) {
            line_start = false;
        }
        if (sc.starts_with("//")) {
            sc.skip_line_comment();
            out += ' ';
            continue;
        }
        if (sc.starts_with("/*")) {
            const std::size_t newlines = sc.skip_block_comment();
            out += ' ';
            out.append(newlines, '\n');
            continue;
        }
        if (c == '"' || c == '\'') {
            const std::size_t q = sc.pos();
            // A lone apostrophe in a directive such as #error is not a literal.
            if (in_directive) {
                if (sc.try_skip_quoted()) {
                    out.append(source.substr(q, sc.pos() - q));
                    continue;
                }
            } else {
                sc.skip_quoted();
                out.append(source.substr(q, sc.pos() - q));
                continue;
            }
        }
        out += c;
        sc.advance();
    }
    return out;
}

Directive parse_directive(std::string_view text) {
    Directive d;
    std::size_t i = 0;
    auto skip_ws = [&] {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) {
            ++i;
        }
    };
    skip_ws();
    if (i < text.size() && text[i] == '#') {
        ++i;
    }
    skip_ws();
    const std::size_t name_start = i;
    while (i < text.size() && is_ident_char(text[i])) {
        ++i;
    }
    d.name = std::string(text.substr(name_start, i - name_start));
    skip_ws();
    const std::size_t macro_start = i;
    if (i < text.size() && is_ident_start(text[i])) {
        while (i < text.size() && is_ident_char(text[i])) {
            ++i;
        }
        d.macro = std::string(text.substr(macro_start, i - macro_start));
        d.function_like = d.name == "define" && i < text.size() && text[i] == '(';
    }
    d.token_paste = d.name == "define" && text.find("##") != std::string_view::npos;
    return d;
}

std::size_t matching_close(const TokenStream& tokens, std::size_t open) {
    if (open >= tokens.size()) {
        return std::string::npos;
    }
    const std::string& o = tokens[open].text;
    const std::string_view c = o == "(" ? ")" : o == "[" ? "]" : o == "{" ? "}" : "";
    if (c.empty()) {
        return std::string::npos;
    }
    int depth = 0;
    for (std::size_t i = open; i < tokens.size(); ++i) {
        if (tokens[i].kind != TokenKind::Punctuator) {
            continue;
        }
        if (tokens[i].text == o) {
            ++depth;
        } else if (tokens[i].text == c) {
            if (--depth == 0) {
                return i;
            }
        }
    }
    return std::string::npos;
}

} // namespace specgen
