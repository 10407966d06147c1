#include "specgen/spec_model.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "specgen/c_lexer.hpp"
#include "specgen/error.hpp"

namespace specgen {

namespace fs = std::filesystem;

namespace {

constexpr std::uint8_t bit(SpecKind kind) noexcept {
    return static_cast<std::uint8_t>(1U << static_cast<unsigned>(kind));
}

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])) != 0) {
        ++b;
    }
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])) != 0) {
        --e;
    }
    return std::string(s.substr(b, e - b));
}

std::string unify_newlines(std::string text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\r') {
            out += '\n';
            if (i + 1 < text.size() && text[i + 1] == '\n') {
                ++i;
            }
        } else {
            out += text[i];
        }
    }
    return out;
}

std::string strip_final_newlines(std::string text) {
    while (!text.empty() && text.back() == '\n') {
        text.pop_back();
    }
    return text;
}

std::string read_file(const fs::path& path, const std::string& key) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw LoadError(key, "cannot read file " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return unify_newlines(ss.str());
}

void write_file(const fs::path& path, std::string_view text) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << text;
}

/// True when `stmt` looks like `type-specifiers declarator [= init]`.
bool is_declaration(std::string_view stmt) {
    TokenStream tokens;
    try {
        tokens = tokenize(stmt);
    } catch (const LexError&) {
        return false;
    }
    std::size_t head = 0;
    for (; head < tokens.size(); ++head) {
        if (tokens[head].is("=") || tokens[head].is("[")) {
            break;
        }
        const bool word = tokens[head].kind == TokenKind::Identifier || tokens[head].kind == TokenKind::Keyword;
        if (!word && !tokens[head].is("*")) {
            return false;
        }
    }
    return head >= 2 && tokens[head - 1].kind == TokenKind::Identifier;
}

/// For an annotation body (text after '@'), returns the declarations when it is a
/// ghost declaration annotation, otherwise an empty string.
std::string ghost_declarations(std::string_view body) {
    const std::string text = trim(body);
    constexpr std::string_view kGhost = "ghost";
    if (!text.starts_with(kGhost) || text.size() <= kGhost.size() ||
        std::isspace(static_cast<unsigned char>(text[kGhost.size()])) == 0) {
        return {};
    }
    const std::string decls = trim(std::string_view(text).substr(kGhost.size()));
    if (decls.empty() || decls.back() != ';') {
        return {};
    }
    std::size_t start = 0;
    int depth = 0;
    for (std::size_t i = 0; i < decls.size(); ++i) {
        const char c = decls[i];
        if (c == '(' || c == '{' || c == '[') {
            ++depth;
        } else if (c == ')' || c == '}' || c == ']') {
            --depth;
        } else if (c == ';' && depth == 0) {
            if (!is_declaration(std::string_view(decls).substr(start, i - start))) {
                return {};
            }
            start = i + 1;
        }
    }
    return decls;
}

std::size_t count_declared_functions(std::string_view signature) {
    TokenStream tokens;
    try {
        tokens = tokenize(signature);
    } catch (const LexError&) {
        return 0;
    }
    std::size_t count = 0;
    int depth = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i].is("(")) {
            if (depth == 0 && i > 0 && tokens[i - 1].kind == TokenKind::Identifier) {
                ++count;
            }
            ++depth;
        } else if (tokens[i].is(")")) {
            --depth;
        }
    }
    return count;
}

bool contains_word(std::string_view text, std::string_view word) {
    std::size_t pos = 0;
    while ((pos = text.find(word, pos)) != std::string_view::npos) {
        const bool left_ok = pos == 0 || (std::isalnum(static_cast<unsigned char>(text[pos - 1])) == 0 &&
                                          text[pos - 1] != '_');
        const std::size_t after = pos + word.size();
        const bool right_ok = after >= text.size() || (std::isalnum(static_cast<unsigned char>(text[after])) == 0 &&
                                                       text[after] != '_');
        if (left_ok && right_ok) {
            return true;
        }
        pos = after;
    }
    return false;
}

} // namespace

std::string_view to_string(SpecKind kind) noexcept {
    switch (kind) {
    case SpecKind::HLNL: return "HLNL";
    case SpecKind::LLNL: return "LLNL";
    case SpecKind::ACSL: return "ACSL";
    }
    return "?";
}

std::optional<SpecKind> parse_spec_kind(std::string_view text) noexcept {
    std::string upper(text);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    for (const auto kind : kAllSpecKinds) {
        if (to_string(kind) == upper) {
            return kind;
        }
    }
    return std::nullopt;
}

std::string InterfaceContext::function_name() const {
    TokenStream tokens;
    try {
        tokens = tokenize(function_signature);
    } catch (const LexError&) {
        return {};
    }
    for (std::size_t i = 1; i < tokens.size(); ++i) {
        if (tokens[i].is("(") && tokens[i - 1].kind == TokenKind::Identifier) {
            return tokens[i - 1].text;
        }
    }
    return {};
}

InterfaceContext CaseBundle::degraded_interface() const {
    InterfaceContext out = interface;
    out.header_source = degrade_ghosts(interface.header_source);
    out.globals_source = degrade_ghosts(interface.globals_source);
    return out;
}

SpecCombination::SpecCombination(std::initializer_list<SpecKind> kinds) : mask_(0) {
    for (const auto kind : kinds) {
        mask_ |= bit(kind);
    }
    if (mask_ == 0) {
        throw ContractError("a specification combination needs at least one kind");
    }
}

SpecCombination SpecCombination::from_mask(std::uint8_t mask) {
    if (mask == 0 || mask > 7) {
        throw ContractError("invalid specification combination mask " + std::to_string(mask));
    }
    return SpecCombination(mask);
}

bool SpecCombination::contains(SpecKind kind) const noexcept {
    return (mask_ & bit(kind)) != 0;
}

std::vector<SpecKind> SpecCombination::kinds() const {
    std::vector<SpecKind> out;
    for (const auto kind : kAllSpecKinds) {
        if (contains(kind)) {
            out.push_back(kind);
        }
    }
    return out;
}

std::string SpecCombination::label() const {
    // Labels list kinds alphabetically: ACSL, HLNL, LLNL.
    std::string out;
    for (const auto kind : {SpecKind::ACSL, SpecKind::HLNL, SpecKind::LLNL}) {
        if (contains(kind)) {
            if (!out.empty()) {
                out += " + ";
            }
            out += to_string(kind);
        }
    }
    return out;
}

std::string SpecCombination::slug() const {
    std::string out;
    for (const auto kind : {SpecKind::ACSL, SpecKind::HLNL, SpecKind::LLNL}) {
        if (contains(kind)) {
            if (!out.empty()) {
                out += '_';
            }
            for (const char c : to_string(kind)) {
                out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            }
        }
    }
    return out;
}

std::optional<SpecCombination> parse_combination(std::string_view label) {
    std::uint8_t mask = 0;
    std::size_t start = 0;
    const std::string text(label);
    while (start <= text.size()) {
        std::size_t end = text.find_first_of("+,_", start);
        if (end == std::string::npos) {
            end = text.size();
        }
        const auto part = trim(std::string_view(text).substr(start, end - start));
        const auto kind = parse_spec_kind(part);
        if (!kind) {
            return std::nullopt;
        }
        mask |= bit(*kind);
        start = end + 1;
    }
    if (mask == 0) {
        return std::nullopt;
    }
    return SpecCombination::from_mask(mask);
}

std::vector<SpecCombination> enumerate_combinations() {
    using K = SpecKind;
    return {
        SpecCombination{K::ACSL},
        SpecCombination{K::HLNL},
        SpecCombination{K::LLNL},
        SpecCombination{K::ACSL, K::HLNL, K::LLNL},
        SpecCombination{K::HLNL, K::LLNL},
        SpecCombination{K::ACSL, K::LLNL},
        SpecCombination{K::ACSL, K::HLNL},
    };
}

std::vector<SpecItem> select_specs(const CaseBundle& bundle, const SpecCombination& combo) {
    std::vector<SpecItem> out;
    for (const auto kind : kAllSpecKinds) {
        if (!combo.contains(kind)) {
            continue;
        }
        for (const auto& item : bundle.specs) {
            if (item.kind == kind) {
                out.push_back(item);
            }
        }
    }
    return out;
}

std::string degrade_ghosts(std::string_view source) {
    std::string out;
    out.reserve(source.size());
    std::size_t line = 1;
    std::size_t i = 0;
    const std::size_t n = source.size();
    while (i < n) {
        if (source.substr(i).starts_with("//")) {
            std::size_t end = source.find('\n', i);
            if (end == std::string_view::npos) {
                end = n;
            }
            const auto body = source.substr(i + 2, end - i - 2);
            std::string decls;
            if (!body.empty() && body.front() == '@') {
                decls = ghost_declarations(body.substr(1));
            }
            out += decls.empty() ? std::string(source.substr(i, end - i)) : decls;
            i = end;
            continue;
        }
        if (source.substr(i).starts_with("/*")) {
            const std::size_t close = source.find("*/", i + 2);
            if (close == std::string_view::npos) {
                throw ParseError("unterminated annotation comment", line);
            }
            const auto body = source.substr(i + 2, close - i - 2);
            std::string decls;
            if (!body.empty() && body.front() == '@') {
                decls = ghost_declarations(body.substr(1));
            }
            const auto raw = source.substr(i, close + 2 - i);
            line += static_cast<std::size_t>(std::count(raw.begin(), raw.end(), '\n'));
            out += decls.empty() ? std::string(raw) : decls;
            i = close + 2;
            continue;
        }
        const char c = source[i];
        if (c == '"' || c == '\'') {
            std::size_t j = i + 1;
            while (j < n && source[j] != c && source[j] != '\n') {
                j += source[j] == '\\' ? 2 : 1;
            }
            if (j < n && source[j] == c) {
                out.append(source.substr(i, j + 1 - i));
                i = j + 1;
                continue;
            }
        }
        if (c == '\n') {
            ++line;
        }
        out += c;
        ++i;
    }
    return out;
}

std::vector<ValidationFinding> validate_bundle(const CaseBundle& bundle) {
    std::vector<ValidationFinding> findings;
    if (trim(bundle.name).empty()) {
        findings.push_back({"name", "must be non-empty"});
    }
    const auto functions = count_declared_functions(bundle.interface.function_signature);
    if (functions != 1) {
        findings.push_back({"interface.function_signature",
                            "must declare exactly one function (found " + std::to_string(functions) + ")"});
    }
    if (trim(bundle.interface.scheduler_note).empty()) {
        findings.push_back({"interface.scheduler_note", "must be non-empty"});
    }
    if (trim(bundle.acsl_contract).empty()) {
        findings.push_back({"acsl_contract", "must be non-empty"});
    }
    for (const auto kind : kAllSpecKinds) {
        const bool present = std::any_of(bundle.specs.begin(), bundle.specs.end(),
                                         [kind](const SpecItem& s) { return s.kind == kind; });
        if (!present) {
            findings.push_back({"specs", "no item of kind " + std::string(to_string(kind))});
        }
    }
    std::set<std::string> seen;
    for (const auto& item : bundle.specs) {
        const std::string field = "specs[" + item.id + "]";
        if (item.id.empty()) {
            findings.push_back({"specs", "item with empty id"});
        } else if (!seen.insert(item.id).second) {
            findings.push_back({field, "duplicate id"});
        }
        if (trim(item.text).empty()) {
            findings.push_back({field + ".text", "must be non-empty"});
        } else if (item.kind == SpecKind::ACSL) {
            static constexpr std::array<std::string_view, 5> kClauses{"requires", "ensures", "assigns", "ghost",
                                                                      "behavior"};
            const bool has_clause = std::any_of(kClauses.begin(), kClauses.end(),
                                                [&](std::string_view kw) { return contains_word(item.text, kw); });
            if (!has_clause) {
                findings.push_back({field + ".text", "ACSL item has no requires/ensures/assigns/ghost/behavior clause"});
            }
        }
    }
    return findings;
}

CaseBundle load_bundle(const fs::path& dir) {
    const fs::path manifest_path = dir / "manifest.toml";
    if (!fs::exists(manifest_path)) {
        throw LoadError("manifest", "missing " + manifest_path.string());
    }
    toml::table manifest;
    try {
        manifest = toml::parse_file(manifest_path.string());
    } catch (const toml::parse_error& e) {
        throw LoadError("manifest", std::string(e.description()));
    }

    CaseBundle bundle;
    const auto name = manifest["name"].value<std::string>();
    if (!name) {
        throw LoadError("name", "missing string value");
    }
    bundle.name = *name;
    bundle.interface.scheduler_note = manifest["scheduler_note"].value_or(std::string{});

    const auto* files = manifest["files"].as_table();
    if (files == nullptr) {
        throw LoadError("files", "missing [files] table");
    }
    auto file_for = [&](const std::string& key, bool required) -> std::optional<std::string> {
        const auto rel = (*files)[key].value<std::string>();
        if (!rel) {
            if (required) {
                throw LoadError(key, "missing entry in [files]");
            }
            return std::nullopt;
        }
        const fs::path path = dir / *rel;
        if (!fs::exists(path)) {
            throw LoadError(key, "referenced file not found: " + path.string());
        }
        return read_file(path, key);
    };
    bundle.interface.header_source = *file_for("header", true);
    bundle.interface.globals_source = *file_for("globals", true);
    bundle.interface.function_signature = strip_final_newlines(*file_for("signature", true));
    bundle.acsl_contract = *file_for("contract", true);
    bundle.reference_source = file_for("reference", false);
    if (bundle.reference_source && trim(*bundle.reference_source).empty()) {
        bundle.reference_source.reset();
    }

    const auto* specs = manifest["specs"].as_table();
    if (specs == nullptr) {
        throw LoadError("specs", "missing [specs] table");
    }
    for (const auto& [key, node] : *specs) {
        if (!parse_spec_kind(key.str())) {
            throw LoadError("specs." + std::string(key.str()), "unknown specification kind");
        }
    }
    std::set<std::string> ids;
    for (const auto kind : kAllSpecKinds) {
        const std::string kind_key = "specs." + std::string(to_string(kind));
        const auto* list = (*specs)[to_string(kind)].as_array();
        if (list == nullptr) {
            continue;
        }
        for (std::size_t i = 0; i < list->size(); ++i) {
            const std::string entry_key = kind_key + "[" + std::to_string(i) + "]";
            const auto& entry = *list->get(i);
            std::string rel;
            std::string id;
            if (const auto s = entry.value<std::string>()) {
                rel = *s;
                id = fs::path(rel).stem().string();
            } else if (const auto* t = entry.as_table()) {
                rel = (*t)["file"].value_or(std::string{});
                id = (*t)["id"].value_or(fs::path(rel).stem().string());
            }
            if (rel.empty()) {
                throw LoadError(entry_key, "expected a file path or {id, file} table");
            }
            const fs::path path = dir / rel;
            if (!fs::exists(path)) {
                throw LoadError(entry_key, "referenced file not found: " + path.string());
            }
            if (!ids.insert(id).second) {
                throw LoadError(entry_key, "duplicate specification id '" + id + "'");
            }
            bundle.specs.push_back(SpecItem{id, kind, strip_final_newlines(read_file(path, entry_key))});
        }
    }
    if (bundle.specs.empty()) {
        throw LoadError("specs", "no specification items listed");
    }
    return bundle;
}

void save_bundle(const CaseBundle& bundle, const fs::path& dir) {
    fs::create_directories(dir);
    write_file(dir / "header.h", bundle.interface.header_source);
    write_file(dir / "globals.h", bundle.interface.globals_source);
    write_file(dir / "signature.h", bundle.interface.function_signature + "\n");
    write_file(dir / "contract.acsl", bundle.acsl_contract);

    toml::table files{{"header", "header.h"}, {"globals", "globals.h"}, {"signature", "signature.h"},
                      {"contract", "contract.acsl"}};
    if (bundle.reference_source) {
        write_file(dir / "reference.c", *bundle.reference_source);
        files.insert("reference", "reference.c");
    }

    toml::table specs;
    for (const auto kind : kAllSpecKinds) {
        toml::array list;
        for (const auto& item : bundle.specs) {
            if (item.kind != kind) {
                continue;
            }
            const std::string rel = "specs/" + item.id + ".txt";
            write_file(dir / rel, item.text + "\n");
            list.push_back(toml::table{{"id", item.id}, {"file", rel}});
        }
        if (!list.empty()) {
            specs.insert(std::string(to_string(kind)), std::move(list));
        }
    }

    toml::table manifest{{"name", bundle.name},
                         {"scheduler_note", bundle.interface.scheduler_note},
                         {"files", std::move(files)},
                         {"specs", std::move(specs)}};
    std::ostringstream ss;
    ss << manifest << "\n";
    write_file(dir / "manifest.toml", ss.str());
}

} // namespace specgen
