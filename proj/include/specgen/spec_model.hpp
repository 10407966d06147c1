#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace specgen {

/// Specification tier. The enumerator order is the rendering order.
enum class SpecKind : std::uint8_t { HLNL = 0, LLNL = 1, ACSL = 2 };

inline constexpr std::array<SpecKind, 3> kAllSpecKinds{SpecKind::HLNL, SpecKind::LLNL, SpecKind::ACSL};

[[nodiscard]] std::string_view to_string(SpecKind kind) noexcept;
[[nodiscard]] std::optional<SpecKind> parse_spec_kind(std::string_view text) noexcept;

struct SpecItem {
    std::string id;
    SpecKind kind{SpecKind::HLNL};
    std::string text;

    bool operator==(const SpecItem&) const = default;
};

/// The C context handed to the model: everything except the function body.
struct InterfaceContext {
    std::string header_source;
    std::string globals_source;
    std::string function_signature;
    std::string scheduler_note;

    /// Name of the single function declared by `function_signature`, or empty.
    [[nodiscard]] std::string function_name() const;

    bool operator==(const InterfaceContext&) const = default;
};

struct CaseBundle {
    std::string name;
    InterfaceContext interface;
    std::vector<SpecItem> specs;
    std::optional<std::string> reference_source;
    std::string acsl_contract;

    /// Interface with ghost declarations turned into concrete ones.
    [[nodiscard]] InterfaceContext degraded_interface() const;

    bool operator==(const CaseBundle&) const = default;
};

/// A non-empty subset of the three spec kinds.
class SpecCombination {
public:
    /// Throws ContractError when `kinds` is empty.
    explicit SpecCombination(std::initializer_list<SpecKind> kinds);
    static SpecCombination from_mask(std::uint8_t mask);

    [[nodiscard]] bool contains(SpecKind kind) const noexcept;
    [[nodiscard]] std::vector<SpecKind> kinds() const;
    [[nodiscard]] std::uint8_t mask() const noexcept { return mask_; }

    /// Table label, e.g. "ACSL + HLNL + LLNL".
    [[nodiscard]] std::string label() const;
    /// Filesystem-friendly form of the label, e.g. "acsl_hlnl_llnl".
    [[nodiscard]] std::string slug() const;

    bool operator==(const SpecCombination&) const = default;

private:
    explicit SpecCombination(std::uint8_t mask) : mask_(mask) {}
    std::uint8_t mask_;
};

/// Parses a label such as "HLNL + LLNL" (order and case insensitive).
[[nodiscard]] std::optional<SpecCombination> parse_combination(std::string_view label);

/// The seven non-empty combinations in results-table row order.
[[nodiscard]] std::vector<SpecCombination> enumerate_combinations();

/// Items whose kind is in `combo`, kind-major (HLNL, LLNL, ACSL), bundle order within a kind.
[[nodiscard]] std::vector<SpecItem> select_specs(const CaseBundle& bundle, const SpecCombination& combo);

/// Rewrites `//@ ghost T x;` and `/*@ ghost T x; */` declarations into `T x;`.
/// Ghost statements (assignments) are left untouched.
/// Throws ParseError on an unterminated comment.
[[nodiscard]] std::string degrade_ghosts(std::string_view source);

struct ValidationFinding {
    std::string field;
    std::string rule;

    bool operator==(const ValidationFinding&) const = default;
};

[[nodiscard]] std::vector<ValidationFinding> validate_bundle(const CaseBundle& bundle);

/// Reads `<dir>/manifest.toml` and the files it references.
/// Throws LoadError naming the offending manifest key.
[[nodiscard]] CaseBundle load_bundle(const std::filesystem::path& dir);

/// Writes a manifest plus one file per component so that load_bundle(dir) == bundle.
void save_bundle(const CaseBundle& bundle, const std::filesystem::path& dir);

} // namespace specgen
