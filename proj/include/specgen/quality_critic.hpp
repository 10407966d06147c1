#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "specgen/reports.hpp"
#include "specgen/spec_model.hpp"

namespace specgen {

struct StrippedLine {
    std::size_t line_number{0};
    std::string text;

    bool operator==(const StrippedLine&) const = default;
};

/// Removes comments (literals protected), then drops blank lines. Surviving
/// lines keep their original 1-based numbers and lose trailing whitespace.
/// Throws LexError on an unterminated comment or literal.
[[nodiscard]] std::vector<StrippedLine> strip_comments_and_blanks(std::string_view source);

/// Exact bytes of the definition of `function_name`, from the first
/// declaration-specifier token through the closing brace.
/// Throws MetricError when the function is missing, defined twice, or unbalanced.
[[nodiscard]] std::string extract_function(std::string_view source, std::string_view function_name);

/// Non-blank, non-comment lines of the definition, signature and braces included.
[[nodiscard]] std::size_t count_loc(std::string_view source, std::string_view function_name);

/// Maximum effective lines per function (rule 4).
inline constexpr std::size_t kMaxFunctionLoc = 60;

/// Evaluates the power-of-10 adaptation (rule 5 excluded) on `source`, using
/// `interface` for declarations the source relies on. Rules 6 and 8 are advisory.
/// Throws ContractError unless `compile_report.success`.
[[nodiscard]] QualityReport check_power_of_10(std::string_view source, const InterfaceContext& interface,
                                              const CompileReport& compile_report);

} // namespace specgen
