#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "specgen/pipeline.hpp"

namespace specgen {

enum class TableFormat { Markdown, Csv };

/// One rendered results-table row. Cell strings are format independent.
struct TableRow {
    std::string model;
    std::string specification_type;
    std::string compiled;  // "Yes", "No" or "n/a"
    std::string eq_check;  // "Eq", "Not Eq", "—" or "n/a"
    std::string verified;  // "p / t" or "n/a"
    std::string loc;       // count or "n/a"
    bool fully_proved{false};

    bool operator==(const TableRow&) const = default;
};

/// "gpt-4-turbo" -> "GPT-4-turbo"; other ids are returned unchanged.
[[nodiscard]] std::string display_model(std::string_view model_id);

/// Rows for sample 0 of every (model, combination) cell of `bundle`, models in
/// first-appearance order and combinations in table order. When `models` is
/// given it fixes the model order (an empty list yields no rows).
/// Throws ContractError naming the available bundles when `bundle` has no cells.
[[nodiscard]] std::vector<TableRow> table_rows(const ResultSet& results, std::string_view bundle,
                                               const std::optional<std::vector<std::string>>& models = std::nullopt);

[[nodiscard]] std::string render_results_table(const ResultSet& results, std::string_view bundle, TableFormat format,
                                               const std::optional<std::vector<std::string>>& models = std::nullopt);

struct ModelSummary {
    std::string model;
    std::size_t cells{0};
    std::size_t evaluable{0};  // not InfraError
    std::size_t compiled{0};
    std::size_t fully_verified{0};
    std::size_t pass_at_1_hits{0};  // sample-0 cells that passed
    std::size_t pass_at_1_cells{0};  // evaluable sample-0 cells
    std::optional<double> mean_loc;  // over cells with a LoC value
};

[[nodiscard]] std::vector<ModelSummary> summarize_models(const ResultSet& results);

/// Human-readable per-model summary.
[[nodiscard]] std::string summarize(const ResultSet& results);

} // namespace specgen
