#include "specgen/reporting.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "specgen/error.hpp"

namespace specgen {

namespace {

std::vector<std::string> models_in_order(const ResultSet& results) {
    std::vector<std::string> out;
    for (const auto& c : results.cells) {
        if (std::find(out.begin(), out.end(), c.model_id) == out.end()) {
            out.push_back(c.model_id);
        }
    }
    return out;
}

TableRow row_for(const CellResult& cell) {
    TableRow row;
    row.model = display_model(cell.model_id);
    row.specification_type = cell.combination_label;
    row.eq_check = "n/a";
    row.verified = "n/a";
    row.loc = "n/a";
    if (cell.compile) {
        row.compiled = cell.compile->success ? "Yes" : "No";
    } else {
        row.compiled = cell.verdict == Verdict::ExtractFail ? "No" : "n/a";
    }
    if (row.compiled != "Yes") {
        return row;
    }
    if (cell.equivalence) {
        switch (cell.equivalence->verdict) {
        case EquivalenceVerdict::Equivalent:
            row.eq_check = "Eq";
            break;
        case EquivalenceVerdict::NotShown:
            row.eq_check = "Not Eq";
            break;
        case EquivalenceVerdict::ToolUnavailable:
            row.eq_check = "—";
            break;
        }
    }
    if (cell.verification) {
        row.verified = std::to_string(cell.verification->proved) + " / " + std::to_string(cell.verification->total);
        row.fully_proved = cell.verification->fully_proved();
    }
    if (cell.quality) {
        row.loc = std::to_string(cell.quality->loc);
    }
    return row;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (const char c : s) {
        out += c == '"' ? "\"\"" : std::string(1, c);
    }
    return out + "\"";
}

std::string ratio(std::size_t num, std::size_t den) {
    if (den == 0) {
        return "n/a";
    }
    std::array<char, 32> pct{};
    std::snprintf(pct.data(), pct.size(), "%.1f%%", 100.0 * static_cast<double>(num) / static_cast<double>(den));
    return std::to_string(num) + "/" + std::to_string(den) + " (" + pct.data() + ")";
}

} // namespace

std::string display_model(std::string_view model_id) {
    if (model_id.starts_with("gpt-")) {
        return "GPT-" + std::string(model_id.substr(4));
    }
    return std::string(model_id);
}

std::vector<TableRow> table_rows(const ResultSet& results, std::string_view bundle,
                                 const std::optional<std::vector<std::string>>& models) {
    if (models && models->empty()) {
        return {};
    }
    const bool known = std::any_of(results.cells.begin(), results.cells.end(),
                                   [&](const CellResult& c) { return c.bundle_name == bundle; });
    if (!known) {
        std::set<std::string> names;
        for (const auto& c : results.cells) {
            names.insert(c.bundle_name);
        }
        std::string available;
        for (const auto& n : names) {
            available += available.empty() ? n : ", " + n;
        }
        throw ContractError("unknown bundle '" + std::string(bundle) + "'; available: " +
                            (available.empty() ? "(none)" : available));
    }
    const auto order = models ? *models : models_in_order(results);
    std::vector<TableRow> rows;
    for (const auto& model : order) {
        for (const auto& combo : enumerate_combinations()) {
            const std::string label = combo.label();
            const auto it = std::find_if(results.cells.begin(), results.cells.end(), [&](const CellResult& c) {
                return c.bundle_name == bundle && c.model_id == model && c.combination_label == label &&
                       c.sample_index == 0;
            });
            if (it != results.cells.end()) {
                rows.push_back(row_for(*it));
            }
        }
    }
    return rows;
}

std::string render_results_table(const ResultSet& results, std::string_view bundle, TableFormat format,
                                  const std::optional<std::vector<std::string>>& models) {
    const auto rows = table_rows(results, bundle, models);
    std::ostringstream out;
    if (format == TableFormat::Markdown) {
        out << "| Model | Specification Type | Compiled | Eq. Check | Verified (Proved Goals) | LoC |\n";
        out << "|---|---|---|---|---|---|\n";
        for (const auto& r : rows) {
            const std::string verified = r.fully_proved ? "**" + r.verified + "** ✔" : r.verified;
            out << "| " << r.model << " | " << r.specification_type << " | " << r.compiled << " | " << r.eq_check
                << " | " << verified << " | " << r.loc << " |\n";
        }
    } else {
        out << "model,specification_type,compiled,eq_check,verified,loc,fully_proved\n";
        for (const auto& r : rows) {
            out << csv_field(r.model) << ',' << csv_field(r.specification_type) << ',' << csv_field(r.compiled) << ','
                << csv_field(r.eq_check) << ',' << csv_field(r.verified) << ',' << csv_field(r.loc) << ','
                << (r.fully_proved ? "true" : "false") << '\n';
        }
    }
    return out.str();
}

std::vector<ModelSummary> summarize_models(const ResultSet& results) {
    std::vector<ModelSummary> out;
    for (const auto& model : models_in_order(results)) {
        ModelSummary s;
        s.model = model;
        double loc_sum = 0.0;
        std::size_t loc_count = 0;
        for (const auto& c : results.cells) {
            if (c.model_id != model) {
                continue;
            }
            ++s.cells;
            if (c.verdict == Verdict::InfraError) {
                continue;
            }
            ++s.evaluable;
            if (c.compile && c.compile->success) {
                ++s.compiled;
            }
            if (c.verdict == Verdict::Pass) {
                ++s.fully_verified;
            }
            if (c.sample_index == 0) {
                ++s.pass_at_1_cells;
                s.pass_at_1_hits += c.verdict == Verdict::Pass ? 1 : 0;
            }
            if (c.quality) {
                loc_sum += static_cast<double>(c.quality->loc);
                ++loc_count;
            }
        }
        if (loc_count > 0) {
            s.mean_loc = loc_sum / static_cast<double>(loc_count);
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::string summarize(const ResultSet& results) {
    std::ostringstream out;
    const auto summaries = summarize_models(results);
    std::size_t evaluable = 0;
    for (const auto& s : summaries) {
        evaluable += s.evaluable;
    }
    out << "Cells: " << results.cells.size() << ", evaluable: " << evaluable << "\n";
    if (evaluable == 0) {
        out << "0 evaluable cells; no metrics computed.\n";
    }
    for (const auto& s : summaries) {
        out << display_model(s.model) << ": " << s.cells << " cells, " << s.evaluable << " evaluable";
        if (s.evaluable == 0) {
            out << "\n";
            continue;
        }
        out << ", " << s.compiled << " compiled, " << s.fully_verified << " fully verified, pass@1 = "
            << ratio(s.pass_at_1_hits, s.pass_at_1_cells) << ", mean LoC = ";
        if (s.mean_loc) {
            std::array<char, 32> buf{};
            std::snprintf(buf.data(), buf.size(), "%.1f", *s.mean_loc);
            out << buf.data();
        } else {
            out << "n/a";
        }
        out << "\n";
    }
    return out.str();
}

} // namespace specgen
