#include "specgen/cli.hpp"

#include <CLI11.hpp>
#include <toml.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <variant>

#include <unistd.h>

#include "specgen/dataset_collector.hpp"
#include "specgen/error.hpp"
#include "specgen/quality_critic.hpp"
#include "specgen/reporting.hpp"

namespace specgen {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

enum class Type { String, StringList, Int, Float, Bool, Path, PathList };

const std::map<std::string, Type>& schema() {
    static const std::map<std::string, Type> keys{
        {"bundles", Type::PathList},
        {"models", Type::StringList},
        {"combinations", Type::StringList},
        {"max_iterations", Type::Int},
        {"parallelism", Type::Int},
        {"output_dir", Type::Path},
        {"mock_scenario", Type::Path},
        {"offline", Type::Bool},
        {"chain_of_thought", Type::Bool},
        {"critics", Type::StringList},
        {"generation.max_tokens", Type::Int},
        {"generation.temperature", Type::Float},
        {"generation.presence_penalty", Type::Float},
        {"generation.frequency_penalty", Type::Float},
        {"generation.top_p", Type::Float},
        {"generation.samples", Type::Int},
        {"tools.compiler", Type::String},
        {"tools.compiler_flags", Type::StringList},
        {"tools.compile_timeout", Type::Int},
        {"tools.verifier", Type::String},
        {"tools.provers", Type::StringList},
        {"tools.goal_timeout", Type::Int},
        {"tools.cell_timeout", Type::Int},
        {"tools.verifier_args", Type::StringList},
        {"tools.equivalence_tool", Type::String},
        {"tools.equivalence_build_args", Type::StringList},
        {"tools.equivalence_compare_args", Type::StringList},
        {"tools.equivalence_timeout", Type::Int},
        {"remote.endpoint", Type::String},
        {"remote.api_key_env", Type::String},
        {"remote.timeout", Type::Int},
        {"remote.rate_limit", Type::Float},
    };
    return keys;
}

const char* type_name(Type t) {
    switch (t) {
    case Type::String:
    case Type::Path:
        return "a string";
    case Type::StringList:
    case Type::PathList:
        return "an array of strings";
    case Type::Int:
        return "an integer";
    case Type::Float:
        return "a number";
    case Type::Bool:
        return "a boolean";
    }
    return "a value";
}

using Value = std::variant<std::string, std::vector<std::string>, std::int64_t, double, bool>;

std::int64_t parse_int(const std::string& key, const std::string& text) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw UsageError(key, "expected an integer, got '" + text + "'");
    }
    return v;
}

double parse_float(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) {
        throw UsageError(key, "expected a number, got '" + text + "'");
    }
    return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") {
        return true;
    }
    if (text == "false" || text == "0" || text == "no" || text == "off") {
        return false;
    }
    throw UsageError(key, "expected a boolean, got '" + text + "'");
}

Value from_toml(const std::string& key, Type type, const toml::node& node, const fs::path& base) {
    auto mismatch = [&] { return UsageError(key, std::string("expected ") + type_name(type)); };
    auto resolve = [&](const std::string& p) {
        const fs::path path(p);
        return (path.is_absolute() || base.empty() ? path : base / path).lexically_normal().string();
    };
    switch (type) {
    case Type::String:
    case Type::Path: {
        const auto v = node.value<std::string>();
        if (!node.is_string() || !v) {
            throw mismatch();
        }
        return type == Type::Path ? resolve(*v) : *v;
    }
    case Type::StringList:
    case Type::PathList: {
        const auto* arr = node.as_array();
        if (arr == nullptr) {
            throw mismatch();
        }
        std::vector<std::string> out;
        for (const auto& el : *arr) {
            if (!el.is_string()) {
                throw mismatch();
            }
            const std::string s = *el.value<std::string>();
            out.push_back(type == Type::PathList ? resolve(s) : s);
        }
        return out;
    }
    case Type::Int:
        if (!node.is_integer()) {
            throw mismatch();
        }
        return *node.value<std::int64_t>();
    case Type::Float:
        if (!node.is_number()) {
            throw mismatch();
        }
        return *node.value<double>();
    case Type::Bool:
        if (!node.is_boolean()) {
            throw mismatch();
        }
        return *node.value<bool>();
    }
    throw mismatch();
}

void read_table(const toml::table& table, const std::string& prefix, const fs::path& base,
                std::map<std::string, Value>& values) {
    for (const auto& [k, node] : table) {
        const std::string key = prefix.empty() ? std::string(k.str()) : prefix + "." + std::string(k.str());
        if (const auto* sub = node.as_table(); sub != nullptr && prefix.empty() &&
                                               (key == "generation" || key == "tools" || key == "remote")) {
            read_table(*sub, key, base, values);
            continue;
        }
        const auto it = schema().find(key);
        if (it == schema().end()) {
            throw UsageError(key, "unknown configuration key");
        }
        values[key] = from_toml(key, it->second, node, base);
    }
}

template <typename T>
std::optional<T> get(const std::map<std::string, Value>& values, const std::string& key) {
    const auto it = values.find(key);
    if (it == values.end()) {
        return std::nullopt;
    }
    return std::get<T>(it->second);
}

unsigned non_negative(const std::string& key, std::int64_t v, std::int64_t min = 0) {
    if (v < min || v > std::numeric_limits<unsigned>::max()) {
        throw UsageError(key, "must be at least " + std::to_string(min));
    }
    return static_cast<unsigned>(v);
}

std::chrono::seconds seconds(const std::string& key, std::int64_t v) {
    return std::chrono::seconds(non_negative(key, v, 1));
}

std::shared_ptr<Backend> make_backend(const RunConfig& cfg) {
    if (cfg.mock_scenario) {
        return MockBackend::load(*cfg.mock_scenario);
    }
    if (cfg.offline) {
        throw UsageError("mock_scenario", "offline mode requires a mock scenario");
    }
    return std::make_shared<RemoteBackend>(cfg.remote);
}

void write_file(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
}

std::vector<std::string> bundle_names(const ResultSet& results) {
    std::vector<std::string> names;
    for (const auto& c : results.cells) {
        if (std::find(names.begin(), names.end(), c.bundle_name) == names.end()) {
            names.push_back(c.bundle_name);
        }
    }
    return names;
}

InterfaceContext interface_from_option(const std::string& bundle_dir) {
    if (bundle_dir.empty()) {
        return {};
    }
    return load_bundle(bundle_dir).degraded_interface();
}

std::string read_file(const fs::path& path, const std::string& key) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UsageError(key, "cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    std::vector<CaseBundle> bundles;
    for (const auto& path : cfg.bundles) {
        CaseBundle bundle = load_bundle(path);
        const auto findings = validate_bundle(bundle);
        if (!findings.empty()) {
            for (const auto& f : findings) {
                err << "bundle " << bundle.name << ": " << f.field << ": " << f.rule << "\n";
            }
            return kExitUsageOrInfra;
        }
        for (const auto& other : bundles) {
            if (other.name == bundle.name) {
                throw UsageError("bundles", "duplicate bundle name '" + bundle.name + "'");
            }
        }
        bundles.push_back(std::move(bundle));
    }

    Gateway gateway(make_backend(cfg), GatewayOptions{cfg.rate_limit, std::chrono::milliseconds(500)});
    ToolchainCritics critics(cfg.tools);
    Pipeline pipeline(gateway, critics, PipelineOptions{cfg.output_dir, cfg.parallelism});

    CellConfig defaults;
    defaults.max_iterations = cfg.max_iterations;
    defaults.params = cfg.params;
    defaults.critics_enabled = cfg.critics;
    defaults.chain_of_thought = cfg.chain_of_thought;

    const json resolved = to_json(cfg);
    write_file(cfg.output_dir / "config.json", resolved.dump(2) + "\n");

    ResultSet results = pipeline.run_matrix(bundles, cfg.models, cfg.combinations, defaults);
    results.config_snapshot = resolved;
    write_results(results, cfg.output_dir);

    for (const auto& bundle : bundles) {
        write_file(cfg.output_dir / "tables" / (path_component(bundle.name) + ".md"),
                   render_results_table(results, bundle.name, TableFormat::Markdown, cfg.models));
        write_file(cfg.output_dir / "tables" / (path_component(bundle.name) + ".csv"),
                   render_results_table(results, bundle.name, TableFormat::Csv, cfg.models));
    }
    const std::string summary = summarize(results);
    write_file(cfg.output_dir / "summary.txt", summary);
    out << summary << "Run directory: " << cfg.output_dir.string() << "\n";

    const bool infra = std::any_of(results.cells.begin(), results.cells.end(),
                                   [](const CellResult& c) { return c.verdict == Verdict::InfraError; });
    if (infra) {
        err << "one or more cells ended with an infrastructure error; see " << kResultsFile << "\n";
        return kExitUsageOrInfra;
    }
    return kExitOk;
}

int cmd_check(const std::string& file, const std::string& bundle_dir, const std::string& function,
              const std::string& format, const ToolchainConfig& tools, std::ostream& out) {
    const std::string source = read_file(file, "file");
    InterfaceContext interface = interface_from_option(bundle_dir);
    const fs::path workdir = fs::temp_directory_path() / ("specgen_check_" + std::to_string(::getpid()));
    const CompileReport compile = run_compile(source, interface, workdir, tools);
    std::error_code ec;
    fs::remove_all(workdir, ec);

    json report{{"file", file}, {"compiled", compile.success}};
    if (!compile.success) {
        json errors = json::array();
        for (const auto& d : compile.errors) {
            errors.push_back(d.file + ":" + std::to_string(d.line) + ": " + d.text);
        }
        report["errors"] = errors;
        if (format == "json") {
            out << report.dump(2) << "\n";
        } else {
            out << file << ": does not compile; no quality analysis performed\n";
            for (const auto& e : errors) {
                out << "  error " << e.get<std::string>() << "\n";
            }
        }
        return kExitEvaluatedFailure;
    }
    if (!function.empty()) {
        interface.function_signature = "void " + function + "(void)";
    }
    QualityReport quality = check_power_of_10(source, interface, compile);
    if (!function.empty()) {
        quality.loc = count_loc(source, function);
    }
    if (format == "json") {
        json findings = json::array();
        for (const auto& f : quality.findings) {
            findings.push_back({{"rule", f.rule_id}, {"severity", to_string(f.severity)}, {"line", f.line},
                                {"message", f.message}});
        }
        report["loc"] = quality.loc;
        report["compiler_warnings"] = quality.compiler_warning_count;
        report["findings"] = findings;
        report["conforms"] = quality.conforms;
        out << report.dump(2) << "\n";
    } else {
        for (const auto& f : quality.findings) {
            out << file << ":" << f.line << ": rule " << f.rule_id << " " << to_string(f.severity) << ": "
                << f.message << "\n";
        }
        out << file << ": LoC " << quality.loc << ", " << quality.compiler_warning_count << " compiler warning(s), "
            << (quality.conforms ? "conforms" : "does not conform") << "\n";
    }
    return quality.conforms ? kExitOk : kExitEvaluatedFailure;
}

int cmd_verify(const std::string& file, const std::string& contract_file, const std::string& bundle_dir,
               const ToolchainConfig& tools, std::ostream& out) {
    const std::string source = read_file(file, "file");
    std::string contract;
    InterfaceContext interface;
    if (!bundle_dir.empty()) {
        const CaseBundle bundle = load_bundle(bundle_dir);
        interface = bundle.degraded_interface();
        contract = degrade_ghosts(bundle.acsl_contract);
    }
    if (!contract_file.empty()) {
        contract = read_file(contract_file, "contract");
    }
    if (contract.empty()) {
        throw UsageError("contract", "a contract file or a bundle is required");
    }
    const fs::path workdir = fs::temp_directory_path() / ("specgen_verify_" + std::to_string(::getpid()));
    const VerificationReport report = run_verify(source, contract, interface, workdir, tools);
    for (const auto& g : report.goals) {
        if (g.status != GoalStatus::Proved) {
            out << "  " << to_string(g.status) << ": " << g.name << "\n";
        }
    }
    out << file << ": proved goals " << report.proved << " / " << report.total
        << (report.fully_proved() ? " (fully proved)" : "") << "\n";
    return report.fully_proved() ? kExitOk : kExitEvaluatedFailure;
}

int cmd_report(const std::string& run_dir, const std::string& format, const std::string& bundle,
               const std::string& out_file, bool with_summary, std::ostream& out) {
    if (!fs::is_directory(run_dir)) {
        throw UsageError("run_dir", "not a directory: " + run_dir);
    }
    const ResultSet results = load_results(run_dir);
    const TableFormat fmt = format == "csv" ? TableFormat::Csv : TableFormat::Markdown;
    std::string text;
    if (!bundle.empty()) {
        text = render_results_table(results, bundle, fmt);
    } else {
        const auto names = bundle_names(results);
        if (names.size() == 1) {
            text = render_results_table(results, names.front(), fmt);
        } else if (fmt == TableFormat::Csv) {
            throw UsageError("bundle", "the run holds several bundles; choose one for CSV output");
        } else {
            for (const auto& name : names) {
                text += (text.empty() ? "" : "\n") + std::string("## ") + name + "\n\n" +
                        render_results_table(results, name, fmt);
            }
        }
    }
    if (with_summary) {
        text += "\n" + summarize(results);
    }
    if (out_file.empty()) {
        out << text;
    } else {
        write_file(out_file, text);
    }
    return kExitOk;
}

int cmd_datasets(const std::string& run_dir, const std::string& out_dir, const std::string& annotations,
                 std::ostream& out) {
    if (!fs::is_directory(run_dir)) {
        throw UsageError("run_dir", "not a directory: " + run_dir);
    }
    const ResultSet results = load_results(run_dir);
    const Annotations notes = annotations.empty() ? Annotations{} : load_annotations(annotations);
    const fs::path dir = out_dir.empty() ? fs::path(run_dir) / "datasets" : fs::path(out_dir);
    const CollectedRecords records = collect(results, notes);
    const auto pairs = build_preference_pairs(results);
    const auto n_sft = write_records(records.sft, dir / kSftFile);
    const auto n_feedback = write_records(records.feedback, dir / kFeedbackFile);
    const auto n_pairs = write_records(pairs, dir / kPreferenceFile);
    out << "SFT records: " << n_sft << "\nFeedback records: " << n_feedback << "\nPreference pairs: " << n_pairs
        << "\nWritten to " << dir.string() << "\n";
    return kExitOk;
}

} // namespace

RunConfig parse_config(const std::optional<fs::path>& file, const ConfigOverrides& overrides) {
    std::map<std::string, Value> values;
    if (file) {
        toml::table table;
        try {
            table = toml::parse_file(file->string());
        } catch (const toml::parse_error& e) {
            throw UsageError("config", "cannot parse " + file->string() + ": " + std::string(e.description()));
        }
        read_table(table, "", file->parent_path(), values);
    }

    std::map<std::string, std::vector<std::string>> list_overrides;
    for (const auto& [key, text] : overrides) {
        const auto it = schema().find(key);
        if (it == schema().end()) {
            throw UsageError(key, "unknown configuration key");
        }
        switch (it->second) {
        case Type::String:
        case Type::Path:
            values[key] = text;
            break;
        case Type::StringList:
        case Type::PathList:
            list_overrides[key].push_back(text);
            break;
        case Type::Int:
            values[key] = parse_int(key, text);
            break;
        case Type::Float:
            values[key] = parse_float(key, text);
            break;
        case Type::Bool:
            values[key] = parse_bool(key, text);
            break;
        }
    }
    for (auto& [key, list] : list_overrides) {
        values[key] = std::move(list);
    }

    RunConfig cfg;
    const auto bundles = get<std::vector<std::string>>(values, "bundles");
    if (!bundles || bundles->empty()) {
        throw UsageError("bundles", "at least one bundle is required");
    }
    cfg.bundles.assign(bundles->begin(), bundles->end());
    const auto models = get<std::vector<std::string>>(values, "models");
    if (!models || models->empty()) {
        throw UsageError("models", "at least one model is required");
    }
    cfg.models = *models;
    if (const auto combos = get<std::vector<std::string>>(values, "combinations")) {
        for (const auto& label : *combos) {
            const auto combo = parse_combination(label);
            if (!combo) {
                throw UsageError("combinations", "unknown specification combination '" + label + "'");
            }
            cfg.combinations.push_back(*combo);
        }
    }
    if (cfg.combinations.empty()) {
        cfg.combinations = enumerate_combinations();
    }
    if (const auto v = get<std::int64_t>(values, "max_iterations")) {
        cfg.max_iterations = non_negative("max_iterations", *v);
    }
    if (const auto v = get<std::int64_t>(values, "parallelism")) {
        cfg.parallelism = non_negative("parallelism", *v, 1);
    }
    if (const auto v = get<std::string>(values, "output_dir")) {
        cfg.output_dir = *v;
    }
    if (const auto v = get<std::string>(values, "mock_scenario")) {
        cfg.mock_scenario = fs::path(*v);
    }
    if (const auto v = get<bool>(values, "offline")) {
        cfg.offline = *v;
    }
    if (const auto v = get<bool>(values, "chain_of_thought")) {
        cfg.chain_of_thought = *v;
    }
    if (const auto v = get<std::vector<std::string>>(values, "critics")) {
        cfg.critics.clear();
        for (const auto& name : *v) {
            const auto critic = parse_critic(name);
            if (!critic) {
                throw UsageError("critics", "unknown critic '" + name + "'");
            }
            cfg.critics.insert(*critic);
        }
        if (!cfg.critics.contains(Critic::Compile) || !cfg.critics.contains(Critic::Verify)) {
            throw UsageError("critics", "compile and verify cannot be disabled");
        }
    }

    if (const auto v = get<std::int64_t>(values, "generation.max_tokens")) {
        cfg.params.max_tokens = non_negative("generation.max_tokens", *v, 1);
    }
    if (const auto v = get<double>(values, "generation.temperature")) {
        cfg.params.temperature = *v;
    }
    if (const auto v = get<double>(values, "generation.presence_penalty")) {
        cfg.params.presence_penalty = *v;
    }
    if (const auto v = get<double>(values, "generation.frequency_penalty")) {
        cfg.params.frequency_penalty = *v;
    }
    if (const auto v = get<double>(values, "generation.top_p")) {
        cfg.params.top_p = *v;
    }
    if (const auto v = get<std::int64_t>(values, "generation.samples")) {
        cfg.params.samples = non_negative("generation.samples", *v, 1);
    }
    try {
        cfg.params.validate();
    } catch (const ContractError& e) {
        // Messages lead with the offending field name.
        const std::string what = e.what();
        throw UsageError("generation." + what.substr(0, what.find(' ')), what);
    }

    if (const auto v = get<std::string>(values, "tools.compiler")) {
        cfg.tools.compiler = *v;
    }
    if (const auto v = get<std::vector<std::string>>(values, "tools.compiler_flags")) {
        cfg.tools.compiler_flags = *v;
    }
    if (const auto v = get<std::int64_t>(values, "tools.compile_timeout")) {
        cfg.tools.compile_timeout = seconds("tools.compile_timeout", *v);
    }
    if (const auto v = get<std::string>(values, "tools.verifier")) {
        cfg.tools.verifier = *v;
    }
    if (const auto v = get<std::vector<std::string>>(values, "tools.provers")) {
        cfg.tools.provers = *v;
    }
    if (const auto v = get<std::int64_t>(values, "tools.goal_timeout")) {
        cfg.tools.goal_timeout = seconds("tools.goal_timeout", *v);
    }
    if (const auto v = get<std::int64_t>(values, "tools.cell_timeout")) {
        cfg.tools.cell_timeout = seconds("tools.cell_timeout", *v);
    }
    if (const auto v = get<std::vector<std::string>>(values, "tools.verifier_args")) {
        cfg.tools.verifier_extra_args = *v;
    }
    if (const auto v = get<std::string>(values, "tools.equivalence_tool")) {
        cfg.tools.equivalence_tool = *v;
    }
    if (const auto v = get<std::vector<std::string>>(values, "tools.equivalence_build_args")) {
        cfg.tools.equivalence_build_args = *v;
    }
    if (const auto v = get<std::vector<std::string>>(values, "tools.equivalence_compare_args")) {
        cfg.tools.equivalence_compare_args = *v;
    }
    if (const auto v = get<std::int64_t>(values, "tools.equivalence_timeout")) {
        cfg.tools.equivalence_timeout = seconds("tools.equivalence_timeout", *v);
    }

    if (const auto v = get<std::string>(values, "remote.endpoint")) {
        cfg.remote.endpoint = *v;
    }
    if (const auto v = get<std::string>(values, "remote.api_key_env")) {
        cfg.remote.api_key_env = *v;
    }
    if (const auto v = get<std::int64_t>(values, "remote.timeout")) {
        cfg.remote.timeout = seconds("remote.timeout", *v);
    }
    if (const auto v = get<double>(values, "remote.rate_limit")) {
        if (*v < 0) {
            throw UsageError("remote.rate_limit", "must not be negative");
        }
        cfg.rate_limit = *v;
    }

    if (cfg.offline && !cfg.mock_scenario) {
        throw UsageError("mock_scenario", "offline mode requires a mock scenario");
    }
    return cfg;
}

json to_json(const RunConfig& c) {
    json bundles = json::array();
    for (const auto& b : c.bundles) {
        bundles.push_back(b.string());
    }
    json combos = json::array();
    for (const auto& combo : c.combinations) {
        combos.push_back(combo.label());
    }
    json critics = json::array();
    for (const auto critic : c.critics) {
        critics.push_back(to_string(critic));
    }
    return {
        {"bundles", bundles},
        {"models", c.models},
        {"combinations", combos},
        {"max_iterations", c.max_iterations},
        {"parallelism", c.parallelism},
        {"output_dir", c.output_dir.string()},
        {"mock_scenario", c.mock_scenario ? json(c.mock_scenario->string()) : json(nullptr)},
        {"offline", c.offline},
        {"chain_of_thought", c.chain_of_thought},
        {"critics", critics},
        {"generation",
         {{"max_tokens", c.params.max_tokens},
          {"temperature", c.params.temperature},
          {"presence_penalty", c.params.presence_penalty},
          {"frequency_penalty", c.params.frequency_penalty},
          {"top_p", c.params.top_p},
          {"samples", c.params.samples}}},
        {"tools",
         {{"compiler", c.tools.compiler},
          {"compiler_flags", c.tools.compiler_flags},
          {"compile_timeout", c.tools.compile_timeout.count()},
          {"verifier", c.tools.verifier},
          {"provers", c.tools.provers},
          {"goal_timeout", c.tools.goal_timeout.count()},
          {"cell_timeout", c.tools.cell_timeout.count()},
          {"verifier_args", c.tools.verifier_extra_args},
          {"equivalence_tool", c.tools.equivalence_tool},
          {"equivalence_build_args", c.tools.equivalence_build_args},
          {"equivalence_compare_args", c.tools.equivalence_compare_args},
          {"equivalence_timeout", c.tools.equivalence_timeout.count()}}},
        {"remote",
         {{"endpoint", c.remote.endpoint},
          {"api_key_env", c.remote.api_key_env},
          {"timeout", c.remote.timeout.count()},
          {"rate_limit", c.rate_limit}}},
    };
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Specification-driven C code generation with compiler, verifier and quality critics", "specgen"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Run the generation and critic matrix");
    std::string config_file;
    std::vector<std::string> bundles;
    std::vector<std::string> models;
    std::vector<std::string> combinations;
    std::vector<std::string> critics;
    std::string out_dir;
    std::string mock;
    std::string max_iterations;
    std::string samples;
    std::string temperature;
    std::string max_tokens;
    std::string top_p;
    std::string presence_penalty;
    std::string frequency_penalty;
    std::string parallelism;
    std::string compiler;
    std::string verifier;
    std::string equivalence_tool;
    std::string endpoint;
    std::string rate_limit;
    bool offline = false;
    bool no_cot = false;
    run->add_option("-c,--config", config_file, "TOML configuration file");
    run->add_option("-b,--bundle", bundles, "Bundle directory (repeatable)");
    run->add_option("-m,--model", models, "Model id (repeatable)");
    run->add_option("--combination", combinations, "Specification combination label, e.g. \"HLNL + LLNL\"");
    run->add_option("--critics", critics, "Enabled critics (compile, verify, equivalence, quality)");
    run->add_option("-o,--out", out_dir, "Run directory");
    run->add_option("--mock", mock, "Mock scenario JSON file");
    run->add_option("--max-iterations", max_iterations, "Backprompting iterations (0 = none)");
    run->add_option("--samples", samples, "Samples per cell");
    run->add_option("--temperature", temperature, "Sampling temperature");
    run->add_option("--max-tokens", max_tokens, "Maximum response tokens");
    run->add_option("--top-p", top_p, "Nucleus sampling mass");
    run->add_option("--presence-penalty", presence_penalty, "Presence penalty");
    run->add_option("--frequency-penalty", frequency_penalty, "Frequency penalty");
    run->add_option("-j,--parallelism", parallelism, "Cells evaluated concurrently");
    run->add_option("--compiler", compiler, "C compiler");
    run->add_option("--verifier", verifier, "Deductive verifier executable");
    run->add_option("--equivalence-tool", equivalence_tool, "Equivalence checker executable");
    run->add_option("--endpoint", endpoint, "Chat-completions endpoint URL");
    run->add_option("--rate-limit", rate_limit, "Requests per second (0 = unlimited)");
    run->add_flag("--offline", offline, "Forbid network access; requires --mock");
    run->add_flag("--no-cot", no_cot, "Omit the chain-of-thought trigger");

    // check
    auto* check = app.add_subcommand("check", "Run the code quality critic on a C file");
    std::string check_file;
    std::string check_bundle;
    std::string check_function;
    std::string check_format = "text";
    std::string check_compiler = "gcc";
    check->add_option("file", check_file, "C source file")->required();
    check->add_option("--bundle", check_bundle, "Bundle whose interface the file relies on");
    check->add_option("--function", check_function, "Function whose LoC is reported");
    check->add_option("--format", check_format, "text or json")->check(CLI::IsMember({"text", "json"}));
    check->add_option("--compiler", check_compiler, "C compiler");

    // verify
    auto* verify = app.add_subcommand("verify", "Verify a C file against an ACSL contract");
    std::string verify_file;
    std::string verify_contract;
    std::string verify_bundle;
    std::string verify_tool = "frama-c";
    verify->add_option("file", verify_file, "C source file")->required();
    verify->add_option("--contract", verify_contract, "ACSL contract file");
    verify->add_option("--bundle", verify_bundle, "Bundle providing interface and contract");
    verify->add_option("--verifier", verify_tool, "Deductive verifier executable");

    // report
    auto* report = app.add_subcommand("report", "Render results tables from a run directory");
    std::string report_dir;
    std::string report_format = "md";
    std::string report_bundle;
    std::string report_out;
    bool report_summary = false;
    report->add_option("run_dir", report_dir, "Run directory")->required();
    report->add_option("--format", report_format, "md or csv")->check(CLI::IsMember({"md", "csv"}));
    report->add_option("--bundle", report_bundle, "Bundle name");
    report->add_option("--out", report_out, "Output file (default: stdout)");
    report->add_flag("--summary", report_summary, "Append the per-model summary");

    // datasets
    auto* datasets = app.add_subcommand("datasets", "Emit fine-tuning datasets from a run directory");
    std::string datasets_dir;
    std::string datasets_out;
    std::string datasets_annotations;
    datasets->add_option("run_dir", datasets_dir, "Run directory")->required();
    datasets->add_option("--out", datasets_out, "Output directory (default: <run_dir>/datasets)");
    datasets->add_option("--annotations", datasets_annotations, "JSONL sidecar of human review notes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsageOrInfra;
    }

    try {
        if (run->parsed()) {
            ConfigOverrides overrides;
            auto scalar = [&](const std::string& key, const std::string& value, const CLI::Option* opt) {
                if (opt->count() > 0) {
                    overrides.emplace_back(key, value);
                }
            };
            for (const auto& b : bundles) {
                overrides.emplace_back("bundles", b);
            }
            for (const auto& m : models) {
                overrides.emplace_back("models", m);
            }
            for (const auto& c : combinations) {
                overrides.emplace_back("combinations", c);
            }
            for (const auto& c : critics) {
                overrides.emplace_back("critics", c);
            }
            scalar("output_dir", out_dir, run->get_option("--out"));
            scalar("mock_scenario", mock, run->get_option("--mock"));
            scalar("max_iterations", max_iterations, run->get_option("--max-iterations"));
            scalar("generation.samples", samples, run->get_option("--samples"));
            scalar("generation.temperature", temperature, run->get_option("--temperature"));
            scalar("generation.max_tokens", max_tokens, run->get_option("--max-tokens"));
            scalar("generation.top_p", top_p, run->get_option("--top-p"));
            scalar("generation.presence_penalty", presence_penalty, run->get_option("--presence-penalty"));
            scalar("generation.frequency_penalty", frequency_penalty, run->get_option("--frequency-penalty"));
            scalar("parallelism", parallelism, run->get_option("--parallelism"));
            scalar("tools.compiler", compiler, run->get_option("--compiler"));
            scalar("tools.verifier", verifier, run->get_option("--verifier"));
            scalar("tools.equivalence_tool", equivalence_tool, run->get_option("--equivalence-tool"));
            scalar("remote.endpoint", endpoint, run->get_option("--endpoint"));
            scalar("remote.rate_limit", rate_limit, run->get_option("--rate-limit"));
            if (offline) {
                overrides.emplace_back("offline", "true");
            }
            if (no_cot) {
                overrides.emplace_back("chain_of_thought", "false");
            }
            const RunConfig cfg =
                parse_config(config_file.empty() ? std::nullopt : std::optional<fs::path>(config_file), overrides);
            return cmd_run(cfg, out, err);
        }
        if (check->parsed()) {
            ToolchainConfig tools;
            tools.compiler = check_compiler;
            return cmd_check(check_file, check_bundle, check_function, check_format, tools, out);
        }
        if (verify->parsed()) {
            ToolchainConfig tools;
            tools.verifier = verify_tool;
            return cmd_verify(verify_file, verify_contract, verify_bundle, tools, out);
        }
        if (report->parsed()) {
            return cmd_report(report_dir, report_format, report_bundle, report_out, report_summary, out);
        }
        if (datasets->parsed()) {
            return cmd_datasets(datasets_dir, datasets_out, datasets_annotations, out);
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsageOrInfra;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsageOrInfra;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitUsageOrInfra;
    }
    err << "usage error: unknown subcommand\n";
    return kExitUsageOrInfra;
}

} // namespace specgen
