#include "specgen/external_critics.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <mutex>
#include <regex>
#include <set>
#include <sstream>

#include "specgen/c_analysis.hpp"
#include "specgen/c_lexer.hpp"
#include "specgen/error.hpp"
#include "specgen/subprocess.hpp"

namespace specgen {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, std::string_view text) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        throw EnvironmentError("cannot write " + path.string());
    }
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t begin = 0;
    while (begin < text.size()) {
        std::size_t end = text.find('\n', begin);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = text.substr(begin, end - begin);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        lines.push_back(line);
        begin = end + 1;
    }
    return lines;
}

std::string first_line(std::string_view text) {
    for (const auto line : split_lines(text)) {
        if (line.find_first_not_of(" \t") != std::string_view::npos) {
            return std::string(line);
        }
    }
    return {};
}

std::string with_newline(std::string_view text) {
    std::string out(text);
    if (out.empty() || out.back() != '\n') {
        out += '\n';
    }
    return out;
}

std::string combined_log(const ProcessResult& r) {
    std::string log = r.out;
    if (!r.err.empty()) {
        if (!log.empty() && log.back() != '\n') {
            log += '\n';
        }
        log += r.err;
    }
    return log;
}

std::set<std::string> global_names(const InterfaceContext& interface) {
    std::set<std::string> names;
    const auto decls = collect_declarations(tokenize(interface.header_source + "\n" + interface.globals_source));
    for (const auto& v : decls.variables) {
        names.insert(v.name);
    }
    return names;
}

std::set<std::string> writes_of(std::string_view source, const std::set<std::string>& globals) {
    const TokenStream tokens = tokenize(source);
    std::set<std::string> out;
    for (const auto& def : find_function_definitions(tokens)) {
        const auto w = written_globals(tokens, def, globals);
        out.insert(w.begin(), w.end());
    }
    return out;
}

std::string join_names(const std::set<std::string>& names) {
    std::string out;
    for (const auto& n : names) {
        out += out.empty() ? n : ", " + n;
    }
    return out.empty() ? "(none)" : out;
}

std::vector<std::string> substitute(const std::vector<std::string>& args,
                                    const std::map<std::string, std::string>& values) {
    std::vector<std::string> out;
    out.reserve(args.size());
    for (std::string arg : args) {
        for (const auto& [key, value] : values) {
            for (auto pos = arg.find(key); pos != std::string::npos; pos = arg.find(key, pos + value.size())) {
                arg.replace(pos, key.size(), value);
            }
        }
        out.push_back(std::move(arg));
    }
    return out;
}

} // namespace

std::string prototype_of(std::string_view signature) {
    constexpr std::string_view kSpace = " \t\r\n";
    const auto first = signature.find_first_not_of(kSpace);
    if (first == std::string_view::npos) {
        return ";";
    }
    std::string out(signature.substr(first));
    while (!out.empty() && (kSpace.find(out.back()) != std::string_view::npos || out.back() == ';')) {
        out.pop_back();
    }
    return out + ';';
}

std::string assemble_unit(const InterfaceContext& interface, std::string_view candidate, std::string_view contract) {
    std::ostringstream tu;
    if (!interface.header_source.empty()) {
        tu << "#line 1 \"header.h\"\n" << with_newline(interface.header_source);
    }
    if (!interface.globals_source.empty()) {
        tu << "#line 1 \"globals.h\"\n" << with_newline(interface.globals_source);
    }
    if (!contract.empty()) {
        tu << "#line 1 \"contract.acsl\"\n" << with_newline(contract);
    }
    if (interface.function_signature.find_first_not_of(" \t\r\n") != std::string::npos) {
        tu << "#line 1 \"signature.h\"\n" << prototype_of(interface.function_signature) << '\n';
    }
    tu << "#line 1 \"" << kCandidateFile << "\"\n" << with_newline(candidate);
    return tu.str();
}

ParsedDiagnostics parse_compiler_diagnostics(std::string_view output) {
    static const std::regex kLine(R"(^(.*?):(\d+)(?::\d+)?: (fatal error|error|warning): (.*)$)");
    static const std::regex kNoLine(R"(^([^:\s]+): (fatal error|error|warning): (.*)$)");
    ParsedDiagnostics out;
    for (const auto line_view : split_lines(output)) {
        const std::string line(line_view);
        std::smatch m;
        if (std::regex_match(line, m, kLine)) {
            Diagnostic d{m[1].str(), static_cast<std::size_t>(std::stoul(m[2].str())), m[4].str()};
            (m[3] == "warning" ? out.warnings : out.errors).push_back(std::move(d));
        } else if (std::regex_match(line, m, kNoLine)) {
            Diagnostic d{m[1].str(), 0, m[3].str()};
            (m[2] == "warning" ? out.warnings : out.errors).push_back(std::move(d));
        }
    }
    return out;
}

std::string tool_version(const std::string& program, const std::string& flag) {
    static std::mutex mutex;
    static std::map<std::string, std::string> cache;
    const std::string key = program + '\0' + flag;
    {
        const std::lock_guard lock(mutex);
        if (const auto it = cache.find(key); it != cache.end()) {
            return it->second;
        }
    }
    std::string version = "unknown";
    try {
        const auto r = run_process({program, flag}, {}, std::chrono::seconds(20));
        if (r.ok()) {
            const std::string line = first_line(r.out.empty() ? r.err : r.out);
            if (!line.empty()) {
                version = line;
            }
        }
    } catch (const Error&) {
        // Version stays "unknown".
    }
    const std::lock_guard lock(mutex);
    cache.emplace(key, version);
    return version;
}

CompileReport run_compile(std::string_view source, const InterfaceContext& interface, const fs::path& workdir,
                          const ToolchainConfig& config) {
    if (!find_executable(config.compiler)) {
        throw EnvironmentError("compiler not found: " + config.compiler);
    }
    fs::create_directories(workdir);
    write_text(workdir / kCandidateFile, source);
    write_text(workdir / "compile_unit.c", assemble_unit(interface, source));

    std::vector<std::string> argv{config.compiler};
    argv.insert(argv.end(), config.compiler_flags.begin(), config.compiler_flags.end());
    argv.insert(argv.end(), {"-c", "compile_unit.c", "-o", "compile_unit.o"});
    const auto result = run_process(argv, workdir, config.compile_timeout);
    const std::string log = combined_log(result);
    write_text(workdir / "compile.log", log);

    CompileReport report;
    report.tool_version = tool_version(config.compiler, "-dumpfullversion");
    auto parsed = parse_compiler_diagnostics(log);
    report.warnings = std::move(parsed.warnings);
    report.errors = std::move(parsed.errors);
    if (result.timed_out) {
        report.errors.push_back({"", 0, "compiler timed out"});
    } else if (result.exit_code != 0 && report.errors.empty()) {
        const std::string line = first_line(log);
        report.errors.push_back({"", 0, line.empty() ? "compiler exited with status " + std::to_string(result.exit_code) : line});
    }
    report.success = result.ok() && report.errors.empty();
    return report;
}

WpSummary parse_wp_output(std::string_view output) {
    static const std::regex kSummary(R"(Proved goals:\s*(\d+)\s*/\s*(\d+))");
    static const std::regex kBracketGoal(
        R"(^\s*(?:\[wp\]\s*)?\[(Valid|Proved|Timeout|Unsuccess|Unknown|Failed|Stepout|Invalid)\]\s+(\S+))");
    static const std::regex kOldGoal(
        R"(^\s*(?:\[wp\]\s*)?(?:\[[^\]]*\]\s*)?Goal\s+(\S+)\s*:\s*(Valid|Proved|Timeout|Unsuccess|Unknown|Failed|Stepout|Invalid)\b)");

    WpSummary summary;
    bool have_summary = false;
    std::vector<Goal> listed;
    std::map<std::string, std::size_t> index;
    auto record = [&](const std::string& name, const std::string& status) {
        GoalStatus s = GoalStatus::Unproved;
        if (status == "Valid" || status == "Proved") {
            s = GoalStatus::Proved;
        } else if (status == "Timeout" || status == "Stepout") {
            s = GoalStatus::Timeout;
        }
        if (const auto it = index.find(name); it != index.end()) {
            listed[it->second].status = s;
        } else {
            index.emplace(name, listed.size());
            listed.push_back({name, s});
        }
    };

    for (const auto line_view : split_lines(output)) {
        const std::string line(line_view);
        std::smatch m;
        if (std::regex_search(line, m, kSummary)) {
            summary.proved = std::stoul(m[1].str());
            summary.total = std::stoul(m[2].str());
            have_summary = true;
        } else if (std::regex_search(line, m, kBracketGoal)) {
            record(m[2].str(), m[1].str());
        } else if (std::regex_search(line, m, kOldGoal)) {
            record(m[1].str(), m[2].str());
        }
    }
    if (!have_summary) {
        throw ParseError("no 'Proved goals' summary in verifier output:\n" + std::string(output));
    }
    if (summary.proved > summary.total) {
        throw ParseError("verifier summary reports more proved goals than goals:\n" + std::string(output));
    }
    const auto listed_proved = static_cast<std::size_t>(
        std::count_if(listed.begin(), listed.end(), [](const Goal& g) { return g.status == GoalStatus::Proved; }));
    const std::size_t listed_unproved = listed.size() - listed_proved;
    if (listed_proved > summary.proved || listed_unproved > summary.total - summary.proved) {
        throw ParseError("per-goal lines contradict the verifier summary:\n" + std::string(output));
    }
    summary.goals = std::move(listed);
    std::size_t n = 0;
    auto fresh = [&] {
        std::string name;
        do {
            name = "goal_" + std::to_string(++n);
        } while (index.contains(name));
        index.emplace(name, 0);
        return name;
    };
    for (std::size_t i = listed_proved; i < summary.proved; ++i) {
        summary.goals.push_back({fresh(), GoalStatus::Proved});
    }
    for (std::size_t i = listed_unproved; i < summary.total - summary.proved; ++i) {
        summary.goals.push_back({fresh(), GoalStatus::Unproved});
    }
    return summary;
}

VerificationReport run_verify(std::string_view source, std::string_view contract, const InterfaceContext& interface,
                              const fs::path& workdir, const ToolchainConfig& config) {
    if (contract.find_first_not_of(" \t\r\n") == std::string_view::npos) {
        throw ContractError("verification requires a non-empty ACSL contract");
    }
    if (!find_executable(config.verifier)) {
        throw EnvironmentError("verifier not found: " + config.verifier);
    }
    fs::create_directories(workdir);
    write_text(workdir / "verify_unit.c", assemble_unit(interface, source, contract));

    std::string provers;
    for (const auto& p : config.provers) {
        provers += provers.empty() ? p : "," + p;
    }
    std::vector<std::string> argv{config.verifier, "-wp", "-wp-prover", provers, "-wp-timeout",
                                  std::to_string(config.goal_timeout.count())};
    argv.insert(argv.end(), config.verifier_extra_args.begin(), config.verifier_extra_args.end());
    argv.emplace_back("verify_unit.c");
    const auto result = run_process(argv, workdir, config.cell_timeout);
    const std::string log = combined_log(result);
    const fs::path log_path = workdir / "verify.log";
    write_text(log_path, log);

    if (result.timed_out) {
        throw VerificationInfraError("verifier timed out after " + std::to_string(config.cell_timeout.count()) + " s");
    }
    WpSummary summary;
    try {
        summary = parse_wp_output(log);
    } catch (const ParseError&) {
        throw VerificationInfraError("verifier produced no goal summary (exit status " +
                                     std::to_string(result.exit_code) + "); see " + log_path.string());
    }
    VerificationReport report;
    report.proved = summary.proved;
    report.total = summary.total;
    report.goals = std::move(summary.goals);
    report.solver_log_path = log_path.string();
    report.tool_version = tool_version(config.verifier, "-version");
    return report;
}

EquivalenceResult parse_equivalence_output(std::string_view output) {
    static const std::regex kStat(R"(^\s*(Equal|Not equal|Unknown|Errors):\s*(\d+))");
    std::map<std::string, std::size_t> stats;
    for (const auto line_view : split_lines(output)) {
        const std::string line(line_view);
        std::smatch m;
        if (std::regex_search(line, m, kStat)) {
            stats[m[1].str()] = std::stoul(m[2].str());
        }
    }
    if (stats.empty()) {
        return {EquivalenceVerdict::NotShown, "tool error: no statistics in equivalence output"};
    }
    if (stats["Errors"] > 0) {
        return {EquivalenceVerdict::NotShown, "tool error: " + std::to_string(stats["Errors"]) + " function(s) failed"};
    }
    if (stats["Not equal"] > 0) {
        return {EquivalenceVerdict::NotShown,
                "not equal: " + std::to_string(stats["Not equal"]) + " function(s) differ at instruction level"};
    }
    if (stats["Unknown"] > 0) {
        return {EquivalenceVerdict::NotShown, "unknown: " + std::to_string(stats["Unknown"]) + " function(s) undecided"};
    }
    if (stats["Equal"] > 0) {
        return {EquivalenceVerdict::Equivalent, std::to_string(stats["Equal"]) + " function(s) equal"};
    }
    return {EquivalenceVerdict::NotShown, "no functions were compared"};
}

EquivalenceResult run_equivalence(std::string_view candidate, std::string_view reference,
                                  const InterfaceContext& interface, const fs::path& workdir,
                                  const ToolchainConfig& config) {
    auto body = [](std::string_view s) { return s.substr(0, s.find_last_not_of(" \t\r\n") + 1); };
    if (body(candidate) == body(reference)) {
        return {EquivalenceVerdict::Equivalent, "sources are identical up to trailing whitespace"};
    }
    try {
        const auto globals = global_names(interface);
        const auto cand_writes = writes_of(candidate, globals);
        const auto ref_writes = writes_of(reference, globals);
        if (cand_writes != ref_writes) {
            std::set<std::string> extra;
            std::set<std::string> missing;
            std::set_difference(cand_writes.begin(), cand_writes.end(), ref_writes.begin(), ref_writes.end(),
                                std::inserter(extra, extra.end()));
            std::set_difference(ref_writes.begin(), ref_writes.end(), cand_writes.begin(), cand_writes.end(),
                                std::inserter(missing, missing.end()));
            return {EquivalenceVerdict::NotShown, "differing side effects: candidate additionally writes " +
                                                      join_names(extra) + "; reference additionally writes " +
                                                      join_names(missing)};
        }
    } catch (const LexError&) {
        // Fall through to the tool, which reports its own failure.
    }

    if (!find_executable(config.equivalence_tool)) {
        return {EquivalenceVerdict::ToolUnavailable, config.equivalence_tool + " is not installed"};
    }
    const fs::path& root = workdir;
    const fs::path old_src = root / "reference" / "unit.c";
    const fs::path new_src = root / "candidate" / "unit.c";
    write_text(old_src, assemble_unit(interface, reference));
    write_text(new_src, assemble_unit(interface, candidate));
    const fs::path old_snap = root / "reference_snapshot";
    const fs::path new_snap = root / "candidate_snapshot";

    std::string log;
    auto step = [&](const std::vector<std::string>& args) {
        std::vector<std::string> argv{config.equivalence_tool};
        argv.insert(argv.end(), args.begin(), args.end());
        const auto r = run_process(argv, root, config.equivalence_timeout);
        log += combined_log(r);
        return r;
    };
    try {
        for (const auto& [src, snap] : {std::pair{old_src, old_snap}, std::pair{new_src, new_snap}}) {
            const auto r = step(substitute(config.equivalence_build_args, {{"{src}", src.string()}, {"{snapshot}", snap.string()}}));
            if (!r.ok()) {
                write_text(root / "equivalence.log", log);
                return {EquivalenceVerdict::NotShown, "tool error: build failed (" + first_line(r.err.empty() ? r.out : r.err) + ")"};
            }
        }
        const auto r = step(substitute(config.equivalence_compare_args, {{"{old}", old_snap.string()}, {"{new}", new_snap.string()}}));
        write_text(root / "equivalence.log", log);
        if (r.timed_out) {
            return {EquivalenceVerdict::NotShown, "tool error: compare timed out"};
        }
        if (r.exit_code != 0 && r.out.find("Equal:") == std::string::npos) {
            return {EquivalenceVerdict::NotShown, "tool error: compare exited with status " + std::to_string(r.exit_code)};
        }
        return parse_equivalence_output(r.out + "\n" + r.err);
    } catch (const EnvironmentError& e) {
        return {EquivalenceVerdict::NotShown, std::string("tool error: ") + e.what()};
    }
}

} // namespace specgen
