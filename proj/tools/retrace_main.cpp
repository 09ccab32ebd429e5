// Command-line front end: parse machines, couple refinement pairs, record
// seeded walks, refine and replay traces, and emit trace diagrams.
//
// Exit codes: 0 success, 1 usage/parse error, 2 refinement/replay failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "retrace/retrace.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFailure = 2;

retrace::RunReport g_report;
std::string g_report_file;

void flush_report() {
    if (g_report_file.empty()) {
        std::cerr << g_report.to_text();
        return;
    }
    std::ofstream f(g_report_file, std::ios::binary);
    if (f) {
        f << g_report.to_text();
    } else {
        std::cerr << "cannot write report to '" << g_report_file << "'\n";
    }
}

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) return std::nullopt;
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

bool write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) return false;
    f << text;
    return true;
}

std::optional<retrace::Machine> load_machine(const std::string& path) {
    retrace::PhaseTimer timer(g_report, "parse");
    auto src = read_file(path);
    if (!src) {
        std::cout << path << ": cannot read file\n";
        return std::nullopt;
    }
    retrace::ParseResult res = retrace::parse_machine(*src);
    if (!res.ok()) {
        for (const auto& d : res.diagnostics) {
            std::cout << path << ":" << retrace::format_diagnostic(d) << "\n";
        }
        return std::nullopt;
    }
    return std::move(res.machine);
}

std::optional<retrace::LoadedTrace> load_trace(const std::string& path) {
    try {
        return retrace::read_trace_file(path);
    } catch (const retrace::TraceIoError& e) {
        std::cout << e.what() << "\n";
        return std::nullopt;
    }
}

retrace::RefinementMode parse_mode(const std::string& mode) {
    return mode == "b" ? retrace::RefinementMode::B : retrace::RefinementMode::EventB;
}

// out.json -> out_2.json, out_3.json ... for --all
std::string numbered_path(const std::string& path, std::size_t index) {
    if (index == 1) return path;
    auto dot = path.rfind('.');
    auto slash = path.rfind('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
        return path + "_" + std::to_string(index);
    }
    return path.substr(0, dot) + "_" + std::to_string(index) + path.substr(dot);
}

struct RefineSetup {
    retrace::Machine abstract;
    retrace::Machine concrete;
    retrace::CoupledMachine coupled;
    retrace::RefinementMap map;
    retrace::RecordedTrace trace;
};

std::optional<RefineSetup> prepare_refinement(const std::string& abstract_path,
                                              const std::string& concrete_path,
                                              const std::string& trace_path,
                                              retrace::RefinementMode mode) {
    auto abstract = load_machine(abstract_path);
    auto concrete = load_machine(concrete_path);
    if (!abstract || !concrete) return std::nullopt;

    auto diags = retrace::check_refinement_signature(*abstract, *concrete, mode);
    if (!diags.empty()) {
        std::cout << retrace::format_diagnostics(diags);
        return std::nullopt;
    }
    auto derived = retrace::derive_refinement_map(*abstract, *concrete, mode);
    if (!derived.ok()) {
        std::cout << retrace::format_diagnostics(derived.diagnostics);
        return std::nullopt;
    }
    retrace::InterleaveResult coupled;
    {
        retrace::PhaseTimer timer(g_report, "couple");
        coupled = retrace::interleave(*abstract, *concrete, mode);
    }
    if (!coupled.ok()) {
        std::cout << retrace::format_diagnostics(coupled.diagnostics);
        return std::nullopt;
    }
    auto loaded = load_trace(trace_path);
    if (!loaded) return std::nullopt;
    auto rep = retrace::replay(*abstract, loaded->trace);
    if (!rep.ok()) {
        std::cout << "input trace does not replay on '" << abstract->name << "' at index "
                  << rep.failed_index << " (" << retrace::replay_status_name(rep.status)
                  << ": " << rep.detail << ")\n";
        return std::nullopt;
    }
    return RefineSetup{std::move(*abstract), std::move(*concrete), std::move(*coupled.coupled),
                       std::move(*derived.map), std::move(loaded->trace)};
}

int cmd_parse(const std::string& path, bool print) {
    auto m = load_machine(path);
    if (!m) {
        g_report.result = {{"ok", false}};
        return kExitUsage;
    }
    if (print) std::cout << retrace::print_machine(*m);
    g_report.result = {{"ok", true},
                       {"machine", m->name},
                       {"variables", m->variables.size()},
                       {"events", m->events.size()}};
    return kExitOk;
}

int cmd_couple(const std::string& abstract_path, const std::string& concrete_path,
               const std::string& out, const std::string& mode_str) {
    auto abstract = load_machine(abstract_path);
    auto concrete = load_machine(concrete_path);
    if (!abstract || !concrete) {
        g_report.result = {{"ok", false}};
        return kExitUsage;
    }
    retrace::RefinementMode mode = parse_mode(mode_str);
    auto diags = retrace::check_refinement_signature(*abstract, *concrete, mode);
    if (!diags.empty()) {
        std::cout << retrace::format_diagnostics(diags);
        g_report.result = {{"ok", false}, {"diagnostics", diags.size()}};
        return kExitUsage;
    }
    retrace::InterleaveResult res;
    {
        retrace::PhaseTimer timer(g_report, "couple");
        res = retrace::interleave(*abstract, *concrete, mode);
    }
    if (!res.ok()) {
        std::cout << retrace::format_diagnostics(res.diagnostics);
        g_report.result = {{"ok", false}, {"diagnostics", res.diagnostics.size()}};
        return kExitUsage;
    }
    if (!write_file(out, retrace::print_machine(res.coupled->base))) {
        std::cout << "cannot write '" << out << "'\n";
        return kExitUsage;
    }
    g_report.result = {{"ok", true},
                       {"variables", res.coupled->base.variables.size()},
                       {"events", res.coupled->base.events.size()}};
    return kExitOk;
}

int cmd_record(const std::string& path, std::size_t length, std::uint64_t seed,
               const std::string& out, int param_limit) {
    auto m = load_machine(path);
    if (!m) {
        g_report.result = {{"ok", false}};
        return kExitUsage;
    }
    retrace::RandomWalkResult walk;
    {
        retrace::PhaseTimer timer(g_report, "search");
        walk = retrace::random_walk(*m, length, seed, param_limit);
    }
    try {
        retrace::write_trace_file(out, walk.trace);
    } catch (const retrace::TraceIoError& e) {
        std::cout << e.what() << "\n";
        return kExitUsage;
    }
    g_report.result = {{"ok", walk.ok()},
                       {"transitions", walk.trace.transitions.size()},
                       {"animationIssues", walk.issues.size()},
                       {"seed", seed}};
    for (const auto& issue : walk.issues) {
        std::cout << (issue.kind == retrace::AnimationIssue::Kind::InvariantViolation
                          ? "invariant violation: "
                          : "evaluation failure: ")
                  << issue.event << retrace::args_to_string(issue.args) << ": "
                  << issue.message << "\n";
    }
    if (!walk.ok()) {
        g_report.result["deadlockAtStep"] = *walk.deadlock_step;
        std::cout << "deadlock reached at step " << *walk.deadlock_step
                  << "; partial trace written to " << out << "\n";
        return kExitFailure;
    }
    std::cout << "recorded " << walk.trace.transitions.size() << " transitions to " << out
              << "\n";
    return kExitOk;
}

void fill_search_stats(const retrace::SearchStats& stats) {
    g_report.frontier_max = stats.max_frontier;
    g_report.frontier_pruned = stats.pruned;
    g_report.frontier_truncated = stats.truncated;
}

int cmd_refine(const std::string& mode_str, const std::string& abstract_path,
               const std::string& concrete_path, const std::string& trace_path,
               const std::string& out, const retrace::SearchConfig& cfg, bool all) {
    retrace::RefinementMode mode = parse_mode(mode_str);
    auto setup = prepare_refinement(abstract_path, concrete_path, trace_path, mode);
    if (!setup) {
        g_report.result = {{"ok", false}};
        return kExitUsage;
    }

    std::vector<retrace::RecordedTrace> solutions;
    nlohmann::json result;
    int exit_code = kExitOk;
    retrace::RecordedTrace failure_trace;

    if (mode == retrace::RefinementMode::B) {
        retrace::BRefinementResult res;
        {
            retrace::PhaseTimer timer(g_report, "search");
            res = retrace::refine_trace_b(setup->coupled, setup->trace, cfg);
        }
        fill_search_stats(res.stats);
        result["outcome"] = res.ok() ? "success" : "failure";
        result["branchLimitHit"] = res.branch_limit_hit;
        if (res.ok()) {
            solutions = std::move(res.solutions);
            result["solutions"] = solutions.size();
            result["insertedTransitions"] = 0;
        } else {
            result["failedAtIndex"] = res.failed_at_index;
            result["enabledAtFrontier"] = res.stuck_enabled;
            failure_trace = std::move(res.last_attempt);
            std::cout << "no refining trace found: stuck at index "
                      << res.failed_at_index << "\n";
            exit_code = kExitFailure;
        }
    } else {
        retrace::EventBRefinementResult res;
        {
            retrace::PhaseTimer timer(g_report, "search");
            res = retrace::refine_trace_eventb(setup->coupled, setup->trace, setup->map, cfg);
        }
        fill_search_stats(res.stats);
        result["outcome"] = res.ok() ? "success" : "failure";
        result["branchLimitHit"] = res.branch_limit_hit;
        if (res.ok()) {
            solutions = std::move(res.solutions);
            result["solutions"] = solutions.size();
            result["insertedTransitions"] = res.inserted_counts.front();
            result["minimalGuaranteed"] = res.minimal_guaranteed;
        } else {
            result["reason"] = retrace::exhaustion_reason_name(res.reason);
            result["stuckIndex"] = res.stuck_index;
            result["divergenceSuspected"] = res.divergence_suspected;
            if (!res.frontier_sample.empty()) failure_trace = res.frontier_sample.front();
            std::cout << "no refining trace found: "
                      << retrace::exhaustion_reason_name(res.reason) << ", stuck at index "
                      << res.stuck_index << "\n";
            if (res.divergence_suspected) {
                std::cout << "warning: stutter budget exhausted on non-convergent events; "
                             "divergence suspected\n";
            }
            exit_code = kExitFailure;
        }
    }

    try {
        retrace::PhaseTimer timer(g_report, "io");
        if (exit_code == kExitOk) {
            std::size_t count = all ? solutions.size() : 1;
            for (std::size_t i = 1; i <= count; ++i) {
                retrace::write_trace_file(numbered_path(out, i), solutions[i - 1],
                                          &setup->map);
            }
            std::cout << "refined: " << solutions.size() << " solution"
                      << (solutions.size() == 1 ? "" : "s") << ", wrote " << count
                      << " to " << out << "\n";
        } else if (!failure_trace.transitions.empty()) {
            retrace::write_trace_file(out, failure_trace, &setup->map);
            std::cout << "last attempt written to " << out << "\n";
        }
    } catch (const retrace::TraceIoError& e) {
        std::cout << e.what() << "\n";
        return kExitUsage;
    }
    g_report.result = std::move(result);
    return exit_code;
}

int cmd_replay(const std::string& machine_path, const std::string& trace_path) {
    auto m = load_machine(machine_path);
    if (!m) {
        g_report.result = {{"ok", false}};
        return kExitUsage;
    }
    auto loaded = load_trace(trace_path);
    if (!loaded) {
        g_report.result = {{"ok", false}};
        return kExitUsage;
    }
    retrace::ReplayResult res;
    {
        retrace::PhaseTimer timer(g_report, "search");
        res = retrace::replay(*m, loaded->trace);
    }
    if (res.ok()) {
        std::cout << "replay: ok (" << loaded->trace.transitions.size() << " transitions)\n";
        g_report.result = {{"ok", true}, {"transitions", loaded->trace.transitions.size()}};
        return kExitOk;
    }
    std::cout << "replay failed at index " << res.failed_index << ": "
              << retrace::replay_status_name(res.status) << " (" << res.detail << ")\n";
    g_report.result = {{"ok", false},
                       {"failedIndex", res.failed_index},
                       {"reason", retrace::replay_status_name(res.status)}};
    return kExitFailure;
}

int cmd_viz(const std::string& trace_path, const std::string& solution_path,
            const std::string& out) {
    auto abstract = load_trace(trace_path);
    auto solution = load_trace(solution_path);
    if (!abstract || !solution) {
        g_report.result = {{"ok", false}};
        return kExitUsage;
    }
    if (!solution->refinement) {
        std::cout << solution_path
                  << ": no refinement block; pass a solution produced by 'refine'\n";
        g_report.result = {{"ok", false}};
        return kExitUsage;
    }
    try {
        retrace::TraceDiagram d =
            retrace::build_diagram(abstract->trace, solution->trace, *solution->refinement);
        if (!write_file(out, retrace::emit_dot(d))) {
            std::cout << "cannot write '" << out << "'\n";
            return kExitUsage;
        }
        g_report.result = {{"ok", true},
                           {"abstractBoxes", d.abstract_lane.size()},
                           {"concreteBoxes", d.concrete_lane.size()},
                           {"links", d.links.size()}};
        std::cout << "diagram written to " << out << "\n";
        return kExitOk;
    } catch (const retrace::DiagramError& e) {
        std::cout << e.what() << "\n";
        g_report.result = {{"ok", false}, {"error", e.what()}};
        return kExitFailure;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"trace refinement for finite-state guarded-command machines"};
    app.require_subcommand(1);

    g_report.command.assign(argv, argv + argc);
    if (!g_report.command.empty()) {
        // the binary path varies between environments; echo the basename
        auto& exe = g_report.command.front();
        auto slash = exe.rfind('/');
        if (slash != std::string::npos) exe = exe.substr(slash + 1);
    }

    std::string report_file;
    std::uint64_t seed = 1;
    app.add_option("--report", report_file, "write the run report to FILE instead of stderr");
    app.add_option("--seed", seed, "seed for randomized commands");

    // parse
    std::string parse_path;
    bool parse_print = false;
    auto* sub_parse = app.add_subcommand("parse", "check a machine file");
    sub_parse->add_option("machine", parse_path, "machine file")->required();
    sub_parse->add_flag("--print", parse_print, "print the canonical form");

    // couple
    std::string couple_a, couple_c, couple_out;
    std::string couple_mode = "eventb";
    auto* sub_couple = app.add_subcommand("couple", "emit the interleaved machine");
    sub_couple->add_option("abstract", couple_a, "abstract machine file")->required();
    sub_couple->add_option("concrete", couple_c, "concrete machine file")->required();
    sub_couple->add_option("-o,--output", couple_out, "output machine file")->required();
    sub_couple->add_option("--mode", couple_mode, "b or eventb")
        ->check(CLI::IsMember({"b", "eventb"}));

    // record
    std::string record_path, record_out;
    std::size_t record_length = 10;
    int record_params = retrace::kDefaultParamLimit;
    auto* sub_record = app.add_subcommand("record", "record a seeded random walk");
    sub_record->add_option("machine", record_path, "machine file")->required();
    sub_record->add_option("--length", record_length, "number of transitions after INIT")
        ->required();
    sub_record->add_option("-o,--output", record_out, "output trace file")->required();
    sub_record->add_option("--param-limit", record_params,
                           "guard solutions enumerated per event");

    // refine
    std::string refine_mode, refine_a, refine_c, refine_trace, refine_out;
    std::string refine_strategy = "breadth";
    retrace::SearchConfig cfg;
    bool refine_all = false;
    auto* sub_refine = app.add_subcommand("refine", "refine an abstract trace");
    sub_refine->add_option("--mode", refine_mode, "b or eventb")
        ->required()
        ->check(CLI::IsMember({"b", "eventb"}));
    sub_refine->add_option("abstract", refine_a, "abstract machine file")->required();
    sub_refine->add_option("concrete", refine_c, "concrete machine file")->required();
    sub_refine->add_option("trace", refine_trace, "abstract trace file")->required();
    sub_refine->add_option("-o,--output", refine_out, "output trace file")->required();
    sub_refine->add_option("--strategy", refine_strategy, "breadth, depth or mixed")
        ->check(CLI::IsMember({"breadth", "depth", "mixed"}));
    sub_refine->add_option("--depth", cfg.max_depth, "concrete trace length cap");
    sub_refine->add_option("--branch", cfg.branch_limit, "frontier entries carried per step");
    sub_refine->add_option("--stutter", cfg.stutter_budget,
                           "consecutive insertions between abstract steps");
    sub_refine->add_option("--param-limit", cfg.param_limit,
                           "guard solutions enumerated per event");
    sub_refine->add_flag("--all", refine_all, "write every solution, numbered");

    // replay
    std::string replay_machine, replay_trace;
    auto* sub_replay = app.add_subcommand("replay", "replay a trace on a machine");
    sub_replay->add_option("machine", replay_machine, "machine file")->required();
    sub_replay->add_option("trace", replay_trace, "trace file")->required();

    // viz
    std::string viz_trace, viz_solution, viz_out;
    auto* sub_viz = app.add_subcommand("viz", "emit the refinement diagram");
    sub_viz->add_option("trace", viz_trace, "abstract trace file")->required();
    sub_viz->add_option("solution", viz_solution, "solution trace file")->required();
    sub_viz->add_option("-o,--output", viz_out, "output dot file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    g_report_file = report_file;
    int rc = kExitUsage;
    {
        retrace::PhaseTimer total(g_report, "total");
        if (sub_parse->parsed()) {
            rc = cmd_parse(parse_path, parse_print);
        } else if (sub_couple->parsed()) {
            rc = cmd_couple(couple_a, couple_c, couple_out, couple_mode);
        } else if (sub_record->parsed()) {
            rc = cmd_record(record_path, record_length, seed, record_out, record_params);
        } else if (sub_refine->parsed()) {
            if (refine_strategy == "depth") cfg.strategy = retrace::Strategy::Depth;
            else if (refine_strategy == "mixed") cfg.strategy = retrace::Strategy::Mixed;
            else cfg.strategy = retrace::Strategy::Breadth;
            rc = cmd_refine(refine_mode, refine_a, refine_c, refine_trace, refine_out, cfg,
                            refine_all);
        } else if (sub_replay->parsed()) {
            rc = cmd_replay(replay_machine, replay_trace);
        } else if (sub_viz->parsed()) {
            rc = cmd_viz(viz_trace, viz_solution, viz_out);
        }
    }
    flush_report();
    return rc;
}
