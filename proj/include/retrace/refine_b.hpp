#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "retrace/refine_core.hpp"

namespace retrace {

struct SearchStats {
    std::size_t max_frontier = 0;
    std::size_t pruned = 0;     // duplicate entries removed
    std::size_t truncated = 0;  // entries dropped by the branch limit
    std::size_t generations = 0;
};

enum class BOutcome { Success, Failure };

struct BRefinementResult {
    BOutcome outcome = BOutcome::Failure;
    // success: all surviving candidates, each exactly as long as the input
    std::vector<RecordedTrace> solutions;
    // failure: longest partial attempt and the abstract index it stalled on
    RecordedTrace last_attempt;
    std::size_t failed_at_index = 0;
    std::vector<std::string> stuck_enabled;  // merged events enabled at the stuck frontier
    bool branch_limit_hit = false;
    SearchStats stats;

    bool ok() const { return outcome == BOutcome::Success; }
};

// Strict 1:1 trace refinement: every abstract transition (op, s) is mirrored
// by the merged op fired with the recorded arguments, landing on a state
// whose abstract half equals s. Candidates that cannot extend are dropped.
inline BRefinementResult refine_trace_b(const CoupledMachine& coupled, const RecordedTrace& t,
                                        const SearchConfig& cfg = {}) {
    BRefinementResult res;

    auto fail_at = [&](std::size_t index, std::vector<std::vector<Transition>>& frontier) {
        res.outcome = BOutcome::Failure;
        res.failed_at_index = index;
        if (!frontier.empty()) {
            res.last_attempt = {coupled.base.name, frontier.front()};
            std::set<std::string> enabled;
            for (const auto& cand : frontier) {
                SuccessorSet succ =
                    successors(coupled.base, cand.back().post, cfg.param_limit);
                for (const auto& tr : succ.transitions) enabled.insert(tr.event);
            }
            res.stuck_enabled.assign(enabled.begin(), enabled.end());
        } else {
            res.last_attempt.machine = coupled.base.name;
        }
        return res;
    };

    std::vector<std::vector<Transition>> frontier;
    if (t.transitions.empty() || t.transitions.front().event != kInitEventName) {
        return fail_at(0, frontier);
    }
    InitialStates init = initial_states(coupled.base);
    if (init.states.empty() ||
        !subsumes(coupled, t.transitions.front().post, init.states.front())) {
        return fail_at(0, frontier);
    }
    frontier.push_back({Transition{kInitEventName, {}, init.states.front()}});
    res.stats.max_frontier = 1;

    for (std::size_t i = 1; i < t.transitions.size(); ++i) {
        const Transition& want = t.transitions[i];
        std::vector<std::vector<Transition>> next;
        for (const auto& cand : frontier) {
            StepResult step = try_step(coupled.base, cand.back().post, want.event, want.args);
            if (step.status != StepStatus::Ok) continue;
            if (!subsumes(coupled, want.post, *step.post)) continue;
            auto extended = cand;
            ArgMap args;  // arguments restricted to the merged event's parameters
            if (const Event* ev = coupled.base.find_event(want.event)) {
                for (const auto& p : ev->params) args[p.name] = want.args.at(p.name);
            }
            extended.push_back({want.event, std::move(args), *step.post});
            next.push_back(std::move(extended));
        }
        if (next.empty()) return fail_at(i, frontier);
        if (next.size() > cfg.branch_limit) {
            std::sort(next.begin(), next.end());
            res.stats.truncated += next.size() - cfg.branch_limit;
            next.resize(cfg.branch_limit);
            res.branch_limit_hit = true;
        }
        frontier = std::move(next);
        res.stats.max_frontier = std::max(res.stats.max_frontier, frontier.size());
        ++res.stats.generations;
    }

    res.outcome = BOutcome::Success;
    for (auto& cand : frontier) {
        res.solutions.push_back({coupled.base.name, std::move(cand)});
    }
    return res;
}

}  // namespace retrace
