#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "retrace/animate.hpp"
#include "retrace/trace.hpp"

namespace retrace {

struct RandomWalkResult {
    RecordedTrace trace;
    std::optional<std::size_t> deadlock_step;  // step at which no successor existed
    std::vector<AnimationIssue> issues;

    bool ok() const { return !deadlock_step.has_value(); }
};

// Deterministic seeded walk: `length` transitions after INITIALISATION.
// Successor choice is rng() modulo the successor count, not a distribution,
// so equal seeds give byte-identical traces on every platform.
inline RandomWalkResult random_walk(const Machine& m, std::size_t length, std::uint64_t seed,
                                    int param_limit = kDefaultParamLimit) {
    RandomWalkResult out;
    out.trace.machine = m.name;
    InitialStates init = initial_states(m);
    out.issues = init.issues;
    if (init.states.empty()) {
        out.deadlock_step = 0;
        return out;
    }
    out.trace.transitions.push_back({kInitEventName, {}, init.states.front()});
    std::mt19937_64 rng(seed);
    State cur = init.states.front();
    for (std::size_t step = 1; step <= length; ++step) {
        SuccessorSet succ = successors(m, cur, param_limit);
        for (auto& issue : succ.issues) out.issues.push_back(std::move(issue));
        if (succ.transitions.empty()) {
            out.deadlock_step = step;
            return out;
        }
        const Transition& pick =
            succ.transitions[static_cast<std::size_t>(rng() % succ.transitions.size())];
        out.trace.transitions.push_back(pick);
        cur = pick.post;
    }
    return out;
}

}  // namespace retrace
