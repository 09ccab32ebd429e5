#pragma once

#include <optional>
#include <string>
#include <vector>

#include "retrace/animate.hpp"
#include "retrace/coupling.hpp"
#include "retrace/trace.hpp"

namespace retrace {

// s [= s': the recorded abstract post-state is reproduced exactly on the
// abstract half of the coupled state. Extra keys on the recorded side (e.g.
// from a chained, already-coupled trace) are ignored.
inline bool subsumes(const CoupledMachine& cm, const State& abstract_post,
                     const State& coupled_post) {
    for (const auto& name : cm.origin_a) {
        const Value* rec = abstract_post.find(name);
        const Value* got = coupled_post.find(name);
        if (!rec || !got || !(*rec == *got)) return false;
    }
    return true;
}

struct DeriveResult {
    std::optional<RefinementMap> map;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return map.has_value() && diagnostics.empty(); }
};

// alt(a) = { c | a in c.refinesEvents }, skip = { c | c refines nothing }.
// In B mode the map is the identity on names.
inline DeriveResult derive_refinement_map(const Machine& abstract, const Machine& concrete,
                                          RefinementMode mode) {
    DeriveResult res;
    RefinementMap m;
    if (mode == RefinementMode::B) {
        for (const auto& ev : abstract.events) m.alt[ev.name] = {ev.name};
        res.map = std::move(m);
        return res;
    }
    for (const auto& ce : concrete.events) {
        if (ce.refines_events.empty()) {
            m.skip.insert(ce.name);
        } else {
            for (const auto& target : ce.refines_events) {
                m.alt[target].insert(ce.name);
            }
        }
    }
    for (const auto& ae : abstract.events) {
        if (!m.alt.count(ae.name)) {
            res.diagnostics.push_back({DiagCode::UnrefinedAbstractEvent,
                                       "abstract event '" + ae.name +
                                           "' is refined by no concrete event",
                                       ae.pos});
        }
    }
    if (!res.diagnostics.empty()) return res;
    res.map = std::move(m);
    return res;
}

enum class Strategy { Breadth, Depth, Mixed };

inline const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Breadth: return "breadth";
        case Strategy::Depth: return "depth";
        case Strategy::Mixed: return "mixed";
    }
    return "?";
}

struct SearchConfig {
    std::size_t max_depth = 1000;      // cap on concrete trace length
    std::size_t branch_limit = 1000;   // frontier entries carried per step
    std::size_t stutter_budget = 20;   // consecutive insertions between abstract steps
    Strategy strategy = Strategy::Breadth;
    int param_limit = kDefaultParamLimit;
};

enum class ReplayStatus { Ok, MissingInit, UnknownEvent, Disabled, PostMismatch };

struct ReplayResult {
    ReplayStatus status = ReplayStatus::Ok;
    std::size_t failed_index = 0;
    std::string detail;

    bool ok() const { return status == ReplayStatus::Ok; }
};

inline const char* replay_status_name(ReplayStatus s) {
    switch (s) {
        case ReplayStatus::Ok: return "ok";
        case ReplayStatus::MissingInit: return "missing initialisation";
        case ReplayStatus::UnknownEvent: return "unknown event";
        case ReplayStatus::Disabled: return "event disabled";
        case ReplayStatus::PostMismatch: return "different post-state";
    }
    return "?";
}

namespace detail {

// Post-states match on the variables both sides know about; variables of the
// machine absent from the recorded post (and vice versa) are unchecked.
inline bool posts_match(const Machine& m, const State& recorded, const State& computed) {
    for (const auto& [k, v] : recorded.vals) {
        if (!m.find_variable(k)) continue;
        const Value* got = computed.find(k);
        if (!got || !(*got == v)) return false;
    }
    return true;
}

}  // namespace detail

// Walks a stored trace on m, re-checking every step against the successor
// relation; reports the first failing index.
inline ReplayResult replay(const Machine& m, const RecordedTrace& t) {
    if (t.transitions.empty() || t.transitions.front().event != kInitEventName) {
        return {ReplayStatus::MissingInit, 0, "trace does not start with INITIALISATION"};
    }
    InitialStates init = initial_states(m);
    if (init.states.empty()) {
        return {ReplayStatus::Disabled, 0, "machine has no valid initial state"};
    }
    if (!detail::posts_match(m, t.transitions.front().post, init.states.front())) {
        return {ReplayStatus::PostMismatch, 0,
                "recorded initial state differs from " + init.states.front().to_string()};
    }
    State cur = init.states.front();
    for (std::size_t i = 1; i < t.transitions.size(); ++i) {
        const Transition& tr = t.transitions[i];
        StepResult step = try_step(m, cur, tr.event, tr.args);
        switch (step.status) {
            case StepStatus::UnknownEvent:
                return {ReplayStatus::UnknownEvent, i, "no event named '" + tr.event + "'"};
            case StepStatus::BadArgs:
                return {ReplayStatus::Disabled, i,
                        "arguments do not fit the parameters of '" + tr.event + "'"};
            case StepStatus::Disabled:
                return {ReplayStatus::Disabled, i, "guard of '" + tr.event + "' is false"};
            case StepStatus::PostViolatesInvariant:
                return {ReplayStatus::Disabled, i,
                        "post-state of '" + tr.event + "' violates the invariant"};
            case StepStatus::EvalFailed:
                return {ReplayStatus::Disabled, i,
                        "evaluation of '" + tr.event + "' left a variable domain"};
            case StepStatus::Ok:
                break;
        }
        if (!detail::posts_match(m, tr.post, *step.post)) {
            return {ReplayStatus::PostMismatch, i,
                    "expected " + tr.post.to_string() + ", reached " + step.post->to_string()};
        }
        cur = *step.post;
    }
    return {};
}

}  // namespace retrace
