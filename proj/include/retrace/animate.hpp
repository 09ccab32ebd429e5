#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "retrace/ast.hpp"
#include "retrace/eval.hpp"
#include "retrace/state.hpp"

namespace retrace {

// Parameter instantiations per event are capped at the first N
// guard-satisfying solutions, in enumeration order.
inline constexpr int kDefaultParamLimit = 5;

struct AnimationIssue {
    enum class Kind { InvariantViolation, EvalFailure };
    Kind kind;
    std::string event;
    ArgMap args;
    std::optional<State> post;
    std::string message;
};

struct SuccessorSet {
    std::vector<Transition> transitions;  // sorted by (event, args)
    std::vector<AnimationIssue> issues;   // enabled but invariant-breaking or eval-failing
};

namespace detail {

// Odometer over parameter domains, declaration order, canonical value order.
// Domains are indexed lazily, so huge ranges cost time, not memory.
class ArgEnumerator {
public:
    explicit ArgEnumerator(const std::vector<Param>& params) : params_(params) {
        idx_.assign(params_.size(), 0);
        done_ = std::any_of(params_.begin(), params_.end(),
                            [](const Param& p) { return p.domain.size() == 0; });
    }

    bool next(ArgMap& out) {
        if (done_) return false;
        out.clear();
        for (std::size_t i = 0; i < params_.size(); ++i) {
            out[params_[i].name] = params_[i].domain.value_at(idx_[i]);
        }
        // advance
        std::size_t i = params_.size();
        while (i > 0) {
            --i;
            if (++idx_[i] < params_[i].domain.size()) return true;
            idx_[i] = 0;
            if (i == 0) done_ = true;
        }
        if (params_.empty()) done_ = true;
        return true;
    }

private:
    const std::vector<Param>& params_;
    std::vector<std::size_t> idx_;
    bool done_ = false;
};

}  // namespace detail

// All transitions of one event from s, capped at param_limit guard solutions.
inline void enumerate_event(const Machine& m, const Event& ev, const State& s, int param_limit,
                            SuccessorSet& out) {
    detail::ArgEnumerator en(ev.params);
    ArgMap args;
    int solutions = 0;
    while (en.next(args)) {
        bool enabled;
        try {
            enabled = eval_predicate(ev.guard, s, args);
        } catch (const EvalError& e) {
            out.issues.push_back({AnimationIssue::Kind::EvalFailure, ev.name, args, std::nullopt,
                                  e.what()});
            continue;
        }
        if (!enabled) continue;
        if (++solutions > param_limit) break;
        try {
            State post = apply_action(m, ev.action, s, args);
            if (!eval_invariant(m, post)) {
                out.issues.push_back({AnimationIssue::Kind::InvariantViolation, ev.name, args,
                                      post, "post-state violates the invariant"});
                continue;
            }
            out.transitions.push_back({ev.name, args, std::move(post)});
        } catch (const EvalError& e) {
            out.issues.push_back(
                {AnimationIssue::Kind::EvalFailure, ev.name, args, std::nullopt, e.what()});
        }
    }
}

// The successor relation: every enabled (event, args) whose post-state keeps
// the invariant. Deterministically ordered by (event name, args).
inline SuccessorSet successors(const Machine& m, const State& s,
                               int param_limit = kDefaultParamLimit) {
    SuccessorSet out;
    for (const auto& ev : m.events) {
        enumerate_event(m, ev, s, param_limit, out);
    }
    std::sort(out.transitions.begin(), out.transitions.end());
    return out;
}

struct InitialStates {
    std::vector<State> states;  // singleton on success
    std::vector<AnimationIssue> issues;
};

inline InitialStates initial_states(const Machine& m) {
    InitialStates out;
    try {
        State init = apply_action(m, m.init, State{}, {});
        if (!eval_invariant(m, init)) {
            out.issues.push_back({AnimationIssue::Kind::InvariantViolation, kInitEventName, {},
                                  init, "initial state violates the invariant"});
            return out;
        }
        out.states.push_back(std::move(init));
    } catch (const EvalError& e) {
        out.issues.push_back(
            {AnimationIssue::Kind::EvalFailure, kInitEventName, {}, std::nullopt, e.what()});
    }
    return out;
}

enum class StepStatus { Ok, UnknownEvent, BadArgs, Disabled, PostViolatesInvariant, EvalFailed };

struct StepResult {
    StepStatus status = StepStatus::Ok;
    std::optional<State> post;
};

// Checks one specific (event, args) against the uncapped successor relation.
// Extra argument entries beyond the event's parameters are ignored.
inline StepResult try_step(const Machine& m, const State& s, const std::string& event,
                           const ArgMap& args) {
    const Event* ev = m.find_event(event);
    if (!ev) return {StepStatus::UnknownEvent, std::nullopt};
    ArgMap eff;
    for (const auto& p : ev->params) {
        auto it = args.find(p.name);
        if (it == args.end()) return {StepStatus::BadArgs, std::nullopt};
        if (!p.domain.contains(it->second)) return {StepStatus::BadArgs, std::nullopt};
        eff[p.name] = it->second;
    }
    try {
        if (!eval_predicate(ev->guard, s, eff)) return {StepStatus::Disabled, std::nullopt};
        State post = apply_action(m, ev->action, s, eff);
        if (!eval_invariant(m, post)) {
            return {StepStatus::PostViolatesInvariant, std::move(post)};
        }
        return {StepStatus::Ok, std::move(post)};
    } catch (const EvalError&) {
        return {StepStatus::EvalFailed, std::nullopt};
    }
}

}  // namespace retrace
