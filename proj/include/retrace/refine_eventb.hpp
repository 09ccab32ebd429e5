#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "retrace/refine_b.hpp"  // SearchStats
#include "retrace/refine_core.hpp"

namespace retrace {

// A stutter transition remembered since the last abstract progress.
struct SeenTransition {
    State pre;
    std::string event;
    ArgMap args;
    State post;

    bool operator<(const SeenTransition& o) const {
        return std::tie(pre, event, args, post) < std::tie(o.pre, o.event, o.args, o.post);
    }
    bool operator==(const SeenTransition& o) const {
        return pre == o.pre && event == o.event && args == o.args && post == o.post;
    }
};

// Alg. 2's triple: concrete trace so far, abstract work left, and the
// stutter transitions taken since the last progress (cleared on progress).
struct SearchEntry {
    std::vector<Transition> trace;
    std::size_t next_abstract = 0;  // index of the next abstract transition to mirror
    std::set<SeenTransition> seen;

    bool operator<(const SearchEntry& o) const {
        return std::tie(trace, next_abstract, seen) <
               std::tie(o.trace, o.next_abstract, o.seen);
    }
};

// Entries that reached the same coupled state with the same work left and the
// same livelock guard are interchangeable; the first one wins.
inline std::vector<SearchEntry> prune_duplicates(const std::vector<SearchEntry>& frontier,
                                                 std::size_t* pruned = nullptr) {
    std::vector<SearchEntry> out;
    std::set<std::tuple<State, std::size_t, std::set<SeenTransition>>> keys;
    for (const auto& e : frontier) {
        if (e.trace.empty()) continue;
        auto key = std::make_tuple(e.trace.back().post, e.next_abstract, e.seen);
        if (keys.insert(std::move(key)).second) {
            out.push_back(e);
        } else if (pruned) {
            ++*pruned;
        }
    }
    return out;
}

enum class ExhaustionReason { DeadEnd, DepthLimit, BranchLimit, StutterBudget };

inline const char* exhaustion_reason_name(ExhaustionReason r) {
    switch (r) {
        case ExhaustionReason::DeadEnd: return "deadEnd";
        case ExhaustionReason::DepthLimit: return "depthLimit";
        case ExhaustionReason::BranchLimit: return "branchLimit";
        case ExhaustionReason::StutterBudget: return "stutterBudget";
    }
    return "?";
}

struct EventBRefinementResult {
    bool success = false;
    // success: the first-discovered solution generation (all of it under
    // breadth, the single first find under depth/mixed)
    std::vector<RecordedTrace> solutions;
    std::vector<std::size_t> inserted_counts;
    bool minimal_guaranteed = false;
    // failure
    std::vector<RecordedTrace> frontier_sample;
    ExhaustionReason reason = ExhaustionReason::DeadEnd;
    std::size_t stuck_index = 0;  // first abstract index that was never mirrored
    bool divergence_suspected = false;
    bool branch_limit_hit = false;
    SearchStats stats;

    bool ok() const { return success; }
};

namespace detail {

class EventBSearch {
public:
    EventBSearch(const CoupledMachine& coupled, const RecordedTrace& t, const RefinementMap& map,
                 const SearchConfig& cfg)
        : coupled_(coupled), t_(t), map_(map), cfg_(cfg) {}

    EventBRefinementResult run() {
        if (t_.transitions.empty() || t_.transitions.front().event != kInitEventName) {
            return fail({});
        }
        InitialStates init = initial_states(coupled_.base);
        if (init.states.empty() ||
            !subsumes(coupled_, t_.transitions.front().post, init.states.front())) {
            return fail({});
        }
        SearchEntry root;
        root.trace.push_back({kInitEventName, {}, init.states.front()});
        root.next_abstract = 1;
        max_progress_ = 1;
        if (done(root)) return succeed({root});

        switch (cfg_.strategy) {
            case Strategy::Breadth: return run_breadth(root);
            case Strategy::Depth: return run_depth(root);
            case Strategy::Mixed: return run_mixed(root);
        }
        return fail({});
    }

private:
    bool done(const SearchEntry& e) const { return e.next_abstract >= t_.transitions.size(); }

    struct Expansion {
        std::vector<SearchEntry> progress;
        std::vector<SearchEntry> stutter;
    };

    // One round of Alg. 2 for a single entry: progress moves via alt(op)
    // landing on the recorded abstract state, and stutter moves via
    // skip u alt(op) that leave the abstract projection unchanged, minus the
    // transitions already seen since the last progress.
    Expansion expand(const SearchEntry& e) {
        Expansion out;
        if (e.trace.size() >= cfg_.max_depth) {
            depth_blocked_ = true;
            return out;
        }
        const State& cur = e.trace.back().post;
        const Transition& want = t_.transitions[e.next_abstract];
        const std::set<std::string>* alts = nullptr;
        if (auto it = map_.alt.find(want.event); it != map_.alt.end()) alts = &it->second;
        State cur_a = project(coupled_, cur, Side::A);

        SuccessorSet succ = successors(coupled_.base, cur, cfg_.param_limit);
        for (const auto& tr : succ.transitions) {
            bool in_alt = alts && alts->count(tr.event) > 0;
            if (in_alt && subsumes(coupled_, want.post, tr.post)) {
                SearchEntry child;
                child.trace = e.trace;
                child.trace.push_back(tr);
                child.next_abstract = e.next_abstract + 1;
                max_progress_ = std::max(max_progress_, child.next_abstract);
                out.progress.push_back(std::move(child));
            }
            if ((in_alt || map_.skip.count(tr.event) > 0) &&
                project(coupled_, tr.post, Side::A) == cur_a) {
                SeenTransition key{cur, tr.event, tr.args, tr.post};
                if (e.seen.count(key)) continue;  // livelock guard
                if (e.seen.size() >= cfg_.stutter_budget) {
                    budget_blocked_ = true;
                    const Event* last = coupled_.base.find_event(e.trace.back().event);
                    if (last && last->convergent) budget_blocked_convergent_ = true;
                    continue;
                }
                SearchEntry child;
                child.trace = e.trace;
                child.trace.push_back(tr);
                child.next_abstract = e.next_abstract;
                child.seen = e.seen;
                child.seen.insert(std::move(key));
                out.stutter.push_back(std::move(child));
            }
        }
        return out;
    }

    std::vector<SearchEntry> cap_frontier(std::vector<SearchEntry> gen) {
        gen = prune_duplicates(gen, &stats_.pruned);
        if (gen.size() > cfg_.branch_limit) {
            std::sort(gen.begin(), gen.end());
            stats_.truncated += gen.size() - cfg_.branch_limit;
            gen.resize(cfg_.branch_limit);
            truncated_ = true;
        }
        return gen;
    }

    EventBRefinementResult run_breadth(const SearchEntry& root) {
        std::vector<SearchEntry> gen{root};
        stats_.max_frontier = 1;
        while (!gen.empty()) {
            ++stats_.generations;
            std::vector<SearchEntry> next;
            std::vector<SearchEntry> found;
            for (const auto& e : gen) {
                Expansion ex = expand(e);
                for (auto& c : ex.progress) {
                    if (done(c)) found.push_back(c);
                    next.push_back(std::move(c));
                }
                for (auto& c : ex.stutter) next.push_back(std::move(c));
            }
            if (!found.empty()) return succeed(found);
            next = cap_frontier(std::move(next));
            if (next.empty()) return fail(gen);
            stats_.max_frontier = std::max(stats_.max_frontier, next.size());
            gen = std::move(next);
        }
        return fail({});
    }

    EventBRefinementResult run_depth(const SearchEntry& root) {
        std::vector<SearchEntry> stack{root};
        stats_.max_frontier = 1;
        SearchEntry deepest = root;
        while (!stack.empty()) {
            SearchEntry e = std::move(stack.back());
            stack.pop_back();
            ++stats_.generations;
            if (e.trace.size() > deepest.trace.size()) deepest = e;
            Expansion ex = expand(e);
            for (const auto& c : ex.progress) {
                if (done(c)) return succeed({c});
            }
            // canonical order pops progress children first
            for (auto it = ex.stutter.rbegin(); it != ex.stutter.rend(); ++it) {
                stack.push_back(std::move(*it));
            }
            for (auto it = ex.progress.rbegin(); it != ex.progress.rend(); ++it) {
                stack.push_back(std::move(*it));
            }
            stats_.max_frontier = std::max(stats_.max_frontier, stack.size());
        }
        return fail({deepest});
    }

    // Depth-first through stutter chains, breadth-first across abstract
    // progress; the first completed entry wins.
    EventBRefinementResult run_mixed(const SearchEntry& root) {
        std::vector<SearchEntry> current{root};
        stats_.max_frontier = 1;
        while (!current.empty()) {
            ++stats_.generations;
            std::vector<SearchEntry> seeds;
            std::vector<SearchEntry> stack(current.rbegin(), current.rend());
            std::vector<SearchEntry> last_alive = current;
            while (!stack.empty()) {
                SearchEntry e = std::move(stack.back());
                stack.pop_back();
                Expansion ex = expand(e);
                for (auto& c : ex.progress) {
                    if (done(c)) return succeed({c});
                    seeds.push_back(std::move(c));
                }
                for (auto it = ex.stutter.rbegin(); it != ex.stutter.rend(); ++it) {
                    stack.push_back(std::move(*it));
                }
                stats_.max_frontier =
                    std::max(stats_.max_frontier, stack.size() + seeds.size());
            }
            seeds = cap_frontier(std::move(seeds));
            if (seeds.empty()) return fail(last_alive);
            current = std::move(seeds);
        }
        return fail({});
    }

    EventBRefinementResult succeed(const std::vector<SearchEntry>& found) {
        EventBRefinementResult res;
        res.success = true;
        res.minimal_guaranteed = cfg_.strategy == Strategy::Breadth && !truncated_;
        res.branch_limit_hit = truncated_;
        for (const auto& e : found) {
            res.solutions.push_back({coupled_.base.name, e.trace});
            res.inserted_counts.push_back(e.trace.size() - t_.transitions.size());
        }
        res.stats = stats_;
        return res;
    }

    EventBRefinementResult fail(const std::vector<SearchEntry>& last_frontier) {
        EventBRefinementResult res;
        res.success = false;
        if (truncated_) res.reason = ExhaustionReason::BranchLimit;
        else if (depth_blocked_) res.reason = ExhaustionReason::DepthLimit;
        else if (budget_blocked_) res.reason = ExhaustionReason::StutterBudget;
        else res.reason = ExhaustionReason::DeadEnd;
        res.stuck_index = max_progress_;
        res.divergence_suspected = res.reason == ExhaustionReason::StutterBudget &&
                                   budget_blocked_ && !budget_blocked_convergent_;
        res.branch_limit_hit = truncated_;
        for (std::size_t i = 0; i < last_frontier.size() && i < 5; ++i) {
            res.frontier_sample.push_back({coupled_.base.name, last_frontier[i].trace});
        }
        res.stats = stats_;
        return res;
    }

    const CoupledMachine& coupled_;
    const RecordedTrace& t_;
    const RefinementMap& map_;
    const SearchConfig& cfg_;
    SearchStats stats_;
    std::size_t max_progress_ = 0;
    bool depth_blocked_ = false;
    bool budget_blocked_ = false;
    bool budget_blocked_convergent_ = false;
    bool truncated_ = false;
};

}  // namespace detail

inline EventBRefinementResult refine_trace_eventb(const CoupledMachine& coupled,
                                                  const RecordedTrace& t,
                                                  const RefinementMap& map,
                                                  const SearchConfig& cfg = {}) {
    return detail::EventBSearch(coupled, t, map, cfg).run();
}

}  // namespace retrace
