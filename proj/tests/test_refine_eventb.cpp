#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <chrono>

#include "oracle.hpp"
#include "test_util.hpp"

using namespace retrace;

namespace {

struct TlSetup {
    Machine abstract = parse_fixture("tl_abstract.mch");
    Machine concrete = parse_fixture("tl_concrete.mch");
    CoupledMachine coupled = couple_or_throw(abstract, concrete, RefinementMode::EventB);
    RefinementMap map = map_or_throw(abstract, concrete, RefinementMode::EventB);
    RecordedTrace trace = read_trace_file(fixture_path("tl_trace.json")).trace;
};

std::vector<std::string> event_names(const RecordedTrace& t) {
    std::vector<std::string> out;
    for (const auto& tr : t.transitions) out.push_back(tr.event);
    return out;
}

}  // namespace

TEST_CASE("worked example: skip and stutter are inserted exactly once each") {
    TlSetup tl;
    EventBRefinementResult res = refine_trace_eventb(tl.coupled, tl.trace, tl.map);
    REQUIRE(res.ok());
    REQUIRE(res.solutions.size() == 1);
    CHECK(res.minimal_guaranteed);
    CHECK(res.inserted_counts.front() == 2);

    const RecordedTrace& sol = res.solutions.front();
    CHECK(event_names(sol) ==
          std::vector<std::string>{kInitEventName, "activateSystem", "set_cars_colors",
                                   "set_cars_colors", "set_cars_colors"});
    // the color phases walk red_yellow -> green -> yellow -> red
    CHECK(sol.transitions[2].post.vals.at("cars_colors") == Value(std::string("green")));
    CHECK(sol.transitions[3].post.vals.at("cars_colors") == Value(std::string("yellow")));
    CHECK(sol.transitions[4].post.vals.at("cars_colors") == Value(std::string("red")));
    // the abstract half tracks the recorded trace
    CHECK(sol.transitions[2].post.vals.at("cars_go") == Value(true));
    CHECK(sol.transitions[3].post.vals.at("cars_go") == Value(true));   // stutter
    CHECK(sol.transitions[4].post.vals.at("cars_go") == Value(false));

    // the solution replays on the concrete machine
    CHECK(replay(tl.concrete, project_trace_to(tl.concrete, sol)).ok());
    // and the coupled solution replays there directly via partial matching
    CHECK(replay(tl.concrete, sol).ok());
}

TEST_CASE("identity refinement returns the input with nothing inserted") {
    Machine a = parse_fixture("counter_abstract.mch");
    Machine c = parse_or_throw(
        "MACHINE counter_id REFINES counter_abstract VARIABLES x : 0..3 ;\n"
        "INVARIANT 0 <= x INIT x := 0\n"
        "EVENT inc REFINES inc WHEN x < 3 THEN x := x + 1 END\n"
        "EVENT dec REFINES dec WHEN 0 < x THEN x := x - 1 END END");
    CoupledMachine cm = couple_or_throw(a, c, RefinementMode::EventB);
    RefinementMap map = map_or_throw(a, c, RefinementMode::EventB);

    RandomWalkResult walk = random_walk(a, 6, 3);
    EventBRefinementResult res = refine_trace_eventb(cm, walk.trace, map);
    REQUIRE(res.ok());
    REQUIRE(res.solutions.size() == 1);
    CHECK(res.inserted_counts.front() == 0);
    CHECK(res.solutions.front().transitions == walk.trace.transitions);
}

TEST_CASE("toggle livelock: the seen-set ends the search with a dead end") {
    Machine a = parse_fixture("toggle_abstract.mch");
    Machine c = parse_fixture("toggle_concrete.mch");
    CoupledMachine cm = couple_or_throw(a, c, RefinementMode::EventB);
    RefinementMap map = map_or_throw(a, c, RefinementMode::EventB);

    RecordedTrace t;
    t.machine = a.name;
    State s0 = state_of(a);
    t.transitions.push_back({kInitEventName, {}, s0});
    StepResult fin = try_step(a, s0, "finish", {});
    REQUIRE(fin.status == StepStatus::Ok);
    t.transitions.push_back({"finish", {}, *fin.post});

    auto started = std::chrono::steady_clock::now();
    EventBRefinementResult res = refine_trace_eventb(cm, t, map);
    auto elapsed = std::chrono::steady_clock::now() - started;

    REQUIRE_FALSE(res.ok());
    CHECK(res.reason == ExhaustionReason::DeadEnd);
    CHECK(res.stuck_index == 1);
    CHECK(std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count() < 1000);
    // the flip event visits each of its two transitions once, then stops
    for (const auto& sample : res.frontier_sample) {
        CHECK(sample.transitions.size() <= 3);
    }
    // identical verdict under every strategy
    for (Strategy st : {Strategy::Depth, Strategy::Mixed}) {
        SearchConfig cfg;
        cfg.strategy = st;
        EventBRefinementResult again = refine_trace_eventb(cm, t, map, cfg);
        CHECK_FALSE(again.ok());
        CHECK(again.reason == ExhaustionReason::DeadEnd);
    }
}

TEST_CASE("breadth and mixed find the unique minimal traffic-light solution") {
    TlSetup tl;
    SearchConfig breadth;
    SearchConfig mixed;
    mixed.strategy = Strategy::Mixed;
    EventBRefinementResult rb = refine_trace_eventb(tl.coupled, tl.trace, tl.map, breadth);
    EventBRefinementResult rm = refine_trace_eventb(tl.coupled, tl.trace, tl.map, mixed);
    REQUIRE(rb.ok());
    REQUIRE(rm.ok());
    CHECK(rb.solutions.front().transitions == rm.solutions.front().transitions);
    CHECK(rb.minimal_guaranteed);
    CHECK_FALSE(rm.minimal_guaranteed);
}

TEST_CASE("depth strategy can return a longer insertion than breadth") {
    // two skip routes enable the abstract step: 'direct' needs one insertion,
    // the 'advance/bridge' chain needs three; depth-first explores 'advance'
    // first (alphabetical successor order)
    Machine a = parse_or_throw(
        "MACHINE twopaths VARIABLES done : BOOL ; INVARIANT TRUE INIT done := FALSE\n"
        "EVENT go WHEN done = FALSE THEN done := TRUE END END");
    Machine c = parse_or_throw(
        "MACHINE twopaths_c REFINES twopaths VARIABLES done : BOOL ; ready : BOOL ; aux : 0..2 ;\n"
        "INVARIANT TRUE INIT done := FALSE || ready := FALSE || aux := 0\n"
        "EVENT advance WHEN ready = FALSE & aux < 2 THEN aux := aux + 1 END\n"
        "EVENT bridge WHEN ready = FALSE & aux = 2 THEN ready := TRUE END\n"
        "EVENT direct WHEN ready = FALSE & aux = 0 THEN ready := TRUE END\n"
        "EVENT go REFINES go WHEN done = FALSE & ready = TRUE THEN done := TRUE END END");
    CoupledMachine cm = couple_or_throw(a, c, RefinementMode::EventB);
    RefinementMap map = map_or_throw(a, c, RefinementMode::EventB);

    RecordedTrace t;
    State s0 = state_of(a);
    t.machine = a.name;
    t.transitions.push_back({kInitEventName, {}, s0});
    t.transitions.push_back({"go", {}, *try_step(a, s0, "go", {}).post});

    SearchConfig breadth;
    SearchConfig depth;
    depth.strategy = Strategy::Depth;
    EventBRefinementResult rb = refine_trace_eventb(cm, t, map, breadth);
    EventBRefinementResult rd = refine_trace_eventb(cm, t, map, depth);
    REQUIRE(rb.ok());
    REQUIRE(rd.ok());
    CHECK(rb.inserted_counts.front() == 1);   // direct, go
    CHECK(rd.inserted_counts.front() == 3);   // advance, advance, bridge, go
    CHECK(rb.minimal_guaranteed);
    CHECK_FALSE(rd.minimal_guaranteed);

    // brute force confirms the breadth answer is the minimum
    auto min_inserted = oracle::brute_force_min_inserted(cm, map, t, 5);
    REQUIRE(min_inserted.has_value());
    CHECK(*min_inserted == 1);
}

TEST_CASE("prune_duplicates keeps one representative per (state, work, seen)") {
    TlSetup tl;
    State init = state_of(tl.coupled.base);

    SearchEntry e1;
    e1.trace.push_back({kInitEventName, {}, init});
    e1.next_abstract = 1;
    SearchEntry e2 = e1;  // identical key, different identity
    SearchEntry e3 = e1;
    e3.seen.insert({init, "activateSystem", {}, init});  // different seen set

    auto pruned = prune_duplicates({e1, e2, e3});
    CHECK(pruned.size() == 2);

    std::size_t count = 0;
    prune_duplicates({e1, e2, e3}, &count);
    CHECK(count == 1);
}

TEST_CASE("traffic-light frontier statistics are stable") {
    TlSetup tl;
    EventBRefinementResult r1 = refine_trace_eventb(tl.coupled, tl.trace, tl.map);
    EventBRefinementResult r2 = refine_trace_eventb(tl.coupled, tl.trace, tl.map);
    CHECK(r1.stats.max_frontier == r2.stats.max_frontier);
    CHECK(r1.stats.pruned == r2.stats.pruned);
    // regression values for the bundled example
    CHECK(r1.stats.max_frontier == 1);
    CHECK(r1.stats.pruned == 0);
    CHECK(r1.stats.generations == 4);
}

TEST_CASE("stutter budget bounds fresh-state chains") {
    // a skip event counts 0..24 and the abstract step only fires at 24; any
    // solution needs 24 insertions
    Machine a = parse_or_throw(
        "MACHINE lateshot VARIABLES done : BOOL ; INVARIANT TRUE INIT done := FALSE\n"
        "EVENT go WHEN done = FALSE THEN done := TRUE END END");
    Machine c = parse_or_throw(
        "MACHINE lateshot_c REFINES lateshot VARIABLES done : BOOL ; k : 0..24 ;\n"
        "INVARIANT TRUE INIT done := FALSE || k := 0\n"
        "EVENT tick WHEN k < 24 THEN k := k + 1 END\n"
        "EVENT go REFINES go WHEN done = FALSE & k = 24 THEN done := TRUE END END");
    CoupledMachine cm = couple_or_throw(a, c, RefinementMode::EventB);
    RefinementMap map = map_or_throw(a, c, RefinementMode::EventB);

    RecordedTrace t;
    State s0 = state_of(a);
    t.machine = a.name;
    t.transitions.push_back({kInitEventName, {}, s0});
    t.transitions.push_back({"go", {}, *try_step(a, s0, "go", {}).post});

    SUBCASE("the default budget of 20 cuts the chain and suspects divergence") {
        EventBRefinementResult res = refine_trace_eventb(cm, t, map);
        REQUIRE_FALSE(res.ok());
        CHECK(res.reason == ExhaustionReason::StutterBudget);
        CHECK(res.divergence_suspected);
    }
    SUBCASE("a budget of 24 lets the chain finish") {
        SearchConfig cfg;
        cfg.stutter_budget = 24;
        EventBRefinementResult res = refine_trace_eventb(cm, t, map, cfg);
        REQUIRE(res.ok());
        CHECK(res.inserted_counts.front() == 24);
    }
    SUBCASE("a convergent annotation silences the suspicion") {
        Machine c2 = parse_or_throw(
            "MACHINE lateshot_c REFINES lateshot VARIABLES done : BOOL ; k : 0..24 ;\n"
            "INVARIANT TRUE INIT done := FALSE || k := 0\n"
            "EVENT tick CONVERGENT WHEN k < 24 THEN k := k + 1 END\n"
            "EVENT go REFINES go WHEN done = FALSE & k = 24 THEN done := TRUE END END");
        CoupledMachine cm2 = couple_or_throw(a, c2, RefinementMode::EventB);
        EventBRefinementResult res = refine_trace_eventb(cm2, t, map);
        REQUIRE_FALSE(res.ok());
        CHECK(res.reason == ExhaustionReason::StutterBudget);
        CHECK_FALSE(res.divergence_suspected);
    }
}

TEST_CASE("breadth returns the whole first solution generation") {
    // two interchangeable skip events produce two minimal solutions
    Machine a = parse_or_throw(
        "MACHINE pair VARIABLES done : BOOL ; INVARIANT TRUE INIT done := FALSE\n"
        "EVENT go WHEN done = FALSE THEN done := TRUE END END");
    Machine c = parse_or_throw(
        "MACHINE pair_c REFINES pair VARIABLES done : BOOL ; ready : BOOL ; via : 0..2 ;\n"
        "INVARIANT TRUE INIT done := FALSE || ready := FALSE || via := 0\n"
        "EVENT prep_left WHEN ready = FALSE THEN ready := TRUE || via := 1 END\n"
        "EVENT prep_right WHEN ready = FALSE THEN ready := TRUE || via := 2 END\n"
        "EVENT go REFINES go WHEN done = FALSE & ready = TRUE THEN done := TRUE END END");
    CoupledMachine cm = couple_or_throw(a, c, RefinementMode::EventB);
    RefinementMap map = map_or_throw(a, c, RefinementMode::EventB);

    RecordedTrace t;
    State s0 = state_of(a);
    t.machine = a.name;
    t.transitions.push_back({kInitEventName, {}, s0});
    t.transitions.push_back({"go", {}, *try_step(a, s0, "go", {}).post});

    EventBRefinementResult res = refine_trace_eventb(cm, t, map);
    REQUIRE(res.ok());
    CHECK(res.solutions.size() == 2);
    for (std::size_t count : res.inserted_counts) CHECK(count == 1);
    std::set<std::string> first_steps;
    for (const auto& sol : res.solutions) first_steps.insert(sol.transitions[1].event);
    CHECK(first_steps == std::set<std::string>{"prep_left", "prep_right"});

    // depth and mixed return a single first find instead
    for (Strategy st : {Strategy::Depth, Strategy::Mixed}) {
        SearchConfig cfg;
        cfg.strategy = st;
        EventBRefinementResult one = refine_trace_eventb(cm, t, map, cfg);
        REQUIRE(one.ok());
        CHECK(one.solutions.size() == 1);
    }
}

TEST_CASE("depth limit cuts the worked example short") {
    TlSetup tl;
    SearchConfig cfg;
    cfg.max_depth = 3;  // the minimal solution needs 5 transitions
    EventBRefinementResult res = refine_trace_eventb(tl.coupled, tl.trace, tl.map, cfg);
    REQUIRE_FALSE(res.ok());
    CHECK(res.reason == ExhaustionReason::DepthLimit);
    for (const auto& sample : res.frontier_sample) {
        CHECK(sample.transitions.size() <= 3);
    }
    // with room the same configuration succeeds
    cfg.max_depth = 5;
    CHECK(refine_trace_eventb(tl.coupled, tl.trace, tl.map, cfg).ok());
}

TEST_CASE("branch limit truncation is reported as the exhaustion reason") {
    // two skip options; lexicographic truncation keeps the one that poisons
    // the alternative, so the dropped candidate was the only way through
    Machine a = parse_or_throw(
        "MACHINE narrow VARIABLES done : BOOL ; INVARIANT TRUE INIT done := FALSE\n"
        "EVENT go WHEN done = FALSE THEN done := TRUE END END");
    Machine c = parse_or_throw(
        "MACHINE narrow_c REFINES narrow VARIABLES done : BOOL ; poisoned : BOOL ; ready : BOOL ;\n"
        "INVARIANT TRUE INIT done := FALSE || poisoned := FALSE || ready := FALSE\n"
        "EVENT a_poison WHEN ready = FALSE THEN poisoned := TRUE END\n"
        "EVENT b_prep WHEN ready = FALSE & poisoned = FALSE THEN ready := TRUE END\n"
        "EVENT go REFINES go WHEN done = FALSE & ready = TRUE THEN done := TRUE END END");
    CoupledMachine cm = couple_or_throw(a, c, RefinementMode::EventB);
    RefinementMap map = map_or_throw(a, c, RefinementMode::EventB);

    RecordedTrace t;
    State s0 = state_of(a);
    t.machine = a.name;
    t.transitions.push_back({kInitEventName, {}, s0});
    t.transitions.push_back({"go", {}, *try_step(a, s0, "go", {}).post});

    SearchConfig cfg;
    cfg.branch_limit = 1;
    EventBRefinementResult res = refine_trace_eventb(cm, t, map, cfg);
    REQUIRE_FALSE(res.ok());
    CHECK(res.reason == ExhaustionReason::BranchLimit);
    CHECK(res.branch_limit_hit);

    // with room to breathe the same search succeeds
    EventBRefinementResult wide = refine_trace_eventb(cm, t, map);
    REQUIRE(wide.ok());
    CHECK(wide.inserted_counts.front() == 1);
}

TEST_CASE("minimality matches brute force on the blink chain") {
    Machine a = parse_fixture("blink_abstract.mch");
    Machine b = parse_fixture("blink_arm.mch");
    CoupledMachine cm = couple_or_throw(a, b, RefinementMode::EventB);
    RefinementMap map = map_or_throw(a, b, RefinementMode::EventB);

    // INIT -> set_blinks(1) -> blink -> all_off
    Machine& abs = a;
    State cur = state_of(abs);
    RecordedTrace t;
    t.machine = abs.name;
    t.transitions.push_back({kInitEventName, {}, cur});
    auto extend = [&](const std::string& ev, ArgMap args) {
        StepResult step = try_step(abs, cur, ev, args);
        REQUIRE(step.status == StepStatus::Ok);
        t.transitions.push_back({ev, args, *step.post});
        cur = *step.post;
    };
    extend("set_blinks", {{"n", Value(std::int64_t{1})}});
    extend("blink", {});
    extend("all_off", {});

    EventBRefinementResult res = refine_trace_eventb(cm, t, map);
    REQUIRE(res.ok());
    CHECK(res.inserted_counts.front() == 1);  // engine_on before arming

    auto min_inserted = oracle::brute_force_min_inserted(cm, map, t, 4);
    REQUIRE(min_inserted.has_value());
    CHECK(*min_inserted == res.inserted_counts.front());

    // every reported solution is a valid refinement per the oracle
    for (const auto& sol : res.solutions) {
        CHECK(oracle::is_eventb_refinement(cm, map, t, sol.transitions));
        CHECK(replay(b, project_trace_to(b, sol)).ok());
    }
}

TEST_CASE("projection correspondence holds across random Event-B runs") {
    Machine a = parse_fixture("counter_abstract.mch");
    Machine c = parse_fixture("counter_concrete_eb.mch");
    CoupledMachine cm = couple_or_throw(a, c, RefinementMode::EventB);
    RefinementMap map = map_or_throw(a, c, RefinementMode::EventB);

    int successes = 0;
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        RandomWalkResult walk = random_walk(a, 1 + seed % 6, seed);
        EventBRefinementResult res = refine_trace_eventb(cm, walk.trace, map);
        if (!res.ok()) continue;
        ++successes;
        for (const auto& sol : res.solutions) {
            CHECK(oracle::is_eventb_refinement(cm, map, walk.trace, sol.transitions));
        }
    }
    CHECK(successes > 30);
}
