#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "test_util.hpp"

using namespace retrace;

namespace {

State tl_state(bool cars, bool peds) {
    State s;
    s.vals["cars_go"] = cars;
    s.vals["peds_go"] = peds;
    return s;
}

}  // namespace

TEST_CASE("predicate evaluation basics") {
    Machine m = parse_fixture("tl_abstract.mch");
    State s = tl_state(true, false);

    ExprPtr p1 = Expr::make_binary(BinOp::Eq, Expr::make_ident("cars_go", RefKind::Variable),
                                   Expr::make_bool(true));
    CHECK(eval_predicate(p1, s));

    ExprPtr p2 = Expr::make_binary(
        BinOp::And, p1,
        Expr::make_binary(BinOp::Eq, Expr::make_ident("peds_go", RefKind::Variable),
                          Expr::make_bool(true)));
    CHECK_FALSE(eval_predicate(p2, s));
}

TEST_CASE("intermediate arithmetic may leave the domain, assignments may not") {
    Machine m = parse_or_throw(
        "MACHINE m VARIABLES x : 0..3 ; INVARIANT TRUE INIT x := 0\n"
        "EVENT bump WHEN x + 1 <= 3 THEN x := x + 1 END END");
    // x + 1 <= 3, exhaustively over the domain: the intermediate 4 at x=3 is
    // computed without error and compared honestly
    ExprPtr guard = m.events[0].guard;
    for (std::int64_t x = 0; x <= 3; ++x) {
        State s;
        s.vals["x"] = x;
        CHECK(eval_predicate(guard, s) == (x + 1 <= 3));
    }

    // an unguarded increment at the top of the domain is an eval failure,
    // not a wraparound
    Machine loose = parse_or_throw(
        "MACHINE m VARIABLES x : 0..3 ; INVARIANT TRUE INIT x := 0\n"
        "EVENT bump WHEN TRUE THEN x := x + 1 END END");
    State top;
    top.vals["x"] = std::int64_t{3};
    SuccessorSet succ = successors(loose, top);
    CHECK(succ.transitions.empty());
    REQUIRE(succ.issues.size() == 1);
    CHECK(succ.issues[0].kind == AnimationIssue::Kind::EvalFailure);
}

TEST_CASE("successors of the abstract traffic light") {
    Machine m = parse_fixture("tl_abstract.mch");

    SUBCASE("from all-stop every setting is reachable") {
        SuccessorSet succ = successors(m, tl_state(false, false));
        REQUIRE(succ.transitions.size() == 4);
        CHECK(succ.issues.empty());
        // deterministic order: sorted by event name, then args
        CHECK(succ.transitions[0].event == "set_cars");
        CHECK(succ.transitions[0].args.at("value") == Value(false));
        CHECK(succ.transitions[1].event == "set_cars");
        CHECK(succ.transitions[1].args.at("value") == Value(true));
        CHECK(succ.transitions[1].post == tl_state(true, false));
        CHECK(succ.transitions[2].event == "set_peds");
        CHECK(succ.transitions[3].event == "set_peds");
        CHECK(succ.transitions[3].post == tl_state(false, true));
    }

    SUBCASE("the safety invariant excludes and reports set_peds(TRUE) when cars go") {
        SuccessorSet succ = successors(m, tl_state(true, false));
        CHECK(succ.transitions.size() == 3);
        for (const auto& tr : succ.transitions) {
            CHECK_FALSE((tr.event == "set_peds" && tr.args.at("value") == Value(true)));
        }
        REQUIRE(succ.issues.size() == 1);
        CHECK(succ.issues[0].kind == AnimationIssue::Kind::InvariantViolation);
        CHECK(succ.issues[0].event == "set_peds");
        CHECK(succ.issues[0].args.at("value") == Value(true));
    }

    SUBCASE("deterministic repetition") {
        SuccessorSet a = successors(m, tl_state(false, true));
        SuccessorSet b = successors(m, tl_state(false, true));
        CHECK(a.transitions == b.transitions);
    }
}

TEST_CASE("a FALSE-guarded event deadlocks everywhere") {
    Machine m = parse_or_throw(
        "MACHINE m VARIABLES x : BOOL ; INVARIANT TRUE INIT x := FALSE\n"
        "EVENT never WHEN FALSE THEN x := TRUE END END");
    for (bool v : {false, true}) {
        State s;
        s.vals["x"] = v;
        CHECK(successors(m, s).transitions.empty());
    }
}

TEST_CASE("initial states") {
    SUBCASE("traffic light starts all-stop") {
        Machine m = parse_fixture("tl_abstract.mch");
        InitialStates init = initial_states(m);
        REQUIRE(init.states.size() == 1);
        CHECK(init.states.front() == tl_state(false, false));
    }
    SUBCASE("an INIT breaking the invariant is reported") {
        Machine m = parse_or_throw(
            "MACHINE m VARIABLES x : 0..3 ; INVARIANT x < 2 INIT x := 3 END");
        InitialStates init = initial_states(m);
        CHECK(init.states.empty());
        REQUIRE(init.issues.size() == 1);
        CHECK(init.issues[0].kind == AnimationIssue::Kind::InvariantViolation);
    }
}

TEST_CASE("parameter enumeration caps at the configured guard-solution count") {
    Machine m = parse_or_throw(
        "MACHINE m VARIABLES x : 0..9 ; INVARIANT TRUE INIT x := 0\n"
        "EVENT pick ( n : 0..9 ) WHEN TRUE THEN x := n END END");
    State s;
    s.vals["x"] = std::int64_t{0};
    CHECK(successors(m, s).transitions.size() == 5);  // default limit
    CHECK(successors(m, s, 3).transitions.size() == 3);
    CHECK(successors(m, s, 100).transitions.size() == 10);
    // the first five in enumeration order survive
    SuccessorSet capped = successors(m, s);
    for (std::size_t i = 0; i < capped.transitions.size(); ++i) {
        CHECK(capped.transitions[i].args.at("n") == Value(std::int64_t(i)));
    }
}

TEST_CASE("framing, guard soundness and invariant closure over random walks") {
    std::vector<Machine> machines;
    machines.push_back(parse_fixture("tl_abstract.mch"));
    machines.push_back(parse_fixture("counter_abstract.mch"));
    machines.push_back(parse_fixture("blink_abstract.mch"));
    machines.push_back(parse_fixture("grid_concrete.mch"));

    std::mt19937_64 rng(7);
    for (const Machine& m : machines) {
        State cur = state_of(m);
        for (int step = 0; step < 60; ++step) {
            SuccessorSet succ = successors(m, cur);
            for (const auto& tr : succ.transitions) {
                const Event* ev = m.find_event(tr.event);
                REQUIRE(ev != nullptr);
                // guard soundness
                CHECK(eval_predicate(ev->guard, cur, tr.args));
                // closure under invariant
                CHECK(eval_invariant(m, tr.post));
                // framing: unassigned variables keep their values
                std::set<std::string> assigned;
                for (const auto& as : ev->action.assignments) assigned.insert(as.target);
                for (const auto& [var, val] : cur.vals) {
                    if (!assigned.count(var)) CHECK(tr.post.vals.at(var) == val);
                }
            }
            if (succ.transitions.empty()) break;
            cur = succ.transitions[rng() % succ.transitions.size()].post;
        }
    }
}

TEST_CASE("try_step statuses") {
    Machine m = parse_fixture("counter_abstract.mch");
    State zero = state_of(m);

    CHECK(try_step(m, zero, "inc", {}).status == StepStatus::Ok);
    CHECK(try_step(m, zero, "dec", {}).status == StepStatus::Disabled);
    CHECK(try_step(m, zero, "nope", {}).status == StepStatus::UnknownEvent);

    Machine g = parse_fixture("grid_abstract.mch");
    State at0 = state_of(g);
    CHECK(try_step(g, at0, "step", {}).status == StepStatus::BadArgs);
    CHECK(try_step(g, at0, "step", {{"d", Value(std::int64_t{3})}}).status ==
          StepStatus::BadArgs);
    auto ok = try_step(g, at0, "step", {{"d", Value(std::int64_t{2})}});
    REQUIRE(ok.status == StepStatus::Ok);
    CHECK(std::get<std::int64_t>(ok.post->vals.at("pos")) == 2);
    // extra argument entries are ignored
    auto extra = try_step(g, at0, "step",
                          {{"d", Value(std::int64_t{1})}, {"zz", Value(true)}});
    CHECK(extra.status == StepStatus::Ok);
}
