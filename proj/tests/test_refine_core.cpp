#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "test_util.hpp"

using namespace retrace;

TEST_CASE("refinement map derivation") {
    Machine tl_a = parse_fixture("tl_abstract.mch");
    Machine tl_c = parse_fixture("tl_concrete.mch");

    SUBCASE("traffic light pair") {
        RefinementMap m = map_or_throw(tl_a, tl_c, RefinementMode::EventB);
        CHECK(m.alt.at("set_cars") == std::set<std::string>{"set_cars_colors"});
        CHECK(m.alt.at("set_peds") == std::set<std::string>{"set_peds_colors"});
        CHECK(m.skip == std::set<std::string>{"activateSystem"});
    }

    SUBCASE("renaming across the blink chain") {
        Machine a = parse_fixture("blink_abstract.mch");
        Machine b = parse_fixture("blink_arm.mch");
        RefinementMap m = map_or_throw(a, b, RefinementMode::EventB);
        CHECK(m.alt.at("all_off") == std::set<std::string>{"arm_reset"});
        CHECK(m.alt.at("set_blinks") == std::set<std::string>{"arm_tip_blinking"});
        CHECK(m.skip == std::set<std::string>{"engine_on"});
    }

    SUBCASE("identity in B mode") {
        Machine a = parse_fixture("counter_abstract.mch");
        Machine c = parse_fixture("counter_concrete.mch");
        RefinementMap m = map_or_throw(a, c, RefinementMode::B);
        CHECK(m.skip.empty());
        for (const auto& ev : a.events) {
            CHECK(m.alt.at(ev.name) == std::set<std::string>{ev.name});
        }
    }

    SUBCASE("totality: every concrete event lands in alt's range or skip") {
        for (auto mode : {RefinementMode::EventB}) {
            RefinementMap m = map_or_throw(tl_a, tl_c, mode);
            for (const auto& ev : tl_c.events) {
                int hits = m.skip.count(ev.name) ? 1 : 0;
                for (const auto& [abs, cs] : m.alt) hits += cs.count(ev.name);
                CHECK(hits == 1);
            }
        }
    }

    SUBCASE("an unrefined abstract event is an error") {
        Machine a = parse_fixture("counter_abstract.mch");
        Machine c = parse_or_throw(
            "MACHINE c REFINES counter_abstract VARIABLES x : 0..3 ; INVARIANT TRUE INIT x := 0\n"
            "EVENT inc REFINES inc WHEN x < 3 THEN x := x + 1 END END");
        auto res = derive_refinement_map(a, c, RefinementMode::EventB);
        CHECK_FALSE(res.ok());
        CHECK(has_code(res.diagnostics, DiagCode::UnrefinedAbstractEvent));
    }

    SUBCASE("one abstract event refined by several concrete events") {
        Machine a = parse_fixture("toggle_abstract.mch");
        Machine c = parse_or_throw(
            "MACHINE c REFINES toggle_abstract VARIABLES done : BOOL ; fast : BOOL ;\n"
            "INVARIANT TRUE INIT done := FALSE || fast := FALSE\n"
            "EVENT finish_fast REFINES finish WHEN done = FALSE THEN done := TRUE || fast := TRUE END\n"
            "EVENT finish_slow REFINES finish WHEN done = FALSE THEN done := TRUE END END");
        RefinementMap m = map_or_throw(a, c, RefinementMode::EventB);
        CHECK(m.alt.at("finish") == std::set<std::string>{"finish_fast", "finish_slow"});
    }
}

TEST_CASE("subsumption compares the abstract projection") {
    Machine a = parse_fixture("tl_abstract.mch");
    Machine c = parse_fixture("tl_concrete.mch");
    CoupledMachine cm = couple_or_throw(a, c, RefinementMode::EventB);

    State coupled = state_of(cm.base);
    State abs_post = project(cm, coupled, Side::A);

    SUBCASE("reflexive under embedding, everywhere reachable") {
        std::set<State> seen;
        std::vector<State> todo{coupled};
        while (!todo.empty()) {
            State s = todo.back();
            todo.pop_back();
            if (!seen.insert(s).second) continue;
            CHECK(subsumes(cm, project(cm, s, Side::A), s));
            for (const auto& tr : successors(cm.base, s).transitions) todo.push_back(tr.post);
        }
    }

    SUBCASE("recorded values must be reproduced exactly") {
        CHECK(subsumes(cm, abs_post, coupled));
        State other = abs_post;
        other.vals["cars_go"] = true;
        CHECK_FALSE(subsumes(cm, other, coupled));
    }

    SUBCASE("the yellow phase still subsumes the TRUE state") {
        // drive the coupled machine to cars green, then yellow
        auto run = [&](const State& from, const std::string& ev) {
            for (const auto& tr : successors(cm.base, from).transitions) {
                if (tr.event == ev) return tr.post;
            }
            throw std::runtime_error("no transition via " + ev);
        };
        State s1 = run(coupled, "activateSystem");
        State s2 = run(s1, "set_cars_colors");  // red_yellow -> green
        CHECK(s2.vals.at("cars_colors") == Value(std::string("green")));
        State abstract_true = tl_abstract_state(true, false);
        CHECK(subsumes(cm, abstract_true, s2));
        State s3 = run(s2, "set_cars_colors");  // green -> yellow, still go
        CHECK(s3.vals.at("cars_colors") == Value(std::string("yellow")));
        CHECK(subsumes(cm, abstract_true, s3));
    }

    SUBCASE("extra recorded keys are ignored") {
        State wider = abs_post;
        wider.vals["unrelated"] = Value(std::int64_t{42});
        CHECK(subsumes(cm, wider, coupled));
        State missing;
        missing.vals["cars_go"] = Value(false);
        CHECK_FALSE(subsumes(cm, missing, coupled));  // peds_go not covered
    }
}

TEST_CASE("replay") {
    Machine tl_a = parse_fixture("tl_abstract.mch");
    Machine tl_c = parse_fixture("tl_concrete.mch");
    LoadedTrace fixture = read_trace_file(fixture_path("tl_trace.json"));

    SUBCASE("the bundled worked-example trace replays on the abstract machine") {
        CHECK(replay(tl_a, fixture.trace).ok());
    }

    SUBCASE("renamed events make it fail on the concrete machine") {
        ReplayResult res = replay(tl_c, fixture.trace);
        CHECK_FALSE(res.ok());
        CHECK(res.failed_index == 1);
        CHECK(res.status == ReplayStatus::UnknownEvent);
    }

    SUBCASE("INIT-only traces replay wherever the initial state fits") {
        RecordedTrace t;
        t.machine = "tl_abstract";
        t.transitions.push_back(
            {kInitEventName, {}, tl_abstract_state(false, false)});
        CHECK(replay(tl_a, t).ok());
    }

    SUBCASE("tampered post-states are caught") {
        RecordedTrace t = fixture.trace;
        t.transitions[2].post.vals["peds_go"] = true;
        ReplayResult res = replay(tl_a, t);
        CHECK(res.status == ReplayStatus::PostMismatch);
        CHECK(res.failed_index == 2);
    }

    SUBCASE("disabled steps are caught") {
        Machine counter = parse_fixture("counter_abstract.mch");
        RecordedTrace t;
        t.machine = counter.name;
        State zero = state_of(counter);
        t.transitions.push_back({kInitEventName, {}, zero});
        State one = zero;
        one.vals["x"] = std::int64_t{1};
        t.transitions.push_back({"dec", {}, one});  // dec is disabled at x=0
        ReplayResult res = replay(counter, t);
        CHECK_FALSE(res.ok());
        CHECK(res.failed_index == 1);
        CHECK(res.status == ReplayStatus::Disabled);
    }

    SUBCASE("random walks always replay on their machine") {
        for (std::uint64_t seed = 1; seed <= 25; ++seed) {
            RandomWalkResult walk = random_walk(tl_a, 8, seed);
            CHECK(replay(tl_a, walk.trace).ok());
            RandomWalkResult counter = random_walk(parse_fixture("counter_abstract.mch"), 8, seed);
            CHECK(replay(parse_fixture("counter_abstract.mch"), counter.trace).ok());
        }
    }
}

TEST_CASE("trace files") {
    Machine tl_a = parse_fixture("tl_abstract.mch");
    RandomWalkResult walk = random_walk(tl_a, 5, 42);

    SUBCASE("write-read round trip") {
        std::string path = "roundtrip_trace_test.json";
        write_trace_file(path, walk.trace);
        LoadedTrace back = read_trace_file(path);
        CHECK(back.trace.machine == walk.trace.machine);
        CHECK(back.trace.transitions == walk.trace.transitions);
        CHECK_FALSE(back.refinement.has_value());
        std::remove(path.c_str());
    }

    SUBCASE("serialization is byte-stable") {
        CHECK(trace_to_text(walk.trace) == trace_to_text(walk.trace));
        // keys come out sorted
        std::string text = trace_to_text(walk.trace);
        CHECK(text.find("\"machine\"") < text.find("\"transitions\""));
        CHECK(text.find("\"args\"") < text.find("\"event\""));
    }

    SUBCASE("refinement block round trip") {
        RefinementMap map;
        map.alt["set_cars"] = {"set_cars_colors"};
        map.skip = {"activateSystem"};
        std::string path = "roundtrip_map_test.json";
        write_trace_file(path, walk.trace, &map);
        LoadedTrace back = read_trace_file(path);
        REQUIRE(back.refinement.has_value());
        CHECK(back.refinement->alt == map.alt);
        CHECK(back.refinement->skip == map.skip);
        std::remove(path.c_str());
    }

    SUBCASE("animator-internal initialisation names are normalized") {
        nlohmann::json j = trace_to_json(walk.trace);
        j["transitions"][0]["event"] = "$initialise_machine";
        LoadedTrace back = trace_from_json(j);
        CHECK(back.trace.transitions.front().event == kInitEventName);
        CHECK(replay(tl_a, back.trace).ok());
    }

    SUBCASE("projection keeps machine vocabulary only") {
        Machine tl_c = parse_fixture("tl_concrete.mch");
        CoupledMachine cm = couple_or_throw(tl_a, tl_c, RefinementMode::EventB);
        State coupled = state_of(cm.base);
        RecordedTrace t;
        t.machine = cm.base.name;
        t.transitions.push_back({kInitEventName, {}, coupled});
        RecordedTrace proj = project_trace_to(tl_c, t);
        CHECK(proj.machine == "tl_concrete");
        CHECK(proj.transitions[0].post.vals.count("cars_go") == 0);
        CHECK(proj.transitions[0].post.vals.count("cars_colors") == 1);
    }
}

TEST_CASE("search config defaults") {
    SearchConfig cfg;
    CHECK(cfg.stutter_budget == 20);
    CHECK(cfg.param_limit == 5);
    CHECK(cfg.strategy == Strategy::Breadth);
    CHECK(cfg.max_depth > 0);
    CHECK(cfg.branch_limit > 0);
}
