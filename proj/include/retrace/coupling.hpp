#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "retrace/ast.hpp"
#include "retrace/state.hpp"

namespace retrace {

enum class Side { A, C };

enum class EventOrigin { Shared, AbstractOnly, ConcreteOnly };

// The interleaved machine: one ordinary Machine whose state carries both
// variable sets, plus bookkeeping about where names came from.
struct CoupledMachine {
    Machine base;
    std::set<std::string> origin_a;
    std::set<std::string> origin_c;
    std::map<std::string, EventOrigin> event_origin;
};

struct InterleaveResult {
    std::optional<CoupledMachine> coupled;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return coupled.has_value() && diagnostics.empty(); }
};

namespace detail {

// Re-resolve an invariant conjunct in the merged scope. External references
// must land on a merged variable or enum literal.
inline ExprPtr resolve_in_merged(const ExprPtr& e, const Machine& merged,
                                 std::vector<Diagnostic>& diags) {
    if (!e) return nullptr;
    switch (e->kind) {
        case Expr::Kind::BoolLit:
        case Expr::Kind::IntLit:
            return e;
        case Expr::Kind::Ident: {
            if (e->ref != RefKind::External) return e;
            if (merged.find_variable(e->name)) {
                return Expr::make_ident(e->name, RefKind::Variable, e->pos);
            }
            if (merged.enum_literals().count(e->name)) {
                return Expr::make_ident(e->name, RefKind::EnumLiteral, e->pos);
            }
            diags.push_back({DiagCode::UnknownIdentifier,
                             "gluing reference '" + e->name +
                                 "' does not name a variable of the coupled machine",
                             e->pos});
            return nullptr;
        }
        case Expr::Kind::Not: {
            ExprPtr inner = resolve_in_merged(e->lhs, merged, diags);
            return inner ? Expr::make_not(std::move(inner), e->pos) : nullptr;
        }
        case Expr::Kind::Binary: {
            ExprPtr l = resolve_in_merged(e->lhs, merged, diags);
            ExprPtr r = resolve_in_merged(e->rhs, merged, diags);
            if (!l || !r) return nullptr;
            return Expr::make_binary(e->op, std::move(l), std::move(r), e->pos);
        }
    }
    return nullptr;
}

// B1 || B2 with identical assignments to an identified variable merged into
// one; differing right-hand sides for the same target are a clash.
inline bool compose_actions(const Action& abstract, const Action& concrete,
                            const std::string& context, Action& out,
                            std::vector<Diagnostic>& diags) {
    out.assignments = abstract.assignments;
    bool ok = true;
    for (const auto& c : concrete.assignments) {
        const Assignment* twin = nullptr;
        for (const auto& a : abstract.assignments) {
            if (a.target == c.target) twin = &a;
        }
        if (!twin) {
            out.assignments.push_back(c);
        } else if (!expr_equal(twin->value, c.value)) {
            diags.push_back({DiagCode::AssignmentClash,
                             "'" + c.target + "' assigned differently by both sides of " +
                                 context,
                             c.pos});
            ok = false;
        }
    }
    return ok;
}

inline ExprPtr conjoin(const ExprPtr& a, const ExprPtr& b) {
    return Expr::make_binary(BinOp::And, a, b, a ? a->pos : SourcePos{});
}

// Parameter union, abstract parameters first; identified names must agree on
// their domains.
inline bool merge_params(const Event& abstract, const Event& concrete,
                         std::vector<Param>& out, std::vector<Diagnostic>& diags) {
    out = abstract.params;
    bool ok = true;
    for (const auto& cp : concrete.params) {
        const Param* twin = nullptr;
        for (const auto& ap : abstract.params) {
            if (ap.name == cp.name) twin = &ap;
        }
        if (!twin) {
            out.push_back(cp);
        } else if (!same_domain(twin->domain, cp.domain)) {
            diags.push_back({DiagCode::ParameterClash,
                             "parameter '" + cp.name + "' of '" + concrete.name +
                                 "' redeclared with a different domain",
                             cp.pos});
            ok = false;
        }
    }
    return ok;
}

inline Event merge_events(const Event& abstract, const Event& concrete,
                          std::vector<Diagnostic>& diags) {
    Event merged;
    merged.name = concrete.name;
    merged.pos = concrete.pos;
    merged.convergent = concrete.convergent;
    merge_params(abstract, concrete, merged.params, diags);
    merged.guard = conjoin(abstract.guard, concrete.guard);
    compose_actions(abstract.action, concrete.action,
                    "event '" + concrete.name + "'", merged.action, diags);
    return merged;
}

}  // namespace detail

// M_I: variable union (identical declarations identified), invariant
// conjunction, initially composed in parallel, events paired per mode.
inline InterleaveResult interleave(const Machine& abstract, const Machine& concrete,
                                   RefinementMode mode) {
    InterleaveResult res;
    auto& diags = res.diagnostics;

    CoupledMachine cm;
    cm.base.name = concrete.name;

    // variables
    for (const auto& v : abstract.variables) {
        cm.base.variables.push_back(v);
        cm.origin_a.insert(v.name);
    }
    for (const auto& v : concrete.variables) {
        cm.origin_c.insert(v.name);
        if (const VarDecl* existing = cm.base.find_variable(v.name)) {
            if (!same_domain(existing->domain, v.domain)) {
                diags.push_back({DiagCode::VariableClash,
                                 "variable '" + v.name +
                                     "' declared with different domains in both machines",
                                 v.pos});
            }
        } else {
            cm.base.variables.push_back(v);
        }
    }

    // initialisation
    detail::compose_actions(abstract.init, concrete.init, "INIT", cm.base.init, diags);

    // events
    if (mode == RefinementMode::B) {
        for (const auto& ae : abstract.events) {
            const Event* ce = concrete.find_event(ae.name);
            if (!ce) continue;  // signature check reports this pairing failure
            cm.base.events.push_back(detail::merge_events(ae, *ce, diags));
            cm.event_origin[ae.name] = EventOrigin::Shared;
        }
    } else {
        std::set<std::string> refined;
        for (const auto& ce : concrete.events) {
            if (ce.refines_events.empty()) {
                Event skip_ev = ce;
                skip_ev.refines_events.clear();
                cm.base.events.push_back(std::move(skip_ev));
                cm.event_origin[ce.name] = EventOrigin::ConcreteOnly;
                continue;
            }
            if (ce.refines_events.size() > 1) {
                diags.push_back({DiagCode::UnsupportedRefinement,
                                 "event '" + ce.name +
                                     "' refines more than one abstract event",
                                 ce.pos});
                continue;
            }
            const Event* ae = abstract.find_event(ce.refines_events.front());
            if (!ae) continue;  // signature check reports the dangling target
            refined.insert(ae->name);
            Event merged = detail::merge_events(*ae, ce, diags);
            merged.refines_events.clear();
            cm.base.events.push_back(std::move(merged));
            cm.event_origin[ce.name] = EventOrigin::Shared;
        }
        for (const auto& ae : abstract.events) {
            if (refined.count(ae.name)) continue;
            if (cm.base.find_event(ae.name)) {
                diags.push_back({DiagCode::DuplicateName,
                                 "unrefined abstract event '" + ae.name +
                                     "' collides with a concrete event name",
                                 ae.pos});
                continue;
            }
            cm.base.events.push_back(ae);
            cm.event_origin[ae.name] = EventOrigin::AbstractOnly;
        }
    }
    for (auto& ev : cm.base.events) ev.refines_events.clear();

    // invariant: I_A /\ I_C, gluing conjuncts resolved in the merged scope
    for (const auto& c : abstract.invariant) {
        ExprPtr p = c.uses_external ? detail::resolve_in_merged(c.pred, cm.base, diags) : c.pred;
        if (p) cm.base.invariant.push_back({std::move(p), false});
    }
    for (const auto& c : concrete.invariant) {
        ExprPtr p = c.uses_external ? detail::resolve_in_merged(c.pred, cm.base, diags) : c.pred;
        if (p) cm.base.invariant.push_back({std::move(p), false});
    }

    if (!diags.empty()) return res;
    res.coupled = std::move(cm);
    return res;
}

// Restriction of a coupled state to one side's variables. A shared name
// appears on both sides with the same value.
inline State project(const CoupledMachine& cm, const State& s, Side side) {
    const auto& names = side == Side::A ? cm.origin_a : cm.origin_c;
    State out;
    for (const auto& n : names) {
        if (const Value* v = s.find(n)) out.vals[n] = *v;
    }
    return out;
}

}  // namespace retrace
