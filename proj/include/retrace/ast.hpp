#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "retrace/diagnostics.hpp"
#include "retrace/domain.hpp"

namespace retrace {

inline constexpr const char* kInitEventName = "INITIALISATION";

enum class RefinementMode { B, EventB };

inline const char* mode_name(RefinementMode m) {
    return m == RefinementMode::B ? "b" : "eventb";
}

enum class BinOp { Eq, Ne, Lt, Le, And, Or, Add, Sub };

// What a resolved identifier denotes.
enum class RefKind {
    Variable,
    Parameter,
    EnumLiteral,
    External,  // abstract-machine name referenced from a refining machine's invariant
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { BoolLit, IntLit, Ident, Not, Binary };

    Kind kind = Kind::BoolLit;
    bool bool_value = false;
    std::int64_t int_value = 0;
    std::string name;                    // Ident
    RefKind ref = RefKind::Variable;     // Ident
    BinOp op = BinOp::Eq;                // Binary
    ExprPtr lhs, rhs;                    // Binary; Not uses lhs only
    SourcePos pos{};

    static ExprPtr make_bool(bool v, SourcePos p = {}) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::BoolLit;
        e->bool_value = v;
        e->pos = p;
        return e;
    }
    static ExprPtr make_int(std::int64_t v, SourcePos p = {}) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::IntLit;
        e->int_value = v;
        e->pos = p;
        return e;
    }
    static ExprPtr make_ident(std::string n, RefKind r, SourcePos p = {}) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Ident;
        e->name = std::move(n);
        e->ref = r;
        e->pos = p;
        return e;
    }
    static ExprPtr make_not(ExprPtr inner, SourcePos p = {}) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Not;
        e->lhs = std::move(inner);
        e->pos = p;
        return e;
    }
    static ExprPtr make_binary(BinOp op, ExprPtr l, ExprPtr r, SourcePos p = {}) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Binary;
        e->op = op;
        e->lhs = std::move(l);
        e->rhs = std::move(r);
        e->pos = p;
        return e;
    }
};

// Structural equality ignoring source positions.
inline bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case Expr::Kind::BoolLit: return a->bool_value == b->bool_value;
        case Expr::Kind::IntLit: return a->int_value == b->int_value;
        case Expr::Kind::Ident: return a->name == b->name;
        case Expr::Kind::Not: return expr_equal(a->lhs, b->lhs);
        case Expr::Kind::Binary:
            return a->op == b->op && expr_equal(a->lhs, b->lhs) && expr_equal(a->rhs, b->rhs);
    }
    return false;
}

inline bool expr_uses_ref(const ExprPtr& e, RefKind kind) {
    if (!e) return false;
    if (e->kind == Expr::Kind::Ident) return e->ref == kind;
    return expr_uses_ref(e->lhs, kind) || expr_uses_ref(e->rhs, kind);
}

struct Assignment {
    std::string target;
    ExprPtr value;
    SourcePos pos{};
};

// Parallel assignment: all right-hand sides evaluated in the pre-state.
struct Action {
    std::vector<Assignment> assignments;
};

struct VarDecl {
    std::string name;
    Domain domain;
    SourcePos pos{};
};

struct Param {
    std::string name;
    Domain domain;
    SourcePos pos{};
};

struct Event {
    std::string name;
    std::vector<Param> params;
    ExprPtr guard;
    Action action;
    std::vector<std::string> refines_events;  // empty under REFINES machine = skip-refining
    bool convergent = false;
    SourcePos pos{};

    const Param* find_param(const std::string& n) const {
        for (const auto& p : params) {
            if (p.name == n) return &p;
        }
        return nullptr;
    }
};

// One top-level conjunct of the invariant. Conjuncts referencing abstract
// (external) names are only enforceable on the coupled machine and are
// skipped when the machine is animated on its own.
struct InvariantConjunct {
    ExprPtr pred;
    bool uses_external = false;
};

struct Machine {
    std::string name;
    std::optional<std::string> refines;
    std::vector<VarDecl> variables;
    std::vector<InvariantConjunct> invariant;
    Action init;
    std::vector<Event> events;

    const VarDecl* find_variable(const std::string& n) const {
        for (const auto& v : variables) {
            if (v.name == n) return &v;
        }
        return nullptr;
    }

    const Event* find_event(const std::string& n) const {
        for (const auto& e : events) {
            if (e.name == n) return &e;
        }
        return nullptr;
    }

    std::set<std::string> variable_names() const {
        std::set<std::string> out;
        for (const auto& v : variables) out.insert(v.name);
        return out;
    }

    // Enum literal universe: all literals of variable and parameter domains.
    std::set<std::string> enum_literals() const {
        std::set<std::string> out;
        for (const auto& v : variables) {
            out.insert(v.domain.literals.begin(), v.domain.literals.end());
        }
        for (const auto& e : events) {
            for (const auto& p : e.params) {
                out.insert(p.domain.literals.begin(), p.domain.literals.end());
            }
        }
        return out;
    }

    bool has_external_refs() const {
        for (const auto& c : invariant) {
            if (c.uses_external) return true;
        }
        return false;
    }
};

// Structural equality helpers (source positions ignored).

inline bool action_equal(const Action& a, const Action& b) {
    if (a.assignments.size() != b.assignments.size()) return false;
    for (std::size_t i = 0; i < a.assignments.size(); ++i) {
        if (a.assignments[i].target != b.assignments[i].target) return false;
        if (!expr_equal(a.assignments[i].value, b.assignments[i].value)) return false;
    }
    return true;
}

inline bool event_equal(const Event& a, const Event& b) {
    if (a.name != b.name || a.convergent != b.convergent) return false;
    if (a.refines_events != b.refines_events) return false;
    if (a.params.size() != b.params.size()) return false;
    for (std::size_t i = 0; i < a.params.size(); ++i) {
        if (a.params[i].name != b.params[i].name) return false;
        if (!same_domain(a.params[i].domain, b.params[i].domain)) return false;
    }
    return expr_equal(a.guard, b.guard) && action_equal(a.action, b.action);
}

inline bool machine_equal(const Machine& a, const Machine& b) {
    if (a.name != b.name || a.refines != b.refines) return false;
    if (a.variables.size() != b.variables.size()) return false;
    for (std::size_t i = 0; i < a.variables.size(); ++i) {
        if (a.variables[i].name != b.variables[i].name) return false;
        if (!same_domain(a.variables[i].domain, b.variables[i].domain)) return false;
    }
    if (a.invariant.size() != b.invariant.size()) return false;
    for (std::size_t i = 0; i < a.invariant.size(); ++i) {
        if (a.invariant[i].uses_external != b.invariant[i].uses_external) return false;
        if (!expr_equal(a.invariant[i].pred, b.invariant[i].pred)) return false;
    }
    if (!action_equal(a.init, b.init)) return false;
    if (a.events.size() != b.events.size()) return false;
    for (std::size_t i = 0; i < a.events.size(); ++i) {
        if (!event_equal(a.events[i], b.events[i])) return false;
    }
    return true;
}

}  // namespace retrace
