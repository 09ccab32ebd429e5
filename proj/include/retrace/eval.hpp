#pragma once

#include <stdexcept>
#include <string>

#include "retrace/ast.hpp"
#include "retrace/state.hpp"

namespace retrace {

// Raised when an assigned result leaves its variable's domain, or on
// (practically unreachable) 64-bit arithmetic overflow. Intermediate values
// inside predicates are deliberately not domain-checked.
class EvalError : public std::runtime_error {
public:
    explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail {

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw EvalError("integer overflow in '+'");
    return r;
}

inline std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_sub_overflow(a, b, &r)) throw EvalError("integer overflow in '-'");
    return r;
}

}  // namespace detail

inline Value eval_expr(const ExprPtr& e, const State& s, const ArgMap& args) {
    switch (e->kind) {
        case Expr::Kind::BoolLit:
            return e->bool_value;
        case Expr::Kind::IntLit:
            return e->int_value;
        case Expr::Kind::Ident:
            switch (e->ref) {
                case RefKind::Variable: {
                    const Value* v = s.find(e->name);
                    if (!v) throw EvalError("variable '" + e->name + "' missing from state");
                    return *v;
                }
                case RefKind::Parameter: {
                    auto it = args.find(e->name);
                    if (it == args.end()) {
                        throw EvalError("parameter '" + e->name + "' missing from arguments");
                    }
                    return it->second;
                }
                case RefKind::EnumLiteral:
                    return e->name;
                case RefKind::External:
                    throw EvalError("external reference '" + e->name +
                                    "' evaluated outside the coupled machine");
            }
            throw EvalError("unresolved identifier");
        case Expr::Kind::Not:
            return !std::get<bool>(eval_expr(e->lhs, s, args));
        case Expr::Kind::Binary: {
            switch (e->op) {
                case BinOp::And:
                    return std::get<bool>(eval_expr(e->lhs, s, args)) &&
                           std::get<bool>(eval_expr(e->rhs, s, args));
                case BinOp::Or:
                    return std::get<bool>(eval_expr(e->lhs, s, args)) ||
                           std::get<bool>(eval_expr(e->rhs, s, args));
                default:
                    break;
            }
            Value l = eval_expr(e->lhs, s, args);
            Value r = eval_expr(e->rhs, s, args);
            switch (e->op) {
                case BinOp::Eq: return l == r;
                case BinOp::Ne: return l != r;
                case BinOp::Lt:
                    return std::get<std::int64_t>(l) < std::get<std::int64_t>(r);
                case BinOp::Le:
                    return std::get<std::int64_t>(l) <= std::get<std::int64_t>(r);
                case BinOp::Add:
                    return detail::checked_add(std::get<std::int64_t>(l),
                                               std::get<std::int64_t>(r));
                case BinOp::Sub:
                    return detail::checked_sub(std::get<std::int64_t>(l),
                                               std::get<std::int64_t>(r));
                default:
                    break;
            }
            throw EvalError("unexpected operator");
        }
    }
    throw EvalError("unexpected expression kind");
}

inline bool eval_predicate(const ExprPtr& p, const State& s, const ArgMap& args = {}) {
    return std::get<bool>(eval_expr(p, s, args));
}

// Conjuncts referencing abstract (external) names are only enforceable once
// both machines are coupled; on a standalone machine they are skipped.
inline bool eval_invariant(const Machine& m, const State& s) {
    for (const auto& c : m.invariant) {
        if (c.uses_external) continue;
        if (!eval_predicate(c.pred, s)) return false;
    }
    return true;
}

// Parallel assignment: right-hand sides read the pre-state; assigned results
// are domain-checked.
inline State apply_action(const Machine& m, const Action& a, const State& pre,
                          const ArgMap& args = {}) {
    State post = pre;
    for (const auto& as : a.assignments) {
        Value v = eval_expr(as.value, pre, args);
        const VarDecl* decl = m.find_variable(as.target);
        if (!decl) throw EvalError("assignment to undeclared variable '" + as.target + "'");
        if (!decl->domain.contains(v)) {
            throw EvalError("value " + value_to_string(v) + " outside domain of '" + as.target +
                            "' (" + decl->domain.to_string() + ")");
        }
        post.vals[as.target] = v;
    }
    return post;
}

}  // namespace retrace
