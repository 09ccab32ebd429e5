#pragma once

#include <sstream>
#include <string>

#include "retrace/ast.hpp"

namespace retrace {

namespace detail {

inline int precedence(const Expr& e) {
    if (e.kind == Expr::Kind::Binary) {
        switch (e.op) {
            case BinOp::Or: return 1;
            case BinOp::And: return 2;
            case BinOp::Eq:
            case BinOp::Ne:
            case BinOp::Lt:
            case BinOp::Le: return 4;
            case BinOp::Add:
            case BinOp::Sub: return 5;
        }
    }
    if (e.kind == Expr::Kind::Not) return 3;
    return 6;  // literals and identifiers
}

inline const char* op_text(BinOp op) {
    switch (op) {
        case BinOp::Eq: return "=";
        case BinOp::Ne: return "/=";
        case BinOp::Lt: return "<";
        case BinOp::Le: return "<=";
        case BinOp::And: return "&";
        case BinOp::Or: return "or";
        case BinOp::Add: return "+";
        case BinOp::Sub: return "-";
    }
    return "?";
}

inline void print_expr_rec(std::ostream& os, const Expr& e, int parent_prec) {
    int prec = precedence(e);
    bool parens = prec < parent_prec;
    if (parens) os << '(';
    switch (e.kind) {
        case Expr::Kind::BoolLit:
            os << (e.bool_value ? "TRUE" : "FALSE");
            break;
        case Expr::Kind::IntLit:
            os << e.int_value;
            break;
        case Expr::Kind::Ident:
            os << e.name;
            break;
        case Expr::Kind::Not:
            os << "not ";
            print_expr_rec(os, *e.lhs, prec + 1);
            break;
        case Expr::Kind::Binary: {
            // left-associative chains print without parens on the left
            print_expr_rec(os, *e.lhs, prec);
            os << ' ' << op_text(e.op) << ' ';
            print_expr_rec(os, *e.rhs, prec + 1);
            break;
        }
    }
    if (parens) os << ')';
}

}  // namespace detail

inline std::string print_expr(const ExprPtr& e) {
    std::ostringstream os;
    if (e) detail::print_expr_rec(os, *e, 0);
    return os.str();
}

inline std::string print_action(const Action& a) {
    std::ostringstream os;
    for (std::size_t i = 0; i < a.assignments.size(); ++i) {
        if (i) os << " || ";
        os << a.assignments[i].target << " := " << print_expr(a.assignments[i].value);
    }
    return os.str();
}

// Canonical machine text; reparsing yields a structurally equal AST.
inline std::string print_machine(const Machine& m) {
    std::ostringstream os;
    os << "MACHINE " << m.name;
    if (m.refines) os << " REFINES " << *m.refines;
    os << "\nVARIABLES\n";
    for (const auto& v : m.variables) {
        os << "  " << v.name << " : " << v.domain.to_string() << " ;\n";
    }
    os << "INVARIANT\n";
    for (std::size_t i = 0; i < m.invariant.size(); ++i) {
        os << "  ";
        if (i) os << "& ";
        // conjuncts re-split on parse; guard against an 'or' swallowing the '&'
        const Expr& e = *m.invariant[i].pred;
        bool parens = e.kind == Expr::Kind::Binary && e.op == BinOp::Or;
        if (parens) os << '(';
        os << print_expr(m.invariant[i].pred);
        if (parens) os << ')';
        os << '\n';
    }
    os << "INIT\n  " << print_action(m.init) << '\n';
    for (const auto& ev : m.events) {
        os << "EVENT " << ev.name;
        if (!ev.params.empty()) {
            os << " ( ";
            for (std::size_t i = 0; i < ev.params.size(); ++i) {
                if (i) os << " , ";
                os << ev.params[i].name << " : " << ev.params[i].domain.to_string();
            }
            os << " )";
        }
        if (!ev.refines_events.empty()) {
            os << " REFINES ";
            for (std::size_t i = 0; i < ev.refines_events.size(); ++i) {
                if (i) os << ", ";
                os << ev.refines_events[i];
            }
        }
        if (ev.convergent) os << " CONVERGENT";
        os << "\n  WHEN " << print_expr(ev.guard);
        os << "\n  THEN " << print_action(ev.action);
        os << "\nEND\n";
    }
    os << "END\n";
    return os.str();
}

}  // namespace retrace
