#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "retrace/ast.hpp"
#include "retrace/lexer.hpp"

namespace retrace {

struct ParseResult {
    std::optional<Machine> machine;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return machine.has_value() && diagnostics.empty(); }
};

namespace detail {

class Parser {
public:
    Parser(std::vector<Token> toks, std::vector<Diagnostic>& diags)
        : toks_(std::move(toks)), diags_(diags) {}

    std::optional<Machine> run() {
        Machine m;
        if (!expect(Tok::KwMachine, "MACHINE")) return std::nullopt;
        if (!expect_ident("machine name")) return std::nullopt;
        m.name = prev().text;
        if (accept(Tok::KwRefines)) {
            if (!expect_ident("refined machine name")) return std::nullopt;
            m.refines = prev().text;
        }
        if (!expect(Tok::KwVariables, "VARIABLES")) return std::nullopt;
        if (!parse_var_decls(m)) return std::nullopt;
        if (!expect(Tok::KwInvariant, "INVARIANT")) return std::nullopt;
        ExprPtr inv = parse_expr();
        if (!inv) return std::nullopt;
        for (auto& c : split_conjuncts(inv)) {
            m.invariant.push_back({std::move(c), false});
        }
        if (!expect(Tok::KwInit, "INIT")) return std::nullopt;
        if (!parse_action(m.init)) return std::nullopt;
        while (at(Tok::KwEvent)) {
            Event ev;
            if (!parse_event(ev)) return std::nullopt;
            m.events.push_back(std::move(ev));
        }
        if (!expect(Tok::KwEnd, "END")) return std::nullopt;
        if (!at(Tok::Eof)) {
            error("trailing input after machine END");
            return std::nullopt;
        }
        return m;
    }

private:
    const Token& cur() const { return toks_[pos_]; }
    const Token& prev() const { return toks_[pos_ - 1]; }
    bool at(Tok k) const { return cur().kind == k; }
    bool accept(Tok k) {
        if (at(k)) {
            ++pos_;
            return true;
        }
        return false;
    }
    void error(const std::string& msg) {
        diags_.push_back({DiagCode::SyntaxError, msg, cur().pos});
    }
    bool expect(Tok k, const char* what) {
        if (accept(k)) return true;
        error(std::string("expected ") + what);
        return false;
    }
    bool expect_ident(const char* what) {
        if (accept(Tok::Ident)) return true;
        error(std::string("expected ") + what);
        return false;
    }

    bool parse_var_decls(Machine& m) {
        // at least one declaration, each "name : domain ;"
        if (!at(Tok::Ident)) {
            error("expected at least one variable declaration");
            return false;
        }
        while (at(Tok::Ident)) {
            VarDecl v;
            v.pos = cur().pos;
            v.name = cur().text;
            ++pos_;
            if (!expect(Tok::Colon, "':'")) return false;
            if (!parse_domain(v.domain)) return false;
            if (!expect(Tok::Semicolon, "';'")) return false;
            m.variables.push_back(std::move(v));
        }
        return true;
    }

    bool parse_int_bound(std::int64_t& out) {
        bool neg = accept(Tok::Minus);
        if (!at(Tok::IntLit)) {
            error("expected integer bound");
            return false;
        }
        out = neg ? -cur().int_value : cur().int_value;
        ++pos_;
        return true;
    }

    bool parse_domain(Domain& d) {
        SourcePos pos = cur().pos;
        if (accept(Tok::KwBool)) {
            d = Domain::boolean();
            return true;
        }
        if (accept(Tok::LBrace)) {
            std::vector<std::string> lits;
            do {
                if (!expect_ident("enum literal")) return false;
                lits.push_back(prev().text);
            } while (accept(Tok::Comma));
            if (!expect(Tok::RBrace, "'}'")) return false;
            for (std::size_t i = 0; i < lits.size(); ++i) {
                for (std::size_t j = i + 1; j < lits.size(); ++j) {
                    if (lits[i] == lits[j]) {
                        diags_.push_back({DiagCode::DuplicateName,
                                          "duplicate enum literal '" + lits[i] + "'", pos});
                        return false;
                    }
                }
            }
            d = Domain::enum_set(std::move(lits));
            return true;
        }
        std::int64_t lo = 0, hi = 0;
        if (!parse_int_bound(lo)) return false;
        if (!expect(Tok::DotDot, "'..'")) return false;
        if (!parse_int_bound(hi)) return false;
        if (lo > hi) {
            diags_.push_back({DiagCode::TypeMismatch,
                              "empty integer range " + std::to_string(lo) + ".." +
                                  std::to_string(hi),
                              pos});
            return false;
        }
        d = Domain::int_range(lo, hi);
        return true;
    }

    bool parse_action(Action& a) {
        do {
            Assignment as;
            as.pos = cur().pos;
            if (!expect_ident("assignment target")) return false;
            as.target = prev().text;
            if (!expect(Tok::Assign, "':='")) return false;
            as.value = parse_expr();
            if (!as.value) return false;
            a.assignments.push_back(std::move(as));
        } while (accept(Tok::Parallel));
        return true;
    }

    bool parse_event(Event& ev) {
        expect(Tok::KwEvent, "EVENT");
        ev.pos = cur().pos;
        if (!expect_ident("event name")) return false;
        ev.name = prev().text;
        if (accept(Tok::LParen)) {
            do {
                Param p;
                p.pos = cur().pos;
                if (!expect_ident("parameter name")) return false;
                p.name = prev().text;
                if (!expect(Tok::Colon, "':'")) return false;
                if (!parse_domain(p.domain)) return false;
                ev.params.push_back(std::move(p));
            } while (accept(Tok::Comma));
            if (!expect(Tok::RParen, "')'")) return false;
        }
        if (accept(Tok::KwRefines)) {
            do {
                if (!expect_ident("refined event name")) return false;
                ev.refines_events.push_back(prev().text);
            } while (accept(Tok::Comma));
        }
        if (accept(Tok::KwConvergent)) ev.convergent = true;
        if (!expect(Tok::KwWhen, "WHEN")) return false;
        ev.guard = parse_expr();
        if (!ev.guard) return false;
        if (!expect(Tok::KwThen, "THEN")) return false;
        if (!parse_action(ev.action)) return false;
        if (!expect(Tok::KwEnd, "END")) return false;
        return true;
    }

    // precedence: or < & < not < comparison < additive
    ExprPtr parse_expr() { return parse_or(); }

    ExprPtr parse_or() {
        ExprPtr l = parse_and();
        if (!l) return nullptr;
        while (at(Tok::KwOr)) {
            SourcePos p = cur().pos;
            ++pos_;
            ExprPtr r = parse_and();
            if (!r) return nullptr;
            l = Expr::make_binary(BinOp::Or, std::move(l), std::move(r), p);
        }
        return l;
    }

    ExprPtr parse_and() {
        ExprPtr l = parse_not();
        if (!l) return nullptr;
        while (at(Tok::Amp)) {
            SourcePos p = cur().pos;
            ++pos_;
            ExprPtr r = parse_not();
            if (!r) return nullptr;
            l = Expr::make_binary(BinOp::And, std::move(l), std::move(r), p);
        }
        return l;
    }

    ExprPtr parse_not() {
        if (at(Tok::KwNot)) {
            SourcePos p = cur().pos;
            ++pos_;
            ExprPtr inner = parse_not();
            if (!inner) return nullptr;
            return Expr::make_not(std::move(inner), p);
        }
        return parse_cmp();
    }

    ExprPtr parse_cmp() {
        ExprPtr l = parse_add();
        if (!l) return nullptr;
        BinOp op;
        if (at(Tok::Eq)) op = BinOp::Eq;
        else if (at(Tok::Neq)) op = BinOp::Ne;
        else if (at(Tok::Lt)) op = BinOp::Lt;
        else if (at(Tok::Le)) op = BinOp::Le;
        else return l;
        SourcePos p = cur().pos;
        ++pos_;
        ExprPtr r = parse_add();
        if (!r) return nullptr;
        return Expr::make_binary(op, std::move(l), std::move(r), p);
    }

    ExprPtr parse_add() {
        ExprPtr l = parse_primary();
        if (!l) return nullptr;
        while (at(Tok::Plus) || at(Tok::Minus)) {
            BinOp op = at(Tok::Plus) ? BinOp::Add : BinOp::Sub;
            SourcePos p = cur().pos;
            ++pos_;
            ExprPtr r = parse_primary();
            if (!r) return nullptr;
            l = Expr::make_binary(op, std::move(l), std::move(r), p);
        }
        return l;
    }

    ExprPtr parse_primary() {
        SourcePos p = cur().pos;
        if (accept(Tok::KwTrue)) return Expr::make_bool(true, p);
        if (accept(Tok::KwFalse)) return Expr::make_bool(false, p);
        if (accept(Tok::IntLit)) return Expr::make_int(prev().int_value, p);
        if (accept(Tok::Minus)) {
            if (!at(Tok::IntLit)) {
                error("expected integer literal after '-'");
                return nullptr;
            }
            std::int64_t v = cur().int_value;
            ++pos_;
            return Expr::make_int(-v, p);
        }
        if (accept(Tok::Ident)) {
            return Expr::make_ident(prev().text, RefKind::Variable, p);
        }
        if (accept(Tok::LParen)) {
            ExprPtr e = parse_expr();
            if (!e) return nullptr;
            if (!expect(Tok::RParen, "')'")) return nullptr;
            return e;
        }
        error("expected expression");
        return nullptr;
    }

    // Flatten top-level conjunctions into the machine's conjunct list.
    static std::vector<ExprPtr> split_conjuncts(const ExprPtr& e) {
        std::vector<ExprPtr> out;
        if (e->kind == Expr::Kind::Binary && e->op == BinOp::And) {
            for (auto& c : split_conjuncts(e->lhs)) out.push_back(std::move(c));
            for (auto& c : split_conjuncts(e->rhs)) out.push_back(std::move(c));
        } else {
            out.push_back(e);
        }
        return out;
    }

    std::vector<Token> toks_;
    std::vector<Diagnostic>& diags_;
    std::size_t pos_ = 0;
};

// Name resolution and type checking. Rebuilds expression trees with resolved
// identifier kinds; collects diagnostics instead of stopping at the first.
class Checker {
public:
    enum class Kind { Bool, Int, Enum };

    Checker(Machine& m, std::vector<Diagnostic>& diags) : m_(m), diags_(diags) {
        for (const auto& v : m_.variables) vars_[v.name] = &v.domain;
        enum_lits_ = m_.enum_literals();
    }

    void run() {
        check_declarations();
        check_invariant();
        check_action(m_.init, nullptr, /*is_init=*/true);
        for (auto& ev : m_.events) {
            check_event(ev);
        }
    }

private:
    void diag(DiagCode c, const std::string& msg, SourcePos pos) {
        diags_.push_back({c, msg, pos});
    }

    void check_declarations() {
        for (std::size_t i = 0; i < m_.variables.size(); ++i) {
            for (std::size_t j = i + 1; j < m_.variables.size(); ++j) {
                if (m_.variables[i].name == m_.variables[j].name) {
                    diag(DiagCode::DuplicateName,
                         "variable '" + m_.variables[i].name + "' declared twice",
                         m_.variables[j].pos);
                }
            }
        }
        for (std::size_t i = 0; i < m_.events.size(); ++i) {
            if (m_.events[i].name == kInitEventName) {
                diag(DiagCode::DuplicateName,
                     std::string(kInitEventName) + " is implicit and cannot be declared",
                     m_.events[i].pos);
            }
            for (std::size_t j = i + 1; j < m_.events.size(); ++j) {
                if (m_.events[i].name == m_.events[j].name) {
                    diag(DiagCode::DuplicateName,
                         "event '" + m_.events[i].name + "' declared twice", m_.events[j].pos);
                }
            }
        }
    }

    void check_invariant() {
        bool allow_external = m_.refines.has_value();
        for (auto& conjunct : m_.invariant) {
            bool used_external = false;
            conjunct.pred = resolve(conjunct.pred, nullptr, allow_external, &used_external);
            conjunct.uses_external = used_external;
            if (!conjunct.pred) continue;
            if (used_external) continue;  // typed at coupling time, with both scopes
            expect_kind(conjunct.pred, Kind::Bool, "invariant");
        }
    }

    void check_event(Event& ev) {
        current_event_ = &ev;
        for (std::size_t i = 0; i < ev.params.size(); ++i) {
            if (vars_.count(ev.params[i].name)) {
                diag(DiagCode::DuplicateName,
                     "parameter '" + ev.params[i].name + "' shadows a variable",
                     ev.params[i].pos);
            }
            for (std::size_t j = i + 1; j < ev.params.size(); ++j) {
                if (ev.params[i].name == ev.params[j].name) {
                    diag(DiagCode::DuplicateName,
                         "parameter '" + ev.params[i].name + "' declared twice",
                         ev.params[j].pos);
                }
            }
        }
        ev.guard = resolve(ev.guard, &ev, false, nullptr);
        if (ev.guard) expect_kind(ev.guard, Kind::Bool, "guard of " + ev.name);
        check_action(ev.action, &ev, /*is_init=*/false);
        current_event_ = nullptr;
    }

    void check_action(Action& a, const Event* scope, bool is_init) {
        std::set<std::string> targets;
        for (auto& as : a.assignments) {
            if (!targets.insert(as.target).second) {
                diag(DiagCode::DuplicateName,
                     "variable '" + as.target + "' assigned twice in one action", as.pos);
                continue;
            }
            auto it = vars_.find(as.target);
            if (it == vars_.end()) {
                diag(DiagCode::UnknownIdentifier,
                     "assignment target '" + as.target + "' is not a declared variable", as.pos);
                continue;
            }
            as.value = resolve(as.value, scope, false, nullptr);
            if (!as.value) continue;
            auto k = kind_of(as.value);
            if (!k) continue;
            if (*k != domain_kind(*it->second)) {
                diag(DiagCode::TypeMismatch,
                     "assignment to '" + as.target + "' has wrong type", as.pos);
                continue;
            }
            check_enum_membership(as.value, *it->second, as.pos);
        }
        if (is_init) {
            for (const auto& v : m_.variables) {
                if (!targets.count(v.name)) {
                    diag(DiagCode::IncompleteInit,
                         "INIT does not assign variable '" + v.name + "'", v.pos);
                }
            }
        }
    }

    // Identifier resolution; returns a rebuilt tree or nullptr after a
    // reported resolution error.
    ExprPtr resolve(const ExprPtr& e, const Event* scope, bool allow_external,
                    bool* used_external) {
        if (!e) return nullptr;
        switch (e->kind) {
            case Expr::Kind::BoolLit:
            case Expr::Kind::IntLit:
                return e;
            case Expr::Kind::Ident: {
                if (scope && scope->find_param(e->name)) {
                    return Expr::make_ident(e->name, RefKind::Parameter, e->pos);
                }
                if (vars_.count(e->name)) {
                    return Expr::make_ident(e->name, RefKind::Variable, e->pos);
                }
                if (enum_lits_.count(e->name)) {
                    return Expr::make_ident(e->name, RefKind::EnumLiteral, e->pos);
                }
                if (allow_external) {
                    if (used_external) *used_external = true;
                    return Expr::make_ident(e->name, RefKind::External, e->pos);
                }
                diag(DiagCode::UnknownIdentifier, "unknown identifier '" + e->name + "'", e->pos);
                return nullptr;
            }
            case Expr::Kind::Not: {
                ExprPtr inner = resolve(e->lhs, scope, allow_external, used_external);
                if (!inner) return nullptr;
                return Expr::make_not(std::move(inner), e->pos);
            }
            case Expr::Kind::Binary: {
                ExprPtr l = resolve(e->lhs, scope, allow_external, used_external);
                ExprPtr r = resolve(e->rhs, scope, allow_external, used_external);
                if (!l || !r) return nullptr;
                return Expr::make_binary(e->op, std::move(l), std::move(r), e->pos);
            }
        }
        return nullptr;
    }

    static Kind domain_kind(const Domain& d) {
        switch (d.kind) {
            case DomainKind::Boolean: return Kind::Bool;
            case DomainKind::IntRange: return Kind::Int;
            case DomainKind::EnumSet: return Kind::Enum;
        }
        return Kind::Bool;
    }

    std::optional<Kind> kind_of(const ExprPtr& e) {
        switch (e->kind) {
            case Expr::Kind::BoolLit: return Kind::Bool;
            case Expr::Kind::IntLit: return Kind::Int;
            case Expr::Kind::Ident:
                switch (e->ref) {
                    case RefKind::Variable: {
                        auto it = vars_.find(e->name);
                        if (it == vars_.end()) return std::nullopt;
                        return domain_kind(*it->second);
                    }
                    case RefKind::Parameter: {
                        const Param* p = current_event_ ? current_event_->find_param(e->name)
                                                        : nullptr;
                        if (!p) return std::nullopt;
                        return domain_kind(p->domain);
                    }
                    case RefKind::EnumLiteral: return Kind::Enum;
                    case RefKind::External: return std::nullopt;
                }
                return std::nullopt;
            case Expr::Kind::Not: {
                auto k = kind_of(e->lhs);
                if (k && *k != Kind::Bool) {
                    diag(DiagCode::TypeMismatch, "'not' applied to non-boolean", e->pos);
                    return std::nullopt;
                }
                return k ? std::optional<Kind>(Kind::Bool) : std::nullopt;
            }
            case Expr::Kind::Binary: {
                auto l = kind_of(e->lhs);
                auto r = kind_of(e->rhs);
                if (!l || !r) return std::nullopt;
                switch (e->op) {
                    case BinOp::And:
                    case BinOp::Or:
                        if (*l != Kind::Bool || *r != Kind::Bool) {
                            diag(DiagCode::TypeMismatch, "logical operator on non-booleans",
                                 e->pos);
                            return std::nullopt;
                        }
                        return Kind::Bool;
                    case BinOp::Eq:
                    case BinOp::Ne:
                        if (*l != *r) {
                            diag(DiagCode::TypeMismatch, "comparison of different types", e->pos);
                            return std::nullopt;
                        }
                        check_eq_membership(e);
                        return Kind::Bool;
                    case BinOp::Lt:
                    case BinOp::Le:
                        if (*l != Kind::Int || *r != Kind::Int) {
                            diag(DiagCode::TypeMismatch, "ordering on non-integers", e->pos);
                            return std::nullopt;
                        }
                        return Kind::Bool;
                    case BinOp::Add:
                    case BinOp::Sub:
                        if (*l != Kind::Int || *r != Kind::Int) {
                            diag(DiagCode::TypeMismatch, "arithmetic on non-integers", e->pos);
                            return std::nullopt;
                        }
                        return Kind::Int;
                }
                return std::nullopt;
            }
        }
        return std::nullopt;
    }

    // An enum literal compared against a variable/parameter must belong to
    // that side's declared domain.
    void check_eq_membership(const ExprPtr& e) {
        const Domain* dl = side_domain(e->lhs);
        const Domain* dr = side_domain(e->rhs);
        if (dl && dl->kind == DomainKind::EnumSet) check_enum_membership(e->rhs, *dl, e->pos);
        if (dr && dr->kind == DomainKind::EnumSet) check_enum_membership(e->lhs, *dr, e->pos);
    }

    const Domain* side_domain(const ExprPtr& e) const {
        if (e->kind != Expr::Kind::Ident) return nullptr;
        if (e->ref == RefKind::Variable) {
            auto it = vars_.find(e->name);
            return it == vars_.end() ? nullptr : it->second;
        }
        if (e->ref == RefKind::Parameter && current_event_) {
            const Param* p = current_event_->find_param(e->name);
            return p ? &p->domain : nullptr;
        }
        return nullptr;
    }

    void check_enum_membership(const ExprPtr& e, const Domain& d, SourcePos pos) {
        if (e->kind == Expr::Kind::Ident && e->ref == RefKind::EnumLiteral &&
            d.kind == DomainKind::EnumSet && !d.contains(Value(e->name))) {
            diag(DiagCode::TypeMismatch,
                 "enum literal '" + e->name + "' is not a member of " + d.to_string(), pos);
        }
    }

    void expect_kind(const ExprPtr& e, Kind want, const std::string& what) {
        auto k = kind_of(e);
        if (k && *k != want) {
            diag(DiagCode::TypeMismatch, what + " is not a predicate", e->pos);
        }
    }

    Machine& m_;
    std::vector<Diagnostic>& diags_;
    std::map<std::string, const Domain*> vars_;
    std::set<std::string> enum_lits_;
    const Event* current_event_ = nullptr;
};

}  // namespace detail

inline ParseResult parse_machine(const std::string& source) {
    ParseResult res;
    Lexer lex(source);
    std::vector<Token> toks = lex.run(res.diagnostics);
    if (!res.diagnostics.empty()) return res;
    detail::Parser parser(std::move(toks), res.diagnostics);
    auto m = parser.run();
    if (!m || !res.diagnostics.empty()) return res;
    detail::Checker checker(*m, res.diagnostics);
    checker.run();
    if (res.diagnostics.empty()) res.machine = std::move(m);
    return res;
}

}  // namespace retrace
