#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <vector>

#include "retrace/diagnostics.hpp"

namespace retrace {

enum class Tok {
    Ident,
    IntLit,
    // keywords
    KwMachine,
    KwRefines,
    KwVariables,
    KwInvariant,
    KwInit,
    KwEvent,
    KwWhen,
    KwThen,
    KwEnd,
    KwConvergent,
    KwBool,
    KwTrue,
    KwFalse,
    KwOr,
    KwNot,
    // punctuation
    LParen,
    RParen,
    LBrace,
    RBrace,
    Colon,
    Semicolon,
    Comma,
    DotDot,
    Assign,    // :=
    Parallel,  // ||
    Amp,       // &
    Eq,        // =
    Neq,       // /=
    Lt,        // <
    Le,        // <=
    Plus,
    Minus,
    Eof,
};

struct Token {
    Tok kind = Tok::Eof;
    std::string text;
    std::int64_t int_value = 0;
    SourcePos pos{};
};

// Tokenizes a machine source. On a bad character the token stream ends with
// a diagnostic; the parser reports it as a syntax error.
class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) {}

    std::vector<Token> run(std::vector<Diagnostic>& diags) {
        std::vector<Token> out;
        while (true) {
            skip_ws_and_comments();
            SourcePos pos{line_, col_};
            if (at_end()) {
                out.push_back({Tok::Eof, "", 0, pos});
                break;
            }
            char c = peek();
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                out.push_back(lex_word(pos));
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                out.push_back(lex_number(pos));
            } else {
                Token t;
                t.pos = pos;
                if (!lex_symbol(t)) {
                    diags.push_back({DiagCode::SyntaxError,
                                     std::string("unexpected character '") + c + "'", pos});
                    out.push_back({Tok::Eof, "", 0, pos});
                    break;
                }
                out.push_back(t);
            }
        }
        return out;
    }

private:
    bool at_end() const { return idx_ >= src_.size(); }
    char peek(std::size_t ahead = 0) const {
        return idx_ + ahead < src_.size() ? src_[idx_ + ahead] : '\0';
    }
    char advance() {
        char c = src_[idx_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_ws_and_comments() {
        while (!at_end()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (!at_end() && peek() != '\n') advance();
            } else {
                break;
            }
        }
    }

    Token lex_word(SourcePos pos) {
        std::string w;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) {
            w += advance();
        }
        Token t;
        t.pos = pos;
        t.text = w;
        if (w == "MACHINE") t.kind = Tok::KwMachine;
        else if (w == "REFINES") t.kind = Tok::KwRefines;
        else if (w == "VARIABLES") t.kind = Tok::KwVariables;
        else if (w == "INVARIANT") t.kind = Tok::KwInvariant;
        else if (w == "INIT") t.kind = Tok::KwInit;
        else if (w == "EVENT") t.kind = Tok::KwEvent;
        else if (w == "WHEN") t.kind = Tok::KwWhen;
        else if (w == "THEN") t.kind = Tok::KwThen;
        else if (w == "END") t.kind = Tok::KwEnd;
        else if (w == "CONVERGENT") t.kind = Tok::KwConvergent;
        else if (w == "BOOL") t.kind = Tok::KwBool;
        else if (w == "TRUE") t.kind = Tok::KwTrue;
        else if (w == "FALSE") t.kind = Tok::KwFalse;
        else if (w == "or") t.kind = Tok::KwOr;
        else if (w == "not") t.kind = Tok::KwNot;
        else t.kind = Tok::Ident;
        return t;
    }

    Token lex_number(SourcePos pos) {
        std::string n;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
            n += advance();
        }
        Token t;
        t.kind = Tok::IntLit;
        t.text = n;
        t.int_value = std::stoll(n);
        t.pos = pos;
        return t;
    }

    bool lex_symbol(Token& t) {
        char c = advance();
        switch (c) {
            case '(': t.kind = Tok::LParen; return true;
            case ')': t.kind = Tok::RParen; return true;
            case '{': t.kind = Tok::LBrace; return true;
            case '}': t.kind = Tok::RBrace; return true;
            case ';': t.kind = Tok::Semicolon; return true;
            case ',': t.kind = Tok::Comma; return true;
            case '&': t.kind = Tok::Amp; return true;
            case '=': t.kind = Tok::Eq; return true;
            case '+': t.kind = Tok::Plus; return true;
            case '-': t.kind = Tok::Minus; return true;
            case ':':
                if (peek() == '=') {
                    advance();
                    t.kind = Tok::Assign;
                } else {
                    t.kind = Tok::Colon;
                }
                return true;
            case '|':
                if (peek() == '|') {
                    advance();
                    t.kind = Tok::Parallel;
                    return true;
                }
                return false;
            case '/':
                if (peek() == '=') {
                    advance();
                    t.kind = Tok::Neq;
                    return true;
                }
                return false;
            case '<':
                if (peek() == '=') {
                    advance();
                    t.kind = Tok::Le;
                } else {
                    t.kind = Tok::Lt;
                }
                return true;
            case '.':
                if (peek() == '.') {
                    advance();
                    t.kind = Tok::DotDot;
                    return true;
                }
                return false;
            default:
                return false;
        }
    }

    const std::string& src_;
    std::size_t idx_ = 0;
    int line_ = 1;
    int col_ = 1;
};

}  // namespace retrace
