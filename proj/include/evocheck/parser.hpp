#pragma once

// Surface syntax -> AST.
//
// The grammar is Erlang-flavored: a module is a sequence of spec declarations
// and functions, a function is semicolon-separated clauses closed by a dot,
// and clause bodies are comma-separated expression sequences. Guards are a
// restricted expression grammar (comparisons, boolean connectives, arithmetic
// and length/1).
//
// parse_module has two modes. Surface mode accepts exactly the user-facing
// language. Trace mode additionally accepts @trace(expr) nodes and '@' inside
// identifiers, so output of the pretty-printer on instrumented trees can be
// read back; neither form is reachable from ordinary programs.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "evocheck/ast.hpp"
#include "evocheck/errors.hpp"

namespace evocheck::lang {

inline bool is_builtin(const std::string& name, int arity) {
    return (name == "length" && arity == 1) || (name == "reverse" && arity == 1) ||
           (name == "sort" && arity == 1) || (name == "integer_to_list" && arity == 1) ||
           (name == "member" && arity == 2) || (name == "map" && arity == 2) ||
           (name == "foldl" && arity == 3) || (name == "sum" && arity == 1);
}

namespace detail {

enum class Tok {
    Int, LIdent, UIdent,
    LParen, RParen, LBrace, RBrace, LBracket, RBracket,
    Comma, Semicolon, Dot, Arrow, Pipe, PipePipe, LeftArrow, At,
    Eq, EqEq, Ne, ExactEq, ExactNe, Lt, Gt, Le, Ge,
    Plus, Minus, Star, Slash,
    KwWhen, KwCase, KwOf, KwIf, KwEnd, KwFun, KwBegin, KwSpec,
    KwDiv, KwRem, KwAnd, KwOr, KwAndalso, KwOrelse,
    Eof,
};

struct Token {
    Tok kind;
    std::string text;
    std::int64_t ival = 0;
    int line = 1;
    int col = 1;
};

inline Tok keyword_kind(const std::string& s) {
    if (s == "when") return Tok::KwWhen;
    if (s == "case") return Tok::KwCase;
    if (s == "of") return Tok::KwOf;
    if (s == "if") return Tok::KwIf;
    if (s == "end") return Tok::KwEnd;
    if (s == "fun") return Tok::KwFun;
    if (s == "begin") return Tok::KwBegin;
    if (s == "spec") return Tok::KwSpec;
    if (s == "div") return Tok::KwDiv;
    if (s == "rem") return Tok::KwRem;
    if (s == "and") return Tok::KwAnd;
    if (s == "or") return Tok::KwOr;
    if (s == "andalso") return Tok::KwAndalso;
    if (s == "orelse") return Tok::KwOrelse;
    return Tok::LIdent;
}

inline std::vector<Token> lex(const std::string& src, bool trace_mode) {
    std::vector<Token> out;
    int line = 1, col = 1;
    size_t i = 0;
    auto advance = [&](size_t n) {
        for (size_t k = 0; k < n; ++k) {
            if (src[i + k] == '\n') { ++line; col = 1; } else { ++col; }
        }
        i += n;
    };
    auto push = [&](Tok kind, size_t len, std::string text = "") {
        out.push_back({kind, std::move(text), 0, line, col});
        advance(len);
    };
    while (i < src.size()) {
        char c = src[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') { advance(1); continue; }
        if (c == '%') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        if (c >= '0' && c <= '9') {
            size_t j = i;
            while (j < src.size() && src[j] >= '0' && src[j] <= '9') ++j;
            Token t{Tok::Int, src.substr(i, j - i), 0, line, col};
            t.ival = std::stoll(t.text);
            out.push_back(t);
            advance(j - i);
            continue;
        }
        auto ident_char = [&](char ch) {
            return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                   (ch >= '0' && ch <= '9') || ch == '_' || (trace_mode && ch == '@');
        };
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') {
            size_t j = i;
            while (j < src.size() && ident_char(src[j])) ++j;
            std::string text = src.substr(i, j - i);
            Tok kind;
            if (c >= 'a' && c <= 'z') kind = keyword_kind(text);
            else kind = Tok::UIdent;
            out.push_back({kind, text, 0, line, col});
            advance(j - i);
            continue;
        }
        auto two = [&](const char* s) {
            return i + 1 < src.size() && src[i] == s[0] && src[i + 1] == s[1];
        };
        auto three = [&](const char* s) {
            return i + 2 < src.size() && src[i] == s[0] && src[i + 1] == s[1] && src[i + 2] == s[2];
        };
        if (three("=:=")) { push(Tok::ExactEq, 3); continue; }
        if (three("=/=")) { push(Tok::ExactNe, 3); continue; }
        if (two("->")) { push(Tok::Arrow, 2); continue; }
        if (two("||")) { push(Tok::PipePipe, 2); continue; }
        if (two("<-")) { push(Tok::LeftArrow, 2); continue; }
        if (two("==")) { push(Tok::EqEq, 2); continue; }
        if (two("/=")) { push(Tok::Ne, 2); continue; }
        if (two("=<")) { push(Tok::Le, 2); continue; }
        if (two(">=")) { push(Tok::Ge, 2); continue; }
        switch (c) {
            case '(': push(Tok::LParen, 1); continue;
            case ')': push(Tok::RParen, 1); continue;
            case '{': push(Tok::LBrace, 1); continue;
            case '}': push(Tok::RBrace, 1); continue;
            case '[': push(Tok::LBracket, 1); continue;
            case ']': push(Tok::RBracket, 1); continue;
            case ',': push(Tok::Comma, 1); continue;
            case ';': push(Tok::Semicolon, 1); continue;
            case '.': push(Tok::Dot, 1); continue;
            case '|': push(Tok::Pipe, 1); continue;
            case '=': push(Tok::Eq, 1); continue;
            case '<': push(Tok::Lt, 1); continue;
            case '>': push(Tok::Gt, 1); continue;
            case '+': push(Tok::Plus, 1); continue;
            case '-': push(Tok::Minus, 1); continue;
            case '*': push(Tok::Star, 1); continue;
            case '/': push(Tok::Slash, 1); continue;
            case '@':
                if (trace_mode) { push(Tok::At, 1); continue; }
                throw SyntaxError(line, col, "a token ('@' is not surface syntax)");
            default:
                throw SyntaxError(line, col, std::string("a token, found '") + c + "'");
        }
    }
    out.push_back({Tok::Eof, "", 0, line, col});
    return out;
}

class Parser {
public:
    Parser(std::vector<Token> toks, bool trace_mode)
        : toks_(std::move(toks)), trace_mode_(trace_mode) {}

    Node parse_module(const std::string& name) {
        std::vector<Node> specs;
        std::vector<Node> functions;
        while (!at(Tok::Eof)) {
            if (at(Tok::KwSpec)) {
                specs.push_back(parse_spec());
            } else {
                Node f = parse_function();
                for (const Node& g : functions)
                    if (g.sval == f.sval && g.ival == f.ival)
                        throw SyntaxError(f.span.line, f.span.col,
                                          "a unique function (duplicate " + f.sval + "/" +
                                              std::to_string(f.ival) + ")");
                functions.push_back(std::move(f));
            }
        }
        Node m = mk(NodeKind::Module);
        m.sval = name;
        m.ival = static_cast<std::int64_t>(specs.size());
        for (auto& s : specs) m.children.push_back(std::move(s));
        for (auto& f : functions) m.children.push_back(std::move(f));
        check_stray_wildcards(m);
        return m;
    }

private:
    std::vector<Token> toks_;
    size_t i_ = 0;
    bool trace_mode_;

    const Token& cur() const { return toks_[i_]; }
    bool at(Tok k) const { return cur().kind == k; }
    const Token& next() { return toks_[i_++]; }
    Span span_here() const { return Span{cur().line, cur().col}; }

    const Token& expect(Tok k, const char* what) {
        if (!at(k)) throw SyntaxError(cur().line, cur().col, what);
        return next();
    }

    [[noreturn]] void fail(const std::string& what) {
        throw SyntaxError(cur().line, cur().col, what);
    }

    // --- declarations ---

    Node parse_spec() {
        Span sp = span_here();
        expect(Tok::KwSpec, "'spec'");
        const Token& name = expect(Tok::LIdent, "a function name");
        expect(Tok::LParen, "'('");
        std::vector<Node> tys;
        if (!at(Tok::RParen)) {
            tys.push_back(parse_type());
            while (at(Tok::Comma)) { next(); tys.push_back(parse_type()); }
        }
        expect(Tok::RParen, "')'");
        expect(Tok::Arrow, "'->'");
        Node ret = parse_type();
        expect(Tok::Dot, "'.'");
        Node s = mk(NodeKind::SpecDecl);
        s.span = sp;
        s.sval = name.text;
        s.ival = static_cast<std::int64_t>(tys.size());
        for (auto& t : tys) s.children.push_back(std::move(t));
        s.children.push_back(std::move(ret));
        return s;
    }

    Node parse_type() {
        std::vector<Node> alts;
        alts.push_back(parse_type_alt());
        while (at(Tok::Pipe)) { next(); alts.push_back(parse_type_alt()); }
        if (alts.size() == 1) return std::move(alts[0]);
        Node u = mk(NodeKind::TyUnion, std::move(alts));
        u.span = u.children.front().span;
        return u;
    }

    Node parse_type_alt() {
        Span sp = span_here();
        auto with_span = [&](Node n) { n.span = sp; return n; };
        if (at(Tok::Int)) {
            Node n = mk(NodeKind::TyIntLit);
            n.ival = next().ival;
            return with_span(std::move(n));
        }
        if (at(Tok::Minus)) {
            next();
            Node n = mk(NodeKind::TyIntLit);
            n.ival = -expect(Tok::Int, "an integer").ival;
            return with_span(std::move(n));
        }
        if (at(Tok::LBrace)) {
            next();
            std::vector<Node> elems;
            if (!at(Tok::RBrace)) {
                elems.push_back(parse_type());
                while (at(Tok::Comma)) { next(); elems.push_back(parse_type()); }
            }
            expect(Tok::RBrace, "'}'");
            return with_span(mk(NodeKind::TyTuple, std::move(elems)));
        }
        if (at(Tok::LIdent)) {
            std::string name = next().text;
            if (at(Tok::LParen)) {
                next();
                if (name == "integer") { expect(Tok::RParen, "')'"); return with_span(mk(NodeKind::TyInteger)); }
                if (name == "pos_integer") { expect(Tok::RParen, "')'"); return with_span(mk(NodeKind::TyPosInteger)); }
                if (name == "atom") { expect(Tok::RParen, "')'"); return with_span(mk(NodeKind::TyAtom)); }
                if (name == "any") { expect(Tok::RParen, "')'"); return with_span(mk(NodeKind::TyAny)); }
                if (name == "list") {
                    Node elem = parse_type();
                    std::int64_t len = -1;
                    if (at(Tok::Comma)) {
                        next();
                        len = expect(Tok::Int, "a list length").ival;
                    }
                    expect(Tok::RParen, "')'");
                    Node n = mk(NodeKind::TyList);
                    n.ival = len;
                    n.children.push_back(std::move(elem));
                    return with_span(std::move(n));
                }
                fail("a type name (integer, pos_integer, atom, any, list)");
            }
            Node n = mk(NodeKind::TyAtomLit);
            n.sval = name;
            return with_span(std::move(n));
        }
        fail("a type");
    }

    Node parse_function() {
        std::vector<Node> clauses;
        std::string name;
        int arity = 0;
        Span sp = span_here();
        for (;;) {
            Span csp = span_here();
            const Token& head = expect(Tok::LIdent, "a function clause head");
            if (clauses.empty()) name = head.text;
            else if (head.text != name)
                throw SyntaxError(head.line, head.col, "clause of function " + name);
            expect(Tok::LParen, "'('");
            std::vector<Node> patterns;
            if (!at(Tok::RParen)) {
                patterns.push_back(parse_pattern());
                while (at(Tok::Comma)) { next(); patterns.push_back(parse_pattern()); }
            }
            expect(Tok::RParen, "')'");
            if (clauses.empty()) arity = static_cast<int>(patterns.size());
            else if (static_cast<int>(patterns.size()) != arity)
                throw SyntaxError(csp.line, csp.col,
                                  "arity " + std::to_string(arity) + " for all clauses of " + name);
            std::vector<Node> guard;
            if (at(Tok::KwWhen)) { next(); guard.push_back(parse_guard()); }
            expect(Tok::Arrow, "'->'");
            Node cl = mk_clause(std::move(patterns), std::move(guard), parse_expr_seq());
            cl.span = csp;
            clauses.push_back(std::move(cl));
            if (at(Tok::Semicolon)) { next(); continue; }
            expect(Tok::Dot, "'.' or ';'");
            break;
        }
        if (is_builtin(name, arity))
            throw SyntaxError(sp.line, sp.col,
                              "a non-builtin name (" + name + "/" + std::to_string(arity) +
                                  " is primitive)");
        Node f = mk(NodeKind::Function, std::move(clauses));
        f.span = sp;
        f.sval = name;
        f.ival = arity;
        return f;
    }

    // --- patterns ---

    Node parse_pattern() {
        Span sp = span_here();
        auto with_span = [&](Node n) { n.span = sp; return n; };
        switch (cur().kind) {
            case Tok::Int: return with_span(mk_int(next().ival));
            case Tok::Minus: {
                next();
                return with_span(mk_int(-expect(Tok::Int, "an integer").ival));
            }
            case Tok::LIdent: return with_span(mk_atom(next().text));
            case Tok::UIdent: {
                std::string name = next().text;
                if (name == "_") return with_span(mk(NodeKind::Wildcard));
                return with_span(mk_var(name));
            }
            case Tok::LBrace: {
                next();
                std::vector<Node> elems;
                if (!at(Tok::RBrace)) {
                    elems.push_back(parse_pattern());
                    while (at(Tok::Comma)) { next(); elems.push_back(parse_pattern()); }
                }
                expect(Tok::RBrace, "'}'");
                return with_span(mk_tuple(std::move(elems)));
            }
            case Tok::LBracket: {
                next();
                if (at(Tok::RBracket)) { next(); return with_span(mk_nil()); }
                std::vector<Node> elems;
                elems.push_back(parse_pattern());
                while (at(Tok::Comma)) { next(); elems.push_back(parse_pattern()); }
                Node tail = mk_nil();
                tail.span = span_here();
                if (at(Tok::Pipe)) { next(); tail = parse_pattern(); }
                expect(Tok::RBracket, "']'");
                for (auto it = elems.rbegin(); it != elems.rend(); ++it) {
                    Node c = mk_cons(std::move(*it), std::move(tail));
                    c.span = c.children[0].span;
                    tail = std::move(c);
                }
                return tail;
            }
            default:
                fail("a pattern");
        }
    }

    // --- expressions ---

    std::vector<Node> parse_expr_seq() {
        std::vector<Node> out;
        out.push_back(parse_expr());
        while (at(Tok::Comma)) { next(); out.push_back(parse_expr()); }
        return out;
    }

    Node parse_expr() {
        Node lhs = parse_orelse(false);
        if (at(Tok::Eq)) {
            Span sp = Span{cur().line, cur().col};
            next();
            if (!is_pattern(lhs))
                throw SyntaxError(sp.line, sp.col, "a pattern on the left of '='");
            Node rhs = parse_expr();  // right-associative
            Node m = mk_match(std::move(lhs), std::move(rhs));
            m.span = sp;
            return m;
        }
        return lhs;
    }

    // Guards reuse the operator grammar but restrict the primaries: no match,
    // no clause-bearing constructs, calls only to length/1.
    Node parse_guard() { return parse_orelse(true); }

    Node mk_binop(BinOpKind op, Node l, Node r, Span sp) {
        Node n = mk(NodeKind::BinOp, {std::move(l), std::move(r)});
        n.op = op;
        n.span = sp;
        return n;
    }

    Node parse_orelse(bool guard) {
        Node lhs = parse_andalso(guard);
        for (;;) {
            BinOpKind op;
            if (at(Tok::KwOrelse)) op = BinOpKind::OrElse;
            else if (at(Tok::KwOr)) op = BinOpKind::Or;
            else return lhs;
            Span sp = span_here();
            next();
            lhs = mk_binop(op, std::move(lhs), parse_andalso(guard), sp);
        }
    }

    Node parse_andalso(bool guard) {
        Node lhs = parse_cmp(guard);
        for (;;) {
            BinOpKind op;
            if (at(Tok::KwAndalso)) op = BinOpKind::AndAlso;
            else if (at(Tok::KwAnd)) op = BinOpKind::And;
            else return lhs;
            Span sp = span_here();
            next();
            lhs = mk_binop(op, std::move(lhs), parse_cmp(guard), sp);
        }
    }

    Node parse_cmp(bool guard) {
        Node lhs = parse_add(guard);
        for (;;) {
            BinOpKind op;
            switch (cur().kind) {
                case Tok::EqEq: op = BinOpKind::Eq; break;
                case Tok::Ne: op = BinOpKind::Ne; break;
                case Tok::ExactEq: op = BinOpKind::ExactEq; break;
                case Tok::ExactNe: op = BinOpKind::ExactNe; break;
                case Tok::Lt: op = BinOpKind::Lt; break;
                case Tok::Gt: op = BinOpKind::Gt; break;
                case Tok::Le: op = BinOpKind::Le; break;
                case Tok::Ge: op = BinOpKind::Ge; break;
                default: return lhs;
            }
            Span sp = span_here();
            next();
            lhs = mk_binop(op, std::move(lhs), parse_add(guard), sp);
        }
    }

    Node parse_add(bool guard) {
        Node lhs = parse_mul(guard);
        for (;;) {
            BinOpKind op;
            if (at(Tok::Plus)) op = BinOpKind::Add;
            else if (at(Tok::Minus)) op = BinOpKind::Sub;
            else return lhs;
            Span sp = span_here();
            next();
            lhs = mk_binop(op, std::move(lhs), parse_mul(guard), sp);
        }
    }

    Node parse_mul(bool guard) {
        Node lhs = parse_primary(guard);
        for (;;) {
            BinOpKind op;
            if (at(Tok::Star)) op = BinOpKind::Mul;
            else if (at(Tok::Slash)) op = BinOpKind::DivSlash;
            else if (at(Tok::KwDiv)) op = BinOpKind::Div;
            else if (at(Tok::KwRem)) op = BinOpKind::Rem;
            else return lhs;
            Span sp = span_here();
            next();
            lhs = mk_binop(op, std::move(lhs), parse_primary(guard), sp);
        }
    }

    Node parse_primary(bool guard) {
        Span sp = span_here();
        auto with_span = [&](Node n) { n.span = sp; return n; };
        switch (cur().kind) {
            case Tok::Int: return with_span(mk_int(next().ival));
            case Tok::Minus: {
                next();
                return with_span(mk_int(-expect(Tok::Int, "an integer").ival));
            }
            case Tok::LIdent: {
                std::string name = next().text;
                if (at(Tok::LParen)) return parse_call(mk_atom(name), sp, guard);
                return with_span(mk_atom(name));
            }
            case Tok::UIdent: {
                std::string name = next().text;
                if (name == "_") return with_span(mk(NodeKind::Wildcard));
                if (at(Tok::LParen)) {
                    if (guard) fail("a guard expression (no calls through variables)");
                    return parse_call(mk_var(name), sp, guard);
                }
                return with_span(mk_var(name));
            }
            case Tok::LBrace: {
                next();
                std::vector<Node> elems;
                if (!at(Tok::RBrace)) {
                    elems.push_back(parse_expr_in(guard));
                    while (at(Tok::Comma)) { next(); elems.push_back(parse_expr_in(guard)); }
                }
                expect(Tok::RBrace, "'}'");
                return with_span(mk_tuple(std::move(elems)));
            }
            case Tok::LBracket: return parse_list_or_comprehension(sp, guard);
            case Tok::LParen: {
                next();
                Node e = parse_expr_in(guard);
                expect(Tok::RParen, "')'");
                return e;
            }
            case Tok::KwCase: {
                if (guard) fail("a guard expression (no case)");
                next();
                Node scrut = parse_expr();
                expect(Tok::KwOf, "'of'");
                std::vector<Node> clauses;
                for (;;) {
                    Span csp = span_here();
                    Node pat = parse_pattern();
                    std::vector<Node> g;
                    if (at(Tok::KwWhen)) { next(); g.push_back(parse_guard()); }
                    expect(Tok::Arrow, "'->'");
                    Node cl = mk_clause({std::move(pat)}, std::move(g), parse_expr_seq());
                    cl.span = csp;
                    clauses.push_back(std::move(cl));
                    if (at(Tok::Semicolon)) { next(); continue; }
                    break;
                }
                expect(Tok::KwEnd, "'end'");
                return with_span(mk_case(std::move(scrut), std::move(clauses)));
            }
            case Tok::KwIf: {
                if (guard) fail("a guard expression (no if)");
                next();
                std::vector<Node> clauses;
                for (;;) {
                    Span csp = span_here();
                    Node g = parse_guard();
                    expect(Tok::Arrow, "'->'");
                    Node cl = mk_clause({}, {std::move(g)}, parse_expr_seq());
                    cl.span = csp;
                    clauses.push_back(std::move(cl));
                    if (at(Tok::Semicolon)) { next(); continue; }
                    break;
                }
                expect(Tok::KwEnd, "'end'");
                return with_span(mk(NodeKind::If, std::move(clauses)));
            }
            case Tok::KwFun: {
                if (guard) fail("a guard expression (no fun)");
                next();
                std::vector<Node> clauses;
                int arity = -1;
                for (;;) {
                    Span csp = span_here();
                    expect(Tok::LParen, "'('");
                    std::vector<Node> patterns;
                    if (!at(Tok::RParen)) {
                        patterns.push_back(parse_pattern());
                        while (at(Tok::Comma)) { next(); patterns.push_back(parse_pattern()); }
                    }
                    expect(Tok::RParen, "')'");
                    if (arity < 0) arity = static_cast<int>(patterns.size());
                    else if (static_cast<int>(patterns.size()) != arity)
                        throw SyntaxError(csp.line, csp.col, "matching fun clause arity");
                    std::vector<Node> g;
                    if (at(Tok::KwWhen)) { next(); g.push_back(parse_guard()); }
                    expect(Tok::Arrow, "'->'");
                    Node cl = mk_clause(std::move(patterns), std::move(g), parse_expr_seq());
                    cl.span = csp;
                    clauses.push_back(std::move(cl));
                    if (at(Tok::Semicolon)) { next(); continue; }
                    break;
                }
                expect(Tok::KwEnd, "'end'");
                return with_span(mk(NodeKind::Lambda, std::move(clauses)));
            }
            case Tok::KwBegin: {
                if (guard) fail("a guard expression (no begin)");
                next();
                Node s = mk_seq(parse_expr_seq());
                expect(Tok::KwEnd, "'end'");
                return with_span(std::move(s));
            }
            case Tok::At: {
                next();
                const Token& id = expect(Tok::LIdent, "'trace'");
                if (id.text != "trace") fail("'trace' after '@'");
                expect(Tok::LParen, "'('");
                Node e = parse_expr();
                expect(Tok::RParen, "')'");
                return with_span(mk_trace(std::move(e)));
            }
            default:
                fail("an expression");
        }
    }

    Node parse_expr_in(bool guard) { return guard ? parse_orelse(true) : parse_expr(); }

    Node parse_call(Node callee, Span sp, bool guard) {
        expect(Tok::LParen, "'('");
        std::vector<Node> args;
        if (!at(Tok::RParen)) {
            args.push_back(parse_expr_in(guard));
            while (at(Tok::Comma)) { next(); args.push_back(parse_expr_in(guard)); }
        }
        expect(Tok::RParen, "')'");
        if (guard && !(callee.kind == NodeKind::AtomLit && callee.sval == "length" &&
                       args.size() == 1))
            throw SyntaxError(sp.line, sp.col, "a guard call (only length/1)");
        Node c = mk_call(std::move(callee), std::move(args));
        c.span = sp;
        return c;
    }

    Node parse_list_or_comprehension(Span sp, bool guard) {
        expect(Tok::LBracket, "'['");
        if (at(Tok::RBracket)) {
            next();
            Node n = mk_nil();
            n.span = sp;
            return n;
        }
        Node first = parse_expr_in(guard);
        if (at(Tok::PipePipe)) {
            if (guard) fail("a guard expression (no comprehension)");
            next();
            std::vector<Node> children;
            children.push_back(std::move(first));
            children.push_back(parse_qualifier());
            while (at(Tok::Comma)) { next(); children.push_back(parse_qualifier()); }
            expect(Tok::RBracket, "']'");
            Node lc = mk(NodeKind::ListComp, std::move(children));
            lc.span = sp;
            return lc;
        }
        std::vector<Node> elems;
        elems.push_back(std::move(first));
        while (at(Tok::Comma)) { next(); elems.push_back(parse_expr_in(guard)); }
        Node tail = mk_nil();
        tail.span = span_here();
        if (at(Tok::Pipe)) { next(); tail = parse_expr_in(guard); }
        expect(Tok::RBracket, "']'");
        for (auto it = elems.rbegin(); it != elems.rend(); ++it) {
            Node c = mk_cons(std::move(*it), std::move(tail));
            c.span = c.children[0].span;
            tail = std::move(c);
        }
        return tail;
    }

    Node parse_qualifier() {
        // A qualifier is either "pattern <- expr" or a filter expression. The
        // two are disambiguated by attempting the pattern first.
        size_t mark = i_;
        try {
            Span sp = span_here();
            Node pat = parse_pattern();
            if (at(Tok::LeftArrow)) {
                next();
                Node src = parse_expr();
                Node g = mk(NodeKind::Generator, {std::move(pat), std::move(src)});
                g.span = sp;
                return g;
            }
        } catch (const SyntaxError&) {
        }
        i_ = mark;
        return parse_expr();
    }

    // Wildcards are binders; outside pattern positions they have no meaning.
    void check_stray_wildcards(const Node& n) {
        switch (n.kind) {
            case NodeKind::Wildcard:
                throw SyntaxError(n.span.line, n.span.col,
                                  "a bound expression ('_' is only a pattern)");
            case NodeKind::Match:
            case NodeKind::Generator:
                check_stray_wildcards(n.children[1]);
                return;
            case NodeKind::Clause: {
                for (size_t i = static_cast<size_t>(n.npatterns); i < n.children.size(); ++i)
                    check_stray_wildcards(n.children[i]);
                return;
            }
            default:
                for (const Node& c : n.children) check_stray_wildcards(c);
        }
    }
};

}  // namespace detail

struct ParseOptions {
    // Accept @trace(expr) and '@' in identifiers; used to read back
    // pretty-printed instrumented trees.
    bool allow_trace = false;
};

inline Node parse_module(const std::string& source, const std::string& module_name,
                         ParseOptions opts = {}) {
    detail::Parser p(detail::lex(source, opts.allow_trace), opts.allow_trace);
    return p.parse_module(module_name);
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Module name is the file stem: "dir/happy0.fth" -> "happy0".
inline Node parse_file(const std::string& path, ParseOptions opts = {}) {
    std::string stem = path;
    if (auto slash = stem.find_last_of("/\\"); slash != std::string::npos)
        stem = stem.substr(slash + 1);
    if (auto dot = stem.find_last_of('.'); dot != std::string::npos) stem = stem.substr(0, dot);
    return parse_module(read_file(path), stem, opts);
}

}  // namespace evocheck::lang
