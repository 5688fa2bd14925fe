#pragma once

// AST -> surface syntax. Inverse of the parser up to spans and layout:
// parse_module(pretty(m), m.sval, {.allow_trace = true}) rebuilds an
// ast_equal tree. Instrumented trees print @trace(...) forms, which is why
// reading the output back requires trace mode.

#include <string>

#include "evocheck/ast.hpp"

namespace evocheck::lang {

namespace detail {

// Binding strength, loosest first. Operands at the same level are printed
// unparenthesized only on the associative side.
inline int prec_of(const Node& n) {
    if (n.kind == NodeKind::Match) return 1;
    if (n.kind != NodeKind::BinOp) return 7;
    switch (n.op) {
        case BinOpKind::Or:
        case BinOpKind::OrElse: return 2;
        case BinOpKind::And:
        case BinOpKind::AndAlso: return 3;
        case BinOpKind::Eq:
        case BinOpKind::Ne:
        case BinOpKind::ExactEq:
        case BinOpKind::ExactNe:
        case BinOpKind::Lt:
        case BinOpKind::Gt:
        case BinOpKind::Le:
        case BinOpKind::Ge: return 4;
        case BinOpKind::Add:
        case BinOpKind::Sub: return 5;
        default: return 6;
    }
}

inline const char* op_text(BinOpKind op) {
    switch (op) {
        case BinOpKind::Add: return "+";
        case BinOpKind::Sub: return "-";
        case BinOpKind::Mul: return "*";
        case BinOpKind::DivSlash: return "/";
        case BinOpKind::Div: return "div";
        case BinOpKind::Rem: return "rem";
        case BinOpKind::Eq: return "==";
        case BinOpKind::Ne: return "/=";
        case BinOpKind::ExactEq: return "=:=";
        case BinOpKind::ExactNe: return "=/=";
        case BinOpKind::Lt: return "<";
        case BinOpKind::Gt: return ">";
        case BinOpKind::Le: return "=<";
        case BinOpKind::Ge: return ">=";
        case BinOpKind::And: return "and";
        case BinOpKind::Or: return "or";
        case BinOpKind::AndAlso: return "andalso";
        case BinOpKind::OrElse: return "orelse";
    }
    return "?";
}

class Printer {
public:
    std::string module(const Node& m) {
        std::string out;
        bool first = true;
        for (const Node& c : m.children) {
            if (!first) out += "\n";
            first = false;
            if (c.kind == NodeKind::SpecDecl) out += spec(c);
            else out += function(c);
        }
        return out;
    }

    std::string spec(const Node& s) {
        std::string out = "spec " + s.sval + "(";
        for (std::int64_t i = 0; i < s.ival; ++i) {
            if (i) out += ", ";
            out += type(s.children[static_cast<size_t>(i)]);
        }
        out += ") -> " + type(s.children.back()) + ".\n";
        return out;
    }

    std::string type(const Node& t) {
        switch (t.kind) {
            case NodeKind::TyInteger: return "integer()";
            case NodeKind::TyPosInteger: return "pos_integer()";
            case NodeKind::TyAtom: return "atom()";
            case NodeKind::TyAny: return "any()";
            case NodeKind::TyIntLit: return std::to_string(t.ival);
            case NodeKind::TyAtomLit: return t.sval;
            case NodeKind::TyTuple: {
                std::string out = "{";
                for (size_t i = 0; i < t.children.size(); ++i) {
                    if (i) out += ", ";
                    out += type(t.children[i]);
                }
                return out + "}";
            }
            case NodeKind::TyList: {
                std::string out = "list(" + type(t.children[0]);
                if (t.ival >= 0) out += ", " + std::to_string(t.ival);
                return out + ")";
            }
            case NodeKind::TyUnion: {
                std::string out;
                for (size_t i = 0; i < t.children.size(); ++i) {
                    if (i) out += " | ";
                    out += type(t.children[i]);
                }
                return out;
            }
            default: return "?type";
        }
    }

    std::string function(const Node& f) {
        std::string out;
        for (size_t i = 0; i < f.children.size(); ++i) {
            if (i) out += ";\n";
            out += clause_head(f.children[i], f.sval);
            out += clause_tail(f.children[i], 1);
        }
        return out + ".\n";
    }

    std::string expr(const Node& n, int min_prec = 1, int depth = 0) {
        int p = prec_of(n);
        std::string s = bare_expr(n, depth);
        if (p < min_prec) return "(" + s + ")";
        return s;
    }

private:
    std::string indent(int depth) { return std::string(static_cast<size_t>(depth) * 4, ' '); }

    std::string clause_head(const Node& cl, const std::string& name) {
        std::string out = name + "(";
        for (int i = 0; i < cl.npatterns; ++i) {
            if (i) out += ", ";
            out += expr(cl.children[static_cast<size_t>(i)]);
        }
        return out + ")";
    }

    // Prints "when g -> body" with the body one level deeper. body_pos() is a
    // 1-based child position, like every path step.
    std::string clause_tail(const Node& cl, int depth) {
        std::string out;
        if (cl.has_guard) out += " when " + expr(*cl.guard());
        out += " ->\n";
        size_t b0 = static_cast<size_t>(cl.body_pos() - 1);
        for (size_t i = b0; i < cl.children.size(); ++i) {
            if (i != b0) out += ",\n";
            out += indent(depth) + expr(cl.children[i], 1, depth);
        }
        return out;
    }

    std::string seq_inline(const Node* begin, const Node* end, int depth) {
        std::string out;
        for (const Node* it = begin; it != end; ++it) {
            if (it != begin) out += ", ";
            out += expr(*it, 1, depth);
        }
        return out;
    }

    std::string bare_expr(const Node& n, int depth) {
        switch (n.kind) {
            case NodeKind::IntLit: return std::to_string(n.ival);
            case NodeKind::AtomLit: return n.sval;
            case NodeKind::Var: return n.sval;
            case NodeKind::Wildcard: return "_";
            case NodeKind::Nil: return "[]";
            case NodeKind::Tuple: {
                std::string out = "{";
                for (size_t i = 0; i < n.children.size(); ++i) {
                    if (i) out += ", ";
                    out += expr(n.children[i], 1, depth);
                }
                return out + "}";
            }
            case NodeKind::Cons: {
                // Collect the spine so [1, 2, 3] and [1, 2 | T] print flat.
                std::string out = "[";
                const Node* cur = &n;
                bool first = true;
                while (cur->kind == NodeKind::Cons) {
                    if (!first) out += ", ";
                    first = false;
                    out += expr(cur->children[0], 1, depth);
                    cur = &cur->children[1];
                }
                if (cur->kind != NodeKind::Nil) out += " | " + expr(*cur, 1, depth);
                return out + "]";
            }
            case NodeKind::Match:
                return expr(n.children[0], 2, depth) + " = " + expr(n.children[1], 1, depth);
            case NodeKind::BinOp: {
                int p = prec_of(n);
                return expr(n.children[0], p, depth) + " " + op_text(n.op) + " " +
                       expr(n.children[1], p + 1, depth);
            }
            case NodeKind::Call: {
                std::string out = expr(n.children[0], 7, depth) + "(";
                for (size_t i = 1; i < n.children.size(); ++i) {
                    if (i > 1) out += ", ";
                    out += expr(n.children[i], 1, depth);
                }
                return out + ")";
            }
            case NodeKind::Seq:
                return "begin " + seq_inline(n.children.data(),
                                             n.children.data() + n.children.size(), depth) +
                       " end";
            case NodeKind::TraceEmit: return "@trace(" + expr(n.children[0], 1, depth) + ")";
            case NodeKind::Case: {
                std::string out = "case " + expr(n.children[0], 1, depth) + " of\n";
                for (size_t i = 1; i < n.children.size(); ++i) {
                    if (i > 1) out += ";\n";
                    const Node& cl = n.children[i];
                    out += indent(depth + 1) + expr(cl.children[0], 1, depth + 1);
                    out += clause_tail(cl, depth + 2);
                }
                return out + " end";
            }
            case NodeKind::If: {
                std::string out = "if\n";
                for (size_t i = 0; i < n.children.size(); ++i) {
                    if (i) out += ";\n";
                    const Node& cl = n.children[i];
                    out += indent(depth + 1) + expr(*cl.guard(), 1, depth + 1);
                    out += " ->\n";
                    size_t b0 = static_cast<size_t>(cl.body_pos() - 1);
                    for (size_t b = b0; b < cl.children.size(); ++b) {
                        if (b != b0) out += ",\n";
                        out += indent(depth + 2) + expr(cl.children[b], 1, depth + 2);
                    }
                }
                return out + " end";
            }
            case NodeKind::Lambda: {
                std::string out = "fun";
                for (size_t i = 0; i < n.children.size(); ++i) {
                    if (i) out += "; ";
                    const Node& cl = n.children[i];
                    out += "(";
                    for (int p = 0; p < cl.npatterns; ++p) {
                        if (p) out += ", ";
                        out += expr(cl.children[static_cast<size_t>(p)], 1, depth);
                    }
                    out += ")";
                    if (cl.has_guard) out += " when " + expr(*cl.guard(), 1, depth);
                    out += " -> ";
                    out += seq_inline(cl.children.data() + (cl.body_pos() - 1),
                                      cl.children.data() + cl.children.size(), depth);
                }
                return out + " end";
            }
            case NodeKind::ListComp: {
                std::string out = "[" + expr(n.children[0], 1, depth) + " || ";
                for (size_t i = 1; i < n.children.size(); ++i) {
                    if (i > 1) out += ", ";
                    out += expr(n.children[i], 1, depth);
                }
                return out + "]";
            }
            case NodeKind::Generator:
                return expr(n.children[0], 1, depth) + " <- " + expr(n.children[1], 1, depth);
            default: return "?expr";
        }
    }
};

}  // namespace detail

inline std::string pretty(const Node& module_or_expr) {
    detail::Printer p;
    if (module_or_expr.kind == NodeKind::Module) return p.module(module_or_expr);
    if (module_or_expr.kind == NodeKind::SpecDecl) return p.spec(module_or_expr);
    if (module_or_expr.kind == NodeKind::Function) return p.function(module_or_expr);
    if (module_or_expr.kind >= NodeKind::TyInteger) return p.type(module_or_expr);
    return p.expr(module_or_expr);
}

}  // namespace evocheck::lang
