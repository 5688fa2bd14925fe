#pragma once

// Static binding analysis. Walks a module mirroring the evaluator's scoping
// exactly and does two jobs:
//
//  1. Writes bound_before on every node in pattern position: the names
//     already in scope when the enclosing construct starts matching. A
//     pattern variable that appears in its own bound_before is an equality
//     constraint, not a binder; the instrumenter keeps such variables intact
//     when it freshens patterns.
//     Clause nodes and pattern roots also get bound_here: the names their
//     patterns introduce.
//
//  2. Rejects programs that could evaluate an unbound variable, including
//     uses whose binding sits on the conditionally evaluated side of a
//     short-circuit operator.
//
// Scope rules (same as the evaluator): bindings thread left to right through
// clause bodies, argument lists and tuple/list element lists; begin blocks
// export; case, if, fun bodies and comprehensions are local.

#include <set>
#include <string>
#include <vector>

#include "evocheck/ast.hpp"
#include "evocheck/errors.hpp"

namespace evocheck::lang {

namespace detail {

using Scope = std::set<std::string>;

class Annotator {
public:
    void module(Node& m) {
        for (Node& c : m.children)
            if (c.kind == NodeKind::Function)
                for (Node& cl : c.children) clause(cl, Scope{});
    }

private:
    static std::vector<std::string> to_vec(const Scope& s) {
        return std::vector<std::string>(s.begin(), s.end());
    }

    void clause(Node& cl, const Scope& outer) {
        Scope introduced;
        for (int i = 0; i < cl.npatterns; ++i)
            pattern(cl.children[static_cast<size_t>(i)], outer, introduced);
        cl.bound_before = to_vec(outer);
        cl.bound_here = to_vec(introduced);
        Scope body = outer;
        body.insert(introduced.begin(), introduced.end());
        if (cl.has_guard) expr(cl.children[static_cast<size_t>(cl.guard_pos() - 1)], body);
        for (size_t i = static_cast<size_t>(cl.body_pos() - 1); i < cl.children.size(); ++i)
            body = expr(cl.children[i], std::move(body));
    }

    void pattern(Node& p, const Scope& outer, Scope& introduced) {
        p.bound_before = to_vec(outer);
        switch (p.kind) {
            case NodeKind::Var:
                if (!outer.count(p.sval)) introduced.insert(p.sval);
                return;
            case NodeKind::Wildcard:
            case NodeKind::IntLit:
            case NodeKind::AtomLit:
            case NodeKind::Nil:
                return;
            case NodeKind::Tuple:
            case NodeKind::Cons:
                for (Node& c : p.children) pattern(c, outer, introduced);
                return;
            default:
                throw Error("internal: non-pattern node in pattern position");
        }
    }

    // Returns the scope after the expression; only match, begin and element
    // lists extend it.
    Scope expr(Node& e, Scope s) {
        switch (e.kind) {
            case NodeKind::IntLit:
            case NodeKind::AtomLit:
            case NodeKind::Nil:
                return s;
            case NodeKind::Var:
                if (!s.count(e.sval))
                    throw UnboundVariable(e.sval, e.span.line, e.span.col);
                return s;
            case NodeKind::Wildcard:
                throw Error("internal: wildcard in expression position");
            case NodeKind::Tuple:
            case NodeKind::Cons:
            case NodeKind::Seq:
            case NodeKind::TraceEmit:
                for (Node& c : e.children) s = expr(c, std::move(s));
                return s;
            case NodeKind::Match: {
                // Right side evaluates first; its bindings are visible to the
                // pattern's equality constraints.
                s = expr(e.children[1], std::move(s));
                Scope introduced;
                pattern(e.children[0], s, introduced);
                e.children[0].bound_here = to_vec(introduced);
                s.insert(introduced.begin(), introduced.end());
                return s;
            }
            case NodeKind::BinOp: {
                s = expr(e.children[0], std::move(s));
                if (e.op == BinOpKind::AndAlso || e.op == BinOpKind::OrElse) {
                    // The right side may never run; check it, export nothing.
                    expr(e.children[1], s);
                    return s;
                }
                return expr(e.children[1], std::move(s));
            }
            case NodeKind::Call:
                for (Node& c : e.children) s = expr(c, std::move(s));
                return s;
            case NodeKind::Case: {
                s = expr(e.children[0], std::move(s));
                for (size_t i = 1; i < e.children.size(); ++i) clause(e.children[i], s);
                return s;
            }
            case NodeKind::If:
                for (Node& cl : e.children) clause(cl, s);
                return s;
            case NodeKind::Lambda:
                for (Node& cl : e.children) clause(cl, s);
                return s;
            case NodeKind::ListComp: {
                Scope local = s;
                for (size_t i = 1; i < e.children.size(); ++i) {
                    Node& q = e.children[i];
                    if (q.kind == NodeKind::Generator) {
                        local = expr(q.children[1], std::move(local));
                        Scope introduced;
                        pattern(q.children[0], local, introduced);
                        q.children[0].bound_here = to_vec(introduced);
                        local.insert(introduced.begin(), introduced.end());
                    } else {
                        local = expr(q, std::move(local));
                    }
                }
                expr(e.children[0], local);
                return s;
            }
            default:
                throw Error("internal: cannot annotate node kind");
        }
    }
};

}  // namespace detail

// Annotates in place and validates variable use. Call after parsing and after
// instrumentation; instrumented trees must stay closed.
inline void annotate(Node& module) {
    detail::Annotator a;
    a.module(module);
}

// True when the pattern variable is an equality constraint rather than a
// binder, per its annotation.
inline bool is_bound_var(const Node& var) {
    for (const auto& n : var.bound_before)
        if (n == var.sval) return true;
    return false;
}

}  // namespace evocheck::lang
