#pragma once

// Feather abstract syntax.
//
// Every construct in a module — the module itself, spec declarations, type
// expressions, functions, clauses, patterns and expressions — is one uniform
// Node with value semantics. A uniform tree keeps path-based navigation and
// surgery (node_at / replace_at) a single mechanism instead of per-category
// boilerplate, which the instrumentation passes lean on heavily.
//
// Child order always follows source text order. 1-based child indices are the
// public addressing convention (AstPath).

#include <cassert>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "evocheck/errors.hpp"

namespace evocheck::lang {

enum class NodeKind {
    Module,    // sval = module name, ival = number of leading spec children
    SpecDecl,  // sval = function name, ival = arity; children = arg types + return type
    Function,  // sval = name, ival = arity; children = clauses
    Clause,    // children = patterns, optional guard, body exprs (see npatterns/has_guard)

    // Patterns and expressions share kinds where the grammar overlaps.
    IntLit,    // ival
    AtomLit,   // sval
    Var,       // sval
    Wildcard,  // pattern-only
    Tuple,     // children = elements
    Nil,
    Cons,      // children = [head, tail]
    Match,     // children = [pattern, expr]
    Case,      // children = [scrutinee, clauses...]; dispatch_error on no match
    If,        // children = clauses (guard-only)
    ListComp,  // children = [template, qualifiers...]
    Generator, // children = [pattern, source expr]; only under ListComp
    Call,      // children = [callee, args...]; callee is AtomLit or Var
    Lambda,    // children = clauses
    BinOp,     // op; children = [lhs, rhs]
    Seq,       // begin ... end; children = exprs
    TraceEmit, // children = [expr]; never produced by the surface parser

    // Spec type expressions.
    TyInteger,
    TyPosInteger,
    TyAtom,
    TyAny,
    TyIntLit,   // ival
    TyAtomLit,  // sval
    TyTuple,    // children = element types
    TyList,     // children = [element type]; ival = fixed length or -1
    TyUnion,    // children = alternatives
};

enum class BinOpKind {
    Add, Sub, Mul, DivSlash, Div, Rem,
    Eq, Ne, ExactEq, ExactNe, Lt, Gt, Le, Ge,
    And, Or, AndAlso, OrElse,
};

// Error raised when a Case dispatches no clause. Instrumentation rewrites
// function-clause dispatch into case expressions; the payload keeps the
// original construct's error kind observable.
enum class DispatchError { CaseClause, FunctionClause };

struct Span {
    int line = 0;  // 0 = synthetic node
    int col = 0;
};

struct Node {
    NodeKind kind = NodeKind::Nil;
    Span span;
    std::int64_t ival = 0;
    std::string sval;
    BinOpKind op = BinOpKind::Add;
    int npatterns = 0;      // Clause: leading children that are patterns
    bool has_guard = false; // Clause: a guard child follows the patterns
    DispatchError dispatch_error = DispatchError::CaseClause;
    std::vector<Node> children;

    // Binding annotation, filled by annotate_bindings. bound_before holds the
    // names visible when evaluation reaches this node; bound_here the names
    // this node's subtree newly binds. Sorted, duplicate-free.
    std::vector<std::string> bound_before;
    std::vector<std::string> bound_here;

    // Clause layout helpers (1-based child positions).
    int guard_pos() const { return has_guard ? npatterns + 1 : 0; }
    int body_pos() const { return npatterns + (has_guard ? 1 : 0) + 1; }
    const Node* guard() const {
        return has_guard ? &children[static_cast<size_t>(npatterns)] : nullptr;
    }
};

// --- Construction helpers -------------------------------------------------

inline Node mk(NodeKind kind, std::vector<Node> children = {}) {
    Node n;
    n.kind = kind;
    n.children = std::move(children);
    return n;
}

inline Node mk_int(std::int64_t v) {
    Node n = mk(NodeKind::IntLit);
    n.ival = v;
    return n;
}

inline Node mk_atom(std::string name) {
    Node n = mk(NodeKind::AtomLit);
    n.sval = std::move(name);
    return n;
}

inline Node mk_var(std::string name) {
    Node n = mk(NodeKind::Var);
    n.sval = std::move(name);
    return n;
}

inline Node mk_tuple(std::vector<Node> elems) { return mk(NodeKind::Tuple, std::move(elems)); }
inline Node mk_nil() { return mk(NodeKind::Nil); }
inline Node mk_cons(Node head, Node tail) {
    return mk(NodeKind::Cons, {std::move(head), std::move(tail)});
}
inline Node mk_match(Node pattern, Node expr) {
    return mk(NodeKind::Match, {std::move(pattern), std::move(expr)});
}
inline Node mk_seq(std::vector<Node> exprs) { return mk(NodeKind::Seq, std::move(exprs)); }
inline Node mk_trace(Node expr) {
    std::vector<Node> c;
    c.push_back(std::move(expr));
    return mk(NodeKind::TraceEmit, std::move(c));
}
inline Node mk_call(Node callee, std::vector<Node> args) {
    std::vector<Node> c;
    c.push_back(std::move(callee));
    for (auto& a : args) c.push_back(std::move(a));
    return mk(NodeKind::Call, std::move(c));
}

inline Node mk_clause(std::vector<Node> patterns, std::vector<Node> guard_opt,
                      std::vector<Node> body) {
    assert(guard_opt.size() <= 1);
    Node n = mk(NodeKind::Clause);
    n.npatterns = static_cast<int>(patterns.size());
    n.has_guard = !guard_opt.empty();
    for (auto& p : patterns) n.children.push_back(std::move(p));
    for (auto& g : guard_opt) n.children.push_back(std::move(g));
    for (auto& b : body) n.children.push_back(std::move(b));
    return n;
}

inline Node mk_case(Node scrutinee, std::vector<Node> clauses,
                    DispatchError err = DispatchError::CaseClause) {
    Node n = mk(NodeKind::Case);
    n.dispatch_error = err;
    n.children.push_back(std::move(scrutinee));
    for (auto& c : clauses) n.children.push_back(std::move(c));
    return n;
}

// --- Structure predicates ---------------------------------------------------

// True if the subtree is valid in pattern position: only literals, variables,
// wildcards, tuples and proper cons/nil structure. Patterns never contain
// expressions, which is what makes pattern paths safe to loosen.
inline bool is_pattern(const Node& n) {
    switch (n.kind) {
        case NodeKind::IntLit:
        case NodeKind::AtomLit:
        case NodeKind::Var:
        case NodeKind::Wildcard:
        case NodeKind::Nil:
            return true;
        case NodeKind::Tuple:
        case NodeKind::Cons:
            for (const Node& c : n.children)
                if (!is_pattern(c)) return false;
            return true;
        default:
            return false;
    }
}

inline bool is_clause_bearing(NodeKind k) {
    return k == NodeKind::Case || k == NodeKind::If || k == NodeKind::Lambda ||
           k == NodeKind::Function;
}

// --- Paths ------------------------------------------------------------------

// A location in the tree: 1-based child indices from the module root.
struct AstPath {
    std::vector<int> steps;

    bool operator==(const AstPath&) const = default;
};

inline const Node& child_at(const Node& n, int index1) {
    if (index1 < 1 || static_cast<size_t>(index1) > n.children.size())
        throw InvalidPath("child index " + std::to_string(index1) + " out of range");
    return n.children[static_cast<size_t>(index1 - 1)];
}

inline const Node& node_at(const Node& root, const AstPath& path) {
    const Node* n = &root;
    for (int step : path.steps) n = &child_at(*n, step);
    return *n;
}

// Returns a copy of root with the node addressed by path replaced.
inline Node replace_at(const Node& root, const AstPath& path, Node replacement) {
    if (path.steps.empty()) return replacement;
    Node out = root;
    Node* n = &out;
    for (size_t i = 0; i + 1 < path.steps.size(); ++i) {
        int step = path.steps[i];
        if (step < 1 || static_cast<size_t>(step) > n->children.size())
            throw InvalidPath("child index " + std::to_string(step) + " out of range");
        n = &n->children[static_cast<size_t>(step - 1)];
    }
    int last = path.steps.back();
    if (last < 1 || static_cast<size_t>(last) > n->children.size())
        throw InvalidPath("child index " + std::to_string(last) + " out of range");
    n->children[static_cast<size_t>(last - 1)] = std::move(replacement);
    return out;
}

// Structural equality. Spans and binding annotations are ignored; they are
// derived data, not structure.
inline bool ast_equal(const Node& a, const Node& b) {
    if (a.kind != b.kind || a.ival != b.ival || a.sval != b.sval) return false;
    if (a.kind == NodeKind::BinOp && a.op != b.op) return false;
    if (a.kind == NodeKind::Clause &&
        (a.npatterns != b.npatterns || a.has_guard != b.has_guard))
        return false;
    if (a.kind == NodeKind::Case && a.dispatch_error != b.dispatch_error) return false;
    if (a.children.size() != b.children.size()) return false;
    for (size_t i = 0; i < a.children.size(); ++i)
        if (!ast_equal(a.children[i], b.children[i])) return false;
    return true;
}

// Module accessors.
inline const Node* find_function(const Node& module, const std::string& name, int arity) {
    for (size_t i = static_cast<size_t>(module.ival); i < module.children.size(); ++i) {
        const Node& f = module.children[i];
        if (f.kind == NodeKind::Function && f.sval == name && f.ival == arity) return &f;
    }
    return nullptr;
}

inline const Node* find_spec(const Node& module, const std::string& name, int arity) {
    for (size_t i = 0; i < static_cast<size_t>(module.ival); ++i) {
        const Node& s = module.children[i];
        if (s.kind == NodeKind::SpecDecl && s.sval == name && s.ival == arity) return &s;
    }
    return nullptr;
}

}  // namespace evocheck::lang
