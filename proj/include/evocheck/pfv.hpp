#pragma once

// Pattern freshening. The instrumenter rewrites a pattern p with a point of
// interest inside it into a fresh pattern np that:
//   - matches a superset of the values p matches (positions after the POI are
//     relaxed to fresh variables),
//   - matches exactly like p on everything up to and including the POI
//     (literals kept, repeated variables linked, already-bound variables kept
//     as equality constraints),
//   - contains no wildcards, so np doubles as an expression that rebuilds the
//     matched value.
//
// Three operations share one rename map and one fresh-name counter:
//   cv   exact copy under renaming: same match set as the original.
//   fv   relaxation: each subpattern collapses to one fresh variable.
//   pfv  the combination along a path: cv before the POI, the POI becomes
//        npoi, fv after it.
//
// The map must be threaded through every pattern of one rewrite; a variable
// repeated across sibling patterns then maps to the same fresh name, which is
// what preserves its equality constraint.
//
// Fresh names use a prefix the surface parser rejects, so they cannot collide
// with program variables, and cv treats them as immutable so rewriting is
// idempotent. Requires annotations (see annotate.hpp) on the input patterns.

#include <map>
#include <string>

#include "evocheck/annotate.hpp"
#include "evocheck/ast.hpp"
#include "evocheck/errors.hpp"

namespace evocheck::inst {

using lang::AstPath;
using lang::Node;
using lang::NodeKind;

struct FreshNamer {
    int counter = 0;
    std::string next() { return "_FV@" + std::to_string(++counter); }
    static bool is_fresh(const std::string& name) {
        return name.rfind("_FV@", 0) == 0;
    }
};

using RenameMap = std::map<std::string, std::string>;

namespace detail {

inline Node strip_span(Node n) {
    n.span = {};
    for (Node& c : n.children) c = strip_span(std::move(c));
    return n;
}

}  // namespace detail

// Copy of pattern p that matches exactly the same values: literals kept,
// new variables renamed fresh (consistently via map), bound variables kept as
// equality constraints, wildcards turned into independent fresh variables.
inline Node cv(const Node& p, RenameMap& map, FreshNamer& nm) {
    switch (p.kind) {
        case NodeKind::Var: {
            if (FreshNamer::is_fresh(p.sval)) return lang::mk_var(p.sval);
            if (auto it = map.find(p.sval); it != map.end()) return lang::mk_var(it->second);
            if (lang::is_bound_var(p)) return lang::mk_var(p.sval);
            std::string fresh = nm.next();
            map.emplace(p.sval, fresh);
            return lang::mk_var(fresh);
        }
        case NodeKind::Wildcard:
            // Independent binder; deliberately absent from the map.
            return lang::mk_var(nm.next());
        case NodeKind::IntLit:
        case NodeKind::AtomLit:
        case NodeKind::Nil:
            return detail::strip_span(p);
        case NodeKind::Tuple:
        case NodeKind::Cons: {
            Node out = p;
            out.span = {};
            for (size_t i = 0; i < out.children.size(); ++i)
                out.children[i] = cv(p.children[i], map, nm);
            return out;
        }
        default:
            throw Error("internal: cv over a non-pattern node");
    }
}

// Copy of parent where every child at position >= from_pos (1-based) is
// relaxed to a single fresh variable; earlier children are copied unchanged.
inline Node fv_from(int from_pos, const Node& parent, FreshNamer& nm) {
    Node out = parent;
    out.span = {};
    for (size_t i = 0; i < out.children.size(); ++i) {
        if (static_cast<int>(i) + 1 >= from_pos) out.children[i] = lang::mk_var(nm.next());
        else out.children[i] = detail::strip_span(parent.children[i]);
    }
    return out;
}

namespace detail {

inline Node pfv_walk(const Node& p, const std::vector<int>& steps, size_t idx, RenameMap& map,
                     FreshNamer& nm, const std::string& npoi) {
    if (idx == steps.size()) {
        if (p.kind != NodeKind::Var)
            throw UnsupportedPoiPosition("point of interest is not a variable");
        return lang::mk_var(npoi);
    }
    if (p.kind != NodeKind::Tuple && p.kind != NodeKind::Cons)
        throw UnsupportedPoiPosition("pattern path does not descend a constructor");
    int k = steps[idx];
    if (k < 1 || k > static_cast<int>(p.children.size()))
        throw InvalidPath("pattern path step out of range");
    Node out = p;
    out.span = {};
    for (size_t i = 0; i < out.children.size(); ++i) {
        int j = static_cast<int>(i) + 1;
        if (j < k) out.children[i] = cv(p.children[i], map, nm);
        else if (j == k) out.children[i] = pfv_walk(p.children[i], steps, idx + 1, map, nm, npoi);
        else out.children[i] = lang::mk_var(nm.next());
    }
    return out;
}

}  // namespace detail

// Fresh pattern along the POI path. inner is relative to p; empty means p is
// the POI itself. npoi_out receives the fresh name standing for the POI; it
// is always the first name this call allocates.
inline Node pfv(const Node& p, const AstPath& inner, RenameMap& map, FreshNamer& nm,
                std::string& npoi_out) {
    npoi_out = nm.next();
    return detail::pfv_walk(p, inner.steps, 0, map, nm, npoi_out);
}

// The fresh name a renamed pattern gives to var, or var itself when it was
// kept (bound variables and names outside the rewrite).
inline std::string renamed(const RenameMap& map, const std::string& var) {
    if (auto it = map.find(var); it != map.end()) return it->second;
    return var;
}

}  // namespace evocheck::inst
