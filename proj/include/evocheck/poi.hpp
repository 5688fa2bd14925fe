#pragma once

// Points of interest. A POI names a variable occurrence in a program:
// (line, variable name, occurrence index). locate_poi turns that into an AST
// path; split_path classifies where the path lands so the instrumenter knows
// which rewrite applies.

#include <string>

#include "evocheck/ast.hpp"
#include "evocheck/errors.hpp"

namespace evocheck::inst {

using lang::AstPath;
using lang::Node;
using lang::NodeKind;

struct Poi {
    std::string file;  // of the version this POI refers to
    int line = 0;
    std::string var;
    int occurrence = 1;

    std::string label() const {
        return "(" + std::to_string(line) + "," + var + "," + std::to_string(occurrence) + ")";
    }
};

namespace detail {

inline bool find_var(const Node& n, int line, const std::string& var, int& remaining,
                     AstPath& path) {
    if (n.kind == NodeKind::Var && n.span.line == line && n.sval == var) {
        if (--remaining == 0) return true;
    }
    for (size_t i = 0; i < n.children.size(); ++i) {
        path.steps.push_back(static_cast<int>(i) + 1);
        if (find_var(n.children[i], line, var, remaining, path)) return true;
        path.steps.pop_back();
    }
    return false;
}

}  // namespace detail

// Children are stored in source order, so depth-first order is textual order;
// the n-th occurrence on a line is the n-th Var node found. Wildcards never
// count.
inline AstPath locate_poi(const Node& module, const Poi& poi) {
    AstPath path;
    int remaining = poi.occurrence;
    if (poi.occurrence >= 1 &&
        detail::find_var(module, poi.line, poi.var, remaining, path))
        return path;
    throw PoiNotFound("no occurrence " + std::to_string(poi.occurrence) + " of variable " +
                      poi.var + " on line " + std::to_string(poi.line));
}

enum class PoiSite {
    Expr,           // ordinary expression position
    MatchPattern,   // inside the left side of '='
    Generator,      // inside a comprehension generator pattern
    ClausePattern,  // inside a head pattern of a case/if/fun/function clause
    ClauseGuard,    // inside a clause guard
};

// Where the POI path enters its innermost pattern or guard region.
//  - anchor: path to the node the instrumenter rewrites (the POI itself for
//    Expr, the Match node, the ListComp, or the clause-bearing construct).
//  - member_index: child index of the generator within the ListComp, or of
//    the clause within its construct.
//  - pattern_index: 1-based head pattern position within the clause
//    (ClausePattern only).
//  - inner: steps from the pattern or guard root down to the POI; empty when
//    the POI is the whole pattern.
struct SplitPath {
    PoiSite site = PoiSite::Expr;
    AstPath anchor;
    int member_index = 0;
    int pattern_index = 0;
    AstPath inner;
};

// Finds the deepest region entry along the path. Patterns contain only
// patterns and guards cannot contain pattern-bearing constructs, so the last
// entry found is the region holding the POI.
inline SplitPath split_path(const Node& root, const AstPath& path) {
    SplitPath best;
    bool found = false;
    const Node* u = &root;
    for (size_t i = 0; i < path.steps.size(); ++i) {
        int step = path.steps[i];
        auto take_rest = [&](size_t from) {
            AstPath rest;
            rest.steps.assign(path.steps.begin() + static_cast<std::ptrdiff_t>(from),
                              path.steps.end());
            return rest;
        };
        auto prefix = [&](size_t count) {
            AstPath p;
            p.steps.assign(path.steps.begin(),
                           path.steps.begin() + static_cast<std::ptrdiff_t>(count));
            return p;
        };
        if (u->kind == NodeKind::Match && step == 1) {
            best = SplitPath{PoiSite::MatchPattern, prefix(i), 0, 0, take_rest(i + 1)};
            found = true;
        } else if (u->kind == NodeKind::ListComp && i + 1 < path.steps.size()) {
            const Node& q = lang::child_at(*u, step);
            if (q.kind == NodeKind::Generator && path.steps[i + 1] == 1) {
                best = SplitPath{PoiSite::Generator, prefix(i), step, 0, take_rest(i + 2)};
                found = true;
            }
        } else if (lang::is_clause_bearing(u->kind) && i + 1 < path.steps.size()) {
            const Node& cl = lang::child_at(*u, step);
            if (cl.kind == NodeKind::Clause) {
                int inside = path.steps[i + 1];
                if (inside <= cl.npatterns) {
                    best = SplitPath{PoiSite::ClausePattern, prefix(i), step, inside,
                                     take_rest(i + 2)};
                    found = true;
                } else if (cl.has_guard && inside == cl.guard_pos()) {
                    best = SplitPath{PoiSite::ClauseGuard, prefix(i), step, 0,
                                     take_rest(i + 2)};
                    found = true;
                }
            }
        }
        u = &lang::child_at(*u, step);
    }
    if (!found) {
        best.site = PoiSite::Expr;
        best.anchor = path;
    }
    return best;
}

}  // namespace evocheck::inst
