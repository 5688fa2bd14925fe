#pragma once

// POI instrumentation. Rewrites a module so that running it emits one trace
// value each time the point of interest is reached, while computing exactly
// what the original computes.
//
// One rewrite per site kind:
//
//  expression        e  ==>  begin F = e, @trace(F), F end
//
//  match pattern     p = e  ==>  p = begin np = e, @trace(npoi), np end
//    np is the freshened pattern (pfv); it matches whenever p's prefix up to
//    the POI matches, and as an expression it rebuilds the matched value, so
//    the outer match sees e's exact value.
//
//  generator         p <- e  ==>  np <- e, p <- begin @trace(npoi), [np] end
//    keeps comprehension skip semantics: elements that fail p are skipped
//    after tracing only if they matched np.
//
//  clause pattern    clause i of a case gets a freshened head and no guard;
//    its body traces npoi and re-dispatches the original clauses on the
//    rebuilt value in a nested case, so guards and later clauses behave
//    exactly as before. The nested case raises the construct's own dispatch
//    error kind. Function and fun clauses are first converted to a case over
//    the tupled parameters, then handled the same way.
//
//  clause guard      like clause pattern, but the head is copied exactly
//    (cv) and the trace reports the renamed guard variable. For if clauses
//    there is nothing to rename: the new clause is `true -> @trace(V), if
//    ... end`.
//
// The input must parse as a surface module; the output reuses the same node
// kinds plus TraceEmit and re-annotates cleanly.

#include <string>
#include <vector>

#include "evocheck/annotate.hpp"
#include "evocheck/ast.hpp"
#include "evocheck/errors.hpp"
#include "evocheck/pfv.hpp"
#include "evocheck/poi.hpp"

namespace evocheck::inst {

using lang::DispatchError;
using lang::mk_atom;
using lang::mk_case;
using lang::mk_clause;
using lang::mk_cons;
using lang::mk_match;
using lang::mk_nil;
using lang::mk_seq;
using lang::mk_trace;
using lang::mk_tuple;
using lang::mk_var;

namespace detail {

inline std::vector<Node> copy_children(const Node& n, size_t from) {
    return std::vector<Node>(n.children.begin() + static_cast<std::ptrdiff_t>(from),
                             n.children.end());
}

inline std::vector<Node> clause_body(const Node& cl) {
    return copy_children(cl, static_cast<size_t>(cl.body_pos() - 1));
}

inline std::vector<Node> clause_guard_opt(const Node& cl) {
    if (!cl.has_guard) return {};
    return {cl.children[static_cast<size_t>(cl.guard_pos() - 1)]};
}

// Rewrites clause member_index of case_node per the clause-pattern rule.
inline Node case_with_pattern_poi(const Node& case_node, int member_index,
                                  const AstPath& inner, FreshNamer& nm) {
    const Node& cl = lang::child_at(case_node, member_index);
    RenameMap map;
    std::string npoi;
    Node np = pfv(cl.children[0], inner, map, nm, npoi);
    Node redispatch = mk_case(np /* as expression */,
                              copy_children(case_node, 1), case_node.dispatch_error);
    Node new_clause = mk_clause({np}, {}, {mk_trace(mk_var(npoi)), std::move(redispatch)});
    Node out = case_node;
    out.children[static_cast<size_t>(member_index - 1)] = std::move(new_clause);
    return out;
}

// Rewrites clause member_index of case_node per the clause-guard rule.
inline Node case_with_guard_poi(const Node& case_node, int member_index,
                                const AstPath& inner, FreshNamer& nm) {
    const Node& cl = lang::child_at(case_node, member_index);
    const Node& poi_var = lang::node_at(*cl.guard(), inner);
    if (poi_var.kind != NodeKind::Var)
        throw UnsupportedPoiPosition("point of interest is not a variable");
    RenameMap map;
    Node np = cv(cl.children[0], map, nm);
    Node redispatch = mk_case(np, copy_children(case_node, 1), case_node.dispatch_error);
    Node new_clause = mk_clause({np}, {},
                                {mk_trace(mk_var(renamed(map, poi_var.sval))),
                                 std::move(redispatch)});
    Node out = case_node;
    out.children[static_cast<size_t>(member_index - 1)] = std::move(new_clause);
    return out;
}

// f(p1,..,pn) clauses as a case over the tupled parameters. params_out
// receives the fresh wrapper parameter names.
inline Node tupled_dispatch(const Node& owner, FreshNamer& nm,
                            std::vector<std::string>& params_out) {
    int arity = owner.children[0].npatterns;
    params_out.clear();
    for (int i = 0; i < arity; ++i) params_out.push_back(nm.next());
    std::vector<Node> scrutinee_elems;
    for (const std::string& p : params_out) scrutinee_elems.push_back(mk_var(p));
    std::vector<Node> clauses;
    for (const Node& cl : owner.children) {
        std::vector<Node> head(cl.children.begin(),
                               cl.children.begin() + cl.npatterns);
        clauses.push_back(mk_clause({mk_tuple(std::move(head))}, clause_guard_opt(cl),
                                    clause_body(cl)));
    }
    return mk_case(mk_tuple(std::move(scrutinee_elems)), std::move(clauses),
                   DispatchError::FunctionClause);
}

// Rebuilds a function or fun with its clause set replaced by one wrapper
// clause holding the instrumented tupled case.
inline Node wrap_tupled(const Node& owner, Node inst_case,
                        const std::vector<std::string>& params) {
    std::vector<Node> param_vars;
    for (const std::string& p : params) param_vars.push_back(mk_var(p));
    Node wrapper = mk_clause(std::move(param_vars), {}, {std::move(inst_case)});
    Node out = lang::mk(owner.kind, {std::move(wrapper)});
    out.sval = owner.sval;
    out.ival = owner.ival;
    return out;
}

}  // namespace detail

// Replaces every @trace(e) with plain e.
inline Node strip_trace_emits(Node n) {
    if (n.kind == NodeKind::TraceEmit) return strip_trace_emits(std::move(n.children[0]));
    for (Node& c : n.children) c = strip_trace_emits(std::move(c));
    return n;
}

inline Node instrument(Node module, const AstPath& poi_path) {
    lang::annotate(module);
    const Node& poi_node = lang::node_at(module, poi_path);
    if (poi_node.kind != NodeKind::Var)
        throw UnsupportedPoiPosition("point of interest is not a variable");
    SplitPath sp = split_path(module, poi_path);
    FreshNamer nm;
    Node replacement;
    switch (sp.site) {
        case PoiSite::Expr: {
            std::string f = nm.next();
            replacement = mk_seq({mk_match(mk_var(f), poi_node),
                                  mk_trace(mk_var(f)), mk_var(f)});
            break;
        }
        case PoiSite::MatchPattern: {
            const Node& m = lang::node_at(module, sp.anchor);
            RenameMap map;
            std::string npoi;
            Node np = pfv(m.children[0], sp.inner, map, nm, npoi);
            Node rhs = mk_seq({mk_match(np, m.children[1]), mk_trace(mk_var(npoi)), np});
            replacement = mk_match(m.children[0], std::move(rhs));
            break;
        }
        case PoiSite::Generator: {
            const Node& lc = lang::node_at(module, sp.anchor);
            const Node& gen = lang::child_at(lc, sp.member_index);
            RenameMap map;
            std::string npoi;
            Node np = pfv(gen.children[0], sp.inner, map, nm, npoi);
            Node fresh_gen = lang::mk(NodeKind::Generator, {np, gen.children[1]});
            Node rebind_src = mk_seq({mk_trace(mk_var(npoi)), mk_cons(np, mk_nil())});
            Node rebind = lang::mk(NodeKind::Generator,
                                   {gen.children[0], std::move(rebind_src)});
            Node out = lc;
            out.children[static_cast<size_t>(sp.member_index - 1)] = std::move(fresh_gen);
            out.children.insert(
                out.children.begin() + static_cast<std::ptrdiff_t>(sp.member_index),
                std::move(rebind));
            replacement = std::move(out);
            break;
        }
        case PoiSite::ClausePattern: {
            const Node& owner = lang::node_at(module, sp.anchor);
            if (owner.kind == NodeKind::Case) {
                replacement =
                    detail::case_with_pattern_poi(owner, sp.member_index, sp.inner, nm);
            } else {
                // function or fun: tuple the parameters first
                std::vector<std::string> params;
                Node tupled = detail::tupled_dispatch(owner, nm, params);
                AstPath inner;
                inner.steps.push_back(sp.pattern_index);
                inner.steps.insert(inner.steps.end(), sp.inner.steps.begin(),
                                   sp.inner.steps.end());
                Node inst_case = detail::case_with_pattern_poi(
                    tupled, sp.member_index + 1, inner, nm);
                replacement = detail::wrap_tupled(owner, std::move(inst_case), params);
            }
            break;
        }
        case PoiSite::ClauseGuard: {
            const Node& owner = lang::node_at(module, sp.anchor);
            if (owner.kind == NodeKind::If) {
                const Node& cl = lang::child_at(owner, sp.member_index);
                const Node& poi_var = lang::node_at(*cl.guard(), sp.inner);
                if (poi_var.kind != NodeKind::Var)
                    throw UnsupportedPoiPosition("point of interest is not a variable");
                Node redispatch = lang::mk(NodeKind::If, detail::copy_children(owner, 0));
                Node new_clause = mk_clause({}, {mk_atom("true")},
                                            {mk_trace(mk_var(poi_var.sval)),
                                             std::move(redispatch)});
                Node out = owner;
                out.children[static_cast<size_t>(sp.member_index - 1)] = std::move(new_clause);
                replacement = std::move(out);
            } else if (owner.kind == NodeKind::Case) {
                replacement = detail::case_with_guard_poi(owner, sp.member_index, sp.inner, nm);
            } else {
                std::vector<std::string> params;
                Node tupled = detail::tupled_dispatch(owner, nm, params);
                Node inst_case = detail::case_with_guard_poi(
                    tupled, sp.member_index + 1, sp.inner, nm);
                replacement = detail::wrap_tupled(owner, std::move(inst_case), params);
            }
            break;
        }
    }
    Node out = lang::replace_at(module, sp.anchor, std::move(replacement));
    lang::annotate(out);
    return out;
}

}  // namespace evocheck::inst
