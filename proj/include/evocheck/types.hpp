#pragma once

// Argument types for test generation. Combines three sources, narrowest
// wins: the function's spec, the shape of each clause's head patterns, and
// integer/atom facts harvested from the clause guard. A variable repeated
// across head positions gets the intersection of every position's type.
//
// The lattice is deliberately small: integers (full, positive, ranges,
// literal sets), atoms (full, literal sets), tuples, lists (uniform or
// per-position), unions and any. intersect() returns nullopt for the empty
// type; a clause whose argument type is empty is reported as uninhabited
// rather than failed.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "evocheck/ast.hpp"
#include "evocheck/errors.hpp"
#include "evocheck/value.hpp"

namespace evocheck::types {

using lang::BinOpKind;
using lang::Node;
using lang::NodeKind;

constexpr std::int64_t kNoLow = std::numeric_limits<std::int64_t>::min();
constexpr std::int64_t kNoHigh = std::numeric_limits<std::int64_t>::max();

enum class FKind {
    AnyInt,
    PosInt,
    IntRange,
    LiteralInts,
    AnyAtom,
    Atoms,
    TupleOf,
    ListOf,     // uniform element type, any length
    FixedList,  // one type per position
    Union,
    Any,
};

struct FType {
    FKind kind = FKind::Any;
    std::int64_t lo = kNoLow;   // IntRange
    std::int64_t hi = kNoHigh;  // IntRange
    std::vector<std::int64_t> ints;   // LiteralInts, sorted unique
    std::vector<std::string> atoms;   // Atoms, sorted unique
    std::vector<FType> elems;  // TupleOf/FixedList per position, ListOf one, Union alts

    bool operator==(const FType&) const = default;
};

inline FType t_any() { return {}; }
inline FType t_any_int() { FType t; t.kind = FKind::AnyInt; return t; }
inline FType t_pos_int() { FType t; t.kind = FKind::PosInt; return t; }
inline FType t_range(std::int64_t lo, std::int64_t hi) {
    FType t;
    t.kind = FKind::IntRange;
    t.lo = lo;
    t.hi = hi;
    return t;
}
inline FType t_ints(std::vector<std::int64_t> vs) {
    FType t;
    t.kind = FKind::LiteralInts;
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    t.ints = std::move(vs);
    return t;
}
inline FType t_any_atom() { FType t; t.kind = FKind::AnyAtom; return t; }
inline FType t_atoms(std::vector<std::string> as) {
    FType t;
    t.kind = FKind::Atoms;
    std::sort(as.begin(), as.end());
    as.erase(std::unique(as.begin(), as.end()), as.end());
    t.atoms = std::move(as);
    return t;
}
inline FType t_tuple(std::vector<FType> elems) {
    FType t;
    t.kind = FKind::TupleOf;
    t.elems = std::move(elems);
    return t;
}
inline FType t_list_of(FType elem) {
    FType t;
    t.kind = FKind::ListOf;
    t.elems.push_back(std::move(elem));
    return t;
}
inline FType t_fixed_list(std::vector<FType> elems) {
    FType t;
    t.kind = FKind::FixedList;
    t.elems = std::move(elems);
    return t;
}
inline FType t_union(std::vector<FType> alts) {
    if (alts.size() == 1) return std::move(alts[0]);
    FType t;
    t.kind = FKind::Union;
    t.elems = std::move(alts);
    return t;
}

inline bool is_int_kind(FKind k) {
    return k == FKind::AnyInt || k == FKind::PosInt || k == FKind::IntRange ||
           k == FKind::LiteralInts;
}
inline bool is_atom_kind(FKind k) { return k == FKind::AnyAtom || k == FKind::Atoms; }

// --- membership oracle ---

inline bool type_member(const interp::Value& v, const FType& t) {
    using interp::VKind;
    switch (t.kind) {
        case FKind::Any: return true;
        case FKind::AnyInt: return v.kind == VKind::Int;
        case FKind::PosInt: return v.kind == VKind::Int && v.i > 0;
        case FKind::IntRange: return v.kind == VKind::Int && v.i >= t.lo && v.i <= t.hi;
        case FKind::LiteralInts:
            return v.kind == VKind::Int &&
                   std::binary_search(t.ints.begin(), t.ints.end(), v.i);
        case FKind::AnyAtom: return v.kind == VKind::Atom;
        case FKind::Atoms:
            return v.kind == VKind::Atom &&
                   std::binary_search(t.atoms.begin(), t.atoms.end(), v.atom);
        case FKind::TupleOf: {
            if (v.kind != VKind::Tuple || v.items->size() != t.elems.size()) return false;
            for (size_t i = 0; i < t.elems.size(); ++i)
                if (!type_member((*v.items)[i], t.elems[i])) return false;
            return true;
        }
        case FKind::ListOf: {
            if (v.kind != VKind::List) return false;
            for (const auto& e : *v.items)
                if (!type_member(e, t.elems[0])) return false;
            return true;
        }
        case FKind::FixedList: {
            if (v.kind != VKind::List || v.items->size() != t.elems.size()) return false;
            for (size_t i = 0; i < t.elems.size(); ++i)
                if (!type_member((*v.items)[i], t.elems[i])) return false;
            return true;
        }
        case FKind::Union: {
            for (const auto& alt : t.elems)
                if (type_member(v, alt)) return true;
            return false;
        }
    }
    return false;
}

// --- intersection ---

inline std::optional<FType> intersect(const FType& a, const FType& b);

namespace detail {

inline std::optional<FType> intersect_ints(const FType& a, const FType& b) {
    // Normalize to (range, literals?) form: AnyInt/PosInt/IntRange give a
    // range, LiteralInts gives a finite set.
    auto range_of = [](const FType& t) -> std::pair<std::int64_t, std::int64_t> {
        switch (t.kind) {
            case FKind::AnyInt: return {kNoLow, kNoHigh};
            case FKind::PosInt: return {1, kNoHigh};
            case FKind::IntRange: return {t.lo, t.hi};
            default: return {kNoLow, kNoHigh};
        }
    };
    if (a.kind == FKind::LiteralInts || b.kind == FKind::LiteralInts) {
        const FType& lits = a.kind == FKind::LiteralInts ? a : b;
        const FType& other = a.kind == FKind::LiteralInts ? b : a;
        std::vector<std::int64_t> out;
        if (other.kind == FKind::LiteralInts) {
            std::set_intersection(lits.ints.begin(), lits.ints.end(), other.ints.begin(),
                                  other.ints.end(), std::back_inserter(out));
        } else {
            auto [lo, hi] = range_of(other);
            for (std::int64_t v : lits.ints)
                if (v >= lo && v <= hi) out.push_back(v);
        }
        if (out.empty()) return std::nullopt;
        return t_ints(std::move(out));
    }
    auto [alo, ahi] = range_of(a);
    auto [blo, bhi] = range_of(b);
    std::int64_t lo = std::max(alo, blo);
    std::int64_t hi = std::min(ahi, bhi);
    if (lo > hi) return std::nullopt;
    if (lo == kNoLow && hi == kNoHigh) return t_any_int();
    if (lo == 1 && hi == kNoHigh) return t_pos_int();
    return t_range(lo, hi);
}

}  // namespace detail

inline std::optional<FType> intersect(const FType& a, const FType& b) {
    if (a.kind == FKind::Any) return b;
    if (b.kind == FKind::Any) return a;
    if (a.kind == FKind::Union) {
        std::vector<FType> alts;
        for (const FType& alt : a.elems)
            if (auto r = intersect(alt, b)) alts.push_back(std::move(*r));
        if (alts.empty()) return std::nullopt;
        return t_union(std::move(alts));
    }
    if (b.kind == FKind::Union) return intersect(b, a);
    if (is_int_kind(a.kind) && is_int_kind(b.kind)) return detail::intersect_ints(a, b);
    if (is_atom_kind(a.kind) && is_atom_kind(b.kind)) {
        if (a.kind == FKind::AnyAtom) return b;
        if (b.kind == FKind::AnyAtom) return a;
        std::vector<std::string> out;
        std::set_intersection(a.atoms.begin(), a.atoms.end(), b.atoms.begin(), b.atoms.end(),
                              std::back_inserter(out));
        if (out.empty()) return std::nullopt;
        return t_atoms(std::move(out));
    }
    if (a.kind == FKind::TupleOf && b.kind == FKind::TupleOf) {
        if (a.elems.size() != b.elems.size()) return std::nullopt;
        std::vector<FType> elems;
        for (size_t i = 0; i < a.elems.size(); ++i) {
            auto e = intersect(a.elems[i], b.elems[i]);
            if (!e) return std::nullopt;
            elems.push_back(std::move(*e));
        }
        return t_tuple(std::move(elems));
    }
    if (a.kind == FKind::ListOf && b.kind == FKind::ListOf) {
        auto e = intersect(a.elems[0], b.elems[0]);
        // No common element type still admits the empty list.
        if (!e) return t_fixed_list({});
        return t_list_of(std::move(*e));
    }
    if ((a.kind == FKind::ListOf && b.kind == FKind::FixedList) ||
        (a.kind == FKind::FixedList && b.kind == FKind::ListOf)) {
        const FType& fixed = a.kind == FKind::FixedList ? a : b;
        const FType& uniform = a.kind == FKind::FixedList ? b : a;
        std::vector<FType> elems;
        for (const FType& fe : fixed.elems) {
            auto e = intersect(fe, uniform.elems[0]);
            if (!e) return std::nullopt;
            elems.push_back(std::move(*e));
        }
        return t_fixed_list(std::move(elems));
    }
    if (a.kind == FKind::FixedList && b.kind == FKind::FixedList) {
        if (a.elems.size() != b.elems.size()) return std::nullopt;
        std::vector<FType> elems;
        for (size_t i = 0; i < a.elems.size(); ++i) {
            auto e = intersect(a.elems[i], b.elems[i]);
            if (!e) return std::nullopt;
            elems.push_back(std::move(*e));
        }
        return t_fixed_list(std::move(elems));
    }
    return std::nullopt;
}

// --- rendering (diagnostics and --dump-types) ---

inline std::string to_string(const FType& t) {
    auto join = [](const std::vector<FType>& ts, const char* sep) {
        std::string out;
        for (size_t i = 0; i < ts.size(); ++i) {
            if (i) out += sep;
            out += to_string(ts[i]);
        }
        return out;
    };
    switch (t.kind) {
        case FKind::Any: return "any()";
        case FKind::AnyInt: return "integer()";
        case FKind::PosInt: return "pos_integer()";
        case FKind::IntRange: {
            std::string lo = t.lo == kNoLow ? "" : std::to_string(t.lo);
            std::string hi = t.hi == kNoHigh ? "" : std::to_string(t.hi);
            return "int(" + lo + ".." + hi + ")";
        }
        case FKind::LiteralInts: {
            std::string out;
            for (size_t i = 0; i < t.ints.size(); ++i) {
                if (i) out += " | ";
                out += std::to_string(t.ints[i]);
            }
            return out;
        }
        case FKind::AnyAtom: return "atom()";
        case FKind::Atoms: {
            std::string out;
            for (size_t i = 0; i < t.atoms.size(); ++i) {
                if (i) out += " | ";
                out += t.atoms[i];
            }
            return out;
        }
        case FKind::TupleOf: return "{" + join(t.elems, ", ") + "}";
        case FKind::ListOf: return "list(" + to_string(t.elems[0]) + ")";
        case FKind::FixedList: return "[" + join(t.elems, ", ") + "]";
        case FKind::Union: return join(t.elems, " | ");
    }
    return "?";
}

// --- spec conversion ---

inline FType from_spec_type(const Node& ty) {
    switch (ty.kind) {
        case NodeKind::TyInteger: return t_any_int();
        case NodeKind::TyPosInteger: return t_pos_int();
        case NodeKind::TyAtom: return t_any_atom();
        case NodeKind::TyAny: return t_any();
        case NodeKind::TyIntLit: return t_ints({ty.ival});
        case NodeKind::TyAtomLit: return t_atoms({ty.sval});
        case NodeKind::TyTuple: {
            std::vector<FType> elems;
            for (const Node& c : ty.children) elems.push_back(from_spec_type(c));
            return t_tuple(std::move(elems));
        }
        case NodeKind::TyList: {
            FType elem = from_spec_type(ty.children[0]);
            if (ty.ival < 0) return t_list_of(std::move(elem));
            return t_fixed_list(std::vector<FType>(static_cast<size_t>(ty.ival), elem));
        }
        case NodeKind::TyUnion: {
            // Merge literal alternatives of the same family.
            std::vector<std::int64_t> ints;
            std::vector<std::string> atoms;
            std::vector<FType> rest;
            for (const Node& c : ty.children) {
                FType t = from_spec_type(c);
                if (t.kind == FKind::LiteralInts)
                    ints.insert(ints.end(), t.ints.begin(), t.ints.end());
                else if (t.kind == FKind::Atoms)
                    atoms.insert(atoms.end(), t.atoms.begin(), t.atoms.end());
                else
                    rest.push_back(std::move(t));
            }
            std::vector<FType> alts;
            if (!ints.empty()) alts.push_back(t_ints(std::move(ints)));
            if (!atoms.empty()) alts.push_back(t_atoms(std::move(atoms)));
            for (auto& r : rest) alts.push_back(std::move(r));
            return t_union(std::move(alts));
        }
        default:
            throw Error("internal: not a spec type node");
    }
}

// --- pattern shapes ---

inline FType type_of_pattern(const Node& p) {
    switch (p.kind) {
        case NodeKind::Var:
        case NodeKind::Wildcard:
            return t_any();
        case NodeKind::IntLit: return t_ints({p.ival});
        case NodeKind::AtomLit: return t_atoms({p.sval});
        case NodeKind::Nil: return t_fixed_list({});
        case NodeKind::Tuple: {
            std::vector<FType> elems;
            for (const Node& c : p.children) elems.push_back(type_of_pattern(c));
            return t_tuple(std::move(elems));
        }
        case NodeKind::Cons: {
            // Closed spine -> per-position list; open spine -> uniform list
            // (the tail's element types are unknown).
            std::vector<FType> elems;
            const Node* cur = &p;
            while (cur->kind == NodeKind::Cons) {
                elems.push_back(type_of_pattern(cur->children[0]));
                cur = &cur->children[1];
            }
            if (cur->kind == NodeKind::Nil) return t_fixed_list(std::move(elems));
            return t_list_of(t_any());
        }
        default:
            throw Error("internal: non-pattern node in pattern position");
    }
}

// --- guard facts ---

struct GuardFacts {
    std::map<std::string, FType> refinements;
    // (length variable, list variable) pairs from length(L) == N conjuncts.
    std::vector<std::pair<std::string, std::string>> len_relations;
};

namespace detail {

inline bool is_eq_op(BinOpKind op) { return op == BinOpKind::Eq || op == BinOpKind::ExactEq; }

inline std::optional<FType> fact_from_cmp(BinOpKind op, std::int64_t k) {
    switch (op) {
        case BinOpKind::Eq:
        case BinOpKind::ExactEq: return t_ints({k});
        case BinOpKind::Lt: return k == kNoLow ? std::optional<FType>{} : t_range(kNoLow, k - 1);
        case BinOpKind::Gt: return k == kNoHigh ? std::optional<FType>{} : t_range(k + 1, kNoHigh);
        case BinOpKind::Le: return t_range(kNoLow, k);
        case BinOpKind::Ge: return t_range(k, kNoHigh);
        default: return std::nullopt;
    }
}

inline BinOpKind flip_cmp(BinOpKind op) {
    switch (op) {
        case BinOpKind::Lt: return BinOpKind::Gt;
        case BinOpKind::Gt: return BinOpKind::Lt;
        case BinOpKind::Le: return BinOpKind::Ge;
        case BinOpKind::Ge: return BinOpKind::Le;
        default: return op;
    }
}

inline bool is_length_call(const Node& n, std::string& var_out) {
    if (n.kind != NodeKind::Call || n.children.size() != 2) return false;
    if (n.children[0].kind != NodeKind::AtomLit || n.children[0].sval != "length") return false;
    if (n.children[1].kind != NodeKind::Var) return false;
    var_out = n.children[1].sval;
    return true;
}

inline void harvest_conjunct(const Node& g, GuardFacts& facts) {
    if (g.kind != NodeKind::BinOp) return;
    if (g.op == BinOpKind::And || g.op == BinOpKind::AndAlso) {
        harvest_conjunct(g.children[0], facts);
        harvest_conjunct(g.children[1], facts);
        return;
    }
    const Node& l = g.children[0];
    const Node& r = g.children[1];
    auto add = [&](const std::string& var, FType t) {
        auto it = facts.refinements.find(var);
        if (it == facts.refinements.end()) {
            facts.refinements.emplace(var, std::move(t));
            return;
        }
        // Conflicting facts leave the harder one; emptiness shows up later
        // through intersection with the pattern type.
        if (auto merged = intersect(it->second, t)) it->second = std::move(*merged);
        else it->second = std::move(t);
    };
    std::string lv;
    // Any comparison on length(V) implies V is a list (a non-list crashes the
    // guard, failing it). Equality against a literal pins the length; against
    // a variable it records a relation the generator satisfies directly, and
    // the length variable must be a non-negative integer.
    if (is_length_call(l, lv)) {
        if (r.kind == NodeKind::IntLit && is_eq_op(g.op)) {
            if (r.ival >= 0)
                add(lv, t_fixed_list(std::vector<FType>(static_cast<size_t>(r.ival), t_any())));
            return;
        }
        add(lv, t_list_of(t_any()));
        if (r.kind == NodeKind::Var && is_eq_op(g.op)) {
            facts.len_relations.emplace_back(r.sval, lv);
            add(r.sval, t_range(0, kNoHigh));
        }
        return;
    }
    if (is_length_call(r, lv)) {
        add(lv, t_list_of(t_any()));
        if (l.kind == NodeKind::Var && is_eq_op(g.op)) {
            facts.len_relations.emplace_back(l.sval, lv);
            add(l.sval, t_range(0, kNoHigh));
        }
        return;
    }
    if (l.kind == NodeKind::Var && r.kind == NodeKind::IntLit) {
        if (auto t = fact_from_cmp(g.op, r.ival)) add(l.sval, std::move(*t));
        return;
    }
    if (l.kind == NodeKind::IntLit && r.kind == NodeKind::Var) {
        if (auto t = fact_from_cmp(flip_cmp(g.op), l.ival)) add(r.sval, std::move(*t));
        return;
    }
    if (l.kind == NodeKind::Var && r.kind == NodeKind::AtomLit && is_eq_op(g.op)) {
        add(l.sval, t_atoms({r.sval}));
        return;
    }
    if (l.kind == NodeKind::AtomLit && r.kind == NodeKind::Var && is_eq_op(g.op)) {
        add(r.sval, t_atoms({l.sval}));
        return;
    }
}

}  // namespace detail

inline GuardFacts harvest_guard(const Node& guard) {
    GuardFacts facts;
    detail::harvest_conjunct(guard, facts);
    return facts;
}

// --- per-clause inference ---

struct ClauseType {
    bool empty = false;
    std::vector<FType> params;             // refined type per argument position
    std::map<std::string, FType> var_types;  // refined type per head variable
    std::vector<std::pair<std::string, std::string>> len_relations;
};

namespace detail {

// Per-position projection of t narrowed to a tuple/list shape. Union
// alternatives are merged positionwise, which over-approximates correlated
// alternatives; the generator's dispatch check compensates.
inline std::optional<std::vector<FType>> project_children(const FType& t, const FType& shape) {
    auto narrowed = intersect(t, shape);
    if (!narrowed) return std::nullopt;
    const FType& n = *narrowed;
    auto elems_of = [](const FType& x) -> const std::vector<FType>& { return x.elems; };
    if (n.kind == FKind::Union) {
        std::vector<std::vector<FType>> per_alt;
        for (const FType& alt : n.elems) per_alt.push_back(elems_of(alt));
        std::vector<FType> out;
        for (size_t i = 0; i < per_alt[0].size(); ++i) {
            std::vector<FType> alts;
            for (const auto& pa : per_alt) alts.push_back(pa[i]);
            out.push_back(t_union(std::move(alts)));
        }
        return out;
    }
    return elems_of(n);
}

// Walks pattern and type together, intersecting each variable's constraint
// into vars. Returns false when some position is uninhabitable.
inline bool bind_var_types(const Node& p, const FType& t, std::map<std::string, FType>& vars) {
    switch (p.kind) {
        case NodeKind::Wildcard: return true;
        case NodeKind::Var: {
            auto it = vars.find(p.sval);
            if (it == vars.end()) {
                vars.emplace(p.sval, t);
                return true;
            }
            auto merged = intersect(it->second, t);
            if (!merged) return false;
            it->second = std::move(*merged);
            return true;
        }
        case NodeKind::IntLit: return intersect(t, t_ints({p.ival})).has_value();
        case NodeKind::AtomLit: return intersect(t, t_atoms({p.sval})).has_value();
        case NodeKind::Nil: return intersect(t, t_fixed_list({})).has_value();
        case NodeKind::Tuple: {
            std::vector<FType> shape_elems(p.children.size(), t_any());
            auto children = project_children(t, t_tuple(shape_elems));
            if (!children || children->size() != p.children.size()) return false;
            for (size_t i = 0; i < p.children.size(); ++i)
                if (!bind_var_types(p.children[i], (*children)[i], vars)) return false;
            return true;
        }
        case NodeKind::Cons: {
            // Narrow to the spine's shape, then walk per element.
            FType shape = type_of_pattern(p);
            auto narrowed = intersect(t, shape);
            if (!narrowed) return false;
            const Node* cur = &p;
            size_t idx = 0;
            FType elem_fallback = t_any();
            const FType& n = *narrowed;
            while (cur->kind == NodeKind::Cons) {
                FType et = elem_fallback;
                if (n.kind == FKind::FixedList && idx < n.elems.size()) et = n.elems[idx];
                else if (n.kind == FKind::ListOf) et = n.elems[0];
                else if (n.kind == FKind::Union) {
                    std::vector<FType> alts;
                    for (const FType& alt : n.elems) {
                        if (alt.kind == FKind::FixedList && idx < alt.elems.size())
                            alts.push_back(alt.elems[idx]);
                        else if (alt.kind == FKind::ListOf)
                            alts.push_back(alt.elems[0]);
                    }
                    if (!alts.empty()) et = t_union(std::move(alts));
                }
                if (!bind_var_types(cur->children[0], et, vars)) return false;
                ++idx;
                cur = &cur->children[1];
            }
            if (cur->kind == NodeKind::Nil || cur->kind == NodeKind::Wildcard) return true;
            if (cur->kind == NodeKind::Var) {
                // The tail sees the rest of the list.
                FType tail = t_list_of(t_any());
                if (n.kind == FKind::ListOf) tail = n;
                else if (n.kind == FKind::FixedList && idx <= n.elems.size())
                    tail = t_fixed_list(std::vector<FType>(n.elems.begin() +
                                                               static_cast<std::ptrdiff_t>(idx),
                                                           n.elems.end()));
                return bind_var_types(*cur, tail, vars);
            }
            return true;
        }
        default:
            return true;
    }
}

// Rebuilds the position's type with every variable narrowed to its final
// refinement.
inline std::optional<FType> rebuild(const Node& p, const FType& t,
                                    const std::map<std::string, FType>& vars) {
    switch (p.kind) {
        case NodeKind::Wildcard: return t;
        case NodeKind::Var: {
            auto it = vars.find(p.sval);
            if (it == vars.end()) return t;
            return intersect(t, it->second);
        }
        case NodeKind::IntLit: return intersect(t, t_ints({p.ival}));
        case NodeKind::AtomLit: return intersect(t, t_atoms({p.sval}));
        case NodeKind::Nil: return intersect(t, t_fixed_list({}));
        case NodeKind::Tuple: {
            std::vector<FType> shape_elems(p.children.size(), t_any());
            auto children = project_children(t, t_tuple(shape_elems));
            if (!children) return std::nullopt;
            std::vector<FType> out;
            for (size_t i = 0; i < p.children.size(); ++i) {
                auto e = rebuild(p.children[i], (*children)[i], vars);
                if (!e) return std::nullopt;
                out.push_back(std::move(*e));
            }
            return t_tuple(std::move(out));
        }
        case NodeKind::Cons: {
            FType shape = type_of_pattern(p);
            auto narrowed = intersect(t, shape);
            if (!narrowed) return std::nullopt;
            const FType& n = *narrowed;
            if (n.kind != FKind::FixedList) return n;  // open spine stays uniform
            std::vector<FType> out;
            const Node* cur = &p;
            size_t idx = 0;
            while (cur->kind == NodeKind::Cons && idx < n.elems.size()) {
                auto e = rebuild(cur->children[0], n.elems[idx], vars);
                if (!e) return std::nullopt;
                out.push_back(std::move(*e));
                ++idx;
                cur = &cur->children[1];
            }
            return t_fixed_list(std::move(out));
        }
        default:
            return t;
    }
}

}  // namespace detail

// Spec argument types for name/arity, or Any per position without a spec.
inline std::vector<FType> spec_arg_types(const Node& module, const std::string& name,
                                         int arity) {
    if (const Node* spec = lang::find_spec(module, name, arity)) {
        std::vector<FType> out;
        for (std::int64_t i = 0; i < spec->ival; ++i)
            out.push_back(from_spec_type(spec->children[static_cast<size_t>(i)]));
        return out;
    }
    return std::vector<FType>(static_cast<size_t>(arity), t_any());
}

// Narrows each clause's argument types by pattern shape and guard facts, with
// repeated variables intersected across positions. Uninhabitable clauses come
// back with empty = true.
inline std::vector<ClauseType> infer_clause_types(const Node& module, const Node& function) {
    std::vector<FType> spec_types = spec_arg_types(module, function.sval,
                                                   static_cast<int>(function.ival));
    std::vector<ClauseType> out;
    for (const Node& cl : function.children) {
        ClauseType ct;
        std::vector<FType> pos_types;
        bool ok = true;
        for (int i = 0; i < cl.npatterns && ok; ++i) {
            const Node& p = cl.children[static_cast<size_t>(i)];
            auto t = intersect(spec_types[static_cast<size_t>(i)], type_of_pattern(p));
            if (!t) { ok = false; break; }
            pos_types.push_back(std::move(*t));
        }
        if (ok) {
            for (int i = 0; i < cl.npatterns && ok; ++i)
                ok = detail::bind_var_types(cl.children[static_cast<size_t>(i)],
                                            pos_types[static_cast<size_t>(i)], ct.var_types);
        }
        if (ok && cl.has_guard) {
            GuardFacts facts = harvest_guard(*cl.guard());
            ct.len_relations = facts.len_relations;
            for (auto& [var, t] : facts.refinements) {
                auto it = ct.var_types.find(var);
                if (it == ct.var_types.end()) continue;  // not a head variable
                auto merged = intersect(it->second, t);
                if (!merged) { ok = false; break; }
                it->second = std::move(*merged);
            }
        }
        if (ok) {
            for (int i = 0; i < cl.npatterns && ok; ++i) {
                auto t = detail::rebuild(cl.children[static_cast<size_t>(i)],
                                         pos_types[static_cast<size_t>(i)], ct.var_types);
                if (!t) { ok = false; break; }
                ct.params.push_back(std::move(*t));
            }
        }
        ct.empty = !ok;
        if (ct.empty) {
            ct.params.clear();
            ct.var_types.clear();
        }
        out.push_back(std::move(ct));
    }
    return out;
}

// Integer comparison constants that mention a head variable of the clause, in
// the clause guard and in if/case guards of its body. These seed boundary
// probes around each threshold.
inline std::map<std::string, std::set<std::int64_t>> boundary_ints(const Node& clause) {
    std::map<std::string, std::set<std::int64_t>> out;
    std::set<std::string> head_vars;
    std::function<void(const Node&)> collect_vars = [&](const Node& p) {
        if (p.kind == NodeKind::Var) head_vars.insert(p.sval);
        for (const Node& c : p.children) collect_vars(c);
    };
    for (int i = 0; i < clause.npatterns; ++i)
        collect_vars(clause.children[static_cast<size_t>(i)]);

    std::function<void(const Node&)> scan_cmp = [&](const Node& g) {
        if (g.kind == NodeKind::BinOp) {
            switch (g.op) {
                case BinOpKind::Eq:
                case BinOpKind::ExactEq:
                case BinOpKind::Lt:
                case BinOpKind::Gt:
                case BinOpKind::Le:
                case BinOpKind::Ge: {
                    const Node& l = g.children[0];
                    const Node& r = g.children[1];
                    if (l.kind == NodeKind::Var && r.kind == NodeKind::IntLit &&
                        head_vars.count(l.sval))
                        out[l.sval].insert(r.ival);
                    if (r.kind == NodeKind::Var && l.kind == NodeKind::IntLit &&
                        head_vars.count(r.sval))
                        out[r.sval].insert(l.ival);
                    break;
                }
                default: break;
            }
            scan_cmp(g.children[0]);
            scan_cmp(g.children[1]);
        }
    };
    // Guards of the clause itself and of if/case clauses anywhere in the body.
    if (clause.has_guard) scan_cmp(*clause.guard());
    std::function<void(const Node&)> walk = [&](const Node& n) {
        if (n.kind == NodeKind::Clause && n.has_guard) scan_cmp(*n.guard());
        for (const Node& c : n.children) walk(c);
    };
    for (size_t i = static_cast<size_t>(clause.body_pos() - 1); i < clause.children.size(); ++i)
        walk(clause.children[i]);
    return out;
}

}  // namespace evocheck::types
