#pragma once

// Test-input generation. A deterministic splitmix64 stream drives everything,
// so a (seed, size) pair reproduces the same inputs on any platform. Initial
// inputs are built per clause so every reachable clause gets direct coverage:
// values are generated from the clause's refined types by walking its head
// patterns (a repeated variable gets one value), guard length relations are
// satisfied by construction, and integer thresholds from guards seed probes
// at k-1, k, k+1. mut() then derives arity neighbors of an input by
// regenerating one argument at a time.

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
#include "evocheck/interp.hpp"
#include "evocheck/types.hpp"
#include "evocheck/value.hpp"

namespace evocheck::gen {

using interp::Value;
using lang::Node;
using lang::NodeKind;
using types::FKind;
using types::FType;

// splitmix64: tiny, seedable, identical output everywhere.
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

    std::int64_t int_in(std::int64_t lo, std::int64_t hi) {
        // Inclusive; assumes lo <= hi. Width fits u64 even for extreme bounds.
        std::uint64_t width = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
        if (width == std::numeric_limits<std::uint64_t>::max()) return static_cast<std::int64_t>(next());
        return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + below(width + 1));
    }

    bool flip() { return next() & 1; }
};

// Magnitude cap for generated integers at a given size knob.
inline std::int64_t int_bound(int size) {
    int e = std::min(size, 16);
    if (e < 0) e = 0;
    return std::int64_t{1} << e;
}

inline const std::vector<std::string>& atom_pool() {
    static const std::vector<std::string> pool = {"a", "b", "c", "d", "e"};
    return pool;
}

// Small-biased integer: magnitude exponent uniform in [0, min(size,16)], then
// uniform within that magnitude.
inline std::int64_t small_biased_int(Rng& rng, int size, bool positive) {
    int emax = std::min(std::max(size, 0), 16);
    int e = static_cast<int>(rng.below(static_cast<std::uint64_t>(emax) + 1));
    std::int64_t mag = std::int64_t{1} << e;
    if (positive) return rng.int_in(1, std::max<std::int64_t>(1, mag));
    std::int64_t v = rng.int_in(0, mag);
    return rng.flip() ? v : -v;
}

inline Value generate_value(const FType& t, Rng& rng, int size, int depth = 3) {
    using interp::vatom;
    using interp::vint;
    using interp::vlist;
    using interp::vtuple;
    switch (t.kind) {
        case FKind::Any: {
            // Scalars only once the depth budget is spent.
            int pick = static_cast<int>(rng.below(depth > 0 ? 10 : 7));
            if (pick < 4) return vint(small_biased_int(rng, size, false));
            if (pick < 7) return vatom(atom_pool()[rng.below(atom_pool().size())]);
            if (pick < 9) {
                size_t len = rng.below(static_cast<std::uint64_t>(std::max(size, 0)) + 1);
                std::vector<Value> items;
                for (size_t i = 0; i < len; ++i)
                    items.push_back(generate_value(types::t_any(), rng, size, depth - 1));
                return vlist(std::move(items));
            }
            size_t n = 1 + rng.below(3);
            std::vector<Value> items;
            for (size_t i = 0; i < n; ++i)
                items.push_back(generate_value(types::t_any(), rng, size, depth - 1));
            return vtuple(std::move(items));
        }
        case FKind::AnyInt: return vint(small_biased_int(rng, size, false));
        case FKind::PosInt: return vint(small_biased_int(rng, size, true));
        case FKind::IntRange: {
            std::int64_t b = int_bound(size);
            // Prefer the part of the range near zero; fall back to a window
            // anchored at the closed end.
            std::int64_t lo = t.lo, hi = t.hi;
            std::int64_t wlo = std::max(lo, -b);
            std::int64_t whi = std::min(hi, b);
            if (wlo > whi) {
                if (lo != types::kNoLow) { wlo = lo; whi = std::min(hi, lo + 2 * b); }
                else { whi = hi; wlo = std::max(lo, hi - 2 * b); }
            }
            return vint(rng.int_in(wlo, whi));
        }
        case FKind::LiteralInts:
            return vint(t.ints[rng.below(t.ints.size())]);
        case FKind::AnyAtom:
            return vatom(atom_pool()[rng.below(atom_pool().size())]);
        case FKind::Atoms:
            return vatom(t.atoms[rng.below(t.atoms.size())]);
        case FKind::TupleOf: {
            std::vector<Value> items;
            for (const FType& e : t.elems) items.push_back(generate_value(e, rng, size, depth - 1));
            return vtuple(std::move(items));
        }
        case FKind::ListOf: {
            size_t len = rng.below(static_cast<std::uint64_t>(std::max(size, 0)) + 1);
            std::vector<Value> items;
            for (size_t i = 0; i < len; ++i)
                items.push_back(generate_value(t.elems[0], rng, size, depth - 1));
            return vlist(std::move(items));
        }
        case FKind::FixedList: {
            std::vector<Value> items;
            for (const FType& e : t.elems) items.push_back(generate_value(e, rng, size, depth - 1));
            return vlist(std::move(items));
        }
        case FKind::Union:
            return generate_value(t.elems[rng.below(t.elems.size())], rng, size, depth);
    }
    return vint(0);
}

// --- test inputs ---

struct Itc {
    std::string fname;
    std::vector<Value> args;

    bool operator==(const Itc& o) const {
        if (fname != o.fname || args.size() != o.args.size()) return false;
        for (size_t i = 0; i < args.size(); ++i)
            if (!interp::value_equal(args[i], o.args[i])) return false;
        return true;
    }
};

inline std::string serialize_itc(const Itc& itc) {
    std::string out = itc.fname + "(";
    for (size_t i = 0; i < itc.args.size(); ++i) {
        if (i) out += ",";
        out += interp::serialize(itc.args[i]);
    }
    return out + ")";
}

inline Itc parse_itc(const std::string& s) {
    size_t open = s.find('(');
    if (open == std::string::npos || s.empty() || s.back() != ')')
        throw Error("malformed test case: " + s);
    Itc itc;
    itc.fname = s.substr(0, open);
    std::string inner = s.substr(open + 1, s.size() - open - 2);
    if (!inner.empty()) itc.args = interp::parse_value_list(inner);
    return itc;
}

namespace detail {

// Walks a head pattern generating a value that matches it, threading the
// variable map so a repeated variable reuses its first value.
inline Value gen_from_pattern(const Node& p, const FType& t,
                              const std::map<std::string, FType>& var_types,
                              std::map<std::string, Value>& bound, Rng& rng, int size) {
    switch (p.kind) {
        case NodeKind::Wildcard:
            return generate_value(t, rng, size);
        case NodeKind::Var: {
            auto it = bound.find(p.sval);
            if (it != bound.end()) return it->second;
            auto vt = var_types.find(p.sval);
            Value v = generate_value(vt != var_types.end() ? vt->second : t, rng, size);
            bound.emplace(p.sval, v);
            return v;
        }
        case NodeKind::IntLit: return interp::vint(p.ival);
        case NodeKind::AtomLit: return interp::vatom(p.sval);
        case NodeKind::Nil: return interp::vlist({});
        case NodeKind::Tuple: {
            std::vector<FType> shape(p.children.size(), types::t_any());
            auto children = types::detail::project_children(t, types::t_tuple(shape));
            std::vector<Value> items;
            for (size_t i = 0; i < p.children.size(); ++i) {
                FType ct = children && i < children->size() ? (*children)[i] : types::t_any();
                items.push_back(gen_from_pattern(p.children[i], ct, var_types, bound, rng, size));
            }
            return interp::vtuple(std::move(items));
        }
        case NodeKind::Cons: {
            auto narrowed = types::intersect(t, types::type_of_pattern(p));
            FType n = narrowed ? *narrowed : types::t_list_of(types::t_any());
            std::vector<Value> items;
            const Node* cur = &p;
            size_t idx = 0;
            auto elem_type = [&](size_t i) -> FType {
                if (n.kind == FKind::FixedList && i < n.elems.size()) return n.elems[i];
                if (n.kind == FKind::ListOf) return n.elems[0];
                return types::t_any();
            };
            while (cur->kind == NodeKind::Cons) {
                items.push_back(gen_from_pattern(cur->children[0], elem_type(idx), var_types,
                                                 bound, rng, size));
                ++idx;
                cur = &cur->children[1];
            }
            if (cur->kind == NodeKind::Nil) return interp::vlist(std::move(items));
            // Open tail: append a generated suffix and bind it when named.
            FType tail_t = n.kind == FKind::ListOf ? n : types::t_list_of(types::t_any());
            Value tail;
            if (cur->kind == NodeKind::Var) {
                auto it = bound.find(cur->sval);
                if (it != bound.end()) tail = it->second;
                else {
                    auto vt = var_types.find(cur->sval);
                    tail = generate_value(vt != var_types.end() ? vt->second : tail_t, rng, size);
                    bound.emplace(cur->sval, tail);
                }
            } else {
                tail = generate_value(tail_t, rng, size);
            }
            if (tail.kind == interp::VKind::List)
                for (const Value& v : *tail.items) items.push_back(v);
            return interp::vlist(std::move(items));
        }
        default:
            return generate_value(t, rng, size);
    }
}

// Positions whose head pattern is a bare variable, by name.
inline std::map<std::string, size_t> top_var_positions(const Node& clause) {
    std::map<std::string, size_t> out;
    for (int i = 0; i < clause.npatterns; ++i) {
        const Node& p = clause.children[static_cast<size_t>(i)];
        if (p.kind == NodeKind::Var && !out.count(p.sval)) out[p.sval] = static_cast<size_t>(i);
    }
    return out;
}

// Rewrites arguments so every length(L) == N guard holds, when both ends are
// argument positions.
inline void apply_len_relations(const Node& clause, const types::ClauseType& ct,
                                std::vector<Value>& args) {
    auto pos = top_var_positions(clause);
    for (const auto& [len_var, list_var] : ct.len_relations) {
        auto li = pos.find(len_var);
        auto vi = pos.find(list_var);
        if (li == pos.end() || vi == pos.end()) continue;
        const Value& lst = args[vi->second];
        if (lst.kind == interp::VKind::List)
            args[li->second] = interp::vint(static_cast<std::int64_t>(lst.items->size()));
    }
}

}  // namespace detail

inline std::vector<Value> generate_clause_args(const Node& clause, const types::ClauseType& ct,
                                               Rng& rng, int size) {
    std::map<std::string, Value> bound;
    std::vector<Value> args;
    for (int i = 0; i < clause.npatterns; ++i)
        args.push_back(detail::gen_from_pattern(clause.children[static_cast<size_t>(i)],
                                                ct.params[static_cast<size_t>(i)],
                                                ct.var_types, bound, rng, size));
    detail::apply_len_relations(clause, ct, args);
    return args;
}

struct GenResult {
    std::vector<Itc> itcs;
    std::vector<std::string> warnings;
};

// Builds the initial input set for name/arity: per-clause constructive
// generation with a dispatch check (retried a bounded number of times),
// boundary probes around guard thresholds, then round-robin fill up to
// budget. Uninhabitable clauses are skipped with a warning.
inline GenResult initial_itcs(const Node& module, const std::string& name, int arity,
                              Rng& rng, int size, int budget = 32) {
    GenResult out;
    const Node* fn = lang::find_function(module, name, arity);
    if (!fn) throw Error("unknown function " + name + "/" + std::to_string(arity));
    auto cts = types::infer_clause_types(module, *fn);
    interp::Interp dispatcher(module);

    std::set<std::string> seen;
    auto push = [&](std::vector<Value> args) {
        Itc itc{name, std::move(args)};
        std::string key = serialize_itc(itc);
        if (seen.insert(key).second) out.itcs.push_back(std::move(itc));
    };

    std::vector<size_t> live;
    for (size_t ci = 0; ci < cts.size(); ++ci) {
        if (cts[ci].empty) {
            out.warnings.push_back(name + "/" + std::to_string(arity) + " clause " +
                                   std::to_string(ci + 1) +
                                   " has an uninhabitable argument type; skipped");
            continue;
        }
        live.push_back(ci);
    }
    if (live.empty()) return out;

    // One dispatch-checked input per reachable clause.
    for (size_t ci : live) {
        const Node& cl = fn->children[ci];
        std::vector<Value> args;
        for (int attempt = 0; attempt < 100; ++attempt) {
            args = generate_clause_args(cl, cts[ci], rng, size);
            auto sel = dispatcher.select_clause(*fn, args);
            if (sel && static_cast<size_t>(*sel) == ci) break;
        }
        push(std::move(args));
    }

    // Boundary probes: k-1, k, k+1 around each guard threshold, kept only
    // when the probe still fits the variable's refined type.
    for (size_t ci : live) {
        const Node& cl = fn->children[ci];
        auto pos = detail::top_var_positions(cl);
        for (const auto& [var, ks] : types::boundary_ints(cl)) {
            auto pi = pos.find(var);
            if (pi == pos.end()) continue;
            const FType& vt = cts[ci].var_types.count(var) ? cts[ci].var_types.at(var)
                                                           : types::t_any();
            for (std::int64_t k : ks) {
                for (std::int64_t probe : {k - 1, k, k + 1}) {
                    if (!types::type_member(interp::vint(probe), vt)) continue;
                    std::vector<Value> args = generate_clause_args(cl, cts[ci], rng, size);
                    args[pi->second] = interp::vint(probe);
                    detail::apply_len_relations(cl, cts[ci], args);
                    push(std::move(args));
                }
            }
        }
    }

    // Round-robin fill. Bounded attempts so a tiny value space (all inputs
    // already seen) cannot spin forever.
    size_t attempts = 0;
    size_t max_attempts = static_cast<size_t>(budget) * 20 + 100;
    for (size_t i = 0; out.itcs.size() < static_cast<size_t>(budget) && attempts < max_attempts;
         ++i, ++attempts) {
        size_t ci = live[i % live.size()];
        push(generate_clause_args(fn->children[ci], cts[ci], rng, size));
    }
    return out;
}

// One mutant per argument position: position i regenerated from the type that
// position has in the first clause whose head accepts the input (or the first
// reachable clause when none does).
inline std::vector<Itc> mut(const Itc& itc, const Node& module,
                            const std::vector<types::ClauseType>& cts, Rng& rng, int size) {
    std::vector<Itc> out;
    const Node* fn = lang::find_function(module, itc.fname, static_cast<int>(itc.args.size()));
    if (!fn || itc.args.empty()) return out;
    interp::Interp dispatcher(module);
    auto sel = dispatcher.select_clause(*fn, itc.args);
    size_t ci = cts.size();
    if (sel && !cts[static_cast<size_t>(*sel)].empty) ci = static_cast<size_t>(*sel);
    else {
        for (size_t j = 0; j < cts.size(); ++j)
            if (!cts[j].empty) { ci = j; break; }
    }
    if (ci == cts.size()) return out;
    for (size_t i = 0; i < itc.args.size(); ++i) {
        Itc m = itc;
        m.args[i] = generate_value(cts[ci].params[i], rng, size);
        out.push_back(std::move(m));
    }
    return out;
}

}  // namespace evocheck::gen
