#pragma once

// Shared helpers for the test suite: corpus access, an evaluator-backed
// pattern-match oracle, bounded value enumeration over a small alphabet, and
// deterministic random generators for values, patterns and whole modules.

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "evocheck/annotate.hpp"
#include "evocheck/ast.hpp"
#include "evocheck/generate.hpp"
#include "evocheck/interp.hpp"
#include "evocheck/parser.hpp"
#include "evocheck/poi.hpp"

namespace testsupport {

namespace lang = evocheck::lang;
using evocheck::gen::Rng;
using evocheck::interp::Value;
using lang::Node;
using lang::NodeKind;

inline std::string corpus_path(const std::string& stem) {
    return std::string(EVOCHECK_CORPUS_DIR) + "/" + stem + ".fth";
}

inline Node load_corpus(const std::string& stem) {
    return lang::parse_file(corpus_path(stem));
}

inline Node parse_src(const std::string& source, const std::string& name = "m") {
    return lang::parse_module(source, name);
}

inline bool outcomes_agree(const evocheck::interp::Outcome& a,
                           const evocheck::interp::Outcome& b) {
    if (a.err != b.err) return false;
    if (a.err != evocheck::interp::ErrKind::None) return true;
    return evocheck::interp::value_equal(a.value, b.value);
}

// --- Pattern-match oracle ---------------------------------------------------

// Wraps a pattern in probe(p) -> yes; probe(_) -> no. and asks the evaluator
// whether a value matches. Fresh names like _FV@1 are fine here: the module
// is built directly, never parsed.
class MatchOracle {
public:
    explicit MatchOracle(const Node& pattern)
        : module_(make_module(pattern)), vm_(module_) {}

    bool matches(const Value& v) {
        auto out = vm_.call("probe", {v});
        return out.err == evocheck::interp::ErrKind::None &&
               out.value.kind == evocheck::interp::VKind::Atom && out.value.atom == "yes";
    }

private:
    static Node make_module(const Node& pattern) {
        Node yes = lang::mk_clause({pattern}, {}, {lang::mk_atom("yes")});
        Node no = lang::mk_clause({lang::mk(NodeKind::Wildcard)}, {}, {lang::mk_atom("no")});
        Node fn = lang::mk(NodeKind::Function, {std::move(yes), std::move(no)});
        fn.sval = "probe";
        fn.ival = 1;
        Node m = lang::mk(NodeKind::Module, {std::move(fn)});
        m.sval = "probe_mod";
        lang::annotate(m);
        return m;
    }

    Node module_;
    evocheck::interp::Interp vm_;
};

// --- Values over a small alphabet --------------------------------------------

// Every value built from scalars {0, 1, 2, a, b} by tuples and lists of at
// most two members, nested at most `depth` constructors deep.
inline std::vector<Value> enum_values(int depth) {
    using evocheck::interp::serialize;
    using evocheck::interp::vatom;
    using evocheck::interp::vint;
    using evocheck::interp::vlist;
    using evocheck::interp::vtuple;
    std::vector<Value> cur;
    for (int i = 0; i < 3; ++i) cur.push_back(vint(i));
    cur.push_back(vatom("a"));
    cur.push_back(vatom("b"));
    std::set<std::string> seen;
    for (const Value& v : cur) seen.insert(serialize(v));
    for (int d = 2; d <= depth; ++d) {
        std::vector<Value> next = cur;
        auto add = [&](Value v) {
            if (seen.insert(serialize(v)).second) next.push_back(std::move(v));
        };
        add(vlist({}));
        for (const Value& x : cur) {
            add(vtuple({x}));
            add(vlist({x}));
            for (const Value& y : cur) {
                add(vtuple({x, y}));
                add(vlist({x, y}));
            }
        }
        cur = std::move(next);
    }
    return cur;
}

// Random value over the same alphabet, biased toward small shapes.
inline Value sample_small_value(Rng& rng, int depth) {
    using evocheck::interp::vatom;
    using evocheck::interp::vint;
    using evocheck::interp::vlist;
    using evocheck::interp::vtuple;
    if (depth == 0 || rng.below(3) == 0) {
        switch (rng.below(5)) {
            case 0: return vint(0);
            case 1: return vint(1);
            case 2: return vint(2);
            case 3: return vatom("a");
            default: return vatom("b");
        }
    }
    size_t n = rng.below(3);
    std::vector<Value> elems;
    for (size_t i = 0; i < n; ++i) elems.push_back(sample_small_value(rng, depth - 1));
    if (rng.flip()) return vtuple(std::move(elems));
    return vlist(std::move(elems));
}

// --- Random patterns ----------------------------------------------------------

// Random pattern over scalars {0, 1, 2, a, b} with at most two distinct
// variable names. Repeats are deliberate: they exercise the equality
// constraints the freshening rewrite must preserve.
class PatternGen {
public:
    explicit PatternGen(Rng& rng) : rng_(rng) {}

    Node gen(int depth) {
        if (depth == 0) return leaf();
        switch (rng_.below(10)) {
            case 0:
            case 1:
            case 2:
                return leaf();
            case 3: {
                std::vector<Node> elems;
                size_t n = 1 + rng_.below(2);
                for (size_t i = 0; i < n; ++i) elems.push_back(gen(depth - 1));
                return lang::mk_tuple(std::move(elems));
            }
            case 4:
            case 5: {
                // closed list of one or two members
                Node out = lang::mk_nil();
                size_t n = 1 + rng_.below(2);
                for (size_t i = 0; i < n; ++i)
                    out = lang::mk_cons(gen(depth - 1), std::move(out));
                return out;
            }
            case 6: {
                // open list: the tail variable stands for a list
                std::string tail = var_name();
                tail_vars_.insert(tail);
                return lang::mk_cons(gen(depth - 1), lang::mk_var(tail));
            }
            default:
                return leaf();
        }
    }

    // Variable names that appear as a cons tail; their assignments must be
    // list values for the pattern to be satisfiable.
    const std::set<std::string>& tail_vars() const { return tail_vars_; }

private:
    Node leaf() {
        switch (rng_.below(8)) {
            case 0: return lang::mk_int(static_cast<std::int64_t>(rng_.below(3)));
            case 1: return lang::mk_atom(rng_.flip() ? "a" : "b");
            case 2: return lang::mk(NodeKind::Wildcard);
            case 3: return lang::mk_nil();
            default: return lang::mk_var(var_name());
        }
    }

    std::string var_name() { return rng_.flip() ? "P" : "Q"; }

    Rng& rng_;
    std::set<std::string> tail_vars_;
};

// Paths (relative to the pattern root) of every variable node, in the same
// depth-first order the locator uses.
inline void var_paths_walk(const Node& p, lang::AstPath& cur,
                           std::vector<lang::AstPath>& out) {
    if (p.kind == NodeKind::Var) out.push_back(cur);
    for (size_t i = 0; i < p.children.size(); ++i) {
        cur.steps.push_back(static_cast<int>(i) + 1);
        var_paths_walk(p.children[i], cur, out);
        cur.steps.pop_back();
    }
}

inline std::vector<lang::AstPath> var_paths(const Node& pattern) {
    std::vector<lang::AstPath> out;
    lang::AstPath cur;
    var_paths_walk(pattern, cur, out);
    return out;
}

inline void pattern_var_names(const Node& p, std::set<std::string>& out) {
    if (p.kind == NodeKind::Var) out.insert(p.sval);
    for (const Node& c : p.children) pattern_var_names(c, out);
}

// Builds a value the pattern matches: literals map to themselves, variables
// to their assignment, wildcards to a pool draw (a list draw in tail
// position, where anything else could not match).
inline Value concretize(const Node& p, const std::map<std::string, Value>& assign,
                        Rng& rng, const std::vector<Value>& pool,
                        const std::vector<Value>& list_pool) {
    using evocheck::interp::vlist;
    using evocheck::interp::VKind;
    switch (p.kind) {
        case NodeKind::IntLit: return evocheck::interp::vint(p.ival);
        case NodeKind::AtomLit: return evocheck::interp::vatom(p.sval);
        case NodeKind::Var: return assign.at(p.sval);
        case NodeKind::Wildcard: return pool[rng.below(pool.size())];
        case NodeKind::Nil: return vlist({});
        case NodeKind::Tuple: {
            std::vector<Value> elems;
            for (const Node& c : p.children)
                elems.push_back(concretize(c, assign, rng, pool, list_pool));
            return evocheck::interp::vtuple(std::move(elems));
        }
        case NodeKind::Cons: {
            Value head = concretize(p.children[0], assign, rng, pool, list_pool);
            const Node& tp = p.children[1];
            Value tail = tp.kind == NodeKind::Wildcard
                             ? list_pool[rng.below(list_pool.size())]
                             : concretize(tp, assign, rng, pool, list_pool);
            if (tail.kind != VKind::List) throw evocheck::Error("non-list cons tail");
            std::vector<Value> elems;
            elems.push_back(std::move(head));
            elems.insert(elems.end(), tail.items->begin(), tail.items->end());
            return vlist(std::move(elems));
        }
        default: throw evocheck::Error("non-pattern node in concretize");
    }
}

// --- POI enumeration ----------------------------------------------------------

// Every resolvable POI of a parsed module, in locator order. Mirrors the
// locator's depth-first walk so the computed occurrence index round-trips.
inline void collect_pois_walk(const Node& n, const std::string& file,
                              std::map<std::pair<int, std::string>, int>& counts,
                              std::vector<evocheck::inst::Poi>& out) {
    if (n.kind == NodeKind::Var && n.span.line > 0) {
        int& k = counts[{n.span.line, n.sval}];
        ++k;
        out.push_back({file, n.span.line, n.sval, k});
    }
    for (const Node& c : n.children) collect_pois_walk(c, file, counts, out);
}

inline std::vector<evocheck::inst::Poi> collect_pois(const Node& module) {
    std::map<std::pair<int, std::string>, int> counts;
    std::vector<evocheck::inst::Poi> out;
    collect_pois_walk(module, module.sval, counts, out);
    return out;
}

// --- Random modules -----------------------------------------------------------

// Emits random well-scoped module source: function i calls only functions
// j < i and builtins, guards stay inside the guard grammar, and every
// variable use is dominated by a binding. Call graphs are acyclic and every
// comprehension ranges over a finite list, so evaluation always terminates.
class ModuleGen {
public:
    explicit ModuleGen(Rng& rng, bool with_specs = false)
        : rng_(rng), with_specs_(with_specs) {}

    std::string module_source(int nfuns) {
        fns_.clear();
        uniq_ = 0;
        std::string out;
        for (int i = 0; i < nfuns; ++i) {
            std::string name = "f" + std::to_string(i);
            int arity = static_cast<int>(rng_.below(4));
            if (with_specs_ && rng_.flip()) out += spec_source(name, arity);
            out += function_source(name, arity);
            fns_.emplace_back(name, arity);
        }
        return out;
    }

private:
    std::string fresh_var() { return "V" + std::to_string(uniq_++); }

    std::string atom() {
        static const char* pool[] = {"a", "b", "c", "ok", "err"};
        return pool[rng_.below(5)];
    }

    std::string small_int() {
        std::int64_t v = static_cast<std::int64_t>(rng_.below(7)) - 2;
        return std::to_string(v);
    }

    // types ------------------------------------------------------------

    std::string type_source(int depth) {
        switch (rng_.below(depth > 0 ? 9 : 6)) {
            case 0: return "integer()";
            case 1: return "pos_integer()";
            case 2: return "atom()";
            case 3: return "any()";
            case 4: return small_int();
            case 5: return atom();
            case 6: {
                std::string t = type_alt(depth - 1);
                size_t n = 1 + rng_.below(2);
                for (size_t i = 0; i < n; ++i) t += " | " + type_alt(depth - 1);
                return t;
            }
            case 7: {
                std::string t = "{" + type_source(depth - 1);
                if (rng_.flip()) t += ", " + type_source(depth - 1);
                return t + "}";
            }
            default:
                if (rng_.below(3) == 0)
                    return "list(" + type_source(depth - 1) + ", " +
                           std::to_string(rng_.below(3)) + ")";
                return "list(" + type_source(depth - 1) + ")";
        }
    }

    // a union member: anything but another union
    std::string type_alt(int depth) {
        for (;;) {
            std::string t = type_source(depth);
            if (t.find(" | ") == std::string::npos) return t;
        }
    }

    std::string spec_source(const std::string& name, int arity) {
        std::string s = "spec " + name + "(";
        for (int i = 0; i < arity; ++i) s += (i ? ", " : "") + type_source(1);
        return s + ") -> " + type_source(1) + ".\n";
    }

    // patterns -----------------------------------------------------------

    std::string pattern_source(int depth, std::vector<std::string>& introduced) {
        if (depth == 0) return pattern_leaf(introduced);
        switch (rng_.below(10)) {
            case 0: {
                std::string s = "{" + pattern_source(depth - 1, introduced);
                if (rng_.flip()) s += ", " + pattern_source(depth - 1, introduced);
                return s + "}";
            }
            case 1: {
                std::string s = "[" + pattern_source(depth - 1, introduced);
                if (rng_.flip()) s += ", " + pattern_source(depth - 1, introduced);
                return s + "]";
            }
            case 2: {
                std::string tail = fresh_var();
                introduced.push_back(tail);
                return "[" + pattern_source(depth - 1, introduced) + " | " + tail + "]";
            }
            default: return pattern_leaf(introduced);
        }
    }

    std::string pattern_leaf(std::vector<std::string>& introduced) {
        switch (rng_.below(10)) {
            case 0: return small_int();
            case 1: return atom();
            case 2: return "_";
            case 3: return "[]";
            case 4:
                if (!introduced.empty()) return introduced[rng_.below(introduced.size())];
                [[fallthrough]];
            default: {
                std::string v = fresh_var();
                introduced.push_back(v);
                return v;
            }
        }
    }

    // guards -------------------------------------------------------------

    std::string guard_term(const std::vector<std::string>& scope) {
        if (!scope.empty() && rng_.flip()) return scope[rng_.below(scope.size())];
        return small_int();
    }

    std::string guard_arith(const std::vector<std::string>& scope) {
        if (rng_.below(4) == 0) {
            static const char* ops[] = {"+", "-", "*", "div", "rem"};
            return "(" + guard_term(scope) + " " + ops[rng_.below(5)] + " " +
                   guard_term(scope) + ")";
        }
        return guard_term(scope);
    }

    std::string guard_cmp(const std::vector<std::string>& scope) {
        static const char* ops[] = {"<", ">", "=<", ">=", "==", "/=", "=:=", "=/="};
        std::string op = ops[rng_.below(8)];
        if (!scope.empty()) {
            size_t pick = rng_.below(6);
            const std::string& v = scope[rng_.below(scope.size())];
            if (pick == 0) return "length(" + v + ") " + op + " " + small_int();
            if (pick == 1) return v + " " + op + " " + atom();
        }
        return guard_arith(scope) + " " + op + " " + guard_arith(scope);
    }

    std::string guard_source(const std::vector<std::string>& scope) {
        if (rng_.below(10) == 0) return "true";
        std::string g = guard_cmp(scope);
        if (rng_.below(5) == 0) {
            static const char* joins[] = {" andalso ", " and ", " orelse ", " or "};
            g += joins[rng_.below(4)] + guard_cmp(scope);
        }
        return g;
    }

    // expressions ----------------------------------------------------------

    std::string expr_leaf(const std::vector<std::string>& scope) {
        if (!scope.empty() && rng_.below(10) < 4) return scope[rng_.below(scope.size())];
        return rng_.flip() ? small_int() : atom();
    }

    std::string expr_source(const std::vector<std::string>& scope, int depth) {
        if (depth == 0) return expr_leaf(scope);
        switch (rng_.below(14)) {
            case 0: {
                std::string s = "{" + expr_source(scope, depth - 1);
                if (rng_.flip()) s += ", " + expr_source(scope, depth - 1);
                return s + "}";
            }
            case 1: {
                size_t n = rng_.below(3);
                std::string s = "[";
                for (size_t i = 0; i < n; ++i)
                    s += (i ? ", " : "") + expr_source(scope, depth - 1);
                return s + "]";
            }
            case 2: {
                static const char* ops[] = {"+",  "-",  "*",  "div", "rem", "<",
                                            ">",  "=<", ">=", "==",  "/=",  "=:=",
                                            "=/=", "andalso", "orelse"};
                return "(" + expr_source(scope, depth - 1) + " " + ops[rng_.below(15)] +
                       " " + expr_source(scope, depth - 1) + ")";
            }
            case 3: {
                // begin blocks export their bindings; keep that visible here
                std::vector<std::string> inner = scope;
                std::string s = "begin " + stmt_source(inner, depth - 1);
                size_t n = 1 + rng_.below(2);
                for (size_t i = 0; i < n; ++i) s += ", " + stmt_source(inner, depth - 1);
                return s + " end";
            }
            case 4: {
                std::string s = "case " + expr_source(scope, depth - 1) + " of ";
                size_t n = 1 + rng_.below(2);
                for (size_t i = 0; i < n; ++i) {
                    if (i) s += "; ";
                    std::vector<std::string> inner = scope;
                    std::vector<std::string> introduced;
                    std::string pat = pattern_source(1, introduced);
                    for (const auto& v : introduced) inner.push_back(v);
                    s += pat;
                    if (rng_.below(3) == 0) s += " when " + guard_source(inner);
                    s += " -> " + expr_source(inner, depth - 1);
                }
                if (rng_.below(10) < 8) s += "; _ -> " + expr_leaf(scope);
                return s + " end";
            }
            case 5: {
                std::string s = "if ";
                if (rng_.flip())
                    s += guard_source(scope) + " -> " + expr_source(scope, depth - 1) + "; ";
                return s + "true -> " + expr_source(scope, depth - 1) + " end";
            }
            case 6: {
                // lambda literal; callers bind it at statement level
                size_t arity = 1 + rng_.below(2);
                std::string s = "fun";
                size_t nclauses = rng_.below(4) == 0 ? 2 : 1;
                for (size_t c = 0; c < nclauses; ++c) {
                    if (c) s += "; ";
                    std::vector<std::string> inner = scope;
                    std::vector<std::string> introduced;
                    s += "(";
                    for (size_t i = 0; i < arity; ++i)
                        s += (i ? ", " : "") + pattern_source(1, introduced);
                    for (const auto& v : introduced) inner.push_back(v);
                    s += ") -> " + expr_source(inner, depth - 1);
                }
                return s + " end";
            }
            case 7: {
                std::vector<std::string> inner = scope;
                std::vector<std::string> introduced;
                std::string pat = pattern_source(1, introduced);
                std::string src = list_expr(scope, depth - 1);
                for (const auto& v : introduced) inner.push_back(v);
                std::string s = "[" + expr_source(inner, depth - 1) + " || " + pat +
                                " <- " + src;
                if (rng_.below(5) < 2) s += ", " + guard_cmp(inner);
                return s + "]";
            }
            case 8: {
                if (!fns_.empty()) {
                    const auto& [name, arity] = fns_[rng_.below(fns_.size())];
                    std::string s = name + "(";
                    for (int i = 0; i < arity; ++i)
                        s += (i ? ", " : "") + expr_source(scope, depth - 1);
                    return s + ")";
                }
                [[fallthrough]];
            }
            case 9: {
                static const char* unary[] = {"length", "reverse", "sort", "sum"};
                return std::string(unary[rng_.below(4)]) + "(" +
                       list_expr(scope, depth - 1) + ")";
            }
            case 10:
                return "member(" + expr_source(scope, depth - 1) + ", " +
                       list_expr(scope, depth - 1) + ")";
            case 11:
                return "integer_to_list(" + expr_source(scope, depth - 1) + ")";
            case 12: {
                std::vector<std::string> introduced;
                std::string pat = pattern_source(0, introduced);
                std::vector<std::string> inner = scope;
                for (const auto& v : introduced) inner.push_back(v);
                return "map(fun(" + pat + ") -> " + expr_source(inner, depth - 1) +
                       " end, " + list_expr(scope, depth - 1) + ")";
            }
            default: return expr_leaf(scope);
        }
    }

    // an expression that usually evaluates to a list
    std::string list_expr(const std::vector<std::string>& scope, int depth) {
        if (!scope.empty() && rng_.below(4) == 0) return scope[rng_.below(scope.size())];
        size_t n = rng_.below(4);
        std::string s = "[";
        for (size_t i = 0; i < n; ++i) s += (i ? ", " : "") + expr_source(scope, depth);
        return s + "]";
    }

    // a body statement; a match extends the scope it was given
    std::string stmt_source(std::vector<std::string>& scope, int depth) {
        if (rng_.below(10) < 4) {
            std::string v = fresh_var();
            std::string s = v + " = " + expr_source(scope, depth);
            scope.push_back(v);
            return s;
        }
        return expr_source(scope, depth);
    }

    std::string clause_source(const std::string& name, int arity, bool catch_all) {
        std::vector<std::string> scope;
        std::string s = name + "(";
        for (int i = 0; i < arity; ++i) {
            if (i) s += ", ";
            if (catch_all) {
                std::string v = fresh_var();
                scope.push_back(v);
                s += v;
            } else {
                s += pattern_source(2, scope);
            }
        }
        s += ")";
        if (!catch_all && rng_.below(10) < 3) s += " when " + guard_source(scope);
        s += " ->\n    ";
        size_t nstmts = 1 + rng_.below(3);
        for (size_t i = 0; i < nstmts; ++i) {
            if (i) s += ",\n    ";
            s += stmt_source(scope, 2);
        }
        return s;
    }

    std::string function_source(const std::string& name, int arity) {
        size_t nclauses = rng_.below(3) == 0 ? 2 : 1;
        std::string s;
        for (size_t c = 0; c < nclauses; ++c) {
            if (c) s += ";\n";
            bool last = c + 1 == nclauses;
            bool catch_all = (nclauses > 1 && last && rng_.flip()) ||
                             (nclauses == 1 && rng_.below(3) == 0);
            s += clause_source(name, arity, catch_all);
        }
        return s + ".\n\n";
    }

    Rng& rng_;
    bool with_specs_;
    std::vector<std::pair<std::string, int>> fns_;
    int uniq_ = 0;
};

}  // namespace testsupport
