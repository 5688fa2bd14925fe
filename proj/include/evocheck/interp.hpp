#pragma once

// Tree-walking evaluator.
//
// Semantics in brief:
//  - Single-assignment environments: matching an already-bound variable is an
//    equality constraint, never a rebind.
//  - Bindings thread left to right through clause bodies and argument lists;
//    begin blocks export their bindings; case/if/fun bodies and comprehensions
//    are local scopes.
//  - Errors are outcomes, not C++ exceptions at the API boundary: badmatch,
//    case_clause, function_clause, if_clause, badarith, undef, step_limit.
//  - Guards evaluate in a throwaway scope; any error inside a guard (except
//    resource exhaustion) and any non-true result mean the guard fails.
//  - Every run counts evaluation steps and call depth; exceeding either turns
//    the run into a step_limit outcome with the trace collected so far.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <pthread.h>

#include "evocheck/ast.hpp"
#include "evocheck/errors.hpp"
#include "evocheck/parser.hpp"
#include "evocheck/value.hpp"

namespace evocheck::interp {

using lang::BinOpKind;
using lang::DispatchError;
using lang::Node;
using lang::NodeKind;

using Env = std::vector<std::pair<std::string, Value>>;

inline const Value* env_lookup(const Env& env, const std::string& name) {
    for (const auto& [n, v] : env)
        if (n == name) return &v;
    return nullptr;
}

struct ClosureData {
    const Node* lambda;  // points into a module tree that must outlive the value
    Env captured;
};

enum class ErrKind {
    None,
    Badmatch,
    CaseClause,
    FunctionClause,
    IfClause,
    Badarith,
    Undef,
    StepLimit,
};

inline const char* err_name(ErrKind k) {
    switch (k) {
        case ErrKind::None: return "normal";
        case ErrKind::Badmatch: return "badmatch";
        case ErrKind::CaseClause: return "case_clause";
        case ErrKind::FunctionClause: return "function_clause";
        case ErrKind::IfClause: return "if_clause";
        case ErrKind::Badarith: return "badarith";
        case ErrKind::Undef: return "undef";
        case ErrKind::StepLimit: return "step_limit";
    }
    return "?";
}

struct Outcome {
    ErrKind err = ErrKind::None;
    Value value;  // meaningful only when err == None
    Trace trace;

    bool normal() const { return err == ErrKind::None; }
};

inline std::string serialize_outcome(const Outcome& o) {
    if (o.normal()) return serialize(o.value);
    return std::string("{error,") + err_name(o.err) + "}";
}

// Test hook. All callbacks fire only when an observer is installed; the
// evaluator's behavior is identical either way.
struct EvalObserver {
    virtual ~EvalObserver() = default;
    // After a successful evaluation of any expression node.
    virtual void on_eval(const Node& /*node*/, const Value& /*result*/) {}
    // After a match attempt of a '=' left side or a generator pattern;
    // env is the environment before the attempt.
    virtual void on_match(const Node& /*pattern*/, const Value& /*v*/, const Env& /*env*/,
                          bool /*ok*/) {}
    // After the head patterns of a case/function/fun clause were tried
    // (before the guard); args has one element per pattern.
    virtual void on_clause_head(const Node& /*clause*/, const std::vector<Value>& /*args*/,
                                const Env& /*env*/, bool /*ok*/) {}
    // When an if clause is reached, before its guard runs.
    virtual void on_if_clause(const Node& /*clause*/) {}
};

struct EvalOptions {
    // Generous by default: a truncated run yields a truncated trace, and two
    // versions truncate at different points, which would read as a spurious
    // difference. The depth cap catches runaway recursion well before this.
    std::int64_t max_steps = 20'000'000;
    int max_depth = 40'000;
    EvalObserver* observer = nullptr;
};

class Interp {
public:
    explicit Interp(const Node& module, EvalOptions opts = {})
        : module_(module), opts_(opts) {}

    // Runs name/|args| on fresh budgets. User functions win over builtins
    // (they cannot collide; the parser rejects redefinition).
    Outcome call(const std::string& name, const std::vector<Value>& args) {
        trace_.clear();
        steps_ = 0;
        depth_ = 0;
        try {
            const Node* fn = lang::find_function(module_, name, static_cast<int>(args.size()));
            Value v;
            if (fn) v = dispatch_function(*fn, args);
            else if (lang::is_builtin(name, static_cast<int>(args.size())))
                v = call_builtin(name, args);
            else
                throw EvalAbort{ErrKind::Undef};
            return {ErrKind::None, std::move(v), std::move(trace_)};
        } catch (EvalAbort& a) {
            return {a.kind, {}, std::move(trace_)};
        }
    }

    // Index of the clause that would take these arguments, if any. Shares the
    // exact dispatch logic with call().
    std::optional<int> select_clause(const Node& fn, const std::vector<Value>& args) {
        steps_ = 0;
        depth_ = 0;
        try {
            for (size_t ci = 0; ci < fn.children.size(); ++ci) {
                const Node& cl = fn.children[ci];
                Env env;
                if (!match_head(cl, args, env)) continue;
                if (cl.has_guard && !eval_guard(*cl.guard(), env)) continue;
                return static_cast<int>(ci);
            }
        } catch (EvalAbort&) {
        }
        return std::nullopt;
    }

private:
    struct EvalAbort {
        ErrKind kind;
    };

    const Node& module_;
    EvalOptions opts_;
    std::int64_t steps_ = 0;
    int depth_ = 0;
    Trace trace_;

    void step() {
        if (++steps_ > opts_.max_steps) throw EvalAbort{ErrKind::StepLimit};
    }

    struct DepthGuard {
        Interp& in;
        explicit DepthGuard(Interp& i) : in(i) {
            if (++in.depth_ > in.opts_.max_depth) {
                --in.depth_;
                throw EvalAbort{ErrKind::StepLimit};
            }
        }
        ~DepthGuard() { --in.depth_; }
    };

    // --- matching ---

    static Value list_from(const std::vector<Value>& items, size_t start) {
        return vlist(std::vector<Value>(items.begin() + static_cast<std::ptrdiff_t>(start),
                                        items.end()));
    }

    bool match(const Node& p, const Value& v, Env& env) {
        switch (p.kind) {
            case NodeKind::Wildcard: return true;
            case NodeKind::Var: {
                if (const Value* bound = env_lookup(env, p.sval)) return value_equal(*bound, v);
                env.emplace_back(p.sval, v);
                return true;
            }
            case NodeKind::IntLit: return v.kind == VKind::Int && v.i == p.ival;
            case NodeKind::AtomLit: return v.kind == VKind::Atom && v.atom == p.sval;
            case NodeKind::Nil: return v.kind == VKind::List && v.items->empty();
            case NodeKind::Tuple: {
                if (v.kind != VKind::Tuple || v.items->size() != p.children.size()) return false;
                for (size_t i = 0; i < p.children.size(); ++i)
                    if (!match(p.children[i], (*v.items)[i], env)) return false;
                return true;
            }
            case NodeKind::Cons: {
                // Walk the pattern spine against the vector to avoid building
                // a fresh tail value per cons cell.
                if (v.kind != VKind::List) return false;
                const Node* cur = &p;
                size_t idx = 0;
                while (cur->kind == NodeKind::Cons) {
                    if (idx >= v.items->size()) return false;
                    if (!match(cur->children[0], (*v.items)[idx], env)) return false;
                    ++idx;
                    cur = &cur->children[1];
                }
                if (cur->kind == NodeKind::Nil) return v.items->size() == idx;
                return match(*cur, list_from(*v.items, idx), env);
            }
            default: return false;
        }
    }

    bool match_head(const Node& clause, const std::vector<Value>& args, Env& env) {
        bool ok = true;
        for (int i = 0; i < clause.npatterns && ok; ++i)
            ok = match(clause.children[static_cast<size_t>(i)], args[static_cast<size_t>(i)], env);
        return ok;
    }

    // --- guard evaluation ---

    bool eval_guard(const Node& g, const Env& env) {
        try {
            Env local = env;
            Value v = eval(g, local);
            return is_true_atom(v);
        } catch (EvalAbort& a) {
            if (a.kind == ErrKind::StepLimit) throw;
            return false;
        }
    }

    // --- dispatch ---

    Value eval_body(const Node& clause, Env& env) {
        Value last;
        for (size_t i = static_cast<size_t>(clause.body_pos() - 1); i < clause.children.size();
             ++i)
            last = eval(clause.children[i], env);
        return last;
    }

    Value dispatch_clauses(const Node& owner, const std::vector<Value>& args, const Env& base,
                           ErrKind no_match) {
        DepthGuard depth(*this);
        for (const Node& cl : owner.children) {
            step();
            Env env = base;
            bool ok = match_head(cl, args, env);
            if (opts_.observer) opts_.observer->on_clause_head(cl, args, base, ok);
            if (!ok) continue;
            if (cl.has_guard && !eval_guard(*cl.guard(), env)) continue;
            return eval_body(cl, env);
        }
        throw EvalAbort{no_match};
    }

    Value dispatch_function(const Node& fn, const std::vector<Value>& args) {
        return dispatch_clauses(fn, args, Env{}, ErrKind::FunctionClause);
    }

    Value apply_closure(const Value& f, const std::vector<Value>& args) {
        if (f.kind != VKind::Closure) throw EvalAbort{ErrKind::Undef};
        const Node& lambda = *f.closure->lambda;
        if (lambda.children[0].npatterns != static_cast<int>(args.size()))
            throw EvalAbort{ErrKind::FunctionClause};
        return dispatch_clauses(lambda, args, f.closure->captured, ErrKind::FunctionClause);
    }

    // --- evaluation ---

    Value eval(const Node& n, Env& env) {
        step();
        Value result = eval_inner(n, env);
        if (opts_.observer) opts_.observer->on_eval(n, result);
        return result;
    }

    Value eval_inner(const Node& n, Env& env) {
        switch (n.kind) {
            case NodeKind::IntLit: return vint(n.ival);
            case NodeKind::AtomLit: return vatom(n.sval);
            case NodeKind::Var: {
                if (const Value* v = env_lookup(env, n.sval)) return *v;
                throw UnboundVariable(n.sval, n.span.line, n.span.col);
            }
            case NodeKind::Wildcard:
                throw Error("internal: wildcard evaluated as expression");
            case NodeKind::Nil: return vlist({});
            case NodeKind::Tuple: {
                std::vector<Value> elems;
                elems.reserve(n.children.size());
                for (const Node& c : n.children) elems.push_back(eval(c, env));
                return vtuple(std::move(elems));
            }
            case NodeKind::Cons: {
                Value h = eval(n.children[0], env);
                Value t = eval(n.children[1], env);
                if (t.kind != VKind::List) throw EvalAbort{ErrKind::Badmatch};
                std::vector<Value> elems;
                elems.reserve(t.items->size() + 1);
                elems.push_back(std::move(h));
                elems.insert(elems.end(), t.items->begin(), t.items->end());
                return vlist(std::move(elems));
            }
            case NodeKind::Match: {
                Value v = eval(n.children[1], env);
                bool ok;
                if (opts_.observer) {
                    Env before = env;
                    ok = match(n.children[0], v, env);
                    opts_.observer->on_match(n.children[0], v, before, ok);
                } else {
                    ok = match(n.children[0], v, env);
                }
                if (!ok) throw EvalAbort{ErrKind::Badmatch};
                return v;
            }
            case NodeKind::Seq: {
                // begin..end evaluates in the enclosing scope and exports.
                Value last;
                for (const Node& c : n.children) last = eval(c, env);
                return last;
            }
            case NodeKind::TraceEmit: {
                Value v = eval(n.children[0], env);
                trace_.push_back(v);
                return v;
            }
            case NodeKind::BinOp: return eval_binop(n, env);
            case NodeKind::Case: {
                Value scrut = eval(n.children[0], env);
                ErrKind no_match = n.dispatch_error == DispatchError::FunctionClause
                                       ? ErrKind::FunctionClause
                                       : ErrKind::CaseClause;
                for (size_t i = 1; i < n.children.size(); ++i) {
                    step();
                    const Node& cl = n.children[i];
                    Env local = env;
                    bool ok = match(cl.children[0], scrut, local);
                    if (opts_.observer) opts_.observer->on_clause_head(cl, {scrut}, env, ok);
                    if (!ok) continue;
                    if (cl.has_guard && !eval_guard(*cl.guard(), local)) continue;
                    return eval_body(cl, local);
                }
                throw EvalAbort{no_match};
            }
            case NodeKind::If: {
                for (const Node& cl : n.children) {
                    step();
                    if (opts_.observer) opts_.observer->on_if_clause(cl);
                    if (!eval_guard(*cl.guard(), env)) continue;
                    Env local = env;
                    return eval_body(cl, local);
                }
                throw EvalAbort{ErrKind::IfClause};
            }
            case NodeKind::Lambda: {
                Value v;
                v.kind = VKind::Closure;
                v.closure = std::make_shared<const ClosureData>(ClosureData{&n, env});
                return v;
            }
            case NodeKind::ListComp: {
                std::vector<Value> out;
                Env local = env;
                eval_lc(n, 1, local, out);
                return vlist(std::move(out));
            }
            case NodeKind::Call: {
                const Node& callee = n.children[0];
                std::vector<Value> args;
                args.reserve(n.children.size() - 1);
                if (callee.kind == NodeKind::AtomLit) {
                    for (size_t i = 1; i < n.children.size(); ++i)
                        args.push_back(eval(n.children[i], env));
                    int arity = static_cast<int>(args.size());
                    if (const Node* fn = lang::find_function(module_, callee.sval, arity))
                        return dispatch_function(*fn, args);
                    if (lang::is_builtin(callee.sval, arity))
                        return call_builtin(callee.sval, args);
                    throw EvalAbort{ErrKind::Undef};
                }
                Value f = eval(callee, env);
                for (size_t i = 1; i < n.children.size(); ++i)
                    args.push_back(eval(n.children[i], env));
                return apply_closure(f, args);
            }
            default:
                throw Error("internal: cannot evaluate node kind");
        }
    }

    void eval_lc(const Node& lc, size_t qi, Env& env, std::vector<Value>& out) {
        if (qi >= lc.children.size()) {
            out.push_back(eval(lc.children[0], env));
            return;
        }
        const Node& q = lc.children[qi];
        if (q.kind == NodeKind::Generator) {
            Value src = eval(q.children[1], env);
            if (src.kind != VKind::List) throw EvalAbort{ErrKind::Badmatch};
            for (const Value& elem : *src.items) {
                step();
                Env local = env;
                bool ok = match(q.children[0], elem, local);
                if (opts_.observer) opts_.observer->on_match(q.children[0], elem, env, ok);
                if (!ok) continue;  // non-matching elements are skipped
                eval_lc(lc, qi + 1, local, out);
            }
            return;
        }
        Value keep = eval(q, env);
        if (is_true_atom(keep)) {
            eval_lc(lc, qi + 1, env, out);
            return;
        }
        if (is_false_atom(keep)) return;
        throw EvalAbort{ErrKind::Badmatch};
    }

    Value eval_binop(const Node& n, Env& env) {
        BinOpKind op = n.op;
        // Short-circuit forms check only the left operand's type.
        if (op == BinOpKind::AndAlso || op == BinOpKind::OrElse) {
            Value l = eval(n.children[0], env);
            if (!is_bool(l)) throw EvalAbort{ErrKind::Badarith};
            bool lv = is_true_atom(l);
            if (op == BinOpKind::AndAlso && !lv) return vbool(false);
            if (op == BinOpKind::OrElse && lv) return vbool(true);
            return eval(n.children[1], env);
        }
        Value l = eval(n.children[0], env);
        Value r = eval(n.children[1], env);
        auto arith = [&](auto f) {
            if (l.kind != VKind::Int || r.kind != VKind::Int)
                throw EvalAbort{ErrKind::Badarith};
            return vint(f(l.i, r.i));
        };
        auto ordered = [&](auto f) {
            if (contains_closure(l) || contains_closure(r)) throw EvalAbort{ErrKind::Badarith};
            return vbool(f(value_compare(l, r)));
        };
        switch (op) {
            case BinOpKind::Add: return arith([](auto a, auto b) { return a + b; });
            case BinOpKind::Sub: return arith([](auto a, auto b) { return a - b; });
            case BinOpKind::Mul: return arith([](auto a, auto b) { return a * b; });
            case BinOpKind::DivSlash:
            case BinOpKind::Div:
                return arith([](auto a, auto b) {
                    if (b == 0) throw EvalAbort{ErrKind::Badarith};
                    return a / b;
                });
            case BinOpKind::Rem:
                return arith([](auto a, auto b) {
                    if (b == 0) throw EvalAbort{ErrKind::Badarith};
                    return a % b;
                });
            case BinOpKind::Eq:
            case BinOpKind::ExactEq: return vbool(value_equal(l, r));
            case BinOpKind::Ne:
            case BinOpKind::ExactNe: return vbool(!value_equal(l, r));
            case BinOpKind::Lt: return ordered([](int c) { return c < 0; });
            case BinOpKind::Gt: return ordered([](int c) { return c > 0; });
            case BinOpKind::Le: return ordered([](int c) { return c <= 0; });
            case BinOpKind::Ge: return ordered([](int c) { return c >= 0; });
            case BinOpKind::And:
            case BinOpKind::Or: {
                if (!is_bool(l) || !is_bool(r)) throw EvalAbort{ErrKind::Badarith};
                bool res = op == BinOpKind::And ? (is_true_atom(l) && is_true_atom(r))
                                                : (is_true_atom(l) || is_true_atom(r));
                return vbool(res);
            }
            default: throw Error("internal: unhandled operator");
        }
    }

    // --- builtins ---

    Value call_builtin(const std::string& name, const std::vector<Value>& args) {
        DepthGuard depth(*this);
        auto want_list = [&](const Value& v) -> const std::vector<Value>& {
            if (v.kind != VKind::List) throw EvalAbort{ErrKind::FunctionClause};
            return *v.items;
        };
        if (name == "length") return vint(static_cast<std::int64_t>(want_list(args[0]).size()));
        if (name == "reverse") {
            std::vector<Value> out = want_list(args[0]);
            std::reverse(out.begin(), out.end());
            return vlist(std::move(out));
        }
        if (name == "sort") {
            std::vector<Value> out = want_list(args[0]);
            for (const Value& v : out)
                if (contains_closure(v)) throw EvalAbort{ErrKind::Badarith};
            std::stable_sort(out.begin(), out.end(),
                             [](const Value& a, const Value& b) { return value_compare(a, b) < 0; });
            return vlist(std::move(out));
        }
        if (name == "integer_to_list") {
            if (args[0].kind != VKind::Int) throw EvalAbort{ErrKind::FunctionClause};
            std::string digits = std::to_string(args[0].i);
            std::vector<Value> out;
            out.reserve(digits.size());
            for (char c : digits) out.push_back(vint(static_cast<std::int64_t>(c)));
            return vlist(std::move(out));
        }
        if (name == "member") {
            for (const Value& v : want_list(args[1]))
                if (value_equal(v, args[0])) return vbool(true);
            return vbool(false);
        }
        if (name == "map") {
            if (args[0].kind != VKind::Closure) throw EvalAbort{ErrKind::FunctionClause};
            std::vector<Value> out;
            const auto& in = want_list(args[1]);
            out.reserve(in.size());
            for (const Value& v : in) {
                step();
                out.push_back(apply_closure(args[0], {v}));
            }
            return vlist(std::move(out));
        }
        if (name == "foldl") {
            if (args[0].kind != VKind::Closure) throw EvalAbort{ErrKind::FunctionClause};
            Value acc = args[1];
            for (const Value& v : want_list(args[2])) {
                step();
                acc = apply_closure(args[0], {v, acc});
            }
            return acc;
        }
        if (name == "sum") {
            std::int64_t total = 0;
            for (const Value& v : want_list(args[0])) {
                if (v.kind != VKind::Int) throw EvalAbort{ErrKind::Badarith};
                total += v.i;
            }
            return vint(total);
        }
        throw EvalAbort{ErrKind::Undef};
    }
};

inline Outcome run_call(const Node& module, const std::string& name,
                        const std::vector<Value>& args, EvalOptions opts = {}) {
    Interp in(module, opts);
    return in.call(name, args);
}

// Runs fn on a thread with a large stack. Deeply recursive programs close to
// the step budget can exceed a default 8MB stack; tests and the CLI route
// heavy evaluations through here.
inline void run_with_stack(std::function<void()> fn, size_t stack_bytes = 512u << 20) {
    struct Ctx {
        std::function<void()>* fn;
        std::exception_ptr err;
    } ctx{&fn, nullptr};
    pthread_attr_t attr;
    pthread_attr_init(&attr);
    pthread_attr_setstacksize(&attr, stack_bytes);
    pthread_t tid;
    auto entry = [](void* p) -> void* {
        Ctx* c = static_cast<Ctx*>(p);
        try {
            (*c->fn)();
        } catch (...) {
            c->err = std::current_exception();
        }
        return nullptr;
    };
    if (pthread_create(&tid, &attr, entry, &ctx) != 0) {
        pthread_attr_destroy(&attr);
        fn();  // fall back to the current stack
        return;
    }
    pthread_join(tid, nullptr);
    pthread_attr_destroy(&attr);
    if (ctx.err) std::rethrow_exception(ctx.err);
}

}  // namespace evocheck::interp
