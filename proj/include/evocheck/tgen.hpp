#pragma once

// Trace-directed input growth. Starting from the per-clause initial inputs,
// the loop keeps one input pending at the front, stores the first pending
// input whose trace is new, and enqueues that input's mutants; when nothing
// pending is novel the pending inputs are folded into their existing trace
// buckets and a fresh input reseeds the queue. The map is keyed by the
// serialized trace, so "novel" is exact. Stops when the stored-input target,
// the soft deadline, or the iteration cap is reached.

#include <chrono>
#include <deque>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "evocheck/ast.hpp"
#include "evocheck/errors.hpp"
#include "evocheck/generate.hpp"
#include "evocheck/instrument.hpp"
#include "evocheck/interp.hpp"
#include "evocheck/types.hpp"
#include "evocheck/value.hpp"

namespace evocheck::tgen {

using gen::Itc;
using interp::Outcome;
using interp::Trace;
using lang::Node;

struct TraceEntry {
    Trace trace;
    std::vector<Itc> itcs;
};

// Keyed by serialized trace; deterministic iteration order.
using TraceMap = std::map<std::string, TraceEntry>;

enum class Status { Completed, TimedOut, Exhausted };

inline const char* status_name(Status s) {
    switch (s) {
        case Status::Completed: return "completed";
        case Status::TimedOut: return "timed out";
        case Status::Exhausted: return "exhausted";
    }
    return "?";
}

struct TgenOptions {
    size_t top = 100;          // stored-input target
    int size = 10;             // value-size knob
    size_t initial_budget = 32;
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct TgenResult {
    TraceMap map;
    Status status = Status::Completed;
    size_t iterations = 0;
    std::vector<std::string> warnings;
};

inline size_t stored_count(const TraceMap& map) {
    size_t n = 0;
    for (const auto& [k, e] : map) n += e.itcs.size();
    return n;
}

// Inputs whose trace is non-empty actually reached the point of interest.
inline size_t reached_count(const TraceMap& map) {
    size_t n = stored_count(map);
    auto it = map.find("[]");
    if (it != map.end()) n -= it->second.itcs.size();
    return n;
}

// Runs one input against the instrumented module and returns its outcome
// (trace included). Rejects traces containing closures: they have no portable
// text form, so such a point of interest cannot be checked.
inline Outcome trace_of(interp::Interp& instrumented, const Itc& itc) {
    Outcome out = instrumented.call(itc.fname, itc.args);
    for (const auto& v : out.trace)
        if (interp::contains_closure(v))
            throw Error("trace of " + gen::serialize_itc(itc) +
                        " contains a function value; pick a point of interest "
                        "that holds a comparable value");
    return out;
}

inline TgenResult run_tgen(const Node& module, const Node& instrumented_module,
                           const std::string& fname, int arity, gen::Rng& rng,
                           TgenOptions opts = {}) {
    TgenResult res;
    const Node* fn = lang::find_function(module, fname, arity);
    if (!fn) throw Error("unknown function " + fname + "/" + std::to_string(arity));
    auto cts = types::infer_clause_types(module, *fn);
    std::vector<size_t> live;
    for (size_t ci = 0; ci < cts.size(); ++ci)
        if (!cts[ci].empty) live.push_back(ci);

    interp::Interp runner(instrumented_module);

    auto initial = gen::initial_itcs(module, fname, arity, rng, opts.size,
                                     static_cast<int>(opts.initial_budget));
    res.warnings = initial.warnings;
    if (initial.itcs.empty()) {
        res.status = Status::Exhausted;
        res.warnings.push_back(fname + "/" + std::to_string(arity) +
                               ": no clause admits any input; nothing to run");
        return res;
    }

    std::deque<Itc> pending(initial.itcs.begin(), initial.itcs.end());
    std::map<std::string, std::string> trace_cache;  // serialized itc -> trace key
    std::set<std::string> stored;                    // serialized itcs already in map

    auto key_of = [&](const Itc& itc) -> const std::string& {
        std::string sk = gen::serialize_itc(itc);
        auto it = trace_cache.find(sk);
        if (it == trace_cache.end()) {
            Outcome out = trace_of(runner, itc);
            it = trace_cache.emplace(sk, interp::serialize_trace(out.trace)).first;
            // First sighting of this trace key records the trace itself.
            auto& entry = res.map[it->second];
            if (entry.trace.empty() && !out.trace.empty()) entry.trace = out.trace;
        }
        return it->second;
    };
    auto store = [&](const Itc& itc, const std::string& key) {
        if (!stored.insert(gen::serialize_itc(itc)).second) return;
        res.map[key].itcs.push_back(itc);
    };

    size_t max_iterations = opts.top * 100;
    while (true) {
        ++res.iterations;
        if (stored_count(res.map) >= opts.top) {
            res.status = Status::Completed;
            break;
        }
        if (opts.deadline && std::chrono::steady_clock::now() >= *opts.deadline) {
            res.status = Status::TimedOut;
            break;
        }
        if (res.iterations > max_iterations) {
            res.status = Status::Exhausted;
            break;
        }

        // First pending input with a novel trace is kept and mutated.
        bool advanced = false;
        for (size_t i = 0; i < pending.size(); ++i) {
            const std::string& key = key_of(pending[i]);
            bool novel = res.map[key].itcs.empty();
            if (!novel) continue;
            Itc chosen = pending[i];
            pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(i));
            store(chosen, key);
            for (auto& m : gen::mut(chosen, module, cts, rng, opts.size))
                pending.push_back(std::move(m));
            advanced = true;
            break;
        }
        if (advanced) continue;

        // Nothing pending is novel: fold pending into their buckets and
        // reseed with one fresh input from a random reachable clause.
        for (const Itc& itc : pending) store(itc, key_of(itc));
        pending.clear();
        if (live.empty()) {
            res.status = Status::Exhausted;
            break;
        }
        size_t ci = live[rng.below(live.size())];
        pending.push_back(
            Itc{fname, gen::generate_clause_args(fn->children[ci], cts[ci], rng, opts.size)});
    }
    // Drop trace keys that were observed but never kept an input.
    for (auto it = res.map.begin(); it != res.map.end();)
        it = it->second.itcs.empty() ? res.map.erase(it) : std::next(it);
    return res;
}

// --- suite files ---
//
// One line per stored input:
//   itc: main(4,1) -> trace: [false,false,false,true]
// Entries are written in map order (sorted by trace text), inputs in
// insertion order; load/save round-trips bit-exactly.

struct SuiteLine {
    Itc itc;
    Trace trace;
};

inline std::string render_suite(const TraceMap& map) {
    std::string out;
    for (const auto& [key, entry] : map)
        for (const Itc& itc : entry.itcs)
            out += "itc: " + gen::serialize_itc(itc) + " -> trace: " + key + "\n";
    return out;
}

inline void save_suite(const std::string& path, const TraceMap& map) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path);
    f << render_suite(map);
    if (!f) throw IoError("short write to " + path);
}

inline std::vector<SuiteLine> parse_suite(const std::string& text, const std::string& where) {
    std::vector<SuiteLine> out;
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::string itc_tag = "itc: ";
        const std::string sep = " -> trace: ";
        size_t sep_at = line.find(sep);
        if (line.rfind(itc_tag, 0) != 0 || sep_at == std::string::npos)
            throw IoError(where + ":" + std::to_string(lineno) + ": malformed suite line");
        SuiteLine sl;
        sl.itc = gen::parse_itc(line.substr(itc_tag.size(), sep_at - itc_tag.size()));
        std::string tr = line.substr(sep_at + sep.size());
        if (tr.size() < 2 || tr.front() != '[' || tr.back() != ']')
            throw IoError(where + ":" + std::to_string(lineno) + ": malformed trace");
        std::string inner = tr.substr(1, tr.size() - 2);
        if (!inner.empty()) sl.trace = interp::parse_value_list(inner);
        out.push_back(std::move(sl));
    }
    return out;
}

inline std::vector<SuiteLine> load_suite(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_suite(ss.str(), path);
}

}  // namespace evocheck::tgen
