#pragma once

// Suite replay and trace comparison. The suite's stored traces are the old
// version's expected behavior; every input is replayed against the new
// version (instrumented at its own point of interest) and the trace pair is
// classified: Match, LengthDiff (different element counts) or ValueDiff
// (same count, different sequence). The old version is replayed too, only to
// catch runs whose traces agree but whose final outcomes differ; those are
// warnings, not mismatches, since the comparison is defined over traces.

#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "evocheck/ast.hpp"
#include "evocheck/errors.hpp"
#include "evocheck/generate.hpp"
#include "evocheck/instrument.hpp"
#include "evocheck/interp.hpp"
#include "evocheck/poi.hpp"
#include "evocheck/tgen.hpp"
#include "evocheck/value.hpp"

namespace evocheck::compare {

using gen::Itc;
using interp::Trace;
using lang::Node;

enum class CompareKind { Match, LengthDiff, ValueDiff };

inline CompareKind compare_traces(const Trace& oldt, const Trace& newt) {
    if (oldt.size() != newt.size()) return CompareKind::LengthDiff;
    for (size_t i = 0; i < oldt.size(); ++i)
        if (!interp::value_equal(oldt[i], newt[i])) return CompareKind::ValueDiff;
    return CompareKind::Match;
}

struct Mismatch {
    Itc itc;
    Trace old_trace;
    Trace new_trace;
    CompareKind kind = CompareKind::Match;
    std::string note;  // extra diagnostic, e.g. function absent in new version
};

struct Report {
    std::string fname;
    int arity = 0;
    std::string old_module;
    std::string new_module;
    inst::Poi poi_old;
    inst::Poi poi_new;
    size_t generated = 0;
    size_t mismatching = 0;
    std::vector<Mismatch> mismatches;  // suite order
    std::string results_path;
    std::vector<std::string> warn_lines;

    const Mismatch* first_error() const { return mismatches.empty() ? nullptr : &mismatches[0]; }
};

// 100 * mismatching / generated, truncated (not rounded) to two decimals.
// Integer arithmetic keeps it exact: 22/251 -> "8.76".
inline std::string percentage_text(size_t mismatching, size_t generated) {
    if (generated == 0) return "0.00";
    unsigned long long scaled = 10000ull * mismatching / generated;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%llu.%02llu", scaled / 100, scaled % 100);
    return buf;
}

struct ComparisonOptions {
    interp::EvalOptions eval;
    std::string results_dir = "./results";
};

// Replays the suite against both instrumented versions. Stored traces are
// authoritative for the old side; the old replay only feeds the
// outcome-divergence warning. A function missing from the new version forces
// every replay into a mismatch carrying a diagnostic.
inline Report run_comparison(const Node& old_module, const Node& new_module,
                             const inst::Poi& poi_old, const inst::Poi& poi_new,
                             const std::string& fname, int arity,
                             const std::vector<tgen::SuiteLine>& suite,
                             const ComparisonOptions& opts = {}) {
    Report rep;
    rep.fname = fname;
    rep.arity = arity;
    rep.old_module = old_module.sval;
    rep.new_module = new_module.sval;
    rep.poi_old = poi_old;
    rep.poi_new = poi_new;
    rep.generated = suite.size();
    rep.results_path = opts.results_dir + "/" + fname + "_" + std::to_string(arity) + ".txt";

    Node old_inst = inst::instrument(old_module, inst::locate_poi(old_module, poi_old));
    Node new_inst = inst::instrument(new_module, inst::locate_poi(new_module, poi_new));
    interp::Interp old_runner(old_inst, opts.eval);
    interp::Interp new_runner(new_inst, opts.eval);

    bool absent = lang::find_function(new_module, fname, arity) == nullptr;
    std::string absent_note;
    if (absent)
        absent_note = fname + "/" + std::to_string(arity) + " not found in " + new_module.sval;

    for (const auto& line : suite) {
        interp::Outcome old_out = tgen::trace_of(old_runner, line.itc);
        interp::Outcome new_out = tgen::trace_of(new_runner, line.itc);
        CompareKind kind = compare_traces(line.trace, new_out.trace);
        bool is_mismatch = kind != CompareKind::Match || absent;
        if (is_mismatch) {
            Mismatch mm;
            mm.itc = line.itc;
            mm.old_trace = line.trace;
            mm.new_trace = new_out.trace;
            mm.kind = kind == CompareKind::Match ? CompareKind::ValueDiff : kind;
            mm.note = absent_note;
            rep.mismatches.push_back(std::move(mm));
            ++rep.mismatching;
        } else if (old_out.err != new_out.err ||
                   (old_out.err == interp::ErrKind::None &&
                    !interp::value_equal(old_out.value, new_out.value))) {
            rep.warn_lines.push_back(
                "WARN: " + gen::serialize_itc(line.itc) +
                " produces identical traces but different outcomes: " +
                rep.old_module + "=" + interp::serialize_outcome(old_out) + " " +
                rep.new_module + "=" + interp::serialize_outcome(new_out));
        }
    }
    return rep;
}

inline const char* kDashes = "----------------------------";

inline std::string trace_text(const Trace& t) {
    return interp::serialize_trace(t);
}

// Stdout report. Zero mismatches print the identical-traces banner; otherwise
// the counts, the results-file path, and the first mismatching call with both
// traces labeled by module and point of interest.
inline std::string render_report(const Report& rep) {
    std::string out;
    out += "Function: " + rep.fname + "/" + std::to_string(rep.arity) + "\n";
    out += std::string(kDashes) + "\n";
    out += "Generated test cases: " + std::to_string(rep.generated) + "\n";
    if (rep.mismatching == 0) {
        out += "Both versions of the program generate identical traces for the "
               "point of interest\n";
    } else {
        out += "Mismatching test cases: " + std::to_string(rep.mismatching) + " (" +
               percentage_text(rep.mismatching, rep.generated) + "%)\n";
        out += "All mismatching results were saved at: " + rep.results_path + "\n";
        out += "--- First error detected ---\n";
        const Mismatch& mm = *rep.first_error();
        out += "Call: " + gen::serialize_itc(mm.itc) + "\n";
        out += rep.old_module + " trace " + rep.poi_old.label() + ": " +
               trace_text(mm.old_trace) + "\n";
        out += "\n";
        out += rep.new_module + " trace " + rep.poi_new.label() + ": " +
               trace_text(mm.new_trace) + "\n";
        if (!mm.note.empty()) out += "note: " + mm.note + "\n";
    }
    out += std::string(kDashes) + "\n";
    for (const auto& w : rep.warn_lines) out += w + "\n";
    return out;
}

// Results file: one block per mismatch, in suite order.
inline std::string render_results(const Report& rep) {
    std::string out;
    for (const Mismatch& mm : rep.mismatches) {
        out += "Call: " + gen::serialize_itc(mm.itc) + "\n";
        out += "\n";
        out += "old trace " + rep.poi_old.label() + ": " + trace_text(mm.old_trace) + "\n";
        out += "\n";
        out += "new trace " + rep.poi_new.label() + ": " + trace_text(mm.new_trace) + "\n";
        if (!mm.note.empty()) out += "note: " + mm.note + "\n";
        out += std::string(kDashes) + "\n";
    }
    return out;
}

inline void write_results(const Report& rep) {
    std::ofstream f(rep.results_path, std::ios::binary);
    if (!f) throw IoError("cannot write " + rep.results_path);
    f << render_results(rep);
    if (!f) throw IoError("short write to " + rep.results_path);
}

}  // namespace evocheck::compare
