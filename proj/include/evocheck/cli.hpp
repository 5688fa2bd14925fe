#pragma once

// Command-line front end. One -f group generates and saves test suites for
// the chosen functions; two -f groups additionally replay the suite against
// the second version and report trace mismatches. All heavy evaluation runs
// on a large-stack thread so deep recursion in checked programs cannot crash
// the tool.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "evocheck/ast.hpp"
#include "evocheck/compare.hpp"
#include "evocheck/errors.hpp"
#include "evocheck/generate.hpp"
#include "evocheck/instrument.hpp"
#include "evocheck/interp.hpp"
#include "evocheck/parser.hpp"
#include "evocheck/poi.hpp"
#include "evocheck/tgen.hpp"
#include "evocheck/types.hpp"

namespace evocheck::cli {

struct PoiGroup {
    std::string file;
    int line = 0;
    std::string var;
    int occurrence = 1;
    bool has_line = false;
    bool has_var = false;

    bool operator==(const PoiGroup&) const = default;
};

struct CliConfig {
    std::vector<PoiGroup> groups;
    std::vector<std::pair<std::string, int>> funs;
    bool funs_given = false;
    std::optional<long> timeout_s;
    std::optional<long> tests;
    std::uint64_t seed = 0;
    int size = 10;
    int initial_budget = 32;
    std::string results_dir = "./results";
    bool dump_types = false;
    bool dump_config = false;

    bool operator==(const CliConfig&) const = default;
};

inline const char* synopsis() {
    return
        "usage: evocheck -f FILE -li LINE -var NAME [-oc K]\n"
        "                [-f FILE -li LINE -var NAME [-oc K]]\n"
        "                [-funs f/a[,g/b...]] [-to SECONDS] [--tests N] [--seed S]\n"
        "                [--size Z] [--initial-budget B] [--results DIR]\n"
        "                [--dump-types] [--dump-config]\n"
        "\n"
        "One -f group generates test suites for the functions of that file at the\n"
        "given point of interest (line, variable, occurrence). A second -f group\n"
        "compares the two versions' traces. At least one of --tests or -to is\n"
        "required. Default functions: those with spec declarations, else all.\n";
}

namespace detail {

inline long parse_long(const std::string& flag, const std::string& text) {
    size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(text, &pos);
    } catch (...) {
        throw Error(flag + " expects an integer, got '" + text + "'");
    }
    if (pos != text.size()) throw Error(flag + " expects an integer, got '" + text + "'");
    return v;
}

inline std::pair<std::string, int> parse_fun(const std::string& text) {
    size_t slash = text.rfind('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 == text.size())
        throw Error("-funs expects name/arity entries, got '" + text + "'");
    int arity = static_cast<int>(parse_long("-funs", text.substr(slash + 1)));
    if (arity < 0) throw Error("-funs arity must be non-negative in '" + text + "'");
    return {text.substr(0, slash), arity};
}

}  // namespace detail

inline CliConfig parse_args(const std::vector<std::string>& args) {
    CliConfig cfg;
    auto need = [&](size_t i, const std::string& flag) -> const std::string& {
        if (i + 1 >= args.size()) throw Error(flag + " expects a value");
        return args[i + 1];
    };
    auto current_group = [&]() -> PoiGroup& {
        if (cfg.groups.empty()) throw Error("-li/-var/-oc must follow a -f FILE");
        return cfg.groups.back();
    };
    for (size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "-f") {
            if (cfg.groups.size() == 2) throw Error("at most two -f groups are supported");
            cfg.groups.push_back(PoiGroup{});
            cfg.groups.back().file = need(i, a);
            ++i;
        } else if (a == "-li") {
            current_group().line = static_cast<int>(detail::parse_long(a, need(i, a)));
            current_group().has_line = true;
            ++i;
        } else if (a == "-var") {
            current_group().var = need(i, a);
            current_group().has_var = true;
            ++i;
        } else if (a == "-oc") {
            current_group().occurrence = static_cast<int>(detail::parse_long(a, need(i, a)));
            ++i;
        } else if (a == "-funs") {
            cfg.funs_given = true;
            cfg.funs.clear();
            std::string list = need(i, a);
            size_t start = 0;
            while (start <= list.size()) {
                size_t comma = list.find(',', start);
                std::string item = list.substr(
                    start, comma == std::string::npos ? std::string::npos : comma - start);
                if (item.empty()) throw Error("-funs has an empty entry");
                cfg.funs.push_back(detail::parse_fun(item));
                if (comma == std::string::npos) break;
                start = comma + 1;
            }
            ++i;
        } else if (a == "-to") {
            cfg.timeout_s = detail::parse_long(a, need(i, a));
            ++i;
        } else if (a == "--tests") {
            cfg.tests = detail::parse_long(a, need(i, a));
            ++i;
        } else if (a == "--seed") {
            cfg.seed = static_cast<std::uint64_t>(detail::parse_long(a, need(i, a)));
            ++i;
        } else if (a == "--size") {
            cfg.size = static_cast<int>(detail::parse_long(a, need(i, a)));
            ++i;
        } else if (a == "--initial-budget") {
            cfg.initial_budget = static_cast<int>(detail::parse_long(a, need(i, a)));
            ++i;
        } else if (a == "--results") {
            cfg.results_dir = need(i, a);
            ++i;
        } else if (a == "--dump-types") {
            cfg.dump_types = true;
        } else if (a == "--dump-config") {
            cfg.dump_config = true;
        } else {
            throw Error("unknown flag '" + a + "'");
        }
    }
    if (cfg.groups.empty()) throw Error("at least one -f FILE group is required");
    for (const PoiGroup& g : cfg.groups) {
        if (!g.has_line) throw Error("-f " + g.file + " is missing -li LINE");
        if (!g.has_var) throw Error("-f " + g.file + " is missing -var NAME");
        if (g.line <= 0) throw Error("-li must be positive for " + g.file);
        if (g.occurrence <= 0) throw Error("-oc must be positive for " + g.file);
    }
    if (!cfg.tests && !cfg.timeout_s) throw Error("one of --tests or -to is required");
    if (cfg.tests && *cfg.tests <= 0) throw Error("--tests must be positive");
    if (cfg.timeout_s && *cfg.timeout_s <= 0) throw Error("-to must be positive");
    if (cfg.size < 0) throw Error("--size must be non-negative");
    if (cfg.initial_budget <= 0) throw Error("--initial-budget must be positive");
    return cfg;
}

// Argv-style rendering; parse_args(dump) == cfg.
inline std::string dump_config_text(const CliConfig& cfg) {
    std::string out;
    for (const PoiGroup& g : cfg.groups) {
        out += "-f " + g.file + " -li " + std::to_string(g.line) + " -var " + g.var + " -oc " +
               std::to_string(g.occurrence) + " ";
    }
    if (cfg.funs_given) {
        out += "-funs ";
        for (size_t i = 0; i < cfg.funs.size(); ++i) {
            if (i) out += ",";
            out += cfg.funs[i].first + "/" + std::to_string(cfg.funs[i].second);
        }
        out += " ";
    }
    if (cfg.timeout_s) out += "-to " + std::to_string(*cfg.timeout_s) + " ";
    if (cfg.tests) out += "--tests " + std::to_string(*cfg.tests) + " ";
    out += "--seed " + std::to_string(cfg.seed) + " ";
    out += "--size " + std::to_string(cfg.size) + " ";
    out += "--initial-budget " + std::to_string(cfg.initial_budget) + " ";
    out += "--results " + cfg.results_dir;
    if (cfg.dump_types) out += " --dump-types";
    if (cfg.dump_config) out += " --dump-config";
    out += "\n";
    return out;
}

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// Functions under test: explicit -funs, else spec-annotated ones, else all.
inline std::vector<std::pair<std::string, int>> resolve_funs(const CliConfig& cfg,
                                                             const lang::Node& module) {
    if (cfg.funs_given) {
        for (const auto& [name, arity] : cfg.funs)
            if (!lang::find_function(module, name, arity))
                throw Error(name + "/" + std::to_string(arity) + " not found in " + module.sval);
        return cfg.funs;
    }
    std::vector<std::pair<std::string, int>> out;
    for (size_t i = 0; i < static_cast<size_t>(module.ival); ++i) {
        const lang::Node& s = module.children[i];
        if (lang::find_function(module, s.sval, static_cast<int>(s.ival)))
            out.emplace_back(s.sval, static_cast<int>(s.ival));
    }
    if (out.empty())
        for (size_t i = static_cast<size_t>(module.ival); i < module.children.size(); ++i) {
            const lang::Node& f = module.children[i];
            out.emplace_back(f.sval, static_cast<int>(f.ival));
        }
    return out;
}

inline int run_inner(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
    lang::Node old_module = lang::parse_file(cfg.groups[0].file);
    const PoiGroup& og = cfg.groups[0];
    inst::Poi poi_old{old_module.sval, og.line, og.var, og.occurrence};
    auto old_path = inst::locate_poi(old_module, poi_old);
    lang::Node old_inst = inst::instrument(old_module, old_path);

    auto funs = resolve_funs(cfg, old_module);
    if (funs.empty()) throw Error("no functions to test in " + old_module.sval);

    if (cfg.dump_types) {
        for (const auto& [name, arity] : funs) {
            const lang::Node* fn = lang::find_function(old_module, name, arity);
            auto cts = types::infer_clause_types(old_module, *fn);
            for (size_t ci = 0; ci < cts.size(); ++ci) {
                out << name << "/" << arity << " clause " << (ci + 1) << ": ";
                if (cts[ci].empty) {
                    out << "uninhabited\n";
                    continue;
                }
                out << "(";
                for (size_t i = 0; i < cts[ci].params.size(); ++i) {
                    if (i) out << ", ";
                    out << types::to_string(cts[ci].params[i]);
                }
                out << ")\n";
            }
        }
        return 0;
    }

    std::optional<std::chrono::steady_clock::time_point> deadline;
    if (cfg.timeout_s)
        deadline = std::chrono::steady_clock::now() + std::chrono::seconds(*cfg.timeout_s);

    bool comparing = cfg.groups.size() == 2;
    lang::Node new_module;
    inst::Poi poi_new;
    if (comparing) {
        new_module = lang::parse_file(cfg.groups[1].file);
        const PoiGroup& ng = cfg.groups[1];
        poi_new = inst::Poi{new_module.sval, ng.line, ng.var, ng.occurrence};
        inst::locate_poi(new_module, poi_new);  // fail before any generation
    }

    std::filesystem::create_directories("suite");

    bool any_mismatch = false;
    for (const auto& [name, arity] : funs) {
        gen::Rng rng(cfg.seed ^ detail::fnv1a(name + "/" + std::to_string(arity)));
        tgen::TgenOptions topts;
        topts.top = cfg.tests ? static_cast<size_t>(*cfg.tests) : size_t{1} << 50;
        topts.size = cfg.size;
        topts.initial_budget = static_cast<size_t>(cfg.initial_budget);
        topts.deadline = deadline;
        auto res = tgen::run_tgen(old_module, old_inst, name, arity, rng, topts);
        for (const auto& w : res.warnings) err << "warning: " << w << "\n";

        std::string suite_path = "suite/" + name + "_" + std::to_string(arity) + ".suite";
        tgen::save_suite(suite_path, res.map);

        if (!comparing) {
            out << "Function: " << name << "/" << arity << "\n";
            out << compare::kDashes << "\n";
            out << "Generated test cases: " << tgen::stored_count(res.map) << "\n";
            out << "Suite saved at: " << suite_path << "\n";
            out << compare::kDashes << "\n";
            continue;
        }

        auto suite = tgen::parse_suite(tgen::render_suite(res.map), suite_path);
        compare::ComparisonOptions copts;
        copts.results_dir = cfg.results_dir;
        auto report = compare::run_comparison(old_module, new_module, poi_old, poi_new, name,
                                              arity, suite, copts);
        if (report.mismatching > 0) {
            std::filesystem::create_directories(cfg.results_dir);
            compare::write_results(report);
            any_mismatch = true;
        }
        out << compare::render_report(report);
    }
    return any_mismatch ? 1 : 0;
}

}  // namespace detail

// Exit code 0: ran, zero mismatches. 1: mismatches found. 2: usage or IO
// errors. Heavy work runs on a large-stack thread.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CliConfig cfg;
    try {
        cfg = parse_args(args);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n" << synopsis();
        return 2;
    }
    if (cfg.dump_config) {
        out << dump_config_text(cfg);
        return 0;
    }
    int code = 2;
    try {
        interp::run_with_stack([&] { code = detail::run_inner(cfg, out, err); });
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return code;
}

}  // namespace evocheck::cli
