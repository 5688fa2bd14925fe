#pragma once

// Runtime values: integers, atoms, tuples, lists, closures. Tuples and lists
// share immutable storage so copying a Value is cheap; the interpreter never
// mutates a constructed value.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "evocheck/errors.hpp"

namespace evocheck::interp {

enum class VKind { Int, Atom, Tuple, List, Closure };

struct ClosureData;  // completed in interp.hpp

struct Value {
    VKind kind = VKind::Int;
    std::int64_t i = 0;
    std::string atom;
    std::shared_ptr<const std::vector<Value>> items;     // Tuple, List
    std::shared_ptr<const ClosureData> closure;
};

inline Value vint(std::int64_t i) {
    Value v;
    v.kind = VKind::Int;
    v.i = i;
    return v;
}

inline Value vatom(std::string name) {
    Value v;
    v.kind = VKind::Atom;
    v.atom = std::move(name);
    return v;
}

inline Value vbool(bool b) { return vatom(b ? "true" : "false"); }

inline Value vtuple(std::vector<Value> elems) {
    Value v;
    v.kind = VKind::Tuple;
    v.items = std::make_shared<const std::vector<Value>>(std::move(elems));
    return v;
}

inline Value vlist(std::vector<Value> elems) {
    Value v;
    v.kind = VKind::List;
    v.items = std::make_shared<const std::vector<Value>>(std::move(elems));
    return v;
}

inline bool is_true_atom(const Value& v) { return v.kind == VKind::Atom && v.atom == "true"; }
inline bool is_false_atom(const Value& v) { return v.kind == VKind::Atom && v.atom == "false"; }
inline bool is_bool(const Value& v) { return is_true_atom(v) || is_false_atom(v); }

inline bool contains_closure(const Value& v) {
    if (v.kind == VKind::Closure) return true;
    if (v.items)
        for (const Value& e : *v.items)
            if (contains_closure(e)) return true;
    return false;
}

inline bool value_equal(const Value& a, const Value& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case VKind::Int: return a.i == b.i;
        case VKind::Atom: return a.atom == b.atom;
        case VKind::Closure: return a.closure == b.closure;
        case VKind::Tuple:
        case VKind::List: {
            if (a.items->size() != b.items->size()) return false;
            for (size_t i = 0; i < a.items->size(); ++i)
                if (!value_equal((*a.items)[i], (*b.items)[i])) return false;
            return true;
        }
    }
    return false;
}

// Total order over closure-free values: integer < atom < tuple < list.
// Tuples order by arity first, then elementwise; lists elementwise over the
// common prefix, then by length. Callers must rule out closures first.
inline int value_compare(const Value& a, const Value& b) {
    auto rank = [](VKind k) {
        switch (k) {
            case VKind::Int: return 0;
            case VKind::Atom: return 1;
            case VKind::Tuple: return 2;
            case VKind::List: return 3;
            case VKind::Closure: return 4;
        }
        return 5;
    };
    if (rank(a.kind) != rank(b.kind)) return rank(a.kind) < rank(b.kind) ? -1 : 1;
    switch (a.kind) {
        case VKind::Int: return a.i < b.i ? -1 : (a.i > b.i ? 1 : 0);
        case VKind::Atom: return a.atom.compare(b.atom) < 0 ? -1 : (a.atom == b.atom ? 0 : 1);
        case VKind::Tuple: {
            if (a.items->size() != b.items->size())
                return a.items->size() < b.items->size() ? -1 : 1;
            for (size_t i = 0; i < a.items->size(); ++i)
                if (int c = value_compare((*a.items)[i], (*b.items)[i]); c != 0) return c;
            return 0;
        }
        case VKind::List: {
            size_t n = std::min(a.items->size(), b.items->size());
            for (size_t i = 0; i < n; ++i)
                if (int c = value_compare((*a.items)[i], (*b.items)[i]); c != 0) return c;
            if (a.items->size() != b.items->size())
                return a.items->size() < b.items->size() ? -1 : 1;
            return 0;
        }
        default: return 0;
    }
}

inline std::string serialize(const Value& v) {
    switch (v.kind) {
        case VKind::Int: return std::to_string(v.i);
        case VKind::Atom: return v.atom;
        case VKind::Closure: return "#fun";
        case VKind::Tuple:
        case VKind::List: {
            std::string out = v.kind == VKind::Tuple ? "{" : "[";
            for (size_t i = 0; i < v.items->size(); ++i) {
                if (i) out += ",";
                out += serialize((*v.items)[i]);
            }
            out += v.kind == VKind::Tuple ? "}" : "]";
            return out;
        }
    }
    return "?";
}

using Trace = std::vector<Value>;

inline std::string serialize_trace(const Trace& t) {
    std::string out = "[";
    for (size_t i = 0; i < t.size(); ++i) {
        if (i) out += ",";
        out += serialize(t[i]);
    }
    return out + "]";
}

namespace detail {

inline Value parse_value_at(const std::string& s, size_t& pos) {
    auto skip = [&] { while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos; };
    auto bad = [&](const std::string& what) -> SyntaxError {
        return SyntaxError(1, static_cast<int>(pos) + 1, what + " in value text");
    };
    skip();
    if (pos >= s.size()) throw bad("a value");
    char c = s[pos];
    if (c == '-' || (c >= '0' && c <= '9')) {
        size_t start = pos;
        if (c == '-') ++pos;
        if (pos >= s.size() || s[pos] < '0' || s[pos] > '9') throw bad("digits");
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
        return vint(std::stoll(s.substr(start, pos - start)));
    }
    if (c >= 'a' && c <= 'z') {
        size_t start = pos;
        while (pos < s.size() &&
               ((s[pos] >= 'a' && s[pos] <= 'z') || (s[pos] >= 'A' && s[pos] <= 'Z') ||
                (s[pos] >= '0' && s[pos] <= '9') || s[pos] == '_' || s[pos] == '@'))
            ++pos;
        return vatom(s.substr(start, pos - start));
    }
    if (c == '{' || c == '[') {
        char close = c == '{' ? '}' : ']';
        ++pos;
        std::vector<Value> elems;
        skip();
        if (pos < s.size() && s[pos] == close) {
            ++pos;
        } else {
            for (;;) {
                elems.push_back(parse_value_at(s, pos));
                skip();
                if (pos < s.size() && s[pos] == ',') { ++pos; continue; }
                if (pos < s.size() && s[pos] == close) { ++pos; break; }
                throw bad(std::string("',' or '") + close + "'");
            }
        }
        return c == '{' ? vtuple(std::move(elems)) : vlist(std::move(elems));
    }
    throw bad("a value");
}

}  // namespace detail

// Parses one serialized value; the whole string must be consumed.
inline Value parse_value(const std::string& s) {
    size_t pos = 0;
    Value v = detail::parse_value_at(s, pos);
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    if (pos != s.size())
        throw SyntaxError(1, static_cast<int>(pos) + 1, "end of value text");
    return v;
}

// Parses a comma-separated value list without brackets, e.g. "4,1" -> {4, 1}.
inline std::vector<Value> parse_value_list(const std::string& s) {
    std::vector<Value> out;
    size_t pos = 0;
    auto skip = [&] { while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos; };
    skip();
    if (pos == s.size()) return out;
    for (;;) {
        out.push_back(detail::parse_value_at(s, pos));
        skip();
        if (pos < s.size() && s[pos] == ',') { ++pos; continue; }
        break;
    }
    if (pos != s.size())
        throw SyntaxError(1, static_cast<int>(pos) + 1, "end of value list");
    return out;
}

}  // namespace evocheck::interp
