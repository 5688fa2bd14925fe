#pragma once

#include <stdexcept>
#include <string>

namespace evocheck {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parse failure with source position and a hint at what was expected.
struct SyntaxError : Error {
    int line;
    int col;
    std::string expected;
    SyntaxError(int line_, int col_, const std::string& expected_)
        : Error("syntax error at " + std::to_string(line_) + ":" + std::to_string(col_) +
                ": expected " + expected_),
          line(line_), col(col_), expected(expected_) {}
};

// A path step does not address an existing child.
struct InvalidPath : Error {
    using Error::Error;
};

// A variable is used before any binder can reach it.
struct UnboundVariable : Error {
    std::string name;
    int line;
    int col;
    UnboundVariable(const std::string& name_, int line_, int col_)
        : Error("unbound variable " + name_ + " at " + std::to_string(line_) + ":" +
                std::to_string(col_)),
          name(name_), line(line_), col(col_) {}
};

// No variable occurrence matches the requested point of interest.
struct PoiNotFound : Error {
    using Error::Error;
};

// The point of interest sits where no rewrite rule can re-evaluate it purely.
struct UnsupportedPoiPosition : Error {
    using Error::Error;
};

// A clause's argument types have an empty intersection with its spec.
struct EmptyTypeError : Error {
    int clause_index;
    EmptyTypeError(const std::string& what_, int clause_index_)
        : Error(what_), clause_index(clause_index_) {}
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace evocheck
