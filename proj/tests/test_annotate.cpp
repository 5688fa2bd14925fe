#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "evocheck/annotate.hpp"
#include "evocheck/ast.hpp"
#include "evocheck/errors.hpp"
#include "evocheck/parser.hpp"
#include "support.hpp"

using namespace evocheck;
using lang::Node;
using lang::NodeKind;

namespace {

Node annotated(const std::string& src) {
    Node m = lang::parse_module(src, "m");
    lang::annotate(m);
    return m;
}

bool annotates(const std::string& src) {
    Node m = lang::parse_module(src, "m");
    lang::annotate(m);
    return true;
}

const Node& first_clause(const Node& m) {
    const Node* f = &m.children[static_cast<size_t>(m.ival)];
    return f->children[0];
}

}  // namespace

TEST_CASE("annotate_clause_binding_sets") {
    Node m = annotated("f(X, {Y, X}) when X > Y -> X + Y.\n");
    const Node& cl = first_clause(m);
    CHECK(cl.bound_before.empty());
    // names are reported sorted
    CHECK(cl.bound_here == std::vector<std::string>{"X", "Y"});
    // head patterns see only the outer scope, which is empty at a function head
    CHECK(cl.children[0].bound_before.empty());
    CHECK(cl.children[1].bound_before.empty());
}

TEST_CASE("annotate_match_pattern_bound_here") {
    Node m = annotated("f() -> {A, B} = {1, 2}, A + B.\n");
    const Node& cl = first_clause(m);
    const Node& match = cl.children[static_cast<size_t>(cl.body_pos() - 1)];
    REQUIRE(match.kind == NodeKind::Match);
    CHECK(match.children[0].bound_here == std::vector<std::string>{"A", "B"});
    CHECK(match.children[0].bound_before.empty());
}

TEST_CASE("annotate_marks_equality_constraint_patterns") {
    Node m = annotated("g(X, Y) -> case Y of X -> eq; _ -> ne end.\n");
    const Node& cl = first_clause(m);
    const Node& body_case = cl.children[static_cast<size_t>(cl.body_pos() - 1)];
    REQUIRE(body_case.kind == NodeKind::Case);
    const Node& case_cl = body_case.children[1];
    CHECK(case_cl.bound_before == std::vector<std::string>{"X", "Y"});
    CHECK(case_cl.bound_here.empty());
    const Node& pat = case_cl.children[0];
    REQUIRE(pat.kind == NodeKind::Var);
    CHECK(lang::is_bound_var(pat));

    // the head X, by contrast, is a binder
    CHECK_FALSE(lang::is_bound_var(cl.children[0]));
}

TEST_CASE("annotate_accepts_left_to_right_threading") {
    CHECK(annotates("f() -> (X = 1) + X.\n"));
    CHECK(annotates("f() -> {X = 1, X}.\n"));
    CHECK(annotates("f() -> [X = 1, X].\n"));
    CHECK(annotates("f() -> g(X = 1, X).\ng(A, B) -> A + B.\n"));
    CHECK(annotates("f() -> begin X = 2, Y = X end, X + Y.\n"));
    // the right side of a match runs first, so it may bind the pattern's vars
    CHECK(annotates("f() -> X = (Y = 3) + 1, X + Y.\n"));
    CHECK(annotates("f() -> Y = (Y = 2), Y.\n"));
    // a case scrutinee exports, its clauses do not
    CHECK(annotates("f() -> case X = 1 of _ -> ok end, X.\n"));
    // lambdas capture the scope at their definition
    CHECK(annotates("f() -> K = 1, G = fun(A) -> A + K end, G(2).\n"));
    // generators see bindings introduced by earlier qualifiers
    CHECK(annotates("f() -> [{A, B} || A <- [1, 2], B <- [A]].\n"));
}

TEST_CASE("annotate_rejects_possibly_unbound_uses") {
    auto rejects = [](const std::string& src) {
        Node m = lang::parse_module(src, "m");
        CHECK_THROWS_AS(lang::annotate(m), UnboundVariable);
    };
    rejects("f() -> X + 1.\n");
    rejects("f(Y) -> Y + X.\n");
    rejects("f() -> case 1 of X -> X end, X.\n");
    rejects("f() -> if true -> X = 1 end, X.\n");
    rejects("f() -> G = fun(A) -> X = 1, X + A end, G(0) + X.\n");
    rejects("f() -> [X || X <- [1]], X.\n");
    // conditionally evaluated bindings never escape
    rejects("f() -> true orelse (X = 1), X.\n");
    rejects("f() -> false andalso (X = 1), X.\n");
    rejects("f() -> [A || A <- [1], member(A, [Z])].\n");
}

TEST_CASE("annotate_error_carries_the_use_site") {
    Node m = lang::parse_module("f(Y) ->\n    Y + Miss.\n", "m");
    try {
        lang::annotate(m);
        FAIL("expected UnboundVariable");
    } catch (const UnboundVariable& e) {
        CHECK(std::string(e.what()) == "unbound variable Miss at 2:9");
    }
}

TEST_CASE("annotate_internal_wildcard_guard") {
    // unreachable through the parser, which rejects stray wildcards up front
    Node body = lang::mk(NodeKind::Wildcard, {});
    Node fn = lang::mk(NodeKind::Function, {lang::mk_clause({}, {}, {body})});
    fn.sval = "f";
    fn.ival = 0;
    Node m = lang::mk(NodeKind::Module, {fn});
    m.sval = "m";
    CHECK_THROWS_WITH(lang::annotate(m),
                      Catch::Matchers::ContainsSubstring("wildcard in expression"));
}

TEST_CASE("annotate_corpus_modules") {
    for (const char* stem : {"happy0", "happy1", "happy1_bug_a", "happy1_bug_b", "arith",
                             "listops", "patterns"}) {
        Node m = testsupport::load_corpus(stem);
        lang::annotate(m);
        SUCCEED();
    }
}
