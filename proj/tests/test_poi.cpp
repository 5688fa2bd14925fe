#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "evocheck/ast.hpp"
#include "evocheck/errors.hpp"
#include "evocheck/parser.hpp"
#include "evocheck/poi.hpp"
#include "support.hpp"

using namespace evocheck;
using inst::Poi;
using inst::PoiSite;
using inst::SplitPath;
using lang::AstPath;
using lang::Node;
using lang::NodeKind;

namespace {

Poi at(int line, const std::string& var, int occurrence = 1) {
    return Poi{"m.fth", line, var, occurrence};
}

SplitPath split(const Node& m, const Poi& poi) {
    return inst::split_path(m, inst::locate_poi(m, poi));
}

}  // namespace

TEST_CASE("poi_label_format") {
    CHECK(at(9, "Happy").label() == "(9,Happy,1)");
    CHECK(at(18, "Happy", 2).label() == "(18,Happy,2)");
}

TEST_CASE("poi_locate_on_corpus") {
    Node m = testsupport::load_corpus("happy0");
    AstPath p = inst::locate_poi(m, at(9, "Happy"));
    const Node& v = lang::node_at(m, p);
    REQUIRE(v.kind == NodeKind::Var);
    CHECK(v.sval == "Happy");
    CHECK(v.span.line == 9);
    // line 9 is `Happy = is_happy(X),` so the POI sits in the match pattern
    SplitPath sp = inst::split_path(m, p);
    CHECK(sp.site == PoiSite::MatchPattern);
    CHECK(sp.inner.steps.empty());
}

TEST_CASE("poi_occurrences_follow_textual_order") {
    Node m = lang::parse_module("f(X) -> Y = X + X, Y.\n", "m");
    CHECK(split(m, at(1, "X", 1)).site == PoiSite::ClausePattern);
    CHECK(split(m, at(1, "X", 2)).site == PoiSite::Expr);
    CHECK(split(m, at(1, "X", 3)).site == PoiSite::Expr);
    CHECK_THROWS_AS(inst::locate_poi(m, at(1, "X", 4)), PoiNotFound);
    CHECK(split(m, at(1, "Y", 1)).site == PoiSite::MatchPattern);
    CHECK(split(m, at(1, "Y", 2)).site == PoiSite::Expr);
    // the two body occurrences are distinct nodes
    CHECK_FALSE(inst::locate_poi(m, at(1, "X", 2)).steps ==
                inst::locate_poi(m, at(1, "X", 3)).steps);
}

TEST_CASE("poi_wildcards_never_count") {
    Node m = lang::parse_module("f(_, X) -> X.\n", "m");
    CHECK_THROWS_AS(inst::locate_poi(m, at(1, "_")), PoiNotFound);
    // underscore-prefixed names are ordinary variables
    Node m2 = lang::parse_module("f(_Keep) -> 1.\n", "m");
    CHECK(lang::node_at(m2, inst::locate_poi(m2, at(1, "_Keep"))).sval == "_Keep");
}

TEST_CASE("poi_not_found_reporting") {
    Node m = testsupport::load_corpus("happy0");
    CHECK_THROWS_AS(inst::locate_poi(m, at(999, "Happy")), PoiNotFound);
    CHECK_THROWS_AS(inst::locate_poi(m, at(9, "Happy", 0)), PoiNotFound);
    CHECK_THROWS_AS(inst::locate_poi(m, at(9, "Happy", -1)), PoiNotFound);
    try {
        inst::locate_poi(m, at(9, "Happy", 2));
        FAIL("expected PoiNotFound");
    } catch (const PoiNotFound& e) {
        CHECK(std::string(e.what()) == "no occurrence 2 of variable Happy on line 9");
    }
}

TEST_CASE("poi_split_classifies_all_sites") {
    std::string src =
        "f({X}) when X > 0 ->\n"
        "    Y = X + 1,\n"
        "    [B || {B} <- [{Y}]],\n"
        "    case Y of\n"
        "        {Z} -> Z;\n"
        "        W -> W\n"
        "    end;\n"
        "f(_) -> 0.\n";
    Node m = lang::parse_module(src, "m");

    SplitPath head = split(m, at(1, "X", 1));
    CHECK(head.site == PoiSite::ClausePattern);
    CHECK(head.anchor.steps == std::vector<int>{1});
    CHECK(head.member_index == 1);
    CHECK(head.pattern_index == 1);
    CHECK(head.inner.steps == std::vector<int>{1});

    SplitPath guard = split(m, at(1, "X", 2));
    CHECK(guard.site == PoiSite::ClauseGuard);
    CHECK(guard.anchor.steps == std::vector<int>{1});
    CHECK(guard.member_index == 1);
    CHECK(guard.inner.steps == std::vector<int>{1});

    SplitPath mpat = split(m, at(2, "Y", 1));
    CHECK(mpat.site == PoiSite::MatchPattern);
    CHECK(mpat.anchor.steps == std::vector<int>{1, 1, 3});
    CHECK(mpat.inner.steps.empty());
    CHECK(lang::node_at(m, mpat.anchor).kind == NodeKind::Match);

    CHECK(split(m, at(2, "X", 1)).site == PoiSite::Expr);
    // a comprehension head is expression position, its generator is not
    CHECK(split(m, at(3, "B", 1)).site == PoiSite::Expr);

    SplitPath gen = split(m, at(3, "B", 2));
    CHECK(gen.site == PoiSite::Generator);
    CHECK(gen.anchor.steps == std::vector<int>{1, 1, 4});
    CHECK(gen.member_index == 2);
    CHECK(gen.inner.steps == std::vector<int>{1});
    CHECK(lang::node_at(m, gen.anchor).kind == NodeKind::ListComp);

    SplitPath cpat = split(m, at(5, "Z", 1));
    CHECK(cpat.site == PoiSite::ClausePattern);
    CHECK(cpat.anchor.steps == std::vector<int>{1, 1, 5});
    CHECK(cpat.member_index == 2);
    CHECK(cpat.pattern_index == 1);
    CHECK(cpat.inner.steps == std::vector<int>{1});
    CHECK(lang::node_at(m, cpat.anchor).kind == NodeKind::Case);

    CHECK(split(m, at(5, "Z", 2)).site == PoiSite::Expr);

    SplitPath wpat = split(m, at(6, "W", 1));
    CHECK(wpat.site == PoiSite::ClausePattern);
    CHECK(wpat.member_index == 3);
    CHECK(wpat.inner.steps.empty());
}

TEST_CASE("poi_split_lambda_and_if_sites") {
    std::string src =
        "h(L) ->\n"
        "    G = fun({A}) -> A + 1 end,\n"
        "    G(L).\n"
        "k(N) ->\n"
        "    if N > 0 -> pos; true -> zero end.\n";
    Node m = lang::parse_module(src, "m");

    SplitPath lam = split(m, at(2, "A", 1));
    CHECK(lam.site == PoiSite::ClausePattern);
    CHECK(lam.member_index == 1);
    CHECK(lam.pattern_index == 1);
    CHECK(lam.inner.steps == std::vector<int>{1});
    CHECK(lang::node_at(m, lam.anchor).kind == NodeKind::Lambda);

    CHECK(split(m, at(2, "A", 2)).site == PoiSite::Expr);

    SplitPath ifg = split(m, at(5, "N", 1));
    CHECK(ifg.site == PoiSite::ClauseGuard);
    CHECK(ifg.member_index == 1);
    CHECK(ifg.inner.steps == std::vector<int>{1});
    CHECK(lang::node_at(m, ifg.anchor).kind == NodeKind::If);
}

TEST_CASE("poi_split_deepest_region_wins") {
    Node m = lang::parse_module("f(V) -> R = case V of {T} -> T end, R.\n", "m");
    SplitPath sp = split(m, at(1, "T", 1));
    CHECK(sp.site == PoiSite::ClausePattern);
    CHECK(lang::node_at(m, sp.anchor).kind == NodeKind::Case);

    Node m2 = lang::parse_module("f() -> {P} = {Q = 1}, P + Q.\n", "m");
    SplitPath inner_match = split(m2, at(1, "Q", 1));
    CHECK(inner_match.site == PoiSite::MatchPattern);
    // the anchor is the inner match, not the outer one
    const Node& anchor = lang::node_at(m2, inner_match.anchor);
    REQUIRE(anchor.kind == NodeKind::Match);
    CHECK(anchor.children[0].kind == NodeKind::Var);
    CHECK(anchor.children[0].sval == "Q");
}

TEST_CASE("poi_collect_matches_locate") {
    auto check_module = [](const Node& m) {
        std::vector<Poi> pois = testsupport::collect_pois(m);
        REQUIRE_FALSE(pois.empty());
        for (const Poi& poi : pois) {
            AstPath p = inst::locate_poi(m, poi);
            const Node& v = lang::node_at(m, p);
            CHECK(v.kind == NodeKind::Var);
            CHECK(v.sval == poi.var);
            CHECK(v.span.line == poi.line);
        }
    };
    for (const char* stem : {"happy0", "happy1", "arith", "listops", "patterns"})
        check_module(testsupport::load_corpus(stem));

    testsupport::Rng rng(7u);
    testsupport::ModuleGen gen(rng, false);
    for (int i = 0; i < 20; ++i) {
        Node m = lang::parse_module(gen.module_source(2), "m");
        std::vector<Poi> pois = testsupport::collect_pois(m);
        for (const Poi& poi : pois) {
            const Node& v = lang::node_at(m, inst::locate_poi(m, poi));
            CHECK(v.sval == poi.var);
            CHECK(v.span.line == poi.line);
        }
    }
}
