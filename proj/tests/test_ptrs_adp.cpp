#include <doctest.h>

#include "helpers.hpp"

using namespace adp;
using namespace testing;

namespace {

PTRS r_ex() { return parse_ptrs("(var x)\nf(s(x)) -> {1: c(f(g(x)))};\ng(x) -> {1: s(x)};"); }

std::set<std::string> rule_set(const std::vector<PlainRule>& rs) {
    std::set<std::string> out;
    for (const auto& r : rs) out.insert(S(r.lhs) + " -> " + S(r.rhs));
    return out;
}

}  // namespace

TEST_CASE("rule properties") {
    auto p2 = analyze_properties(load_ptrs("r2.ptrs"));
    CHECK(!p2.global.non_duplicating);
    CHECK(!p2.per_rule[1].non_duplicating);
    CHECK(p2.per_rule[0].non_duplicating);
    auto pex = analyze_properties(r_ex());
    CHECK(pex.global.non_overlapping);
    CHECK(pex.global.linear);
    CHECK(pex.global.non_duplicating);
    CHECK(!analyze_properties(load_ptrs("r_alg.ptrs")).global.non_overlapping);
    CHECK(analyze_properties(load_ptrs("r_rw.ptrs")).global.non_duplicating);
    CHECK(analyze_properties(load_ptrs("sym_walk.ptrs")).global.non_duplicating);
}

TEST_CASE("normal forms") {
    auto incpl = load_ptrs("r_incpl.ptrs");
    CHECK(is_nf(T("f(h(b2), b1)"), incpl));
    auto r2 = load_ptrs("r2.ptrs");
    CHECK(!is_anf(T("d(g)"), r2));
    CHECK(is_anf(T("d(0)"), r2));
    CHECK(is_nf(T("x"), r2));
    CHECK(is_nf(T("x"), incpl));
}

TEST_CASE("PTRS steps") {
    auto r1 = load_ptrs("r1.ptrs");
    auto st = ptrs_step(T("g"), r1, RedexPolicy::LeftmostOutermost);
    REQUIRE(st);
    CHECK(to_string(st->result) == "{3/4: d(g), 1/4: 0}");
    CHECK(!ptrs_step(T("0"), r1, RedexPolicy::Random));
    auto r2 = load_ptrs("r2.ptrs");
    auto in = ptrs_step(T("d(g)"), r2, RedexPolicy::InnermostLeftmost);
    REQUIRE(in);
    CHECK(in->pos == pos({1}));
    CHECK(in->rule == 0);
    auto out = ptrs_step(T("d(g)"), r2, RedexPolicy::LeftmostOutermost);
    REQUIRE(out);
    CHECK(out->pos == pos({}));
    CHECK(to_string(out->result) == "{1: c(g,g)}");
}

TEST_CASE("distribution validation") {
    MultiDistribution ok{{Rational(1, 2), T("a")}, {Rational(1, 2), T("a")}};
    CHECK_NOTHROW(validate_distribution(ok));
    MultiDistribution bad{{Rational(1, 2), T("a")}};
    CHECK_THROWS(validate_distribution(bad));
    MultiDistribution zero{{Rational(0), T("a")}, {Rational(1), T("b")}};
    CHECK_THROWS(validate_distribution(zero));
}

TEST_CASE("canonical ADPs") {
    auto c2 = canonical_adps(load_ptrs("r2.ptrs"));
    CHECK(to_string(c2) == "g -> {3/4: D(G), 1/4: 0}^true\nd(x) -> {1: c(x,x)}^true\n");
    auto calg = canonical_adps(load_ptrs("r_alg.ptrs"));
    CHECK(to_string(calg.adps[0]) == "loop1(y) -> {1/2: LOOP1(DOUBLE(y)), 1/2: LOOP2(DOUBLE(y))}^true");
    CHECK(to_string(calg.adps[4]) == "double(0) -> {1: 0}^true");
}

TEST_CASE("np and dp") {
    auto P = problem("(var x)\ng -> {3/4: d#(g#), 1/4: 0}^true;\nd(x) -> {1: c(x, x)}^false;");
    ADPProblem only_g;
    only_g.adps = {P.adps[0]};
    only_g.signature = P.signature;
    CHECK(rule_set(np(only_g)) == std::set<std::string>{"g -> d(g)", "g -> 0"});
    auto ex = canonical_adps(r_ex());
    CHECK(rule_set(dp(ex)) == std::set<std::string>{"F(s(x)) -> F(g(x))", "F(s(x)) -> G(x)"});
    ADPProblem flagless;
    flagless.adps = {P.adps[1]};
    flagless.signature = P.signature;
    CHECK(np(flagless).empty());
}

TEST_CASE("innermost ADP steps") {
    auto P = problem("(var x)\ng -> {3/4: d#(g#), 1/4: 0}^true;\nd(x) -> {1: c(x, x)}^true;");
    auto st = adp_step_innermost(T("d#(g#)"), P);
    REQUIRE(st.size() == 1);
    CHECK(st[0].pos == pos({1}));
    CHECK(st[0].rcase == RewriteCase::AT);
    CHECK(to_string(st[0].result) == "{3/4: D(D(G)), 1/4: D(0)}");

    auto nt = adp_step_innermost(T("d#(g)"), P);
    REQUIRE(nt.size() == 1);
    CHECK(nt[0].rcase == RewriteCase::NT);
    CHECK(to_string(nt[0].result) == "{3/4: D(d(g)), 1/4: D(0)}");

    auto F = problem("(var x)\ng -> {3/4: d#(g#), 1/4: 0}^false;\nd(x) -> {1: c(x, x)}^true;");
    auto nf = adp_step_innermost(T("d#(g)"), F);
    REQUIRE(nf.size() == 1);
    CHECK(nf[0].rcase == RewriteCase::NF);
    CHECK(to_string(nf[0].result) == "{3/4: d(d(g)), 1/4: d(0)}");
    auto af = adp_step_innermost(T("d#(g#)"), F);
    REQUIRE(af.size() == 1);
    CHECK(af[0].rcase == RewriteCase::AF);
    CHECK(to_string(af[0].result) == "{3/4: d(D(G)), 1/4: d(0)}");

    // The substitution instantiates x by b, so the result is b.
    auto FF = problem("(var x)\nf(a) -> {1: b}^true;\nf(f(x)) -> {1: x}^true;");
    auto ff = adp_step_innermost(T("f#(f#(b))"), FF);
    REQUIRE(ff.size() == 1);
    CHECK(ff[0].rcase == RewriteCase::AT);
    CHECK(to_string(ff[0].result) == "{1: b}");
}

TEST_CASE("full ADP steps with variable reposition functions") {
    auto P = problem("(var x)\nc(x, x) -> {1: d(x)}^true;\nf -> {1: a}^true;\ng(x) -> {1: a}^true;");
    VRF v;
    v.phi = {{{pos({1}), pos({1})}, {pos({2}), pos({1})}}};
    auto st = adp_step_full(T("c(g(f#), g#(f))"), P, v, 0);
    REQUIRE(st.size() == 1);
    CHECK(to_string(st[0].result) == "{1: d(G(F))}");

    auto D = problem("(var x)\nd(d(x)) -> {1: c(x, g#)}^true;\ng -> {1: 0}^true;");
    auto keep = adp_step_full(T("d#(d#(g#))"), D, VrfPolicy::KeepLeftmost);
    REQUIRE(!keep.empty());
    CHECK(keep[0].pos == pos({}));
    CHECK(to_string(keep[0].result) == "{1: c(G,G)}");

    auto C = problem("(var x)\nd(x) -> {1: c(x, x)}^true;\ng -> {1: 0}^true;");
    auto drop = adp_step_full(T("d#(g#)"), C, VrfPolicy::DropAll);
    REQUIRE(!drop.empty());
    CHECK(to_string(drop[0].result) == "{1: c(g,g)}");
    CHECK(vrf_enumerate_maximal(C.adps[0]).size() == 2);
}
