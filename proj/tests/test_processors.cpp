#include <doctest.h>

#include "adp/graph.hpp"
#include "adp/orders.hpp"
#include "helpers.hpp"

using namespace adp;
using namespace testing;

namespace {

using Components = std::vector<std::vector<std::size_t>>;

Components sorted(Components c) {
    for (auto& x : c) std::sort(x.begin(), x.end());
    std::sort(c.begin(), c.end());
    return c;
}

std::vector<bool> flags(const ADPProblem& P) {
    std::vector<bool> f;
    for (const auto& a : P.adps) f.push_back(a.flag);
    return f;
}

}  // namespace

TEST_CASE("dependency graph of R_alg") {
    auto P = canonical_adps(load_ptrs("r_alg.ptrs"));
    for (Mode m : {Mode::Full, Mode::Innermost}) {
        auto g = estimate_dep_graph(P, m);
        CHECK(sorted(sccs(g)) == Components{{0, 1}, {2}, {3}, {5}});
        auto subs = proc_dependency_graph(P, m);
        CHECK(subs.size() == 4);
    }
}

TEST_CASE("dependency graph corner cases") {
    auto r2 = canonical_adps(load_ptrs("r2.ptrs"));
    auto g = estimate_dep_graph(r2, Mode::Innermost);
    CHECK(sorted(sccs(g)) == Components{{0}});
    CHECK(g.has_edge(0, 1));
    CHECK(g.succ[1].empty());
    auto subs = proc_dependency_graph(r2, Mode::Innermost);
    REQUIRE(subs.size() == 1);
    CHECK(variant(subs[0], r2));

    auto flat_p = flatten(r2);
    CHECK(proc_dependency_graph(flat_p, Mode::Full).empty());
    auto fg = estimate_dep_graph(flat_p, Mode::Full);
    for (std::size_t a = 0; a < fg.size(); ++a) CHECK(fg.succ[a].empty());

    auto two = problem("(var x)\na -> {1: b#}^true;\nb -> {1: a#}^true;\nc -> {1: a#}^true;");
    CHECK(sorted(sccs(estimate_dep_graph(two, Mode::Full))) == Components{{0, 1}});
    auto dag = problem("(var x)\na -> {1: b#}^true;\nb -> {1: c}^true;");
    CHECK(sccs(estimate_dep_graph(dag, Mode::Full)).empty());

    auto ffg = canonical_adps(load_ptrs("r_ffg.ptrs"));
    auto fsubs = proc_dependency_graph(ffg, Mode::Innermost);
    REQUIRE(fsubs.size() == 1);
}

TEST_CASE("usable terms") {
    auto P = canonical_adps(load_ptrs("r_alg.ptrs"));
    auto subs = proc_dependency_graph(P, Mode::Full);
    const ADPProblem* loop = nullptr;
    for (const auto& Q : subs)
        if (Q.adps[0].has_annotations() && root_symbol(Q.adps[0].lhs) == "loop1") loop = &Q;
    REQUIRE(loop);
    auto ut = proc_usable_terms(*loop, Mode::Full);
    CHECK(to_string(ut.adps[0]) == "loop1(y) -> {1/2: LOOP1(double(y)), 1/2: loop2(double(y))}^true");

    auto r2 = canonical_adps(load_ptrs("r2.ptrs"));
    std::vector<RemovedAnnotation> removed;
    auto u2 = proc_usable_terms(r2, Mode::Innermost, &removed);
    CHECK(to_string(u2.adps[0]) == "g -> {3/4: d(G), 1/4: 0}^true");
    CHECK(removed.size() == 1);

    auto flat_p = flatten(r2);
    CHECK(proc_usable_terms(flat_p, Mode::Innermost) == flat_p);
}

TEST_CASE("usable rules") {
    auto r2 = canonical_adps(load_ptrs("r2.ptrs"));
    auto u2 = proc_usable_terms(r2, Mode::Innermost);
    auto ur = proc_usable_rules(u2, Mode::Innermost);
    CHECK(flags(ur) == std::vector<bool>{false, false});

    auto P = canonical_adps(load_ptrs("r_alg.ptrs"));
    for (const auto& Q : proc_dependency_graph(P, Mode::Innermost)) {
        if (!Q.adps[0].has_annotations()) continue;
        auto u = proc_usable_rules(Q, Mode::Innermost);
        for (std::size_t k = 0; k < u.adps.size(); ++k) {
            auto root = *root_symbol(u.adps[k].lhs);
            CHECK(u.adps[k].flag == (root == "double" || root == "triple"));
        }
        break;
    }

    auto flat_p = flatten(r2);
    CHECK(flags(proc_usable_rules(flat_p, Mode::Innermost)) == std::vector<bool>{false, false});
}

TEST_CASE("constraint atoms from absolute positiveness") {
    SymPoly lhs = SymPoly::variable("x").times(CoefPoly::unknown(0));
    lhs += SymPoly::constant(CoefPoly::unknown(1));
    SymPoly rhs = SymPoly::variable("x").times(CoefPoly::unknown(2));
    auto atoms = compare_atoms(lhs, rhs, false);
    ConjConstraint c{"test", atoms};
    CHECK(conj_holds(c, {2, 0, 2}));
    CHECK(conj_holds(c, {3, 1, 2}));
    CHECK(!conj_holds(c, {1, 0, 2}));

    SymPoly a = SymPoly::constant(CoefPoly::unknown(0));
    auto strict = compare_atoms(a, SymPoly{}, true);
    ConjConstraint s{"strict", strict};
    CHECK(!conj_holds(s, {0}));
    CHECK(conj_holds(s, {1}));
}

TEST_CASE("sharp sums") {
    ConcreteInterpretation I;
    I.pol[{"g", true}] = ConcretePoly{1, {}, {}};
    CHECK(I.sharp_sum(T("d(g#)"), {}) == 1);
    CHECK(I.sharp_sum(T("c(x, x)"), {{"x", 5}}) == 0);
    I.pol[{"d", true}] = ConcretePoly{2, {1}, {}};
    // A(D(g)) + A(G) with A(D)(x) = 2 + x and all unannotated symbols 0
    CHECK(I.sharp_sum(T("d#(g#)"), {}) == 3);
}

TEST_CASE("reduction pair processor") {
    SolverConfig cfg;
    auto r2 = canonical_adps(load_ptrs("r2.ptrs"));
    auto fin = proc_usable_rules(proc_usable_terms(r2, Mode::Innermost), Mode::Innermost);
    auto res = proc_reduction_pair(fin, Mode::Innermost, cfg);
    REQUIRE(res);
    CHECK(res->strict == std::vector<std::size_t>{0});
    CHECK(res->interpretation.describe().find("Pol(G)=1") != std::string::npos);
    CHECK(!res->problem.has_annotations());

    auto P = canonical_adps(load_ptrs("r_alg.ptrs"));
    ADPProblem loop;
    for (const auto& Q : proc_dependency_graph(P, Mode::Full))
        if (Q.adps[0].has_annotations()) loop = proc_usable_terms(Q, Mode::Full);
    REQUIRE(!loop.adps.empty());
    auto rl = proc_reduction_pair(loop, Mode::Full, cfg);
    REQUIRE(rl);
    CHECK(rl->strict == std::vector<std::size_t>{0, 1});
    std::mt19937_64 rng(1);
    std::string why;
    CHECK_MESSAGE(validate_rpp_model(loop, rl->interpretation, rl->strict, rng, 200, &why), why);

    auto rw = canonical_adps(load_ptrs("r_rw.ptrs"));
    CHECK(!proc_reduction_pair(rw, Mode::Full, cfg));
}

TEST_CASE("subterm criterion") {
    auto P = canonical_adps(load_ptrs("r_alg.ptrs"));
    for (const auto& Q : proc_dependency_graph(P, Mode::Innermost)) {
        if (root_symbol(Q.adps[0].lhs) != "loop2" || !Q.adps[0].has_annotations()) continue;
        auto sc = proc_subterm_criterion(Q, Mode::Innermost);
        REQUIRE(sc);
        CHECK(sc->projection.at("loop2") == 1);
        CHECK(!sc->problem.adps[0].has_annotations());
    }
    Refusal why;
    auto unsound = load_problem("subterm_crit_unsound.adp");
    CHECK(!proc_subterm_criterion(unsound, Mode::Full, &why));
    CHECK(!why.reason.empty());
    CHECK(proc_subterm_criterion(unsound, Mode::Innermost));

    auto two = problem("(var x)\nf(s(x)) -> {1: c(f#(x), f#(x))}^true;");
    Refusal why2;
    CHECK(!proc_subterm_criterion(two, Mode::Innermost, &why2));
    CHECK(!why2.reason.empty());
}

TEST_CASE("probability removal and the non-probabilistic backend") {
    SolverConfig cfg;
    auto ffg = canonical_adps(load_ptrs("r_ffg.ptrs"));
    auto pr = proc_probability_removal(ffg, Mode::Innermost, cfg);
    CHECK(pr.applicable);
    CHECK(pr.proved);

    auto half = canonical_adps(load_ptrs("r1.ptrs"));
    auto refused = proc_probability_removal(half, Mode::Innermost, cfg);
    CHECK(!refused.applicable);
    CHECK(!refused.refusal.empty());

    auto none = proc_probability_removal(flatten(ffg), Mode::Innermost, cfg);
    CHECK(none.proved);

    auto rules = np(ffg);
    CHECK(nonprob_dp_prove(dp(ffg), rules, Mode::Innermost, cfg).proved);
    std::vector<PlainRule> loop{{T("f#(s(x))"), T("f#(s(x))")}};
    CHECK(!nonprob_dp_prove(loop, {}, Mode::Innermost, cfg).proved);
    CHECK(nonprob_dp_prove({}, rules, Mode::Innermost, cfg).proved);
}
