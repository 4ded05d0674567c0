#include <doctest.h>

#include <algorithm>

#include "adp/graph.hpp"
#include "adp/orders.hpp"
#include "adp/transform.hpp"
#include "generators.hpp"
#include "helpers.hpp"

using namespace adp;
using namespace testing;

namespace {

constexpr int kCases = 1000;

std::set<Position> as_set(const std::vector<Position>& v) { return {v.begin(), v.end()}; }

std::set<Position> random_defined_positions(Gen& g, const Term& t) {
    std::set<Position> out;
    for (const auto& p : function_positions(t)) {
        Term s = subterm_at(t, p);
        if ((s.name() == "f" || s.name() == "g" || s.name() == "h") && g.coin()) out.insert(p);
    }
    return out;
}

std::vector<Position> orthogonal_sample(Gen& g, const Term& t) {
    std::vector<Position> chosen;
    for (const auto& p : positions(t)) {
        if (!g.coin(0.3)) continue;
        bool ok = std::all_of(chosen.begin(), chosen.end(), [&](const Position& q) { return orthogonal(p, q); });
        if (ok) chosen.push_back(p);
    }
    return chosen;
}

Term generalize(const Term& u, const std::vector<Position>& at, const std::string& prefix, Subst& theta) {
    Term t = u;
    for (std::size_t i = 0; i < at.size(); ++i) {
        std::string v = prefix + std::to_string(i);
        theta[v] = subterm_at(u, at[i]);
        t = replace_at(t, at[i], Term::var(v));
    }
    return t;
}

Rational total(const MultiDistribution& mu) {
    Rational s = 0;
    for (const auto& b : mu) s += b.p;
    return s;
}

// The annotations of b are a subset of those of a and both agree after flattening.
bool fewer_annotations(const Term& a, const Term& b) {
    if (flat(a) != flat(b)) return false;
    auto pa = as_set(annotated_positions(a));
    for (const auto& p : annotated_positions(b))
        if (!pa.count(p)) return false;
    return true;
}

bool shape_removes_annotations(const ADPProblem& in, const ADPProblem& out, bool flags_may_drop) {
    if (in.adps.size() != out.adps.size()) return false;
    for (std::size_t k = 0; k < in.adps.size(); ++k) {
        const ADP& a = in.adps[k];
        const ADP& b = out.adps[k];
        if (a.lhs != b.lhs || a.rhs.size() != b.rhs.size()) return false;
        if (b.flag != a.flag && !(flags_may_drop && a.flag && !b.flag)) return false;
        for (std::size_t j = 0; j < a.rhs.size(); ++j) {
            if (a.rhs[j].p != b.rhs[j].p) return false;
            if (!fewer_annotations(a.rhs[j].t, b.rhs[j].t)) return false;
        }
    }
    return true;
}

// Every ADP of out is, after flattening, an instance of a flattened ADP of in.
bool instances_of_input(const ADPProblem& in, const ADPProblem& out) {
    for (const auto& b : out.adps) {
        bool found = false;
        for (const auto& a : in.adps) {
            if (a.rhs.size() != b.rhs.size() || a.flag != b.flag) continue;
            auto m = match(a.lhs, b.lhs);
            if (!m) continue;
            bool all = true;
            for (std::size_t j = 0; j < a.rhs.size() && all; ++j)
                all = a.rhs[j].p == b.rhs[j].p && flat(substitute(a.rhs[j].t, *m)) == flat(b.rhs[j].t);
            if (all) {
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("annotation algebra laws") {
    Gen g(101);
    for (int i = 0; i < kCases; ++i) {
        Term t = g.term(4, true, 0.4);
        auto phi = random_defined_positions(g, t);
        Term a = anno(t, phi);
        CHECK(flat(a) == flat(t));
        CHECK(as_set(annotated_positions(a)) == phi);
        CHECK(annotation_count(a) == phi.size());
        CHECK(anno(flat(t), as_set(annotated_positions(t))) == t);
        CHECK(flat(flat(t)) == flat(t));
        auto subs = annotated_subterms(a);
        CHECK(subs.size() == phi.size());
        for (const auto& [p, s] : subs) CHECK(s == flat(subterm_at(a, p)));
        auto ps = positions(t);
        const Position& pi = ps[g.uniform(0, static_cast<int>(ps.size()) - 1)];
        Term d = deanno_above(a, pi);
        for (const auto& q : annotated_positions(a)) {
            bool above = is_prefix(q, pi) && q != pi;
            CHECK(subterm_at(d, q).annotated() == !above);
        }
    }
}

TEST_CASE("matching is sound and finds every instance") {
    Gen g(202);
    for (int i = 0; i < kCases; ++i) {
        Term p = g.term(3, true);
        Subst sigma;
        for (const auto& v : vars(p)) sigma[v] = g.term(2, g.coin(0.3));
        Term s = substitute(p, sigma);
        Term sa = anno(s, random_defined_positions(g, s));
        auto m = match(p, sa);
        REQUIRE(m);
        CHECK(substitute(p, *m) == flat(sa));
        for (const auto& v : vars(p)) CHECK(m->at(v) == sigma.at(v));

        Term q = g.term(3, false);
        if (auto m2 = match(p, q)) CHECK(substitute(p, *m2) == q);
    }
}

TEST_CASE("unification is sound and most general") {
    Gen g(303);
    for (int i = 0; i < kCases; ++i) {
        Term u = g.term(3, true);
        Subst theta;
        Term s = generalize(u, orthogonal_sample(g, u), "p", theta);
        Term t = generalize(u, orthogonal_sample(g, u), "q", theta);
        auto sigma = unify(s, t);
        REQUIRE(sigma);
        CHECK(substitute(s, *sigma) == substitute(t, *sigma));
        std::set<std::string> vs;
        collect_vars(s, vs);
        collect_vars(t, vs);
        for (const auto& v : vs) {
            Term direct = substitute(Term::var(v), theta);
            CHECK(substitute(substitute(Term::var(v), *sigma), theta) == direct);
        }

        Term a = g.term(3, true);
        Term b = g.term(3, true);
        if (auto mg = unify(a, b)) CHECK(substitute(a, *mg) == substitute(b, *mg));
    }
}

TEST_CASE("distributions sum to one") {
    Gen g(404);
    for (int i = 0; i < kCases; ++i) {
        PTRS R = g.ptrs();
        for (const auto& r : R.rules) CHECK(total(r.rhs) == 1);
        ADPProblem P = canonical_adps(R);
        for (const auto& a : P.adps) CHECK(total(a.rhs) == 1);
        Term s = g.term(3, false, 0.5);
        for (const auto& st : ptrs_steps_all(flat(s), R)) CHECK(total(st.result) == 1);
        for (const auto& st : adp_step_innermost(s, P)) CHECK(total(st.result) == 1);
        for (const auto& st : adp_step_full(s, P, VrfPolicy::KeepLeftmost)) CHECK(total(st.result) == 1);
    }
}

TEST_CASE("ADP steps flatten to PTRS steps") {
    Gen g(505);
    for (int i = 0; i < kCases; ++i) {
        PTRS R = g.ptrs();
        ADPProblem P = canonical_adps(R);
        Term s = g.term(3, false, 0.5);
        for (bool innermost : {true, false}) {
            auto adp_steps = innermost ? adp_step_innermost(s, P) : adp_step_full(s, P, VrfPolicy::DropAll);
            auto plain = redexes(flat(s), R, innermost);
            std::set<std::pair<std::size_t, Position>> a_red, p_red(plain.begin(), plain.end());
            for (const auto& st : adp_steps) {
                a_red.insert({st.adp, st.pos});
                PtrsStep ps = apply_step(flat(s), R, st.adp, st.pos);
                REQUIRE(ps.result.size() == st.result.size());
                for (std::size_t j = 0; j < ps.result.size(); ++j) {
                    CHECK(ps.result[j].p == st.result[j].p);
                    CHECK(ps.result[j].t == flat(st.result[j].t));
                }
            }
            CHECK(a_red == p_red);
        }
    }
}

TEST_CASE("processor outputs keep the syntactic shape") {
    Gen g(606);
    SolverConfig cfg;
    cfg.coeff_bound = 2;
    cfg.node_budget = 20000;
    for (int i = 0; i < kCases; ++i) {
        ADPProblem P = g.problem();
        Mode mode = g.coin() ? Mode::Innermost : Mode::Full;

        auto dg = proc_dependency_graph(P, mode);
        for (const auto& Q : dg) CHECK(shape_removes_annotations(P, Q, false));
        CHECK(shape_removes_annotations(P, proc_usable_terms(P, mode), false));
        if (mode == Mode::Innermost) {
            auto ur = proc_usable_rules(P, mode);
            CHECK(shape_removes_annotations(P, ur, true));
            for (std::size_t k = 0; k < P.adps.size(); ++k) CHECK(ur.adps[k].rhs[0].t == P.adps[k].rhs[0].t);
        }
        if (auto sc = proc_subterm_criterion(P, mode)) {
            CHECK(shape_removes_annotations(P, sc->problem, false));
            for (std::size_t k : sc->strict) CHECK(!sc->problem.adps[k].has_annotations());
        }
        if (auto rp = proc_reduction_pair(P, mode, cfg)) {
            CHECK(shape_removes_annotations(P, rp->problem, false));
            for (std::size_t k = 0; k < P.adps.size(); ++k) {
                bool strict = std::count(rp->strict.begin(), rp->strict.end(), k) > 0;
                CHECK(rp->problem.adps[k].has_annotations() == (P.adps[k].has_annotations() && !strict));
            }
        }

        for (std::size_t k = 0; k < P.adps.size(); ++k) {
            if (!P.adps[k].has_annotations()) continue;
            auto inst = proc_instantiation(P, k, mode);
            CHECK(instances_of_input(P, inst.problem));
            auto fwd = proc_forward_instantiation(P, k, mode);
            CHECK(instances_of_input(P, fwd.problem));
            if (mode == Mode::Innermost) {
                for (const auto& tg : rewriting_targets(P, k)) {
                    std::string why;
                    auto r = proc_rewriting(P, k, tg.branch, tg.pos, mode, &why);
                    CHECK((r.has_value() || !why.empty()));
                    if (!r) continue;
                    CHECK(r->problem.adps.size() == P.adps.size() + 1);
                    CHECK(total(r->problem.adps[k].rhs) == 1);
                    CHECK(variant(r->problem.adps.back(), flatten(P.adps[k])));
                    CHECK(!r->gate.empty());
                }
                for (std::size_t j = 0; j < P.adps[k].rhs.size(); ++j)
                    for (const auto& p : annotated_positions(P.adps[k].rhs[j].t)) {
                        std::string why;
                        auto r = proc_rule_overlap_instantiation(P, k, j, p, mode, &why);
                        CHECK((r.has_value() || !why.empty()));
                        if (r) CHECK(instances_of_input(P, r->problem));
                    }
            }
        }
    }
}

TEST_CASE("reduction pair models re-validate") {
    Gen g(707);
    SolverConfig cfg;
    cfg.coeff_bound = 2;
    cfg.node_budget = 20000;
    std::mt19937_64 rng(708);
    int models = 0;
    for (int i = 0; i < kCases; ++i) {
        ADPProblem P = g.problem(3);
        Mode mode = g.coin() ? Mode::Innermost : Mode::Full;
        auto rp = proc_reduction_pair(P, mode, cfg);
        if (!rp) continue;
        ++models;
        std::string why;
        CHECK_MESSAGE(validate_rpp_model(P, rp->interpretation, rp->strict, rng, 30, &why), why);
        CHECK(!rp->strict.empty());
        auto again = strict_adps(P, rp->interpretation);
        for (std::size_t k : rp->strict) CHECK(std::count(again.begin(), again.end(), k) == 1);
    }
    MESSAGE("models found: " << models);
    CHECK(models >= 100);
}
