#include "adp/orders.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace adp {

namespace {

SymPoly weighted_sum(const MultiDistribution& mu, const std::function<SymPoly(const Term&)>& f) {
    SymPoly out;
    for (const auto& b : mu) out += f(b.t).scaled(b.p);
    return out;
}

std::string adp_label(std::size_t k) { return "ADP " + std::to_string(k + 1); }

}  // namespace

RppConstraints generate_rpp_constraints(const ADPProblem& P, bool bilinear) {
    RppConstraints rc{Interpretation(bilinear), {}, {}};
    auto& I = rc.interp;
    DisjConstraint strict;
    strict.origin = "some ADP is strictly decreasing";
    for (std::size_t k = 0; k < P.adps.size(); ++k) {
        const ADP& a = P.adps[k];
        SymPoly lsharp = I.eval(anno_root(a.lhs));
        SymPoly rhs_sum = weighted_sum(a.rhs, [&](const Term& t) { return I.sharp_sum(t); });
        rc.problem.conj.push_back({"expected annotated weak " + adp_label(k), compare_atoms(lsharp, rhs_sum, false)});
        SymPoly lflat;
        if (a.flag) {
            lflat = I.eval(a.lhs);
            SymPoly rflat = weighted_sum(a.rhs, [&](const Term& t) { return I.eval(flat(t)); });
            rc.problem.conj.push_back({"expected flat weak " + adp_label(k), compare_atoms(lflat, rflat, false)});
        }
        if (!a.has_annotations()) continue;
        for (std::size_t j = 0; j < a.rhs.size(); ++j) {
            ConjConstraint opt;
            opt.origin = "strict " + adp_label(k) + " branch " + std::to_string(j + 1);
            opt.atoms = compare_atoms(lsharp, I.sharp_sum(a.rhs[j].t), true);
            if (a.flag) {
                auto weak = compare_atoms(lflat, I.eval(flat(a.rhs[j].t)), false);
                opt.atoms.insert(opt.atoms.end(), weak.begin(), weak.end());
            }
            strict.options.push_back(std::move(opt));
            rc.candidates.emplace_back(k, j);
        }
    }
    rc.problem.disj.push_back(std::move(strict));
    rc.problem.unknown_names = I.unknown_names();
    return rc;
}

namespace {

SymPoly concrete_poly(const Term& t, const ConcreteInterpretation& I) {
    if (t.is_var()) return SymPoly::variable(t.name());
    std::vector<SymPoly> args;
    for (const auto& a : t.args()) args.push_back(concrete_poly(a, I));
    auto it = I.pol.find(SymbolKey{t.name(), t.annotated()});
    if (it == I.pol.end()) return SymPoly();
    const auto& p = it->second;
    SymPoly out = SymPoly::constant(CoefPoly::constant(p.c0));
    for (std::size_t i = 0; i < args.size() && i < p.lin.size(); ++i) out += args[i].scaled(p.lin[i]);
    for (const auto& [ij, c] : p.bil) out += (args[ij.first] * args[ij.second]).scaled(c);
    return out;
}

SymPoly concrete_sharp(const Term& t, const ConcreteInterpretation& I) {
    SymPoly out;
    for (const auto& [pos, s] : annotated_subterms(t)) out += concrete_poly(anno_root(s), I);
    return out;
}

bool holds(const std::vector<Atom>& atoms) {
    for (const auto& a : atoms)
        if (!atom_holds(a, {})) return false;
    return true;
}

}  // namespace

std::vector<std::size_t> strict_adps(const ADPProblem& P, const ConcreteInterpretation& I) {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < P.adps.size(); ++k) {
        const ADP& a = P.adps[k];
        if (!a.has_annotations()) continue;
        SymPoly ls = concrete_poly(anno_root(a.lhs), I);
        SymPoly lf = concrete_poly(a.lhs, I);
        for (const auto& b : a.rhs) {
            bool ok = holds(compare_atoms(ls, concrete_sharp(b.t, I), true));
            if (ok && a.flag) ok = holds(compare_atoms(lf, concrete_poly(flat(b.t), I), false));
            if (ok) {
                out.push_back(k);
                break;
            }
        }
    }
    return out;
}

bool validate_rpp_model(const ADPProblem& P, const ConcreteInterpretation& I, const std::vector<std::size_t>& strict,
                        std::mt19937_64& rng, int samples, std::string* why) {
    std::uniform_int_distribution<int> dist(0, 12);
    std::set<std::size_t> st(strict.begin(), strict.end());
    for (std::size_t k = 0; k < P.adps.size(); ++k) {
        const ADP& a = P.adps[k];
        auto vs = vars(a.lhs);
        std::vector<bool> branch_ok(a.rhs.size(), true);
        for (int s = 0; s < samples; ++s) {
            std::map<std::string, Rational> env;
            for (const auto& x : vs) env[x] = dist(rng);
            Rational ls = I.eval(anno_root(a.lhs), env);
            Rational lf = I.eval(a.lhs, env);
            Rational e1 = 0, e3 = 0;
            for (std::size_t j = 0; j < a.rhs.size(); ++j) {
                Rational sj = I.sharp_sum(a.rhs[j].t, env);
                Rational fj = I.eval(flat(a.rhs[j].t), env);
                e1 += a.rhs[j].p * sj;
                e3 += a.rhs[j].p * fj;
                if (!(ls > sj) || (a.flag && !(lf >= fj))) branch_ok[j] = false;
            }
            if (!(ls >= e1)) {
                if (why) *why = "expected annotated decrease fails for " + to_string(a);
                return false;
            }
            if (a.flag && !(lf >= e3)) {
                if (why) *why = "expected flat decrease fails for " + to_string(a);
                return false;
            }
        }
        if (st.count(k) && std::none_of(branch_ok.begin(), branch_ok.end(), [](bool b) { return b; })) {
            if (why) *why = "no strictly decreasing branch for " + to_string(a);
            return false;
        }
    }
    return true;
}

std::optional<RppResult> proc_reduction_pair(const ADPProblem& P, Mode, const SolverConfig& cfg, std::string* note) {
    auto rc = generate_rpp_constraints(P, cfg.bilinear);
    if (rc.candidates.empty()) return std::nullopt;
    auto out = solve_coefficients(rc.problem, cfg);
    if (note) *note = out.note;
    if (!out.model) return std::nullopt;
    const auto& values = *out.model;
    std::set<std::size_t> strict;
    for (std::size_t i = 0; i < rc.candidates.size(); ++i)
        if (conj_holds(rc.problem.disj[0].options[i], values)) strict.insert(rc.candidates[i].first);
    if (strict.empty()) return std::nullopt;
    RppResult res;
    res.interpretation = instantiate(rc.interp, values);
    res.strict.assign(strict.begin(), strict.end());
    res.problem = P;
    for (std::size_t k : res.strict) res.problem.adps[k] = flatten(res.problem.adps[k]);
    res.engine = out.engine;
    res.nodes = out.nodes;
    return res;
}

bool subterm_precondition(const ADPProblem& P) {
    for (const auto& a : P.adps)
        for (const auto& b : a.rhs)
            if (annotation_count(b.t) > 1) return false;
    return true;
}

namespace {

Term project(const Term& t, const std::map<std::string, int>& proj) {
    auto it = proj.find(t.name());
    if (it == proj.end() || t.arity() == 0) return flat(t);
    return t.args()[it->second - 1];
}

}  // namespace

std::optional<SubtermResult> proc_subterm_criterion(const ADPProblem& P, Mode mode, Refusal* refusal) {
    if (mode == Mode::Full) {
        if (refusal) refusal->reason = "subterm criterion is unsound for full rewriting (AST)";
        return std::nullopt;
    }
    if (!subterm_precondition(P)) {
        if (refusal) refusal->reason = "some right-hand side term carries more than one annotation";
        return std::nullopt;
    }
    struct Pair {
        std::size_t adp;
        Term lhs;
        Term t;
    };
    std::vector<Pair> pairs;
    std::map<std::string, int> arities;
    for (std::size_t k = 0; k < P.adps.size(); ++k)
        for (const auto& b : P.adps[k].rhs)
            for (const auto& [pos, t] : annotated_subterms(b.t)) {
                pairs.push_back({k, P.adps[k].lhs, t});
                arities[P.adps[k].lhs.name()] = static_cast<int>(P.adps[k].lhs.arity());
                arities[t.name()] = static_cast<int>(t.arity());
            }
    if (pairs.empty()) {
        if (refusal) refusal->reason = "no annotations";
        return std::nullopt;
    }
    std::vector<std::string> syms;
    for (const auto& [f, n] : arities)
        if (n > 0) syms.push_back(f);
    double combos = 1;
    for (const auto& f : syms) combos *= arities[f];
    if (combos > 100000) {
        if (refusal) refusal->reason = "too many simple projections";
        return std::nullopt;
    }
    std::map<std::string, int> proj;
    for (const auto& f : syms) proj[f] = 1;
    std::optional<SubtermResult> best;
    for (;;) {
        bool ok = true;
        std::set<std::size_t> strict;
        for (const auto& pr : pairs) {
            Term l = project(pr.lhs, proj);
            Term r = project(pr.t, proj);
            if (l == r) continue;
            if (is_proper_subterm(r, l)) {
                strict.insert(pr.adp);
                continue;
            }
            ok = false;
            break;
        }
        if (ok && !strict.empty() && (!best || strict.size() > best->strict.size())) {
            SubtermResult r;
            r.projection = proj;
            r.strict.assign(strict.begin(), strict.end());
            best = r;
        }
        std::size_t i = 0;
        for (; i < syms.size(); ++i) {
            if (++proj[syms[i]] <= arities[syms[i]]) break;
            proj[syms[i]] = 1;
        }
        if (i == syms.size()) break;
    }
    if (!best) {
        if (refusal) refusal->reason = "no simple projection with a strict decrease";
        return std::nullopt;
    }
    best->problem = P;
    for (std::size_t k : best->strict) best->problem.adps[k] = flatten(best->problem.adps[k]);
    return best;
}

namespace {

std::set<std::string> rule_roots(const std::vector<PlainRule>& rules) {
    std::set<std::string> out;
    for (const auto& r : rules) out.insert(r.lhs.name());
    return out;
}

bool dp_edge(const PlainRule& a, const PlainRule& b, const std::vector<PlainRule>& rules, Mode mode) {
    FreshNames fresh;
    fresh.reserve(a.lhs);
    fresh.reserve(a.rhs);
    Term lb = rename_apart(b.lhs, fresh);
    Term start = cap(a.rhs, rule_roots(rules), fresh);
    if (mode == Mode::Full) start = ren(start, fresh);
    auto delta = unify(start, lb);
    if (!delta) return false;
    if (mode == Mode::Innermost) {
        std::vector<Term> lhss;
        for (const auto& r : rules) lhss.push_back(r.lhs);
        if (!is_anf(flat(substitute(a.lhs, *delta)), lhss)) return false;
        if (!is_anf(flat(substitute(lb, *delta)), lhss)) return false;
    }
    return true;
}

void classic_usable(const Term& t, const std::vector<PlainRule>& rules, std::set<std::size_t>& out) {
    if (t.is_var()) return;
    if (!t.annotated())
        for (std::size_t k = 0; k < rules.size(); ++k)
            if (rules[k].lhs.name() == t.name() && out.insert(k).second) classic_usable(rules[k].rhs, rules, out);
    for (const auto& a : t.args()) classic_usable(a, rules, out);
}

std::string rule_list(const std::vector<PlainRule>& rs, const std::vector<std::size_t>& idx) {
    std::string s;
    for (std::size_t i : idx) s += (s.empty() ? "" : "; ") + to_string(rs[i].lhs) + " -> " + to_string(rs[i].rhs);
    return s.empty() ? "none" : s;
}

}  // namespace

NonProbResult nonprob_dp_prove(const std::vector<PlainRule>& dps, const std::vector<PlainRule>& rules, Mode mode,
                               const SolverConfig& cfg) {
    NonProbResult res;
    std::vector<std::vector<std::size_t>> work;
    std::vector<std::size_t> all(dps.size());
    for (std::size_t i = 0; i < dps.size(); ++i) all[i] = i;
    work.push_back(all);
    while (!work.empty()) {
        auto S = work.back();
        work.pop_back();
        if (S.empty()) continue;
        if (cfg.deadline.expired()) {
            res.steps.push_back({"Timeout", "deadline reached"});
            return res;
        }
        DepGraph g;
        g.succ.resize(S.size());
        for (std::size_t i = 0; i < S.size(); ++i)
            for (std::size_t j = 0; j < S.size(); ++j)
                if (dp_edge(dps[S[i]], dps[S[j]], rules, mode)) g.succ[i].insert(j);
        auto comps = sccs(g);
        bool whole = comps.size() == 1 && comps[0].size() == S.size();
        if (!whole) {
            std::string detail;
            for (const auto& c : comps) {
                std::vector<std::size_t> sub;
                for (std::size_t i : c) sub.push_back(S[i]);
                detail += (detail.empty() ? "" : " | ") + rule_list(dps, sub);
                work.push_back(sub);
            }
            res.steps.push_back({"DPGraph", comps.empty() ? "no SCCs" : "SCCs " + detail});
            continue;
        }
        std::vector<std::size_t> used;
        if (mode == Mode::Innermost) {
            std::set<std::size_t> u;
            for (std::size_t i : S) classic_usable(dps[i].rhs, rules, u);
            used.assign(u.begin(), u.end());
            res.steps.push_back({"UsableRules", rule_list(rules, used)});
        } else {
            for (std::size_t k = 0; k < rules.size(); ++k) used.push_back(k);
        }
        Interpretation I(cfg.bilinear);
        ArithProblem pb;
        DisjConstraint strict{"some DP is strict", {}};
        std::vector<std::vector<Atom>> strict_atoms;
        for (std::size_t i : S) {
            SymPoly l = I.eval(dps[i].lhs);
            SymPoly r = I.eval(dps[i].rhs);
            pb.conj.push_back({"DP " + to_string(dps[i].lhs) + " -> " + to_string(dps[i].rhs), compare_atoms(l, r, false)});
            strict.options.push_back({"strict DP", compare_atoms(l, r, true)});
        }
        for (std::size_t k : used)
            pb.conj.push_back({"rule", compare_atoms(I.eval(rules[k].lhs), I.eval(rules[k].rhs), false)});
        pb.disj.push_back(strict);
        pb.unknown_names = I.unknown_names();
        auto out = solve_coefficients(pb, cfg);
        if (!out.model) {
            res.steps.push_back({"ReductionPair", "no interpretation found" + (out.note.empty() ? "" : " (" + out.note + ")")});
            return res;
        }
        auto C = instantiate(I, *out.model);
        std::vector<std::size_t> rest, removed;
        for (std::size_t i = 0; i < S.size(); ++i) {
            if (conj_holds(pb.disj[0].options[i], *out.model))
                removed.push_back(S[i]);
            else
                rest.push_back(S[i]);
        }
        res.steps.push_back({"ReductionPair", C.describe() + "; strict: " + rule_list(dps, removed)});
        work.push_back(rest);
    }
    res.proved = true;
    return res;
}

ProbabilityRemovalResult proc_probability_removal(const ADPProblem& P, Mode mode, const SolverConfig& cfg) {
    ProbabilityRemovalResult res;
    for (const auto& a : P.adps)
        if (a.rhs.size() != 1 || a.rhs[0].p != 1) {
            res.refusal = "ADP " + to_string(a) + " has a non-trivial probability";
            return res;
        }
    res.applicable = true;
    res.dps = dp(P);
    res.rules = np(P);
    if (res.dps.empty()) {
        res.proved = true;
        res.backend.proved = true;
        return res;
    }
    res.backend = nonprob_dp_prove(res.dps, res.rules, mode, cfg);
    res.proved = res.backend.proved;
    return res;
}

}  // namespace adp
