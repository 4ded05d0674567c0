#include "adp/transform.hpp"

#include <algorithm>
#include <sstream>

namespace adp {

namespace {

std::set<std::string> adp_vars(const ADP& a) {
    std::set<std::string> out;
    collect_vars(a.lhs, out);
    for (const auto& br : a.rhs) collect_vars(br.t, out);
    return out;
}

FreshNames fresh_for(const ADPProblem& P) {
    FreshNames fresh;
    for (const auto& a : P.adps)
        for (const auto& x : adp_vars(a)) fresh.reserve(x);
    return fresh;
}

void push_unique(std::vector<ADP>& out, const ADP& a) {
    for (const auto& b : out)
        if (variant(a, b)) return;
    out.push_back(a);
}

// Replaces ADP k by the instances and appends the flattened original.
ADPProblem assemble(const ADPProblem& P, std::size_t k, const std::vector<ADP>& instances, const ADP& extra) {
    std::vector<ADP> adps;
    for (std::size_t i = 0; i < P.adps.size(); ++i) {
        if (i == k)
            adps.insert(adps.end(), instances.begin(), instances.end());
        else
            adps.push_back(P.adps[i]);
    }
    adps.push_back(extra);
    return make_problem(std::move(adps), &P.signature);
}

// t is flat with an annotated root; Cap^-1 never abstracts the root itself.
Term cap_inverse_below_root(const Term& t, const std::set<std::string>& roots, bool collapsing, FreshNames& fresh) {
    if (t.is_var()) return t;
    std::vector<Term> args;
    for (const auto& a : t.args()) args.push_back(cap_inverse(a, roots, collapsing, fresh));
    return Term::app(t.name(), std::move(args), t.annotated());
}

std::vector<RuleShape> shapes_for(const ADPProblem& P, const std::set<std::size_t>& ids) {
    std::vector<RuleShape> out;
    for (std::size_t i : ids) {
        RuleShape s;
        s.lhs = P.adps[i].lhs;
        for (const auto& br : P.adps[i].rhs) s.rhs.push_back(flat(br.t));
        out.push_back(std::move(s));
    }
    return out;
}

bool rewritable_at(const Term& s, const ADPProblem& P) {
    if (s.is_var() || s.annotated() || has_annotation(s)) return false;
    if (!P.defined().count(s.name())) return false;
    for (const auto& a : P.adps)
        if (a.flag && match(a.lhs, s)) return true;
    return false;
}

}  // namespace

std::vector<RewriteTarget> rewriting_targets(const ADPProblem& P, std::size_t k) {
    const ADP& a = P.adps.at(k);
    std::vector<std::size_t> order(a.rhs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a.rhs[x].p > a.rhs[y].p; });
    auto lhss = P.lhss();
    std::vector<RewriteTarget> out;
    for (std::size_t j : order) {
        std::vector<RewriteTarget> inner, outer;
        for (const auto& pos : function_positions(a.rhs[j].t)) {
            Term s = subterm_at(a.rhs[j].t, pos);
            if (!rewritable_at(s, P)) continue;
            (is_anf(s, lhss) ? inner : outer).push_back({j, pos});
        }
        out.insert(out.end(), inner.begin(), inner.end());
        out.insert(out.end(), outer.begin(), outer.end());
    }
    return out;
}

std::optional<TransformResult> proc_rewriting(const ADPProblem& P, std::size_t k, std::size_t j, const Position& tau,
                                              Mode mode, std::string* refusal) {
    auto refuse = [&](const std::string& why) -> std::optional<TransformResult> {
        if (refusal) *refusal = why;
        return std::nullopt;
    };
    if (mode == Mode::Full) return refuse("rewriting processor is only available for innermost rewriting");
    if (k >= P.adps.size()) return refuse("no such ADP");
    const ADP& a = P.adps[k];
    if (j >= a.rhs.size()) return refuse("no such branch");
    const Term& rj = a.rhs[j].t;
    if (!valid_position(rj, tau)) return refuse("invalid position " + position_to_string(tau));
    Term s = subterm_at(rj, tau);
    if (s.is_var() || !P.defined().count(s.name())) return refuse("subterm at the position is not rooted by a defined symbol");
    if (has_annotation(s)) return refuse("subterm at the position contains annotations");

    std::size_t beta = P.adps.size();
    Subst sigma;
    for (std::size_t i = 0; i < P.adps.size(); ++i) {
        if (!P.adps[i].flag) continue;
        if (auto m = match(P.adps[i].lhs, s)) {
            beta = i;
            sigma = *m;
            break;
        }
    }
    if (beta == P.adps.size()) return refuse("no ADP with flag true matches the subterm");

    auto used = usable_rules_of(s, P);
    auto rep = analyze_shapes(shapes_for(P, used));
    if (!rep.global.non_overlapping) return refuse("usable rules of the subterm are overlapping");

    std::size_t bidx = static_cast<std::size_t>(std::distance(used.begin(), used.find(beta)));
    bool gate2 = std::all_of(used.begin(), used.end(), [&](std::size_t i) {
        return P.adps[i].rhs.size() == 1 && P.adps[i].rhs[0].p == 1;
    });
    const auto& bp = rep.per_rule.at(bidx);
    bool gate1 = bp.linear && bp.non_erasing;
    bool gate3 = is_ground(s) && is_anf(s, P.lhss());
    std::string gate;
    if (gate2)
        gate = "usable rules are non-probabilistic";
    else if (gate1)
        gate = "used rule is linear and non-erasing";
    else if (gate3)
        gate = "ground innermost redex";
    else
        return refuse("rule is not linear and non-erasing, usable rules are probabilistic, and the redex is not a ground innermost one");

    ADP na;
    na.lhs = a.lhs;
    na.flag = a.flag;
    for (std::size_t i = 0; i < a.rhs.size(); ++i) {
        if (i != j) {
            na.rhs.push_back(a.rhs[i]);
            continue;
        }
        for (const auto& br : P.adps[beta].rhs)
            na.rhs.push_back({a.rhs[i].p * br.p, replace_at(rj, tau, substitute(flat(br.t), sigma))});
    }
    TransformResult res;
    res.problem = assemble(P, k, {na}, flatten(a));
    std::ostringstream os;
    os << "rewrote " << to_string(s) << " at position " << position_to_string(tau) << " of branch " << j + 1
       << " using " << to_string(P.adps[beta]);
    res.description = os.str();
    res.gate = gate;
    return res;
}

TransformResult proc_instantiation(const ADPProblem& P, std::size_t k, Mode mode) {
    const ADP& a = P.adps.at(k);
    auto roots = P.flag_true_roots();
    auto lhss = P.lhss();
    FreshNames fresh = fresh_for(P);
    Term la = anno_root(a.lhs);
    std::vector<ADP> inst;
    for (const auto& b0 : P.adps) {
        ADP b = rename_apart(b0, fresh);
        for (const auto& br : b.rhs)
            for (const auto& [pos, t] : annotated_subterms(br.t)) {
                Term start = cap(anno_root(t), roots, fresh);
                if (mode == Mode::Full) start = ren(start, fresh);
                auto delta = unify(start, la);
                if (!delta) continue;
                if (mode == Mode::Innermost &&
                    (!is_anf(substitute(b.lhs, *delta), lhss) || !is_anf(substitute(a.lhs, *delta), lhss)))
                    continue;
                push_unique(inst, normalize_variables(substitute(a, *delta)));
            }
    }
    TransformResult res;
    res.problem = assemble(P, k, inst, flatten(a));
    res.description = "instantiated " + to_string(a) + " into " + std::to_string(inst.size()) + " instance(s)";
    return res;
}

TransformResult proc_forward_instantiation(const ADPProblem& P, std::size_t k, Mode mode) {
    const ADP& a = P.adps.at(k);
    auto lhss = P.lhss();
    FreshNames fresh = fresh_for(P);
    std::set<std::string> all_roots;
    bool all_collapsing = false;
    for (const auto& c : P.adps)
        for (const auto& br : c.rhs) {
            if (br.t.is_var())
                all_collapsing = true;
            else
                all_roots.insert(br.t.name());
        }
    std::vector<ADP> inst;
    for (const auto& br : a.rhs)
        for (const auto& [pos, t] : annotated_subterms(br.t)) {
            Term ts = anno_root(t);
            std::set<std::string> roots = all_roots;
            bool collapsing = all_collapsing;
            if (mode == Mode::Innermost) {
                roots.clear();
                collapsing = false;
                for (std::size_t u : usable_rules_of(ts, P))
                    for (const auto& ubr : P.adps[u].rhs) {
                        if (ubr.t.is_var())
                            collapsing = true;
                        else
                            roots.insert(ubr.t.name());
                    }
            }
            for (const auto& b0 : P.adps) {
                ADP b = rename_apart(b0, fresh);
                Term target = ren(cap_inverse_below_root(anno_root(b.lhs), roots, collapsing, fresh), fresh);
                auto delta = unify(ts, target);
                if (!delta) continue;
                if (mode == Mode::Innermost &&
                    (!is_anf(substitute(a.lhs, *delta), lhss) || !is_anf(substitute(b.lhs, *delta), lhss)))
                    continue;
                push_unique(inst, normalize_variables(substitute(a, *delta)));
            }
        }
    TransformResult res;
    res.problem = assemble(P, k, inst, flatten(a));
    res.description =
        "forward-instantiated " + to_string(a) + " into " + std::to_string(inst.size()) + " instance(s)";
    return res;
}

NarrowingInfo compute_narrowing_substitutions(const Term& t, std::size_t k, const ADPProblem& P, Mode mode) {
    NarrowingInfo info;
    info.target = t;
    const ADP& a = P.adps.at(k);
    auto lhss = P.lhss();
    FreshNames fresh = fresh_for(P);
    fresh.reserve(t);
    Term ft = flat(t);
    for (const auto& tau : function_positions(ft)) {
        Term sub = subterm_at(ft, tau);
        for (std::size_t i = 0; i < P.adps.size(); ++i) {
            Term lb = rename_apart(P.adps[i].lhs, fresh);
            auto delta = unify(sub, lb);
            if (!delta) continue;
            if (mode == Mode::Innermost &&
                (!is_anf(substitute(a.lhs, *delta), lhss) || !is_anf(substitute(lb, *delta), lhss)))
                continue;
            info.substitutions.push_back({*delta, i, tau});
        }
    }
    return info;
}

namespace {

Term var_tuple(const std::vector<std::string>& xs, const Subst& s) {
    std::vector<Term> args;
    for (const auto& x : xs) args.push_back(substitute(Term::var(x), s));
    return Term::app("@tuple", std::move(args));
}

}  // namespace

bool is_covered(const Term& t2, std::size_t k, const std::vector<Subst>& deltas, const ADPProblem& P, Mode mode) {
    auto xs = vars(P.adps.at(k).lhs);
    auto info = compute_narrowing_substitutions(t2, k, P, mode);
    for (const auto& rho : info.substitutions) {
        Term tr = var_tuple(xs, rho.delta);
        bool found = false;
        for (const auto& d : deltas)
            if (is_instance_of(tr, var_tuple(xs, d))) {
                found = true;
                break;
            }
        if (!found) return false;
    }
    return true;
}

std::optional<TransformResult> proc_rule_overlap_instantiation(const ADPProblem& P, std::size_t k, std::size_t j,
                                                               const Position& pos, Mode mode,
                                                               std::string* refusal) {
    auto refuse = [&](const std::string& why) -> std::optional<TransformResult> {
        if (refusal) *refusal = why;
        return std::nullopt;
    };
    if (mode == Mode::Full) return refuse("rule overlap instantiation is only available for innermost rewriting");
    if (k >= P.adps.size() || j >= P.adps[k].rhs.size()) return refuse("no such ADP or branch");
    const ADP& a = P.adps[k];
    const Term& rj = a.rhs[j].t;
    if (!valid_position(rj, pos)) return refuse("invalid position " + position_to_string(pos));
    Term sub = subterm_at(rj, pos);
    if (sub.is_var() || !sub.annotated()) return refuse("no annotated subterm at the position");
    Term t = flat(sub);

    auto info = compute_narrowing_substitutions(t, k, P, mode);
    std::vector<Subst> deltas;
    std::vector<ADP> inst;
    for (const auto& ns : info.substitutions) {
        deltas.push_back(ns.delta);
        push_unique(inst, normalize_variables(substitute(a, ns.delta)));
    }
    ADP residual;
    residual.lhs = a.lhs;
    residual.flag = a.flag;
    for (const auto& br : a.rhs) {
        std::set<Position> keep;
        for (const auto& [p, t2] : annotated_subterms(br.t))
            if (!is_covered(t2, k, deltas, P, mode)) keep.insert(p);
        residual.rhs.push_back({br.p, anno(flat(br.t), keep)});
    }
    TransformResult res;
    res.problem = assemble(P, k, inst, residual);
    res.description = "instantiated " + to_string(a) + " by the " + std::to_string(inst.size()) +
                      " narrowing substitution(s) of " + to_string(t);
    return res;
}

bool same_annotated_core(const ADPProblem& a, const ADPProblem& b) {
    std::vector<ADP> xa, xb;
    for (const auto& x : a.adps)
        if (x.has_annotations()) push_unique(xa, x);
    for (const auto& x : b.adps)
        if (x.has_annotations()) push_unique(xb, x);
    if (xa.size() != xb.size()) return false;
    for (const auto& x : xa)
        if (std::none_of(xb.begin(), xb.end(), [&](const ADP& y) { return variant(x, y); })) return false;
    return true;
}

}  // namespace adp
