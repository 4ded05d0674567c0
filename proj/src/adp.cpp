#include "adp/adp.hpp"

#include <stdexcept>

namespace adp {

bool ADP::has_annotations() const {
    for (const auto& b : rhs)
        if (has_annotation(b.t)) return true;
    return false;
}

std::set<std::string> ADPProblem::defined() const {
    std::set<std::string> out = signature.defined;
    for (const auto& a : adps) out.insert(a.lhs.name());
    return out;
}

bool ADPProblem::has_annotations() const {
    for (const auto& a : adps)
        if (a.has_annotations()) return true;
    return false;
}

std::vector<Term> ADPProblem::lhss() const {
    std::vector<Term> out;
    out.reserve(adps.size());
    for (const auto& a : adps) out.push_back(a.lhs);
    return out;
}

std::set<std::string> ADPProblem::flag_true_roots() const {
    std::set<std::string> out;
    for (const auto& a : adps)
        if (a.flag) out.insert(a.lhs.name());
    return out;
}

void validate_adp(const ADP& a) {
    if (a.lhs.is_var()) throw std::invalid_argument("left-hand side is a variable");
    if (has_annotation(a.lhs)) throw std::invalid_argument("left-hand side carries an annotation");
    validate_distribution(a.rhs);
    std::set<std::string> lv;
    collect_vars(a.lhs, lv);
    for (const auto& b : a.rhs)
        for (const auto& x : vars(b.t))
            if (!lv.count(x)) throw std::invalid_argument("variable " + x + " does not occur in left-hand side " + to_string(a.lhs));
}

std::string to_string(const ADP& a, bool sharp_style) {
    return to_string(a.lhs, sharp_style) + " -> " + to_string(a.rhs, sharp_style) + "^" + (a.flag ? "true" : "false");
}

std::string to_string(const ADPProblem& P, bool sharp_style) {
    std::string s;
    for (const auto& a : P.adps) s += to_string(a, sharp_style) + "\n";
    return s;
}

bool operator==(const ADP& a, const ADP& b) {
    if (a.flag != b.flag || a.lhs != b.lhs || a.rhs.size() != b.rhs.size()) return false;
    for (std::size_t i = 0; i < a.rhs.size(); ++i)
        if (a.rhs[i].p != b.rhs[i].p || a.rhs[i].t != b.rhs[i].t) return false;
    return true;
}

bool operator==(const ADPProblem& a, const ADPProblem& b) {
    if (a.adps.size() != b.adps.size()) return false;
    for (std::size_t i = 0; i < a.adps.size(); ++i)
        if (!(a.adps[i] == b.adps[i])) return false;
    return true;
}

Signature signature_of(const std::vector<ADP>& adps, const Signature* base) {
    Signature sig;
    if (base) sig = *base;
    for (const auto& a : adps) {
        collect_symbols(a.lhs, sig.arity);
        for (const auto& b : a.rhs) collect_symbols(b.t, sig.arity);
        sig.defined.insert(a.lhs.name());
    }
    return sig;
}

ADPProblem make_problem(std::vector<ADP> adps, const Signature* base) {
    ADPProblem P;
    P.signature = signature_of(adps, base);
    P.adps = std::move(adps);
    return P;
}

ADP flatten(const ADP& a) {
    ADP out = a;
    for (auto& b : out.rhs) b.t = flat(b.t);
    return out;
}

ADPProblem flatten(const ADPProblem& P) {
    ADPProblem out = P;
    for (auto& a : out.adps) a = flatten(a);
    return out;
}

namespace {

Term encode(const ADP& a) {
    std::vector<Term> parts{a.lhs};
    for (const auto& b : a.rhs) parts.push_back(b.t);
    return Term::app("@adp", std::move(parts));
}

std::string nth_name(std::size_t k) {
    static const char* base[] = {"x", "y", "z", "u", "v", "w"};
    if (k < 6) return base[k];
    return "x" + std::to_string(k - 5);
}

}  // namespace

ADP substitute(const ADP& a, const Subst& s) {
    ADP out = a;
    out.lhs = substitute(a.lhs, s);
    for (auto& b : out.rhs) b.t = substitute(b.t, s);
    return out;
}

ADP normalize_variables(const ADP& a) {
    auto vs = vars(encode(a));
    std::set<std::string> used;
    for (const auto& x : vs)
        if (x.empty() || x[0] != '_') used.insert(x);
    Subst s;
    std::size_t k = 0;
    for (const auto& x : vs) {
        if (!x.empty() && x[0] == '_') {
            std::string n;
            do n = nth_name(k++);
            while (used.count(n));
            used.insert(n);
            s.emplace(x, Term::var(n));
        }
    }
    return substitute(a, s);
}

ADP rename_apart(const ADP& a, FreshNames& fresh) {
    Subst s;
    for (const auto& x : vars(encode(a))) s.emplace(x, fresh.next_var());
    return substitute(a, s);
}

bool variant(const ADP& a, const ADP& b) {
    if (a.flag != b.flag || a.rhs.size() != b.rhs.size()) return false;
    for (std::size_t i = 0; i < a.rhs.size(); ++i)
        if (a.rhs[i].p != b.rhs[i].p) return false;
    return variant(encode(a), encode(b));
}

bool variant(const ADPProblem& a, const ADPProblem& b) {
    if (a.adps.size() != b.adps.size()) return false;
    for (std::size_t i = 0; i < a.adps.size(); ++i)
        if (!variant(a.adps[i], b.adps[i])) return false;
    return true;
}

ADPProblem canonical_adps(const PTRS& R) {
    std::vector<ADP> adps;
    for (const auto& r : R.rules) {
        ADP a;
        a.lhs = r.lhs;
        a.flag = true;
        for (const auto& b : r.rhs) a.rhs.push_back({b.p, annotate_symbols(b.t, R.signature.defined)});
        adps.push_back(std::move(a));
    }
    return make_problem(std::move(adps), &R.signature);
}

std::vector<PlainRule> np(const ADPProblem& P) {
    std::vector<PlainRule> out;
    for (const auto& a : P.adps)
        if (a.flag)
            for (const auto& b : a.rhs) out.push_back({a.lhs, flat(b.t)});
    return out;
}

std::vector<PlainRule> dp(const ADPProblem& P) {
    std::vector<PlainRule> out;
    for (const auto& a : P.adps) {
        if (a.rhs.size() != 1 || a.rhs[0].p != 1)
            throw std::invalid_argument("dp requires trivial probabilities, violated by " + to_string(a));
        for (const auto& [pos, t] : annotated_subterms(a.rhs[0].t)) out.push_back({anno_root(a.lhs), anno_root(t)});
    }
    return out;
}

bool is_nf(const Term& t, const ADPProblem& P) { return is_nf(flat(t), P.lhss()); }
bool is_anf(const Term& t, const ADPProblem& P) { return is_anf(flat(t), P.lhss()); }

std::string to_string(RewriteCase c) {
    switch (c) {
        case RewriteCase::AT: return "AT";
        case RewriteCase::AF: return "AF";
        case RewriteCase::NT: return "NT";
        case RewriteCase::NF: return "NF";
    }
    return "?";
}

VRF vrf_drop_all(const ADP& a) {
    VRF v;
    v.phi.resize(a.rhs.size());
    return v;
}

VRF vrf_keep_leftmost(const ADP& a) {
    VRF v;
    v.phi.resize(a.rhs.size());
    auto lpos = variable_positions(a.lhs);
    for (std::size_t j = 0; j < a.rhs.size(); ++j) {
        auto rpos = variable_positions(a.rhs[j].t);
        for (const auto& rho : lpos) {
            const std::string& x = subterm_at(a.lhs, rho).name();
            for (const auto& q : rpos)
                if (subterm_at(a.rhs[j].t, q).name() == x) {
                    v.phi[j].emplace(rho, q);
                    break;
                }
        }
    }
    return v;
}

std::vector<VRF> vrf_enumerate_maximal(const ADP& a) {
    auto lpos = variable_positions(a.lhs);
    std::vector<VRF> acc{vrf_drop_all(a)};
    for (std::size_t j = 0; j < a.rhs.size(); ++j) {
        auto rpos = variable_positions(a.rhs[j].t);
        for (const auto& rho : lpos) {
            const std::string& x = subterm_at(a.lhs, rho).name();
            std::vector<Position> options;
            for (const auto& q : rpos)
                if (subterm_at(a.rhs[j].t, q).name() == x) options.push_back(q);
            if (options.empty()) continue;
            std::vector<VRF> next;
            for (const auto& v : acc)
                for (const auto& q : options) {
                    VRF w = v;
                    w.phi[j].emplace(rho, q);
                    next.push_back(std::move(w));
                }
            acc = std::move(next);
            if (acc.size() > 4096) throw std::runtime_error("too many variable reposition functions");
        }
    }
    return acc;
}

void validate_vrf(const ADP& a, const VRF& v) {
    if (v.phi.size() != a.rhs.size()) throw std::invalid_argument("VRF arity mismatch");
    for (std::size_t j = 0; j < a.rhs.size(); ++j)
        for (const auto& [rho, q] : v.phi[j]) {
            if (!valid_position(a.lhs, rho) || !valid_position(a.rhs[j].t, q))
                throw std::invalid_argument("VRF position outside term");
            Term l = subterm_at(a.lhs, rho);
            Term r = subterm_at(a.rhs[j].t, q);
            if (!l.is_var() || !r.is_var() || l.name() != r.name())
                throw std::invalid_argument("VRF maps " + position_to_string(rho) + " to " + position_to_string(q) +
                                            " with different contents");
        }
}

namespace {

RewriteCase classify(bool annotated, bool flag) {
    if (annotated) return flag ? RewriteCase::AT : RewriteCase::AF;
    return flag ? RewriteCase::NT : RewriteCase::NF;
}

AdpStep build_step(const Term& s, const Position& pi, std::size_t index, const ADP& a, const Subst& sigma,
                   const VRF* vrf) {
    Term redex = subterm_at(s, pi);
    AdpStep st;
    st.adp = index;
    st.pos = pi;
    st.rcase = classify(redex.annotated(), a.flag);
    bool keep_rhs = st.rcase == RewriteCase::AT || st.rcase == RewriteCase::AF;
    for (std::size_t j = 0; j < a.rhs.size(); ++j) {
        const Term& rj = a.rhs[j].t;
        Term inst;
        if (!vrf) {
            inst = substitute(keep_rhs ? rj : flat(rj), sigma);
        } else {
            std::set<Position> phi;
            if (keep_rhs)
                for (const auto& p : annotated_positions(rj)) phi.insert(p);
            for (const auto& [rho, target] : vrf->phi[j]) {
                Term below = subterm_at(redex, rho);
                for (const auto& tau : annotated_positions(below)) {
                    Position q = target;
                    q.insert(q.end(), tau.begin(), tau.end());
                    phi.insert(q);
                }
            }
            inst = anno(substitute(flat(rj), sigma), phi);
        }
        Term t = replace_at(s, pi, inst);
        if (st.rcase == RewriteCase::AF || st.rcase == RewriteCase::NF) t = deanno_above(t, pi);
        st.result.push_back({a.rhs[j].p, t});
    }
    return st;
}

}  // namespace

std::vector<AdpStep> adp_step_innermost(const Term& s, const ADPProblem& P) {
    std::vector<AdpStep> out;
    auto lhss = P.lhss();
    for (const auto& pi : function_positions(s)) {
        Term sub = subterm_at(s, pi);
        Term fsub = flat(sub);
        if (!is_anf(fsub, lhss)) continue;
        for (std::size_t k = 0; k < P.adps.size(); ++k) {
            auto sigma = match(P.adps[k].lhs, sub);
            if (!sigma) continue;
            out.push_back(build_step(s, pi, k, P.adps[k], *sigma, nullptr));
        }
    }
    return out;
}

std::vector<AdpStep> adp_step_full(const Term& s, const ADPProblem& P, const VRF& vrf, std::size_t adp_index) {
    const ADP& a = P.adps.at(adp_index);
    validate_vrf(a, vrf);
    std::vector<AdpStep> out;
    for (const auto& pi : function_positions(s)) {
        auto sigma = match(a.lhs, subterm_at(s, pi));
        if (!sigma) continue;
        out.push_back(build_step(s, pi, adp_index, a, *sigma, &vrf));
    }
    return out;
}

std::vector<AdpStep> adp_step_full(const Term& s, const ADPProblem& P, VrfPolicy policy) {
    std::vector<AdpStep> out;
    for (std::size_t k = 0; k < P.adps.size(); ++k) {
        std::vector<VRF> vs;
        if (policy == VrfPolicy::DropAll)
            vs.push_back(vrf_drop_all(P.adps[k]));
        else if (policy == VrfPolicy::KeepLeftmost)
            vs.push_back(vrf_keep_leftmost(P.adps[k]));
        else
            vs = vrf_enumerate_maximal(P.adps[k]);
        for (const auto& v : vs) {
            auto steps = adp_step_full(s, P, v, k);
            out.insert(out.end(), steps.begin(), steps.end());
        }
    }
    return out;
}

}  // namespace adp
