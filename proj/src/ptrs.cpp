#include "adp/ptrs.hpp"

#include <algorithm>
#include <stdexcept>

namespace adp {

std::string rational_to_string(const Rational& q) {
    Rational c = q;
    c.canonicalize();
    return c.get_str();
}

Rational parse_rational(const std::string& text) {
    Rational q;
    if (q.set_str(text, 10) != 0) throw std::invalid_argument("malformed rational '" + text + "'");
    q.canonicalize();
    return q;
}

void validate_distribution(const MultiDistribution& mu) {
    if (mu.empty()) throw std::invalid_argument("empty distribution");
    Rational sum = 0;
    for (const auto& b : mu) {
        if (b.p <= 0 || b.p > 1) throw std::invalid_argument("probability " + rational_to_string(b.p) + " outside (0,1]");
        sum += b.p;
    }
    if (sum != 1) throw std::invalid_argument("probabilities sum to " + rational_to_string(sum));
}

std::string to_string(const MultiDistribution& mu, bool sharp_style) {
    std::string s = "{";
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (i) s += ", ";
        s += rational_to_string(mu[i].p) + ": " + to_string(mu[i].t, sharp_style);
    }
    return s + "}";
}

std::set<std::string> Signature::constructors() const {
    std::set<std::string> out;
    for (const auto& [f, n] : arity)
        if (!defined.count(f)) out.insert(f);
    return out;
}

void validate_rule(const ProbRule& r) {
    if (r.lhs.is_var()) throw std::invalid_argument("left-hand side is a variable");
    if (has_annotation(r.lhs)) throw std::invalid_argument("left-hand side carries an annotation");
    validate_distribution(r.rhs);
    std::set<std::string> lv;
    collect_vars(r.lhs, lv);
    for (const auto& b : r.rhs) {
        for (const auto& x : vars(b.t))
            if (!lv.count(x))
                throw std::invalid_argument("variable " + x + " of right-hand side " + to_string(b.t) +
                                            " does not occur in left-hand side " + to_string(r.lhs));
    }
}

Signature infer_signature(const std::vector<ProbRule>& rules) {
    Signature sig;
    for (const auto& r : rules) {
        collect_symbols(r.lhs, sig.arity);
        for (const auto& b : r.rhs) collect_symbols(b.t, sig.arity);
        sig.defined.insert(r.lhs.name());
    }
    return sig;
}

PTRS make_ptrs(std::vector<ProbRule> rules) {
    for (const auto& r : rules) validate_rule(r);
    PTRS R;
    R.signature = infer_signature(rules);
    R.rules = std::move(rules);
    return R;
}

std::string to_string(const ProbRule& r) { return to_string(r.lhs) + " -> " + to_string(r.rhs); }

std::string to_string(const PTRS& R) {
    std::string s;
    for (const auto& r : R.rules) s += to_string(r) + ";\n";
    return s;
}

std::vector<RuleShape> shapes_of(const PTRS& R) {
    std::vector<RuleShape> out;
    for (const auto& r : R.rules) {
        RuleShape s{r.lhs, {}};
        for (const auto& b : r.rhs) s.rhs.push_back(flat(b.t));
        out.push_back(std::move(s));
    }
    return out;
}

namespace {

bool overlaps(const Term& l1, const Term& l2, bool same_rule) {
    FreshNames fresh;
    fresh.reserve(l1);
    fresh.reserve(l2);
    Term l2r = rename_apart(l2, fresh);
    for (const auto& pi : function_positions(l1)) {
        if (same_rule && pi.empty()) continue;
        if (unify(flat(subterm_at(l1, pi)), l2r)) return true;
    }
    return false;
}

}  // namespace

PropertyReport analyze_shapes(const std::vector<RuleShape>& rules) {
    PropertyReport rep;
    rep.per_rule.resize(rules.size());
    for (std::size_t i = 0; i < rules.size(); ++i) {
        auto& pr = rep.per_rule[i];
        const auto& r = rules[i];
        pr.left_linear = is_linear(r.lhs);
        auto lv = vars(r.lhs);
        for (const auto& t : r.rhs) {
            if (!is_linear(t)) pr.right_linear = false;
            for (const auto& x : lv) {
                int cl = var_count(r.lhs, x);
                int cr = var_count(t, x);
                if (cr > cl) pr.non_duplicating = false;
                if (cr == 0) pr.non_erasing = false;
            }
        }
        pr.linear = pr.left_linear && pr.right_linear;
    }
    for (std::size_t i = 0; i < rules.size(); ++i)
        for (std::size_t j = 0; j < rules.size(); ++j)
            if (overlaps(rules[i].lhs, rules[j].lhs, i == j)) {
                rep.per_rule[i].non_overlapping = false;
                rep.per_rule[j].non_overlapping = false;
            }
    for (const auto& pr : rep.per_rule) {
        rep.global.non_duplicating &= pr.non_duplicating;
        rep.global.left_linear &= pr.left_linear;
        rep.global.right_linear &= pr.right_linear;
        rep.global.linear &= pr.linear;
        rep.global.non_erasing &= pr.non_erasing;
        rep.global.non_overlapping &= pr.non_overlapping;
    }
    return rep;
}

PropertyReport analyze_properties(const PTRS& R) { return analyze_shapes(shapes_of(R)); }

bool is_nf(const Term& t, const std::vector<Term>& lhss) {
    if (t.is_var()) return true;
    for (const auto& l : lhss)
        if (match(l, t)) return false;
    for (const auto& a : t.args())
        if (!is_nf(a, lhss)) return false;
    return true;
}

bool is_anf(const Term& t, const std::vector<Term>& lhss) {
    for (const auto& a : t.args())
        if (!is_nf(a, lhss)) return false;
    return true;
}

std::vector<Term> lhs_list(const PTRS& R) {
    std::vector<Term> out;
    for (const auto& r : R.rules) out.push_back(r.lhs);
    return out;
}

bool is_nf(const Term& t, const PTRS& R) { return is_nf(t, lhs_list(R)); }
bool is_anf(const Term& t, const PTRS& R) { return is_anf(t, lhs_list(R)); }

std::string to_string(RedexPolicy p) {
    switch (p) {
        case RedexPolicy::InnermostLeftmost: return "innermost-leftmost";
        case RedexPolicy::InnermostRightmost: return "innermost-rightmost";
        case RedexPolicy::LeftmostOutermost: return "leftmost-outermost";
        case RedexPolicy::RightmostOutermost: return "rightmost-outermost";
        case RedexPolicy::Random: return "random";
        case RedexPolicy::RandomInnermost: return "random-innermost";
        case RedexPolicy::Exhaustive: return "exhaustive-enumeration";
    }
    return "?";
}

bool is_innermost_policy(RedexPolicy p) {
    return p == RedexPolicy::InnermostLeftmost || p == RedexPolicy::InnermostRightmost ||
           p == RedexPolicy::RandomInnermost;
}

namespace {

void redexes_rec(const Term& t, const std::vector<Term>& lhss, bool innermost, Position& cur,
                 std::vector<std::pair<std::size_t, Position>>& out, bool& below_reducible) {
    below_reducible = false;
    if (t.is_var()) return;
    std::size_t mark = out.size();
    std::vector<std::pair<std::size_t, Position>> inner;
    bool any_below = false;
    for (std::size_t i = 0; i < t.arity(); ++i) {
        cur.push_back(static_cast<int>(i) + 1);
        bool b = false;
        redexes_rec(t.args()[i], lhss, innermost, cur, inner, b);
        any_below = any_below || b;
        cur.pop_back();
    }
    bool here = false;
    for (std::size_t k = 0; k < lhss.size(); ++k) {
        if (match(lhss[k], t)) {
            here = true;
            if (!innermost || !any_below) out.emplace_back(k, cur);
        }
    }
    (void)mark;
    out.insert(out.end(), inner.begin(), inner.end());
    below_reducible = here || any_below;
}

}  // namespace

std::vector<std::pair<std::size_t, Position>> redexes(const Term& t, const PTRS& R, bool innermost) {
    std::vector<std::pair<std::size_t, Position>> out;
    Position cur;
    bool b = false;
    redexes_rec(t, lhs_list(R), innermost, cur, out, b);
    return out;
}

PtrsStep apply_step(const Term& t, const PTRS& R, std::size_t rule, const Position& pos) {
    const auto& r = R.rules.at(rule);
    Term sub = subterm_at(t, pos);
    auto sigma = match(r.lhs, sub);
    if (!sigma) throw std::invalid_argument("rule does not match at position " + position_to_string(pos));
    PtrsStep st;
    st.rule = rule;
    st.pos = pos;
    for (const auto& b : r.rhs) st.result.push_back({b.p, replace_at(t, pos, substitute(b.t, *sigma))});
    return st;
}

std::optional<PtrsStep> ptrs_step(const Term& t, const PTRS& R, RedexPolicy policy, std::mt19937_64* rng) {
    bool inner = is_innermost_policy(policy);
    auto rs = redexes(t, R, inner);
    if (rs.empty()) return std::nullopt;
    std::size_t pick = 0;
    switch (policy) {
        case RedexPolicy::InnermostLeftmost:
        case RedexPolicy::LeftmostOutermost:
        case RedexPolicy::Exhaustive: pick = 0; break;
        case RedexPolicy::InnermostRightmost:
        case RedexPolicy::RightmostOutermost: {
            // rightmost: the redex whose position is largest in the right-to-left preorder
            std::size_t best = 0;
            for (std::size_t i = 1; i < rs.size(); ++i) {
                const auto& a = rs[i].second;
                const auto& b = rs[best].second;
                bool better;
                if (is_prefix(a, b) || is_prefix(b, a))
                    better = policy == RedexPolicy::RightmostOutermost ? a.size() < b.size() : a.size() > b.size();
                else
                    better = std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
                if (better) best = i;
            }
            pick = best;
            break;
        }
        case RedexPolicy::Random:
        case RedexPolicy::RandomInnermost: {
            if (!rng) throw std::invalid_argument("random policy requires a generator");
            std::uniform_int_distribution<std::size_t> d(0, rs.size() - 1);
            pick = d(*rng);
            break;
        }
    }
    if (policy == RedexPolicy::LeftmostOutermost || policy == RedexPolicy::Exhaustive) {
        // leftmost-outermost is the first position in preorder
        std::size_t best = 0;
        for (std::size_t i = 1; i < rs.size(); ++i)
            if (rs[i].second < rs[best].second) best = i;
        pick = best;
    }
    return apply_step(t, R, rs[pick].first, rs[pick].second);
}

std::vector<PtrsStep> ptrs_steps_all(const Term& t, const PTRS& R, bool innermost) {
    std::vector<PtrsStep> out;
    for (const auto& [k, p] : redexes(t, R, innermost)) out.push_back(apply_step(t, R, k, p));
    return out;
}

}  // namespace adp
