#include "adp/term.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <stdexcept>

namespace adp {

struct Term::Node {
    bool is_var = false;
    bool annotated = false;
    std::string name;
    std::vector<Term> args;
    std::size_t hash = 0;
    std::size_t size = 1;
};

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
    return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

const std::vector<Term>& no_args() {
    static const std::vector<Term> empty;
    return empty;
}

}  // namespace

Term::Term() : Term(var("_")) {}

Term Term::var(const std::string& name) {
    auto n = std::make_shared<Node>();
    n->is_var = true;
    n->name = name;
    n->hash = mix(std::hash<std::string>{}(name), 1);
    return Term(std::move(n));
}

Term Term::app(const std::string& name, std::vector<Term> args, bool annotated) {
    auto n = std::make_shared<Node>();
    n->name = name;
    n->annotated = annotated;
    std::size_t h = mix(std::hash<std::string>{}(name), annotated ? 3 : 2);
    std::size_t sz = 1;
    for (const auto& a : args) {
        h = mix(h, a.hash());
        sz += a.size();
    }
    n->args = std::move(args);
    n->hash = h;
    n->size = sz;
    return Term(std::move(n));
}

bool Term::is_var() const { return node_->is_var; }
const std::string& Term::name() const { return node_->name; }
bool Term::annotated() const { return node_->annotated; }
const std::vector<Term>& Term::args() const { return node_->is_var ? no_args() : node_->args; }
std::size_t Term::hash() const { return node_->hash; }
std::size_t Term::size() const { return node_->size; }

int compare(const Term& a, const Term& b) {
    if (a.same_node(b)) return 0;
    if (a.is_var() != b.is_var()) return a.is_var() ? -1 : 1;
    if (int c = a.name().compare(b.name())) return c < 0 ? -1 : 1;
    if (a.is_var()) return 0;
    if (a.annotated() != b.annotated()) return a.annotated() ? 1 : -1;
    if (a.arity() != b.arity()) return a.arity() < b.arity() ? -1 : 1;
    for (std::size_t i = 0; i < a.arity(); ++i)
        if (int c = compare(a.args()[i], b.args()[i])) return c;
    return 0;
}

bool operator==(const Term& a, const Term& b) {
    if (a.same_node(b)) return true;
    if (a.hash() != b.hash() || a.size() != b.size()) return false;
    return compare(a, b) == 0;
}

bool operator<(const Term& a, const Term& b) { return compare(a, b) < 0; }

std::string position_to_string(const Position& p) {
    if (p.empty()) return "eps";
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) s += '.';
        s += std::to_string(p[i]);
    }
    return s;
}

bool is_prefix(const Position& p, const Position& q) {
    return p.size() <= q.size() && std::equal(p.begin(), p.end(), q.begin());
}

bool orthogonal(const Position& p, const Position& q) { return !is_prefix(p, q) && !is_prefix(q, p); }

std::string annotated_name(const std::string& name, bool sharp_style) {
    if (!sharp_style) {
        std::string up = name;
        bool had_lower = false;
        bool had_upper = false;
        for (auto& c : up) {
            if (std::islower(static_cast<unsigned char>(c))) had_lower = true;
            if (std::isupper(static_cast<unsigned char>(c))) had_upper = true;
            c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        }
        if (had_lower && !had_upper) return up;
    }
    return name + "#";
}

namespace {

void print(const Term& t, bool sharp_style, std::string& out) {
    if (t.is_var()) {
        out += t.name();
        return;
    }
    out += t.annotated() ? annotated_name(t.name(), sharp_style) : t.name();
    if (t.arity() == 0) return;
    out += '(';
    for (std::size_t i = 0; i < t.arity(); ++i) {
        if (i) out += ',';
        print(t.args()[i], sharp_style, out);
    }
    out += ')';
}

}  // namespace

std::string to_string(const Term& t, bool sharp_style) {
    std::string out;
    print(t, sharp_style, out);
    return out;
}

std::string to_string(const Subst& s) {
    std::string out = "{";
    bool first = true;
    for (const auto& [k, v] : s) {
        if (!first) out += ", ";
        first = false;
        out += k + "->" + to_string(v);
    }
    return out + "}";
}

bool valid_position(const Term& t, const Position& p) {
    const Term* cur = &t;
    for (int i : p) {
        if (i < 1 || static_cast<std::size_t>(i) > cur->arity()) return false;
        cur = &cur->args()[i - 1];
    }
    return true;
}

Term subterm_at(const Term& t, const Position& p) {
    Term cur = t;
    for (std::size_t k = 0; k < p.size(); ++k) {
        int i = p[k];
        if (i < 1 || static_cast<std::size_t>(i) > cur.arity()) {
            Position bad(p.begin(), p.begin() + static_cast<long>(k) + 1);
            throw std::invalid_argument("invalid position " + position_to_string(p) + ": prefix " +
                                        position_to_string(bad) + " does not exist in " + to_string(t));
        }
        cur = cur.args()[i - 1];
    }
    return cur;
}

namespace {

Term replace_rec(const Term& t, const Position& p, std::size_t k, const Term& r, const Term& whole) {
    if (k == p.size()) return r;
    int i = p[k];
    if (i < 1 || static_cast<std::size_t>(i) > t.arity()) {
        Position bad(p.begin(), p.begin() + static_cast<long>(k) + 1);
        throw std::invalid_argument("invalid position " + position_to_string(p) + ": prefix " +
                                    position_to_string(bad) + " does not exist in " + to_string(whole));
    }
    std::vector<Term> args = t.args();
    args[i - 1] = replace_rec(args[i - 1], p, k + 1, r, whole);
    return Term::app(t.name(), std::move(args), t.annotated());
}

void positions_rec(const Term& t, Position& cur, std::vector<Position>& out, int kind) {
    bool take = kind == 0 || (kind == 1 && !t.is_var()) || (kind == 2 && t.is_var()) ||
                (kind == 3 && !t.is_var() && t.annotated());
    if (take) out.push_back(cur);
    for (std::size_t i = 0; i < t.arity(); ++i) {
        cur.push_back(static_cast<int>(i) + 1);
        positions_rec(t.args()[i], cur, out, kind);
        cur.pop_back();
    }
}

std::vector<Position> positions_of_kind(const Term& t, int kind) {
    std::vector<Position> out;
    Position cur;
    positions_rec(t, cur, out, kind);
    return out;
}

}  // namespace

Term replace_at(const Term& t, const Position& p, const Term& r) { return replace_rec(t, p, 0, r, t); }

std::vector<Position> positions(const Term& t) { return positions_of_kind(t, 0); }
std::vector<Position> function_positions(const Term& t) { return positions_of_kind(t, 1); }
std::vector<Position> variable_positions(const Term& t) { return positions_of_kind(t, 2); }
std::vector<Position> annotated_positions(const Term& t) { return positions_of_kind(t, 3); }

bool has_annotation(const Term& t) {
    if (t.is_var()) return false;
    if (t.annotated()) return true;
    for (const auto& a : t.args())
        if (has_annotation(a)) return true;
    return false;
}

std::size_t annotation_count(const Term& t) {
    if (t.is_var()) return 0;
    std::size_t n = t.annotated() ? 1 : 0;
    for (const auto& a : t.args()) n += annotation_count(a);
    return n;
}

Term flat(const Term& t) {
    if (!has_annotation(t)) return t;
    std::vector<Term> args;
    args.reserve(t.arity());
    for (const auto& a : t.args()) args.push_back(flat(a));
    return Term::app(t.name(), std::move(args), false);
}

namespace {

Term anno_rec(const Term& t, Position& cur, const std::set<Position>& phi, std::size_t& used) {
    if (t.is_var()) {
        if (phi.count(cur)) throw std::invalid_argument("cannot annotate variable position " + position_to_string(cur));
        return t;
    }
    bool mark = phi.count(cur) > 0;
    if (mark) ++used;
    std::vector<Term> args;
    args.reserve(t.arity());
    for (std::size_t i = 0; i < t.arity(); ++i) {
        cur.push_back(static_cast<int>(i) + 1);
        args.push_back(anno_rec(t.args()[i], cur, phi, used));
        cur.pop_back();
    }
    return Term::app(t.name(), std::move(args), mark);
}

Term deanno_rec(const Term& t, const Position& pi, std::size_t k) {
    if (t.is_var()) return t;
    if (k == pi.size()) return t;
    std::vector<Term> args = t.args();
    int i = pi[k];
    if (i >= 1 && static_cast<std::size_t>(i) <= args.size()) args[i - 1] = deanno_rec(args[i - 1], pi, k + 1);
    return Term::app(t.name(), std::move(args), false);
}

}  // namespace

Term anno(const Term& t, const std::set<Position>& phi) {
    Position cur;
    std::size_t used = 0;
    Term r = anno_rec(t, cur, phi, used);
    if (used != phi.size()) {
        for (const auto& p : phi)
            if (!valid_position(t, p)) throw std::invalid_argument("annotation position " + position_to_string(p) + " not in term " + to_string(t));
    }
    return r;
}

Term anno_root(const Term& t) {
    if (t.is_var()) return t;
    Term f = flat(t);
    return Term::app(f.name(), f.args(), true);
}

Term deanno_above(const Term& t, const Position& pi) {
    if (!valid_position(t, pi)) throw std::invalid_argument("invalid position " + position_to_string(pi));
    return deanno_rec(t, pi, 0);
}

Term annotate_symbols(const Term& t, const std::set<std::string>& defined) {
    if (t.is_var()) return t;
    std::vector<Term> args;
    args.reserve(t.arity());
    for (const auto& a : t.args()) args.push_back(annotate_symbols(a, defined));
    return Term::app(t.name(), std::move(args), defined.count(t.name()) > 0);
}

std::vector<std::pair<Position, Term>> annotated_subterms(const Term& t) {
    std::vector<std::pair<Position, Term>> out;
    for (const auto& p : annotated_positions(t)) out.emplace_back(p, flat(subterm_at(t, p)));
    return out;
}

namespace {

void vars_rec(const Term& t, std::vector<std::string>& out, std::set<std::string>& seen) {
    if (t.is_var()) {
        if (seen.insert(t.name()).second) out.push_back(t.name());
        return;
    }
    for (const auto& a : t.args()) vars_rec(a, out, seen);
}

}  // namespace

std::vector<std::string> vars(const Term& t) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    vars_rec(t, out, seen);
    return out;
}

void collect_vars(const Term& t, std::set<std::string>& out) {
    if (t.is_var()) {
        out.insert(t.name());
        return;
    }
    for (const auto& a : t.args()) collect_vars(a, out);
}

void collect_symbols(const Term& t, std::map<std::string, int>& out) {
    if (t.is_var()) return;
    auto it = out.find(t.name());
    if (it != out.end() && it->second != static_cast<int>(t.arity()))
        throw std::invalid_argument("symbol " + t.name() + " used with arities " + std::to_string(it->second) +
                                    " and " + std::to_string(t.arity()));
    out[t.name()] = static_cast<int>(t.arity());
    for (const auto& a : t.args()) collect_symbols(a, out);
}

bool is_ground(const Term& t) {
    if (t.is_var()) return false;
    for (const auto& a : t.args())
        if (!is_ground(a)) return false;
    return true;
}

int var_count(const Term& t, const std::string& x) {
    if (t.is_var()) return t.name() == x ? 1 : 0;
    int n = 0;
    for (const auto& a : t.args()) n += var_count(a, x);
    return n;
}

bool is_linear(const Term& t) {
    for (const auto& x : vars(t))
        if (var_count(t, x) > 1) return false;
    return true;
}

std::optional<std::string> root_symbol(const Term& t) {
    if (t.is_var()) return std::nullopt;
    return t.name();
}

Term substitute(const Term& t, const Subst& s) {
    if (s.empty()) return t;
    if (t.is_var()) {
        auto it = s.find(t.name());
        return it == s.end() ? t : it->second;
    }
    if (t.arity() == 0) return t;
    std::vector<Term> args;
    args.reserve(t.arity());
    bool changed = false;
    for (const auto& a : t.args()) {
        args.push_back(substitute(a, s));
        if (!args.back().same_node(a)) changed = true;
    }
    if (!changed) return t;
    return Term::app(t.name(), std::move(args), t.annotated());
}

Subst compose(const Subst& first, const Subst& second) {
    Subst out;
    for (const auto& [k, v] : first) out[k] = substitute(v, second);
    for (const auto& [k, v] : second)
        if (!out.count(k)) out[k] = v;
    for (auto it = out.begin(); it != out.end();) {
        if (it->second.is_var() && it->second.name() == it->first)
            it = out.erase(it);
        else
            ++it;
    }
    return out;
}

bool match_into(const Term& pattern, const Term& subject, Subst& s) {
    if (pattern.is_var()) {
        Term fs = flat(subject);
        auto it = s.find(pattern.name());
        if (it == s.end()) {
            s.emplace(pattern.name(), fs);
            return true;
        }
        return it->second == fs;
    }
    if (subject.is_var()) return false;
    if (pattern.name() != subject.name() || pattern.arity() != subject.arity()) return false;
    for (std::size_t i = 0; i < pattern.arity(); ++i)
        if (!match_into(pattern.args()[i], subject.args()[i], s)) return false;
    return true;
}

std::optional<Subst> match(const Term& pattern, const Term& subject) {
    Subst s;
    if (!match_into(pattern, subject, s)) return std::nullopt;
    return s;
}

namespace {

bool occurs(const std::string& x, const Term& t) {
    if (t.is_var()) return t.name() == x;
    for (const auto& a : t.args())
        if (occurs(x, a)) return true;
    return false;
}

void bind_var(Subst& sigma, const std::string& x, const Term& t) {
    Subst single{{x, t}};
    for (auto& [k, v] : sigma) v = substitute(v, single);
    sigma.emplace(x, t);
}

}  // namespace

std::optional<Subst> unify_all(const std::vector<std::pair<Term, Term>>& eqs) {
    Subst sigma;
    std::vector<std::pair<Term, Term>> work(eqs.rbegin(), eqs.rend());
    while (!work.empty()) {
        auto [a, b] = work.back();
        work.pop_back();
        a = substitute(a, sigma);
        b = substitute(b, sigma);
        if (a == b) continue;
        if (b.is_var()) {
            if (occurs(b.name(), a)) return std::nullopt;
            bind_var(sigma, b.name(), a);
        } else if (a.is_var()) {
            if (occurs(a.name(), b)) return std::nullopt;
            bind_var(sigma, a.name(), b);
        } else {
            if (a.name() != b.name() || a.annotated() != b.annotated() || a.arity() != b.arity()) return std::nullopt;
            for (std::size_t i = a.arity(); i-- > 0;) work.emplace_back(a.args()[i], b.args()[i]);
        }
    }
    return sigma;
}

std::optional<Subst> unify(const Term& s, const Term& t) { return unify_all({{s, t}}); }

namespace {

bool match_exact(const Term& p, const Term& t, Subst& s) {
    if (p.is_var()) {
        auto it = s.find(p.name());
        if (it == s.end()) {
            s.emplace(p.name(), t);
            return true;
        }
        return it->second == t;
    }
    if (t.is_var() || p.name() != t.name() || p.annotated() != t.annotated() || p.arity() != t.arity()) return false;
    for (std::size_t i = 0; i < p.arity(); ++i)
        if (!match_exact(p.args()[i], t.args()[i], s)) return false;
    return true;
}

}  // namespace

bool is_instance_of(const Term& t, const Term& general) {
    Subst s;
    return match_exact(general, t, s);
}

bool variant(const Term& a, const Term& b) { return is_instance_of(a, b) && is_instance_of(b, a); }

bool is_subterm(const Term& small, const Term& big) {
    if (small == big) return true;
    for (const auto& a : big.args())
        if (is_subterm(small, a)) return true;
    return false;
}

bool is_proper_subterm(const Term& small, const Term& big) {
    for (const auto& a : big.args())
        if (is_subterm(small, a)) return true;
    return false;
}

void FreshNames::reserve(const Term& t) { collect_vars(t, used_); }

std::string FreshNames::next() {
    for (;;) {
        std::string n = "_v" + std::to_string(counter_++);
        if (used_.insert(n).second) return n;
    }
}

namespace {

Term cap_rec(const Term& t, const std::set<std::string>& roots, FreshNames& fresh) {
    if (t.is_var()) return t;
    if (!t.annotated() && roots.count(t.name())) return fresh.next_var();
    if (t.arity() == 0) return t;
    std::vector<Term> args;
    args.reserve(t.arity());
    for (const auto& a : t.args()) args.push_back(cap_rec(a, roots, fresh));
    return Term::app(t.name(), std::move(args), t.annotated());
}

Term ren_rec(const Term& t, FreshNames& fresh) {
    if (t.is_var()) return fresh.next_var();
    if (t.arity() == 0) return t;
    std::vector<Term> args;
    args.reserve(t.arity());
    for (const auto& a : t.args()) args.push_back(ren_rec(a, fresh));
    return Term::app(t.name(), std::move(args), t.annotated());
}

}  // namespace

Term cap(const Term& t, const std::set<std::string>& roots, FreshNames& fresh) { return cap_rec(t, roots, fresh); }

Term cap(const Term& t, const std::set<std::string>& roots) {
    FreshNames fresh;
    fresh.reserve(t);
    return cap_rec(t, roots, fresh);
}

Term ren(const Term& t, FreshNames& fresh) { return ren_rec(t, fresh); }

Term ren(const Term& t) {
    FreshNames fresh;
    fresh.reserve(t);
    return ren_rec(t, fresh);
}

Term cap_inverse(const Term& t, const std::set<std::string>& rhs_roots, bool collapsing, FreshNames& fresh) {
    if (collapsing) return fresh.next_var();
    return cap_rec(t, rhs_roots, fresh);
}

Term cap_inverse(const Term& t, const std::set<std::string>& rhs_roots, bool collapsing) {
    FreshNames fresh;
    fresh.reserve(t);
    return cap_inverse(t, rhs_roots, collapsing, fresh);
}

Term rename_apart(const Term& t, FreshNames& fresh, Subst* renaming) {
    Subst s;
    for (const auto& x : vars(t)) s.emplace(x, fresh.next_var());
    if (renaming) *renaming = s;
    return substitute(t, s);
}

}  // namespace adp
