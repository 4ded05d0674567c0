#include "adp/poly.hpp"

#include <unistd.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

namespace adp {

namespace {

template <class K>
std::vector<std::pair<K, int>> mono_mul(const std::vector<std::pair<K, int>>& a, const std::vector<std::pair<K, int>>& b) {
    std::vector<std::pair<K, int>> out;
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            out.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
            out.push_back(b[j++]);
        } else {
            out.emplace_back(a[i].first, a[i].second + b[j].second);
            ++i;
            ++j;
        }
    }
    return out;
}

}  // namespace

CoefPoly CoefPoly::constant(const Rational& c) {
    CoefPoly p;
    if (c != 0) p.terms[{}] = c;
    return p;
}

CoefPoly CoefPoly::unknown(int id) {
    CoefPoly p;
    p.terms[{{id, 1}}] = 1;
    return p;
}

CoefPoly& CoefPoly::operator+=(const CoefPoly& o) {
    for (const auto& [m, c] : o.terms) {
        auto& slot = terms[m];
        slot += c;
        if (slot == 0) terms.erase(m);
    }
    return *this;
}

CoefPoly CoefPoly::operator*(const CoefPoly& o) const {
    CoefPoly out;
    for (const auto& [m1, c1] : terms)
        for (const auto& [m2, c2] : o.terms) {
            auto m = mono_mul(m1, m2);
            auto& slot = out.terms[m];
            slot += c1 * c2;
            if (slot == 0) out.terms.erase(m);
        }
    return out;
}

CoefPoly CoefPoly::scaled(const Rational& c) const {
    CoefPoly out;
    if (c == 0) return out;
    for (const auto& [m, v] : terms) out.terms[m] = v * c;
    return out;
}

SymPoly SymPoly::constant(const CoefPoly& c) {
    SymPoly p;
    if (!c.is_zero()) p.terms[{}] = c;
    return p;
}

SymPoly SymPoly::variable(const std::string& x) {
    SymPoly p;
    p.terms[{{x, 1}}] = CoefPoly::constant(1);
    return p;
}

SymPoly& SymPoly::operator+=(const SymPoly& o) {
    for (const auto& [m, c] : o.terms) {
        auto& slot = terms[m];
        slot += c;
        if (slot.is_zero()) terms.erase(m);
    }
    return *this;
}

SymPoly SymPoly::operator*(const SymPoly& o) const {
    SymPoly out;
    for (const auto& [m1, c1] : terms)
        for (const auto& [m2, c2] : o.terms) {
            auto m = mono_mul(m1, m2);
            auto& slot = out.terms[m];
            slot += c1 * c2;
            if (slot.is_zero()) out.terms.erase(m);
        }
    return out;
}

SymPoly SymPoly::scaled(const Rational& c) const {
    SymPoly out;
    if (c == 0) return out;
    for (const auto& [m, v] : terms) out.terms[m] = v.scaled(c);
    return out;
}

SymPoly SymPoly::times(const CoefPoly& c) const {
    SymPoly out;
    for (const auto& [m, v] : terms) {
        CoefPoly prod = v * c;
        if (!prod.is_zero()) out.terms[m] = prod;
    }
    return out;
}

SymPoly SymPoly::operator-(const SymPoly& o) const {
    SymPoly out = *this;
    out += o.scaled(-1);
    return out;
}

Deadline Deadline::in_seconds(double s) {
    Deadline d;
    if (s > 0) d.at = Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(s));
    return d;
}

namespace {

Atom to_atom(const CoefPoly& c, bool strict) {
    mpz_class l = 1;
    for (const auto& [m, v] : c.terms) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.get_den_mpz_t());
    std::map<UMono, mpz_class> ints;
    for (const auto& [m, v] : c.terms) {
        Rational scaled = v * l;
        ints[m] = scaled.get_num();
    }
    if (strict) ints[{}] -= l;
    Atom a;
    for (const auto& [m, v] : ints) {
        if (v == 0) continue;
        if (!v.fits_slong_p()) throw std::overflow_error("coefficient too large for the constraint solver");
        a.terms.emplace_back(v.get_si(), m);
    }
    return a;
}

bool trivially_true(const Atom& a) {
    for (const auto& [c, m] : a.terms)
        if (c < 0) return false;
    return true;
}

}  // namespace

std::vector<Atom> compare_atoms(const SymPoly& lhs, const SymPoly& rhs, bool strict) {
    SymPoly d = lhs - rhs;
    std::vector<Atom> out;
    bool saw_constant = false;
    for (const auto& [m, c] : d.terms) {
        bool is_const = m.empty();
        if (is_const) saw_constant = true;
        Atom a = to_atom(c, strict && is_const);
        if (!trivially_true(a)) out.push_back(std::move(a));
    }
    if (strict && !saw_constant) out.push_back(to_atom(CoefPoly(), true));
    return out;
}

namespace {

using i128 = __int128;
constexpr i128 kLimit = static_cast<i128>(1) << 100;

i128 sat_mul(i128 a, i128 b) {
    if (a == 0 || b == 0) return 0;
    i128 aa = a < 0 ? -a : a;
    i128 bb = b < 0 ? -b : b;
    bool neg = (a < 0) != (b < 0);
    if (aa > kLimit / bb) return neg ? -kLimit : kLimit;
    i128 r = aa * bb;
    return neg ? -r : r;
}

i128 sat_add(i128 a, i128 b) {
    i128 r = a + b;
    if (r > kLimit) return kLimit;
    if (r < -kLimit) return -kLimit;
    return r;
}

i128 eval_atom(const Atom& a, const std::vector<std::int64_t>& v) {
    i128 s = 0;
    for (const auto& [c, m] : a.terms) {
        i128 p = c;
        for (const auto& [id, e] : m)
            for (int k = 0; k < e; ++k) p = sat_mul(p, v[id]);
        s = sat_add(s, p);
    }
    return s;
}

}  // namespace

bool atom_holds(const Atom& a, const std::vector<std::int64_t>& values) { return eval_atom(a, values) >= 0; }

bool conj_holds(const ConjConstraint& c, const std::vector<std::int64_t>& values) {
    for (const auto& a : c.atoms)
        if (!atom_holds(a, values)) return false;
    return true;
}

namespace {

class Search {
public:
    Search(const ArithProblem& pb, int bound, long budget, const Deadline& dl)
        : pb_(pb), bound_(bound), budget_(budget), deadline_(dl) {
        n_ = pb.num_unknowns();
        lo_.assign(n_, 0);
        hi_.assign(n_, bound);
        for (const auto& c : pb.conj)
            for (const auto& a : c.atoms) atoms_.push_back(&a);
        atom_users_.resize(n_);
        disj_users_.resize(n_);
        std::vector<std::set<int>> atom_vars(atoms_.size());
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            for (const auto& [c, m] : atoms_[i]->terms)
                for (const auto& [id, e] : m) atom_vars[i].insert(id);
            for (int id : atom_vars[i]) atom_users_[id].push_back(i);
        }
        std::vector<std::set<int>> disj_vars(pb.disj.size());
        for (std::size_t d = 0; d < pb.disj.size(); ++d) {
            for (const auto& o : pb.disj[d].options)
                for (const auto& a : o.atoms)
                    for (const auto& [c, m] : a.terms)
                        for (const auto& [id, e] : m) disj_vars[d].insert(id);
            for (int id : disj_vars[d]) disj_users_[id].push_back(d);
        }
        // variable order: repeatedly close the constraint with the fewest open unknowns
        std::vector<bool> placed(n_, false);
        std::vector<std::set<int>> groups = atom_vars;
        groups.insert(groups.end(), disj_vars.begin(), disj_vars.end());
        for (;;) {
            int best = -1;
            std::size_t best_open = 0;
            for (std::size_t g = 0; g < groups.size(); ++g) {
                std::size_t open = 0;
                for (int id : groups[g])
                    if (!placed[id]) ++open;
                if (open == 0) continue;
                if (best < 0 || open < best_open) {
                    best = static_cast<int>(g);
                    best_open = open;
                }
            }
            if (best < 0) break;
            for (int id : groups[best])
                if (!placed[id]) {
                    placed[id] = true;
                    order_.push_back(id);
                }
        }
        for (int id = 0; id < n_; ++id)
            if (!placed[id]) hi_[id] = 0;
    }

    std::optional<std::vector<std::int64_t>> run() {
        for (std::size_t i = 0; i < atoms_.size(); ++i)
            if (violated(*atoms_[i])) return std::nullopt;
        for (std::size_t d = 0; d < pb_.disj.size(); ++d)
            if (disj_dead(d)) return std::nullopt;
        if (dfs(0)) {
            std::vector<std::int64_t> v(n_);
            for (int i = 0; i < n_; ++i) v[i] = lo_[i];
            return v;
        }
        return std::nullopt;
    }

    bool aborted() const { return aborted_; }
    long nodes() const { return nodes_; }

private:
    i128 max_value(const Atom& a) const {
        i128 s = 0;
        for (const auto& [c, m] : a.terms) {
            i128 p = c;
            const auto& src = c > 0 ? hi_ : lo_;
            for (const auto& [id, e] : m)
                for (int k = 0; k < e; ++k) p = sat_mul(p, src[id]);
            s = sat_add(s, p);
        }
        return s;
    }

    bool violated(const Atom& a) const { return max_value(a) < 0; }

    bool disj_dead(std::size_t d) const {
        for (const auto& o : pb_.disj[d].options) {
            bool ok = true;
            for (const auto& a : o.atoms)
                if (violated(a)) {
                    ok = false;
                    break;
                }
            if (ok) return false;
        }
        return true;
    }

    bool dfs(std::size_t k) {
        if (k == order_.size()) return true;
        int id = order_[k];
        for (std::int64_t v = 0; v <= bound_; ++v) {
            if (++nodes_ > budget_ || ((nodes_ & 1023) == 0 && deadline_.expired())) {
                aborted_ = true;
                return false;
            }
            lo_[id] = hi_[id] = v;
            bool ok = true;
            for (std::size_t i : atom_users_[id])
                if (violated(*atoms_[i])) {
                    ok = false;
                    break;
                }
            if (ok)
                for (std::size_t d : disj_users_[id])
                    if (disj_dead(d)) {
                        ok = false;
                        break;
                    }
            if (ok && dfs(k + 1)) return true;
            if (aborted_) return false;
        }
        lo_[id] = 0;
        hi_[id] = bound_;
        return false;
    }

    const ArithProblem& pb_;
    int bound_;
    long budget_;
    Deadline deadline_;
    int n_ = 0;
    std::vector<std::int64_t> lo_, hi_;
    std::vector<const Atom*> atoms_;
    std::vector<std::vector<std::size_t>> atom_users_;
    std::vector<std::vector<std::size_t>> disj_users_;
    std::vector<int> order_;
    long nodes_ = 0;
    bool aborted_ = false;
};

}  // namespace

SolveOutcome solve_internal(const ArithProblem& pb, int bound, long node_budget, const Deadline& deadline) {
    SolveOutcome out;
    out.engine = "internal";
    Search s(pb, bound, node_budget, deadline);
    out.model = s.run();
    out.nodes = s.nodes();
    if (s.aborted()) out.note = "search budget exhausted at bound " + std::to_string(bound);
    return out;
}

SolveOutcome solve_coefficients(const ArithProblem& pb, const SolverConfig& cfg) {
    SolveOutcome out;
    if (!cfg.smt_solver.empty()) {
        std::string note;
        auto ext = solve_external(pb, cfg.smt_solver, cfg.smt_timeout, note);
        if (ext) {
            out.engine = "smt:" + cfg.smt_solver;
            out.model = *ext;
            out.note = note;
            return out;
        }
        out.note = note + "; falling back to internal search";
    }
    long used = 0;
    for (int b = 1; b <= std::max(1, cfg.coeff_bound); ++b) {
        auto r = solve_internal(pb, b, cfg.node_budget - used, cfg.deadline);
        used += r.nodes;
        if (r.model) {
            r.note = out.note.empty() ? r.note : out.note;
            r.nodes = used;
            return r;
        }
        if (!r.note.empty()) {
            r.note = out.note.empty() ? r.note : out.note + "; " + r.note;
            r.nodes = used;
            return r;
        }
    }
    out.engine = "internal";
    out.nodes = used;
    return out;
}

namespace {

std::string smt_atom(const Atom& a, const std::vector<std::string>& names) {
    if (a.terms.empty()) return "(>= 0 0)";
    std::string s = "(>= (+ 0";
    for (const auto& [c, m] : a.terms) {
        std::string coef = c < 0 ? "(- " + std::to_string(-c) + ")" : std::to_string(c);
        if (m.empty()) {
            s += " " + coef;
            continue;
        }
        s += " (* " + coef;
        for (const auto& [id, e] : m)
            for (int k = 0; k < e; ++k) s += " " + names[id];
        s += ")";
    }
    return s + ") 0)";
}

std::string smt_conj(const ConjConstraint& c, const std::vector<std::string>& names) {
    std::string s = "(and true";
    for (const auto& a : c.atoms) s += " " + smt_atom(a, names);
    return s + ")";
}

}  // namespace

std::string to_smtlib(const ArithProblem& pb) {
    std::vector<std::string> names;
    for (int i = 0; i < pb.num_unknowns(); ++i) names.push_back("u" + std::to_string(i));
    std::ostringstream os;
    os << "(set-logic QF_NIA)\n";
    for (int i = 0; i < pb.num_unknowns(); ++i) {
        os << "; " << names[i] << " = " << pb.unknown_names[i] << "\n";
        os << "(declare-fun " << names[i] << " () Int)\n(assert (>= " << names[i] << " 0))\n";
    }
    for (const auto& c : pb.conj) {
        os << "; " << c.origin << "\n";
        for (const auto& a : c.atoms) os << "(assert " << smt_atom(a, names) << ")\n";
    }
    for (const auto& d : pb.disj) {
        os << "; " << d.origin << "\n(assert (or false";
        for (const auto& o : d.options) os << " " << smt_conj(o, names);
        os << "))\n";
    }
    os << "(check-sat)\n(get-model)\n";
    return os.str();
}

std::optional<std::optional<std::vector<std::int64_t>>> solve_external(const ArithProblem& pb, const std::string& solver,
                                                                       double timeout, std::string& note) {
    if (access(solver.c_str(), X_OK) != 0) {
        note = "external solver " + solver + " not executable";
        return std::nullopt;
    }
    char path[] = "/tmp/adp-smt-XXXXXX";
    int fd = mkstemp(path);
    if (fd < 0) {
        note = "cannot create temporary file";
        return std::nullopt;
    }
    close(fd);
    {
        std::ofstream f(path);
        f << to_smtlib(pb);
    }
    std::string cmd = "timeout " + std::to_string(std::max(1, static_cast<int>(timeout))) + " '" + solver + "' '" +
                      path + "' 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) {
        std::remove(path);
        note = "cannot start external solver";
        return std::nullopt;
    }
    std::string output;
    std::array<char, 4096> buf{};
    while (fgets(buf.data(), static_cast<int>(buf.size()), pipe)) output += buf.data();
    int status = pclose(pipe);
    std::remove(path);
    std::istringstream is(output);
    std::string first;
    is >> first;
    if (first == "unsat") return std::optional<std::vector<std::int64_t>>{};
    if (first != "sat") {
        note = "external solver answered '" + first + "' (status " + std::to_string(status) + ")";
        return std::nullopt;
    }
    std::vector<std::int64_t> values(pb.num_unknowns(), 0);
    std::regex def(R"(\(define-fun\s+u(\d+)\s+\(\)\s+Int\s+(\(-\s*\d+\)|\d+)\s*\))");
    std::vector<bool> seen(pb.num_unknowns(), false);
    for (auto it = std::sregex_iterator(output.begin(), output.end(), def); it != std::sregex_iterator(); ++it) {
        int id = std::stoi((*it)[1]);
        std::string v = (*it)[2];
        if (id < 0 || id >= pb.num_unknowns()) throw std::runtime_error("malformed solver model");
        if (v[0] == '(') throw std::runtime_error("solver returned a negative coefficient");
        values[id] = std::stoll(v);
        seen[id] = true;
    }
    for (const auto& c : pb.conj)
        if (!conj_holds(c, values)) throw std::runtime_error("solver model violates constraint " + c.origin);
    note = "external solver answered sat";
    return std::optional<std::vector<std::int64_t>>{values};
}

int Interpretation::fresh(const std::string& label) {
    names_.push_back(label);
    return static_cast<int>(names_.size()) - 1;
}

const Interpretation::Template& Interpretation::get(const std::string& name, bool sharp, int arity) {
    SymbolKey key{name, sharp};
    auto it = tpl_.find(key);
    if (it != tpl_.end()) return it->second;
    Template t;
    t.arity = arity;
    std::string label = sharp ? annotated_name(name, true) : name;
    t.c0 = fresh(label + "_0");
    for (int i = 1; i <= arity; ++i) t.lin.push_back(fresh(label + "_" + std::to_string(i)));
    if (bilinear_)
        for (int i = 0; i < arity; ++i)
            for (int j = i + 1; j < arity; ++j)
                t.bil.push_back({{i, j}, fresh(label + "_" + std::to_string(i + 1) + std::to_string(j + 1))});
    return tpl_.emplace(key, std::move(t)).first->second;
}

SymPoly Interpretation::eval(const Term& t) {
    if (t.is_var()) return SymPoly::variable(t.name());
    const Template tp = get(t.name(), t.annotated(), static_cast<int>(t.arity()));
    std::vector<SymPoly> args;
    for (const auto& a : t.args()) args.push_back(eval(a));
    SymPoly out = SymPoly::constant(CoefPoly::unknown(tp.c0));
    for (std::size_t i = 0; i < args.size(); ++i) out += args[i].times(CoefPoly::unknown(tp.lin[i]));
    for (const auto& [ij, id] : tp.bil) out += (args[ij.first] * args[ij.second]).times(CoefPoly::unknown(id));
    return out;
}

SymPoly Interpretation::sharp_sum(const Term& t) {
    SymPoly out;
    for (const auto& [pos, s] : annotated_subterms(t)) out += eval(anno_root(s));
    return out;
}

ConcreteInterpretation instantiate(const Interpretation& I, const std::vector<std::int64_t>& values) {
    ConcreteInterpretation C;
    for (const auto& [k, t] : I.templates()) {
        ConcretePoly p;
        p.c0 = values.at(t.c0);
        for (int id : t.lin) p.lin.push_back(values.at(id));
        for (const auto& [ij, id] : t.bil) p.bil.push_back({ij, values.at(id)});
        C.pol[k] = p;
    }
    return C;
}

Rational ConcreteInterpretation::eval(const Term& t, const std::map<std::string, Rational>& env) const {
    if (t.is_var()) {
        auto it = env.find(t.name());
        return it == env.end() ? Rational(0) : it->second;
    }
    std::vector<Rational> args;
    for (const auto& a : t.args()) args.push_back(eval(a, env));
    auto it = pol.find(SymbolKey{t.name(), t.annotated()});
    if (it == pol.end()) return 0;
    const auto& p = it->second;
    Rational v = p.c0;
    for (std::size_t i = 0; i < args.size() && i < p.lin.size(); ++i) v += p.lin[i] * args[i];
    for (const auto& [ij, c] : p.bil) v += c * args[ij.first] * args[ij.second];
    return v;
}

Rational ConcreteInterpretation::sharp_sum(const Term& t, const std::map<std::string, Rational>& env) const {
    Rational s = 0;
    for (const auto& [pos, u] : annotated_subterms(t)) s += eval(anno_root(u), env);
    return s;
}

std::string ConcreteInterpretation::describe_symbol(const SymbolKey& k, bool sharp_style) const {
    const auto& p = pol.at(k);
    std::vector<std::string> parts;
    auto mono = [](std::int64_t c, const std::string& v) {
        if (c == 1) return v;
        return std::to_string(c) + "*" + v;
    };
    for (std::size_t i = 0; i < p.lin.size(); ++i)
        if (p.lin[i]) parts.push_back(mono(p.lin[i], "x" + std::to_string(i + 1)));
    for (const auto& [ij, c] : p.bil)
        if (c) parts.push_back(mono(c, "x" + std::to_string(ij.first + 1) + "*x" + std::to_string(ij.second + 1)));
    if (p.c0 || parts.empty()) parts.push_back(std::to_string(p.c0));
    std::string body;
    for (std::size_t i = 0; i < parts.size(); ++i) body += (i ? " + " : "") + parts[i];
    std::string name = k.sharp ? annotated_name(k.name, sharp_style) : k.name;
    return "Pol(" + name + ")=" + body;
}

std::string ConcreteInterpretation::describe(bool sharp_style) const {
    std::string s;
    for (const auto& [k, p] : pol) {
        bool zero = p.c0 == 0;
        for (auto c : p.lin) zero = zero && c == 0;
        for (const auto& [ij, c] : p.bil) zero = zero && c == 0;
        if (zero) continue;
        if (!s.empty()) s += ", ";
        s += describe_symbol(k, sharp_style);
    }
    if (s.empty()) return "all symbols map to 0";
    return s + ", all other symbols map to 0";
}

bool ConcreteInterpretation::multilinear() const {
    for (const auto& [k, p] : pol) {
        if (p.c0 < 0) return false;
        for (auto c : p.lin)
            if (c < 0) return false;
        for (const auto& [ij, c] : p.bil)
            if (c < 0 || ij.first == ij.second) return false;
    }
    return true;
}

}  // namespace adp
