#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "adp/ptrs.hpp"
#include "adp/term.hpp"

namespace adp {

// Monomial over integer-indexed unknowns: sorted (id, exponent) pairs.
using UMono = std::vector<std::pair<int, int>>;
// Monomial over term variables.
using VMono = std::vector<std::pair<std::string, int>>;

struct CoefPoly {
    std::map<UMono, Rational> terms;

    static CoefPoly constant(const Rational& c);
    static CoefPoly unknown(int id);
    bool is_zero() const { return terms.empty(); }
    CoefPoly& operator+=(const CoefPoly& o);
    CoefPoly operator*(const CoefPoly& o) const;
    CoefPoly scaled(const Rational& c) const;
};

struct SymPoly {
    std::map<VMono, CoefPoly> terms;

    static SymPoly constant(const CoefPoly& c);
    static SymPoly variable(const std::string& x);
    SymPoly& operator+=(const SymPoly& o);
    SymPoly operator*(const SymPoly& o) const;
    SymPoly scaled(const Rational& c) const;
    SymPoly times(const CoefPoly& c) const;
    SymPoly operator-(const SymPoly& o) const;
};

using Clock = std::chrono::steady_clock;

struct Deadline {
    Clock::time_point at = Clock::time_point::max();
    bool expired() const { return Clock::now() >= at; }
    static Deadline in_seconds(double s);
};

// One integer polynomial over the unknowns, read as "p >= 0".
struct Atom {
    std::vector<std::pair<std::int64_t, UMono>> terms;
};

struct ConjConstraint {
    std::string origin;
    std::vector<Atom> atoms;
};

struct DisjConstraint {
    std::string origin;
    std::vector<ConjConstraint> options;
};

struct ArithProblem {
    std::vector<std::string> unknown_names;
    std::vector<ConjConstraint> conj;
    std::vector<DisjConstraint> disj;

    int num_unknowns() const { return static_cast<int>(unknown_names.size()); }
};

// Absolute positiveness: lhs >= rhs (or lhs > rhs) for all natural values of
// the term variables is implied by the returned atoms.
std::vector<Atom> compare_atoms(const SymPoly& lhs, const SymPoly& rhs, bool strict);

bool atom_holds(const Atom& a, const std::vector<std::int64_t>& values);
bool conj_holds(const ConjConstraint& c, const std::vector<std::int64_t>& values);

struct SolverConfig {
    int coeff_bound = 3;
    bool bilinear = false;
    std::string smt_solver;
    double smt_timeout = 10.0;
    long node_budget = 4000000;
    Deadline deadline;
};

struct SolveOutcome {
    std::optional<std::vector<std::int64_t>> model;
    std::string engine;
    std::string note;
    long nodes = 0;
};

SolveOutcome solve_internal(const ArithProblem& pb, int bound, long node_budget, const Deadline& deadline);
SolveOutcome solve_coefficients(const ArithProblem& pb, const SolverConfig& cfg);

std::string to_smtlib(const ArithProblem& pb);
// Returns nullopt when the solver is missing or answers neither sat nor unsat;
// an engaged optional holding nullopt means unsat.
std::optional<std::optional<std::vector<std::int64_t>>> solve_external(const ArithProblem& pb, const std::string& solver,
                                                                       double timeout, std::string& note);

struct SymbolKey {
    std::string name;
    bool sharp = false;
    bool operator<(const SymbolKey& o) const { return name != o.name ? name < o.name : sharp < o.sharp; }
};

// Affine (optionally bilinear) polynomial templates, one per symbol.
class Interpretation {
public:
    explicit Interpretation(bool bilinear = false) : bilinear_(bilinear) {}

    SymPoly eval(const Term& t);
    SymPoly sharp_sum(const Term& t);
    const std::vector<std::string>& unknown_names() const { return names_; }

    struct Template {
        int arity = 0;
        int c0 = -1;
        std::vector<int> lin;
        std::vector<std::pair<std::pair<int, int>, int>> bil;
    };
    const std::map<SymbolKey, Template>& templates() const { return tpl_; }

private:
    const Template& get(const std::string& name, bool sharp, int arity);
    int fresh(const std::string& label);

    bool bilinear_;
    std::map<SymbolKey, Template> tpl_;
    std::vector<std::string> names_;
};

// A concrete interpretation with natural coefficients.
struct ConcretePoly {
    std::int64_t c0 = 0;
    std::vector<std::int64_t> lin;
    std::vector<std::pair<std::pair<int, int>, std::int64_t>> bil;
};

struct ConcreteInterpretation {
    std::map<SymbolKey, ConcretePoly> pol;

    Rational eval(const Term& t, const std::map<std::string, Rational>& env) const;
    Rational sharp_sum(const Term& t, const std::map<std::string, Rational>& env) const;
    std::string describe(bool sharp_style = false) const;
    std::string describe_symbol(const SymbolKey& k, bool sharp_style = false) const;
    bool multilinear() const;
};

ConcreteInterpretation instantiate(const Interpretation& I, const std::vector<std::int64_t>& values);

}  // namespace adp
