#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "adp/term.hpp"

namespace adp {

using Rational = mpq_class;

std::string rational_to_string(const Rational& q);
Rational parse_rational(const std::string& text);

struct Branch {
    Rational p;
    Term t;
};

// Multiset of (probability, term); duplicates are kept.
using MultiDistribution = std::vector<Branch>;

void validate_distribution(const MultiDistribution& mu);
std::string to_string(const MultiDistribution& mu, bool sharp_style = false);

struct Signature {
    std::map<std::string, int> arity;
    std::set<std::string> defined;

    bool is_defined(const std::string& f) const { return defined.count(f) > 0; }
    std::set<std::string> constructors() const;
};

struct ProbRule {
    Term lhs;
    MultiDistribution rhs;
};

struct PTRS {
    Signature signature;
    std::vector<ProbRule> rules;
};

void validate_rule(const ProbRule& r);
Signature infer_signature(const std::vector<ProbRule>& rules);
PTRS make_ptrs(std::vector<ProbRule> rules);
std::string to_string(const ProbRule& r);
std::string to_string(const PTRS& R);

// A plain rewrite rule with a single right-hand side.
struct PlainRule {
    Term lhs;
    Term rhs;
};

struct RuleProperties {
    bool non_duplicating = true;
    bool left_linear = true;
    bool right_linear = true;
    bool linear = true;
    bool non_erasing = true;
    bool non_overlapping = true;
};

struct PropertyReport {
    std::vector<RuleProperties> per_rule;
    RuleProperties global;
};

// Each entry is one (possibly probabilistic) rule given by its lhs and the
// support of its rhs.
struct RuleShape {
    Term lhs;
    std::vector<Term> rhs;
};

PropertyReport analyze_shapes(const std::vector<RuleShape>& rules);
PropertyReport analyze_properties(const PTRS& R);

std::vector<RuleShape> shapes_of(const PTRS& R);

bool is_nf(const Term& t, const std::vector<Term>& lhss);
bool is_anf(const Term& t, const std::vector<Term>& lhss);
bool is_nf(const Term& t, const PTRS& R);
bool is_anf(const Term& t, const PTRS& R);
std::vector<Term> lhs_list(const PTRS& R);

enum class RedexPolicy {
    InnermostLeftmost,
    InnermostRightmost,
    LeftmostOutermost,
    RightmostOutermost,
    Random,
    RandomInnermost,
    Exhaustive
};

std::string to_string(RedexPolicy p);
bool is_innermost_policy(RedexPolicy p);

struct PtrsStep {
    std::size_t rule = 0;
    Position pos;
    MultiDistribution result;
};

// All (rule, position) redexes of t, positions in leftmost-outermost order.
// With innermost=true only redexes whose proper subterms are normal forms.
std::vector<std::pair<std::size_t, Position>> redexes(const Term& t, const PTRS& R, bool innermost);
PtrsStep apply_step(const Term& t, const PTRS& R, std::size_t rule, const Position& pos);

std::optional<PtrsStep> ptrs_step(const Term& t, const PTRS& R, RedexPolicy policy, std::mt19937_64* rng = nullptr);
std::vector<PtrsStep> ptrs_steps_all(const Term& t, const PTRS& R, bool innermost = false);

}  // namespace adp
