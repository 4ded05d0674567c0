#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adp/adp.hpp"
#include "adp/graph.hpp"

namespace adp {

struct TransformResult {
    ADPProblem problem;
    std::string description;
    std::string gate;
};

struct RewriteTarget {
    std::size_t branch;
    Position pos;
};

// Candidate (branch, position) pairs of ADP k, in the order they are tried.
std::vector<RewriteTarget> rewriting_targets(const ADPProblem& P, std::size_t k);

// Either a result or a refusal naming the failed condition.
std::optional<TransformResult> proc_rewriting(const ADPProblem& P, std::size_t k, std::size_t j, const Position& tau,
                                              Mode mode, std::string* refusal = nullptr);

struct NarrowingSubstitution {
    Subst delta;
    std::size_t source_adp;
    Position tau;
};

struct NarrowingInfo {
    Term target;
    std::vector<NarrowingSubstitution> substitutions;
};

// Narrowing substitutions of t, a flat annotated subterm of a rhs of ADP k.
NarrowingInfo compute_narrowing_substitutions(const Term& t, std::size_t k, const ADPProblem& P, Mode mode);
bool is_covered(const Term& t2, std::size_t k, const std::vector<Subst>& deltas, const ADPProblem& P, Mode mode);

TransformResult proc_instantiation(const ADPProblem& P, std::size_t k, Mode mode);
TransformResult proc_forward_instantiation(const ADPProblem& P, std::size_t k, Mode mode);
std::optional<TransformResult> proc_rule_overlap_instantiation(const ADPProblem& P, std::size_t k, std::size_t j,
                                                               const Position& pos, Mode mode,
                                                               std::string* refusal = nullptr);

// True iff the annotated ADPs of the two problems agree up to variable renaming.
bool same_annotated_core(const ADPProblem& a, const ADPProblem& b);

}  // namespace adp
