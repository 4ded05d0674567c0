#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "adp/adp.hpp"
#include "adp/graph.hpp"
#include "adp/poly.hpp"

namespace adp {

struct RppConstraints {
    Interpretation interp;
    ArithProblem problem;
    // options[i] of the global disjunction belongs to (adp, branch) candidates[i]
    std::vector<std::pair<std::size_t, std::size_t>> candidates;
};

RppConstraints generate_rpp_constraints(const ADPProblem& P, bool bilinear = false);

struct RppResult {
    ADPProblem problem;
    std::vector<std::size_t> strict;
    ConcreteInterpretation interpretation;
    std::string engine;
    long nodes = 0;
};

// Strict ADPs under a concrete model: every annotated ADP with some branch
// whose annotated value decreases strictly and, for flag true, whose flat
// value does not increase.
std::vector<std::size_t> strict_adps(const ADPProblem& P, const ConcreteInterpretation& I);

// Checks the weak expected decreases, the flat branch bounds and strictness semantically on random
// natural instantiations of the variables.
bool validate_rpp_model(const ADPProblem& P, const ConcreteInterpretation& I, const std::vector<std::size_t>& strict,
                        std::mt19937_64& rng, int samples, std::string* why = nullptr);

std::optional<RppResult> proc_reduction_pair(const ADPProblem& P, Mode mode, const SolverConfig& cfg,
                                             std::string* note = nullptr);

struct SubtermResult {
    ADPProblem problem;
    std::map<std::string, int> projection;
    std::vector<std::size_t> strict;
};

struct Refusal {
    std::string reason;
};

bool subterm_precondition(const ADPProblem& P);
// Returns the result, or a refusal explaining why the processor cannot apply.
std::optional<SubtermResult> proc_subterm_criterion(const ADPProblem& P, Mode mode, Refusal* refusal = nullptr);

struct DpProofStep {
    std::string processor;
    std::string detail;
};

struct NonProbResult {
    bool proved = false;
    std::vector<DpProofStep> steps;
};

NonProbResult nonprob_dp_prove(const std::vector<PlainRule>& dps, const std::vector<PlainRule>& rules, Mode mode,
                               const SolverConfig& cfg);

struct ProbabilityRemovalResult {
    bool applicable = false;
    bool proved = false;
    std::vector<PlainRule> dps;
    std::vector<PlainRule> rules;
    NonProbResult backend;
    std::string refusal;
};

ProbabilityRemovalResult proc_probability_removal(const ADPProblem& P, Mode mode, const SolverConfig& cfg);

}  // namespace adp
