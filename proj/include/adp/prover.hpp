#pragma once

#include <string>

#include "adp/adp.hpp"
#include "adp/graph.hpp"
#include "adp/proof.hpp"
#include "adp/ptrs.hpp"

namespace adp {

enum class Goal { AST, IAST };

std::string to_string(Goal g);
Goal parse_goal(const std::string& s);
Mode mode_of(Goal g);

struct ProverConfig {
    Goal goal = Goal::IAST;
    double timeout = 60.0;
    int coeff_bound = 3;
    bool bilinear = false;
    int max_transform = 12;
    std::string smt_solver;
    std::size_t term_size_cap = 200;
    bool sharp_style = false;
};

struct Verdict {
    bool proved = false;
    Goal goal = Goal::IAST;
    std::string reason;
    ProofNode proof;
};

// Checks the chain criterion and runs the strategy loop on the canonical ADPs.
Verdict prove(const PTRS& R, const ProverConfig& cfg);
// Runs the strategy loop on an ADP problem given directly.
Verdict prove_problem(const ADPProblem& P, const ProverConfig& cfg);

}  // namespace adp
