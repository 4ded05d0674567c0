#pragma once

#include <set>
#include <string>
#include <vector>

#include "adp/adp.hpp"

namespace adp {

enum class Mode { Full, Innermost };

std::string to_string(Mode m);

struct DepGraph {
    Mode mode = Mode::Full;
    std::vector<std::set<std::size_t>> succ;

    std::size_t size() const { return succ.size(); }
    bool has_edge(std::size_t a, std::size_t b) const { return succ.at(a).count(b) > 0; }
};

// The estimation test shared by the graph and the usable-terms processor:
// can the annotated subterm t (flat, a subterm of a rhs of ADP alpha) reach
// the lhs of ADP beta?
bool may_reach(const ADPProblem& P, std::size_t alpha, const Term& t, std::size_t beta, Mode mode);

DepGraph estimate_dep_graph(const ADPProblem& P, Mode mode);
std::vector<std::vector<std::size_t>> sccs(const DepGraph& g);
std::string to_dot(const DepGraph& g, const ADPProblem& P);

struct DepGraphResult {
    DepGraph graph;
    std::vector<std::vector<std::size_t>> components;
    std::vector<ADPProblem> problems;
};

DepGraphResult run_dependency_graph(const ADPProblem& P, Mode mode);
std::vector<ADPProblem> proc_dependency_graph(const ADPProblem& P, Mode mode);

struct RemovedAnnotation {
    std::size_t adp;
    std::size_t branch;
    Position pos;
};

ADPProblem proc_usable_terms(const ADPProblem& P, Mode mode, std::vector<RemovedAnnotation>* removed = nullptr);

// U_P(t); t may carry an annotation at the root (which contributes nothing).
std::set<std::size_t> usable_rules_of(const Term& t, const ADPProblem& P);
std::set<std::size_t> usable_rules(const ADPProblem& P);
ADPProblem proc_usable_rules(const ADPProblem& P, Mode mode);

}  // namespace adp
