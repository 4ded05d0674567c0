#include "adp/prover.hpp"

#include <algorithm>
#include <stdexcept>

#include "adp/orders.hpp"
#include "adp/transform.hpp"

namespace adp {

std::string to_string(Goal g) { return g == Goal::AST ? "AST" : "iAST"; }

Goal parse_goal(const std::string& s) {
    std::string l = s;
    std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (l == "ast") return Goal::AST;
    if (l == "iast") return Goal::IAST;
    throw std::invalid_argument("unknown goal '" + s + "' (expected ast or iast)");
}

Mode mode_of(Goal g) { return g == Goal::AST ? Mode::Full : Mode::Innermost; }

namespace {

struct Timeout {
    std::string where;
};

std::string index_list(const std::vector<std::size_t>& v) {
    std::string s = "{";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i] + 1);
    return s + "}";
}

std::size_t max_term_size(const ADPProblem& P) {
    std::size_t m = 0;
    for (const auto& a : P.adps) {
        m = std::max(m, a.lhs.size());
        for (const auto& b : a.rhs) m = std::max(m, b.t.size());
    }
    return m;
}

class Strategy {
public:
    Strategy(const ProverConfig& cfg) : cfg_(cfg), mode_(mode_of(cfg.goal)) {
        deadline_ = Deadline::in_seconds(cfg.timeout);
    }

    // The root problem always records its graph, even when it is a single SCC.
    ProofNode solve(const ADPProblem& P, int budget, bool root = false) {
        if (!P.has_annotations()) return solved_leaf(show(P));
        check("strategy loop");

        auto dg = run_dependency_graph(P, mode_);
        bool unchanged = dg.problems.size() == 1 && variant(dg.problems[0], P);
        if (!unchanged || root) {
            ProofNode n = node("DepGraph", P);
            std::string comps;
            for (const auto& c : dg.components) comps += (comps.empty() ? "" : " ") + index_list(c);
            n.justification.emplace_back("sccs", dg.components.empty() ? "none" : comps);
            n.justification.emplace_back("graph", edges(dg.graph));
            if (unchanged)
                n.children.push_back(solve(P, budget));
            else
                for (const auto& Q : dg.problems) n.children.push_back(solve(Q, budget));
            n.status = dg.problems.empty() ? "solved" : "applied";
            return n;
        }

        std::vector<RemovedAnnotation> removed;
        ADPProblem ut = proc_usable_terms(P, mode_, &removed);
        if (!removed.empty()) {
            ProofNode n = node("UsableTerms", P);
            std::string s;
            for (const auto& r : removed)
                s += (s.empty() ? "" : ", ") + std::string("ADP ") + std::to_string(r.adp + 1) + " branch " +
                     std::to_string(r.branch + 1) + " position " + position_to_string(r.pos);
            n.justification.emplace_back("removed", s);
            n.children.push_back(solve(ut, budget));
            return n;
        }

        if (mode_ == Mode::Innermost) {
            ADPProblem ur = proc_usable_rules(P, mode_);
            std::vector<std::size_t> off;
            for (std::size_t k = 0; k < P.adps.size(); ++k)
                if (P.adps[k].flag && !ur.adps[k].flag) off.push_back(k);
            if (!off.empty()) {
                ProofNode n = node("UsableRules", P);
                n.justification.emplace_back("flag set to false", index_list(off));
                n.children.push_back(solve(ur, budget));
                return n;
            }
            Refusal why;
            auto sc = proc_subterm_criterion(P, mode_, &why);
            if (sc && !sc->strict.empty()) {
                ProofNode n = node("SubtermCriterion", P);
                std::string proj;
                for (const auto& [f, i] : sc->projection)
                    proj += (proj.empty() ? "" : ", ") + std::string("pi(") + annotated_name(f, cfg_.sharp_style) +
                            ")=" + std::to_string(i);
                n.justification.emplace_back("projection", proj);
                n.justification.emplace_back("strict", index_list(sc->strict));
                n.children.push_back(solve(sc->problem, budget));
                return n;
            }
        }
        check("subterm criterion");

        SolverConfig sc;
        sc.coeff_bound = cfg_.coeff_bound;
        sc.bilinear = cfg_.bilinear;
        sc.smt_solver = cfg_.smt_solver;
        sc.deadline = deadline_;
        std::string note;
        auto rp = proc_reduction_pair(P, mode_, sc, &note);
        check("ReductionPair");
        if (rp) {
            ProofNode n = node("ReductionPair", P);
            n.params.emplace_back("coeff-bound", std::to_string(cfg_.coeff_bound));
            n.justification.emplace_back("interpretation", rp->interpretation.describe(cfg_.sharp_style));
            n.justification.emplace_back("strict", index_list(rp->strict));
            n.justification.emplace_back("engine", rp->engine);
            n.children.push_back(solve(rp->problem, budget));
            return n;
        }

        auto pr = proc_probability_removal(P, mode_, sc);
        check("ProbabilityRemoval");
        if (pr.applicable && pr.proved) {
            ProofNode n = node("ProbabilityRemoval", P);
            std::string steps;
            for (const auto& s : pr.backend.steps)
                steps += (steps.empty() ? "" : "\n") + s.processor + ": " + s.detail;
            n.justification.emplace_back("non-probabilistic proof", steps);
            n.status = "proved";
            return n;
        }

        if (budget > 0) {
            if (auto t = transform(P, budget)) return *t;
        }
        ProofNode n = node("Open", P);
        n.status = "open";
        n.justification.emplace_back("reason", budget > 0 ? "no processor applies" : "transformation budget exhausted");
        return n;
    }

private:
    std::optional<ProofNode> transform(const ADPProblem& P, int budget) {
        auto accept = [&](const TransformResult& r) {
            return !same_annotated_core(P, r.problem) && max_term_size(r.problem) <= cfg_.term_size_cap;
        };
        auto finish = [&](const std::string& name, const TransformResult& r) {
            ProofNode n = node(name, P);
            n.justification.emplace_back("step", r.description);
            if (!r.gate.empty()) n.justification.emplace_back("gate", r.gate);
            n.children.push_back(solve(r.problem, budget - 1));
            return n;
        };
        for (std::size_t k = 0; k < P.adps.size(); ++k) {
            if (!P.adps[k].has_annotations()) continue;
            check("transformations");
            if (mode_ == Mode::Innermost) {
                for (const auto& tg : rewriting_targets(P, k)) {
                    auto r = proc_rewriting(P, k, tg.branch, tg.pos, mode_);
                    if (r && accept(*r)) return finish("Rewriting", *r);
                }
            }
            auto inst = proc_instantiation(P, k, mode_);
            if (accept(inst)) return finish("Instantiation", inst);
            auto fwd = proc_forward_instantiation(P, k, mode_);
            if (accept(fwd)) return finish("ForwardInstantiation", fwd);
            if (mode_ == Mode::Innermost) {
                for (std::size_t j = 0; j < P.adps[k].rhs.size(); ++j)
                    for (const auto& pos : annotated_positions(P.adps[k].rhs[j].t)) {
                        auto r = proc_rule_overlap_instantiation(P, k, j, pos, mode_);
                        if (r && accept(*r)) return finish("RuleOverlapInstantiation", *r);
                    }
            }
        }
        return std::nullopt;
    }

    std::string show(const ADPProblem& P) const { return to_string(P, cfg_.sharp_style); }

    ProofNode node(const std::string& processor, const ADPProblem& P) const {
        ProofNode n;
        n.processor = processor;
        n.params.emplace_back("problem", show(P));
        n.status = "applied";
        return n;
    }

    static std::string edges(const DepGraph& g) {
        std::string s;
        for (std::size_t a = 0; a < g.size(); ++a)
            for (std::size_t b : g.succ[a]) s += (s.empty() ? "" : ", ") + std::to_string(a + 1) + "->" + std::to_string(b + 1);
        return s.empty() ? "no edges" : s;
    }

    void check(const std::string& where) const {
        if (deadline_.expired()) throw Timeout{where};
    }

    const ProverConfig& cfg_;
    Mode mode_;
    Deadline deadline_;
};

Verdict run(const ADPProblem& P, const ProverConfig& cfg) {
    Verdict v;
    v.goal = cfg.goal;
    Strategy s(cfg);
    try {
        v.proof = s.solve(P, cfg.max_transform, true);
    } catch (const Timeout& t) {
        v.proved = false;
        v.reason = "timeout at " + t.where;
        v.proof.processor = "Timeout";
        v.proof.params = {{"problem", to_string(P, cfg.sharp_style)}};
        v.proof.justification = {{"reason", v.reason}};
        v.proof.status = "timeout";
        return v;
    }
    v.proved = all_solved(v.proof);
    if (!v.proved) v.reason = "some ADP problems remain open";
    return v;
}

}  // namespace

Verdict prove_problem(const ADPProblem& P, const ProverConfig& cfg) { return run(P, cfg); }

Verdict prove(const PTRS& R, const ProverConfig& cfg) {
    ADPProblem P = canonical_adps(R);
    ProofNode root;
    root.processor = "ChainCriterion";
    root.params = {{"problem", to_string(P, cfg.sharp_style)}, {"goal", to_string(cfg.goal)}};
    if (cfg.goal == Goal::AST && !analyze_properties(R).global.non_duplicating) {
        Verdict v;
        v.goal = cfg.goal;
        v.reason = "chain criterion requires non-duplicating";
        root.status = "refused";
        root.justification = {{"reason", v.reason}};
        v.proof = root;
        return v;
    }
    root.justification = {{"criterion", cfg.goal == Goal::AST ? "non-duplicating PTRS: AST iff the canonical ADPs are AST"
                                                               : "iAST iff the canonical ADPs are iAST"}};
    Verdict v = run(P, cfg);
    root.status = v.proved ? "proved" : (v.proof.status == "timeout" ? "timeout" : "open");
    root.children.push_back(v.proof);
    v.proof = root;
    return v;
}

}  // namespace adp
