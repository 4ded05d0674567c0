#include <CLI11.hpp>

#include <iostream>

#include "adp/parser.hpp"
#include "adp/prover.hpp"
#include "adp/simulator.hpp"

namespace {

adp::Term default_start(const adp::ParsedInput& in) {
    if (in.is_adp_problem) {
        for (const auto& a : in.problem.adps)
            if (adp::is_ground(a.lhs)) return adp::anno_root(a.lhs);
    } else {
        for (const auto& r : in.ptrs.rules)
            if (adp::is_ground(r.lhs)) return r.lhs;
    }
    throw std::invalid_argument("no ground left-hand side to start from; pass --start");
}

void simulate(const adp::ParsedInput& in, const adp::ProverConfig& pc, const std::string& start_text,
              std::size_t samples, std::size_t steps, std::uint64_t seed, std::size_t depth, bool trace) {
    adp::Term start = start_text.empty() ? default_start(in) : adp::parse_term(start_text);
    adp::SimConfig sc;
    sc.samples = samples;
    sc.step_cap = steps;
    sc.seed = seed;
    sc.depth_cap = depth;
    sc.strategy = pc.goal == adp::Goal::IAST ? adp::RedexPolicy::RandomInnermost : adp::RedexPolicy::Random;
    adp::Estimate e;
    if (in.is_adp_problem) {
        sc.mode = adp::SimMode::ChainTree;
        sc.chain_mode = adp::mode_of(pc.goal);
        e = adp::estimate_termination(in.problem, start, sc);
    } else {
        e = adp::estimate_termination(in.ptrs, start, sc);
    }
    std::cout << "simulation: start " << adp::to_string(start, pc.sharp_style) << ", policy "
              << adp::to_string(sc.strategy) << ", seed " << seed << "\n";
    if (e.exact)
        std::cout << "  exact lower bound at depth " << depth << ": " << adp::rational_to_string(e.leaf_mass) << " ("
                  << e.point << "), truncated mass " << adp::rational_to_string(e.truncated_mass) << "\n";
    else
        std::cout << "  terminated " << e.terminated << "/" << e.samples << " within " << steps
                  << " steps: estimate " << e.point << ", 95% Wilson interval [" << e.ci_low << ", " << e.ci_high
                  << "]\n";
    if (trace) {
        auto lines = in.is_adp_problem ? adp::sample_trace(in.problem, start, sc) : adp::sample_trace(in.ptrs, start, sc);
        for (const auto& l : lines) std::cout << adp::format_trace_line(l, pc.sharp_style) << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Prove (innermost) almost-sure termination of probabilistic term rewrite systems"};
    std::string file, goal = "iast", proof = "human", start;
    adp::ProverConfig pc;
    std::size_t samples = 0, steps = 1000, depth = 0;
    std::uint64_t seed = 0;
    bool trace = false;
    app.add_option("file", file, "input file (PTRS or ADP problem)")->required();
    app.add_option("--goal", goal, "ast or iast")->check(CLI::IsMember({"ast", "iast", "AST", "iAST", "IAST"}));
    app.add_option("--timeout", pc.timeout, "time limit in seconds");
    app.add_option("--coeff-bound", pc.coeff_bound, "largest polynomial coefficient searched")->check(CLI::Range(0, 64));
    app.add_flag("--bilinear", pc.bilinear, "also search bilinear polynomial templates");
    app.add_option("--max-transform", pc.max_transform, "transformation budget per proof path")->check(CLI::NonNegativeNumber);
    app.add_option("--smt-solver", pc.smt_solver, "external QF_NIA solver reading SMT-LIB2 from a file");
    app.add_option("--proof", proof, "human or structured")->check(CLI::IsMember({"human", "structured"}));
    app.add_flag("--sharp", pc.sharp_style, "print annotated symbols as f# instead of upper case");
    app.add_option("--simulate", samples, "run the simulator with this many samples");
    app.add_option("--steps", steps, "step cap per simulated path")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "simulator seed");
    app.add_option("--depth", depth, "exact simulation up to this depth instead of sampling");
    app.add_option("--start", start, "start term for the simulator");
    app.add_flag("--trace", trace, "print one sampled simulation path");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        pc.goal = adp::parse_goal(goal);
        auto in = adp::parse_file(file);
        adp::Verdict v = in.is_adp_problem ? adp::prove_problem(in.problem, pc) : adp::prove(in.ptrs, pc);
        std::string verdict = v.proved ? "Proved(" + adp::to_string(v.goal) + ")" : "Maybe(" + v.reason + ")";
        if (proof == "structured") {
            std::cerr << verdict << "\n";
            std::cout << adp::render_structured(v.proof);
        } else {
            std::cout << verdict << "\n" << adp::render_human(v.proof);
        }
        if (samples > 0 || depth > 0) simulate(in, pc, start, std::max<std::size_t>(samples, 1), steps, seed, depth, trace);
        return v.proved ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
