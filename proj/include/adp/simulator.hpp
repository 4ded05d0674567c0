#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "adp/adp.hpp"
#include "adp/graph.hpp"
#include "adp/ptrs.hpp"

namespace adp {

enum class SimMode { RST, ChainTree };

struct SimConfig {
    SimMode mode = SimMode::RST;
    RedexPolicy strategy = RedexPolicy::Random;
    VrfPolicy vrf = VrfPolicy::DropAll;
    // Rewrite relation used for chain trees.
    Mode chain_mode = Mode::Innermost;
    std::size_t step_cap = 1000;
    std::size_t samples = 1000;
    std::uint64_t seed = 0;
    // depth_cap > 0 selects exact mode.
    std::size_t depth_cap = 0;
    std::size_t frontier_limit = 200000;
};

struct Estimate {
    bool exact = false;
    double point = 0;
    double ci_low = 0;
    double ci_high = 0;
    Rational leaf_mass = 0;
    Rational truncated_mass = 0;
    std::size_t samples = 0;
    std::size_t terminated = 0;
    std::size_t total_steps = 0;
    std::uint64_t seed = 0;
};

std::pair<double, double> wilson_interval(std::size_t successes, std::size_t n, double z = 1.96);

void validate(const SimConfig& cfg);

Estimate estimate_termination(const PTRS& R, const Term& start, const SimConfig& cfg);
// Chain trees over an ADP problem; start should carry annotations.
Estimate estimate_termination(const ADPProblem& P, const Term& start, const SimConfig& cfg);

struct TraceLine {
    Rational p;
    std::string rcase;
    std::string pos;
    Term term;
};

std::string format_trace_line(const TraceLine& l, bool sharp_style = false);

// One sampled path (sample index i of the run described by cfg).
std::vector<TraceLine> sample_trace(const PTRS& R, const Term& start, const SimConfig& cfg, std::size_t index = 0);
std::vector<TraceLine> sample_trace(const ADPProblem& P, const Term& start, const SimConfig& cfg,
                                    std::size_t index = 0);

struct Witness {
    RedexPolicy policy = RedexPolicy::LeftmostOutermost;
    std::size_t depth = 0;
    // expected number of innermost redexes after k steps, k = 0..depth
    std::vector<Rational> expected_redexes;
    std::vector<TraceLine> trace;
};

std::optional<Witness> adversarial_search(const PTRS& R, const Term& start, std::size_t budget);

}  // namespace adp
