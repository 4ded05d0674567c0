#include <doctest.h>

#include "adp/simulator.hpp"
#include "helpers.hpp"

using namespace adp;
using namespace testing;

TEST_CASE("wilson interval") {
    auto [lo, hi] = wilson_interval(50, 100);
    CHECK(lo < 0.5);
    CHECK(hi > 0.5);
    CHECK(lo > 0.39);
    CHECK(hi < 0.61);
    auto [l0, h0] = wilson_interval(0, 10);
    CHECK(l0 == doctest::Approx(0.0));
    CHECK(h0 > 0.0);
}

TEST_CASE("exact lower bound for R1") {
    SimConfig cfg;
    cfg.depth_cap = 30;
    auto e = estimate_termination(load_ptrs("r1.ptrs"), T("g"), cfg);
    CHECK(e.exact);
    CHECK(e.point >= 0.99);
    CHECK(e.leaf_mass + e.truncated_mass == 1);
    Rational q = 1;
    for (int i = 0; i < 30; ++i) q *= Rational(3, 4);
    CHECK(e.leaf_mass == 1 - q);
}

TEST_CASE("normal form start") {
    SimConfig cfg;
    cfg.samples = 10;
    auto e = estimate_termination(load_ptrs("r1.ptrs"), T("0"), cfg);
    CHECK(e.point == 1.0);
    CHECK(e.total_steps == 0);
    CHECK(!adversarial_search(load_ptrs("r1.ptrs"), T("0"), 10));
}

TEST_CASE("Monte Carlo is reproducible") {
    SimConfig cfg;
    cfg.samples = 500;
    cfg.seed = 7;
    auto R = load_ptrs("sym_walk.ptrs");
    auto a = estimate_termination(R, T("g"), cfg);
    auto b = estimate_termination(R, T("g"), cfg);
    CHECK(a.terminated == b.terminated);
    CHECK(a.total_steps == b.total_steps);
    CHECK(a.ci_low <= a.point);
    CHECK(a.point <= a.ci_high);
}

TEST_CASE("invalid configurations are rejected") {
    SimConfig cfg;
    cfg.samples = 0;
    CHECK_THROWS(validate(cfg));
    SimConfig c2;
    c2.step_cap = 0;
    CHECK_THROWS(validate(c2));
}

TEST_CASE("chain tree simulation") {
    SimConfig cfg;
    cfg.mode = SimMode::ChainTree;
    cfg.depth_cap = 30;
    auto P = canonical_adps(load_ptrs("r1.ptrs"));
    auto e = estimate_termination(P, T("g#"), cfg);
    CHECK(e.point >= 0.99);
}

TEST_CASE("adversarial search") {
    auto w = adversarial_search(load_ptrs("r2.ptrs"), T("g"), 10);
    REQUIRE(w);
    CHECK(w->depth <= 10);
    CHECK(w->expected_redexes.back() > w->expected_redexes.front());
    CHECK(!is_innermost_policy(w->policy));
    CHECK(!adversarial_search(load_ptrs("r1.ptrs"), T("g"), 10));
}

TEST_CASE("trace lines") {
    SimConfig cfg;
    cfg.seed = 3;
    auto lines = sample_trace(load_ptrs("r1.ptrs"), T("g"), cfg);
    REQUIRE(!lines.empty());
    CHECK(format_trace_line(lines[0]).rfind("p ", 0) == 0);
    CHECK(format_trace_line(lines[0]).find("| term ") != std::string::npos);
}
