#pragma once

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "adp/adp.hpp"
#include "adp/ptrs.hpp"
#include "adp/term.hpp"

namespace testing {

struct Sym {
    std::string name;
    int arity;
};

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng(seed) {}

    std::mt19937_64 rng;

    const std::vector<Sym> defined{{"f", 1}, {"g", 2}, {"h", 0}};
    const std::vector<Sym> constructors{{"s", 1}, {"c", 2}, {"a", 0}, {"b", 0}};
    const std::vector<std::string> variables{"x", "y", "z"};

    bool is_defined(const std::string& f) const {
        for (const auto& s : defined)
            if (s.name == f) return true;
        return false;
    }

    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

    // Terms over all symbols; annotations only on defined symbols.
    adp::Term term(int depth, bool with_vars, double anno_p = 0.0) {
        if (with_vars && (depth == 0 || coin(0.25))) return adp::Term::var(variables[uniform(0, 2)]);
        std::vector<Sym> pool;
        for (const auto& s : defined) pool.push_back(s);
        for (const auto& s : constructors) pool.push_back(s);
        if (depth == 0) pool = {{"h", 0}, {"a", 0}, {"b", 0}};
        const Sym& s = pool[uniform(0, static_cast<int>(pool.size()) - 1)];
        std::vector<adp::Term> args;
        for (int i = 0; i < s.arity; ++i) args.push_back(term(depth - 1, with_vars, anno_p));
        bool annotate = is_defined(s.name) && coin(anno_p);
        return adp::Term::app(s.name, std::move(args), annotate);
    }

    adp::Term constructor_term(int depth, bool with_vars) {
        if (with_vars && (depth == 0 || coin(0.4))) return adp::Term::var(variables[uniform(0, 2)]);
        std::vector<Sym> pool = depth == 0 ? std::vector<Sym>{{"a", 0}, {"b", 0}} : constructors;
        const Sym& s = pool[uniform(0, static_cast<int>(pool.size()) - 1)];
        std::vector<adp::Term> args;
        for (int i = 0; i < s.arity; ++i) args.push_back(constructor_term(depth - 1, with_vars));
        return adp::Term::app(s.name, std::move(args));
    }

    // A term whose variables are all drawn from `allowed`.
    adp::Term term_over(int depth, const std::vector<std::string>& allowed) {
        adp::Term t = term(depth, !allowed.empty());
        adp::Subst s;
        for (const auto& v : variables)
            s[v] = allowed.empty() ? adp::Term::app("a") : adp::Term::var(allowed[uniform(0, static_cast<int>(allowed.size()) - 1)]);
        return adp::substitute(t, s);
    }

    adp::MultiDistribution distribution(const std::vector<std::string>& allowed, int depth) {
        int k = uniform(1, 3);
        static const int denominators[] = {1, 2, 3, 4, 6};
        int d = denominators[uniform(0, 4)];
        std::vector<int> parts(k, 0);
        if (d < k) d = k;
        int rest = d - k;
        for (int i = 0; i < k; ++i) parts[i] = 1;
        while (rest-- > 0) parts[uniform(0, k - 1)]++;
        adp::MultiDistribution mu;
        for (int i = 0; i < k; ++i) mu.push_back({adp::Rational(parts[i], d), term_over(depth, allowed)});
        for (auto& b : mu) b.p.canonicalize();
        return mu;
    }

    adp::ProbRule rule(int depth = 2) {
        const Sym& root = defined[uniform(0, 2)];
        std::vector<adp::Term> args;
        for (int i = 0; i < root.arity; ++i) args.push_back(constructor_term(depth - 1, true));
        adp::Term lhs = adp::Term::app(root.name, std::move(args));
        return {lhs, distribution(adp::vars(lhs), depth)};
    }

    adp::PTRS ptrs(int max_rules = 4) {
        std::vector<adp::ProbRule> rules;
        int n = uniform(1, max_rules);
        for (int i = 0; i < n; ++i) rules.push_back(rule());
        return adp::make_ptrs(std::move(rules));
    }

    // Canonical ADPs of a random PTRS with some annotations and flags dropped.
    adp::ADPProblem problem(int max_rules = 4) {
        adp::ADPProblem P = adp::canonical_adps(ptrs(max_rules));
        for (auto& a : P.adps) {
            if (coin(0.2)) a.flag = false;
            for (auto& b : a.rhs) {
                std::set<adp::Position> keep;
                for (const auto& p : adp::annotated_positions(b.t))
                    if (coin(0.8)) keep.insert(p);
                b.t = adp::anno(adp::flat(b.t), keep);
            }
        }
        return P;
    }
};

}  // namespace testing
