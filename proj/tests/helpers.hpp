#pragma once

#include <set>
#include <string>

#include "adp/adp.hpp"
#include "adp/parser.hpp"
#include "adp/ptrs.hpp"
#include "adp/term.hpp"

namespace testing {

inline const std::set<std::string>& default_vars() {
    static const std::set<std::string> v{"x", "y", "z", "u", "v", "w", "x1", "x2", "xs", "ys"};
    return v;
}

inline adp::Term T(const std::string& s, const std::set<std::string>& vars = default_vars()) {
    return adp::parse_term(s, vars);
}

inline std::string S(const adp::Term& t) { return adp::to_string(t); }

inline std::string corpus(const std::string& name) { return std::string(ADP_CORPUS_DIR) + "/" + name; }

inline adp::PTRS load_ptrs(const std::string& name) { return adp::parse_file(corpus(name)).ptrs; }
inline adp::ADPProblem load_problem(const std::string& name) { return adp::parse_file(corpus(name)).problem; }

inline adp::ADPProblem problem(const std::string& text) { return adp::parse_adp_problem(text); }

inline adp::Position pos(std::initializer_list<int> l) { return adp::Position(l); }

}  // namespace testing
