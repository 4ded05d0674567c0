#pragma once

#include <set>
#include <stdexcept>
#include <string>

#include "adp/adp.hpp"
#include "adp/ptrs.hpp"

namespace adp {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line, int column)
        : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
          line_(line),
          column_(column) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

// A file either describes a PTRS, or (when rules carry a trailing ^true or
// ^false and may use annotated symbols written f#) an ADP problem.
struct ParsedInput {
    bool is_adp_problem = false;
    PTRS ptrs;
    ADPProblem problem;
};

ParsedInput parse_input(const std::string& text);
PTRS parse_ptrs(const std::string& text);
ADPProblem parse_adp_problem(const std::string& text);
ParsedInput parse_file(const std::string& path);

// Parses a single term; identifiers in `variables` become variables.
Term parse_term(const std::string& text, const std::set<std::string>& variables = {});

}  // namespace adp
