#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "adp/ptrs.hpp"
#include "adp/term.hpp"

namespace adp {

struct ADP {
    Term lhs;
    MultiDistribution rhs;
    bool flag = true;

    bool has_annotations() const;
};

struct ADPProblem {
    std::vector<ADP> adps;
    Signature signature;

    std::set<std::string> defined() const;
    bool has_annotations() const;
    std::vector<Term> lhss() const;
    std::set<std::string> flag_true_roots() const;
};

void validate_adp(const ADP& a);
std::string to_string(const ADP& a, bool sharp_style = false);
std::string to_string(const ADPProblem& P, bool sharp_style = false);
bool operator==(const ADP& a, const ADP& b);
bool operator==(const ADPProblem& a, const ADPProblem& b);

// Signature of P, with defined = lhs roots.
Signature signature_of(const std::vector<ADP>& adps, const Signature* base = nullptr);
ADPProblem make_problem(std::vector<ADP> adps, const Signature* base = nullptr);

ADP flatten(const ADP& a);
ADPProblem flatten(const ADPProblem& P);

// Renames the variables of a to x, y, z, u, v, w, x1, ... in order of first
// occurrence when they are internal (start with '_'); user names are kept.
ADP normalize_variables(const ADP& a);
ADP rename_apart(const ADP& a, FreshNames& fresh);
bool variant(const ADP& a, const ADP& b);
bool variant(const ADPProblem& a, const ADPProblem& b);
ADP substitute(const ADP& a, const Subst& s);

ADPProblem canonical_adps(const PTRS& R);

std::vector<PlainRule> np(const ADPProblem& P);
std::vector<PlainRule> dp(const ADPProblem& P);

bool is_nf(const Term& t, const ADPProblem& P);
bool is_anf(const Term& t, const ADPProblem& P);

enum class RewriteCase { AT, AF, NT, NF };
std::string to_string(RewriteCase c);

// phi[j] maps lhs variable positions to positions in r_j (absent = undefined).
struct VRF {
    std::vector<std::map<Position, Position>> phi;
};

enum class VrfPolicy { DropAll, KeepLeftmost, EnumerateMaximal };

VRF vrf_drop_all(const ADP& a);
VRF vrf_keep_leftmost(const ADP& a);
std::vector<VRF> vrf_enumerate_maximal(const ADP& a);
void validate_vrf(const ADP& a, const VRF& v);

struct AdpStep {
    std::size_t adp = 0;
    Position pos;
    RewriteCase rcase = RewriteCase::AT;
    MultiDistribution result;
};

std::vector<AdpStep> adp_step_innermost(const Term& s, const ADPProblem& P);
std::vector<AdpStep> adp_step_full(const Term& s, const ADPProblem& P, const VRF& vrf, std::size_t adp_index);
std::vector<AdpStep> adp_step_full(const Term& s, const ADPProblem& P, VrfPolicy policy);

}  // namespace adp
