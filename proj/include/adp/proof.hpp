#pragma once

#include <string>
#include <utility>
#include <vector>

namespace adp {

using Fields = std::vector<std::pair<std::string, std::string>>;

struct ProofNode {
    std::string processor;
    // params always carries the printed problem under the key "problem"
    Fields params;
    Fields justification;
    // one of: solved, proved, open, refused, timeout, applied
    std::string status;
    std::vector<ProofNode> children;

    std::string param(const std::string& key) const;
    std::string detail(const std::string& key) const;
};

bool operator==(const ProofNode& a, const ProofNode& b);

ProofNode solved_leaf(const std::string& problem);

// True iff every leaf of the tree is solved.
bool all_solved(const ProofNode& n);

enum class ProofFormat { Human, Structured };

std::string render_proof(const ProofNode& n, ProofFormat format);
std::string render_human(const ProofNode& n);
std::string render_structured(const ProofNode& n);
ProofNode parse_structured(const std::string& text);

// Processor names in preorder.
std::vector<std::string> processor_sequence(const ProofNode& n);

}  // namespace adp
