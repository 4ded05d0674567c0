#include "adp/proof.hpp"

#include <json.hpp>
#include <sstream>

namespace adp {

using json = nlohmann::ordered_json;

namespace {

std::string lookup(const Fields& f, const std::string& key) {
    for (const auto& [k, v] : f)
        if (k == key) return v;
    return "";
}

json fields_to_json(const Fields& f) {
    json j = json::object();
    for (const auto& [k, v] : f) j[k] = v;
    return j;
}

Fields fields_from_json(const json& j) {
    Fields f;
    for (auto it = j.begin(); it != j.end(); ++it) f.emplace_back(it.key(), it.value().get<std::string>());
    return f;
}

json to_json(const ProofNode& n) {
    json j = json::object();
    j["processor"] = n.processor;
    j["params"] = fields_to_json(n.params);
    j["justification"] = fields_to_json(n.justification);
    j["status"] = n.status;
    json ch = json::array();
    for (const auto& c : n.children) ch.push_back(to_json(c));
    j["children"] = ch;
    return j;
}

ProofNode from_json(const json& j) {
    ProofNode n;
    n.processor = j.at("processor").get<std::string>();
    n.params = fields_from_json(j.at("params"));
    n.justification = fields_from_json(j.at("justification"));
    n.status = j.at("status").get<std::string>();
    for (const auto& c : j.at("children")) n.children.push_back(from_json(c));
    return n;
}

void indent_lines(std::ostringstream& os, const std::string& text, const std::string& pad) {
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) os << pad << line << '\n';
}

void human(const ProofNode& n, int depth, std::ostringstream& os) {
    std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    if (n.processor == "Solved") {
        os << pad << "no annotations — solved\n";
        return;
    }
    os << pad << n.processor;
    bool first = true;
    for (const auto& [k, v] : n.params) {
        if (k == "problem") continue;
        os << (first ? " [" : ", ") << k << "=" << v;
        first = false;
    }
    if (!first) os << "]";
    os << ": " << n.status << '\n';
    std::string problem = n.param("problem");
    if (!problem.empty()) {
        os << pad << "  problem:\n";
        indent_lines(os, problem, pad + "    ");
    }
    for (const auto& [k, v] : n.justification) {
        if (v.find('\n') == std::string::npos) {
            os << pad << "  " << k << ": " << v << '\n';
        } else {
            os << pad << "  " << k << ":\n";
            indent_lines(os, v, pad + "    ");
        }
    }
    for (const auto& c : n.children) human(c, depth + 1, os);
}

}  // namespace

std::string ProofNode::param(const std::string& key) const { return lookup(params, key); }
std::string ProofNode::detail(const std::string& key) const { return lookup(justification, key); }

bool operator==(const ProofNode& a, const ProofNode& b) {
    return a.processor == b.processor && a.params == b.params && a.justification == b.justification &&
           a.status == b.status && a.children == b.children;
}

ProofNode solved_leaf(const std::string& problem) {
    ProofNode n;
    n.processor = "Solved";
    n.params = {{"problem", problem}};
    n.status = "solved";
    return n;
}

bool all_solved(const ProofNode& n) {
    if (n.children.empty()) return n.status == "solved" || n.status == "proved";
    for (const auto& c : n.children)
        if (!all_solved(c)) return false;
    return true;
}

std::string render_human(const ProofNode& n) {
    std::ostringstream os;
    human(n, 0, os);
    return os.str();
}

std::string render_structured(const ProofNode& n) { return to_json(n).dump(2) + "\n"; }

ProofNode parse_structured(const std::string& text) { return from_json(json::parse(text)); }

std::string render_proof(const ProofNode& n, ProofFormat format) {
    return format == ProofFormat::Human ? render_human(n) : render_structured(n);
}

std::vector<std::string> processor_sequence(const ProofNode& n) {
    std::vector<std::string> out{n.processor};
    for (const auto& c : n.children) {
        auto sub = processor_sequence(c);
        out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
}

}  // namespace adp
