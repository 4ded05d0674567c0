#include "adp/graph.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace adp {

std::string to_string(Mode m) { return m == Mode::Full ? "full" : "innermost"; }

bool may_reach(const ADPProblem& P, std::size_t alpha, const Term& t, std::size_t beta, Mode mode) {
    const ADP& a = P.adps.at(alpha);
    const ADP& b = P.adps.at(beta);
    auto roots = P.flag_true_roots();
    FreshNames fresh;
    fresh.reserve(a.lhs);
    fresh.reserve(t);
    Term lb = rename_apart(b.lhs, fresh);
    Term start = cap(anno_root(t), roots, fresh);
    if (mode == Mode::Full) start = ren(start, fresh);
    auto delta = unify(start, anno_root(lb));
    if (!delta) return false;
    if (mode == Mode::Innermost) {
        auto lhss = P.lhss();
        if (!is_anf(substitute(a.lhs, *delta), lhss)) return false;
        if (!is_anf(substitute(lb, *delta), lhss)) return false;
    }
    return true;
}

DepGraph estimate_dep_graph(const ADPProblem& P, Mode mode) {
    DepGraph g;
    g.mode = mode;
    g.succ.resize(P.adps.size());
    for (std::size_t a = 0; a < P.adps.size(); ++a) {
        std::vector<Term> ts;
        for (const auto& br : P.adps[a].rhs)
            for (const auto& [pos, t] : annotated_subterms(br.t)) ts.push_back(t);
        if (ts.empty()) continue;
        for (std::size_t b = 0; b < P.adps.size(); ++b) {
            for (const auto& t : ts)
                if (may_reach(P, a, t, b, mode)) {
                    g.succ[a].insert(b);
                    break;
                }
        }
    }
    return g;
}

std::vector<std::vector<std::size_t>> sccs(const DepGraph& g) {
    std::size_t n = g.size();
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<bool> on(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> out;
    int counter = 0;
    std::function<void(std::size_t)> visit = [&](std::size_t v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on[v] = true;
        for (std::size_t w : g.succ[v]) {
            if (index[w] < 0) {
                visit(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            std::vector<std::size_t> comp;
            for (;;) {
                std::size_t w = stack.back();
                stack.pop_back();
                on[w] = false;
                comp.push_back(w);
                if (w == v) break;
            }
            std::sort(comp.begin(), comp.end());
            bool nontrivial = comp.size() > 1 || g.succ[comp[0]].count(comp[0]);
            if (nontrivial) out.push_back(comp);
        }
    };
    for (std::size_t v = 0; v < n; ++v)
        if (index[v] < 0) visit(v);
    return out;
}

std::string to_dot(const DepGraph& g, const ADPProblem& P) {
    std::string s = "digraph dependency_graph {\n";
    for (std::size_t v = 0; v < g.size(); ++v) {
        std::string label = to_string(P.adps[v]);
        std::string esc;
        for (char c : label) {
            if (c == '"') esc += '\\';
            esc += c;
        }
        s += "  n" + std::to_string(v) + " [label=\"" + esc + "\"];\n";
    }
    for (std::size_t v = 0; v < g.size(); ++v)
        for (std::size_t w : g.succ[v]) s += "  n" + std::to_string(v) + " -> n" + std::to_string(w) + ";\n";
    return s + "}\n";
}

DepGraphResult run_dependency_graph(const ADPProblem& P, Mode mode) {
    DepGraphResult res;
    res.graph = estimate_dep_graph(P, mode);
    res.components = sccs(res.graph);
    for (const auto& comp : res.components) {
        std::set<std::size_t> in(comp.begin(), comp.end());
        ADPProblem Q = P;
        for (std::size_t k = 0; k < Q.adps.size(); ++k)
            if (!in.count(k)) Q.adps[k] = flatten(Q.adps[k]);
        res.problems.push_back(std::move(Q));
    }
    return res;
}

std::vector<ADPProblem> proc_dependency_graph(const ADPProblem& P, Mode mode) {
    return run_dependency_graph(P, mode).problems;
}

ADPProblem proc_usable_terms(const ADPProblem& P, Mode mode, std::vector<RemovedAnnotation>* removed) {
    std::vector<std::size_t> targets;
    for (std::size_t b = 0; b < P.adps.size(); ++b)
        if (P.adps[b].has_annotations()) targets.push_back(b);
    ADPProblem Q = P;
    for (std::size_t a = 0; a < P.adps.size(); ++a) {
        for (std::size_t j = 0; j < P.adps[a].rhs.size(); ++j) {
            const Term& r = P.adps[a].rhs[j].t;
            std::set<Position> keep;
            for (const auto& [pos, t] : annotated_subterms(r)) {
                bool usable = false;
                for (std::size_t b : targets)
                    if (may_reach(P, a, t, b, mode)) {
                        usable = true;
                        break;
                    }
                if (usable)
                    keep.insert(pos);
                else if (removed)
                    removed->push_back({a, j, pos});
            }
            Q.adps[a].rhs[j].t = anno(r, keep);
        }
    }
    return Q;
}

namespace {

void usable_rec(const Term& t, const ADPProblem& P, std::vector<bool>& active, std::set<std::size_t>& out) {
    if (t.is_var()) return;
    bool any = false;
    for (bool b : active) any = any || b;
    if (!any) return;
    std::vector<std::size_t> rules;
    if (!t.annotated())
        for (std::size_t k = 0; k < P.adps.size(); ++k)
            if (active[k] && P.adps[k].lhs.name() == t.name()) rules.push_back(k);
    std::vector<bool> next = active;
    for (std::size_t k : rules) {
        next[k] = false;
        out.insert(k);
    }
    for (const auto& a : t.args()) {
        std::vector<bool> copy = next;
        usable_rec(a, P, copy, out);
    }
    for (std::size_t k : rules)
        for (const auto& br : P.adps[k].rhs) {
            std::vector<bool> copy = next;
            usable_rec(flat(br.t), P, copy, out);
        }
}

std::vector<bool> initial_active(const ADPProblem& P) {
    std::vector<bool> active(P.adps.size());
    for (std::size_t k = 0; k < P.adps.size(); ++k) active[k] = P.adps[k].flag;
    return active;
}

}  // namespace

std::set<std::size_t> usable_rules_of(const Term& t, const ADPProblem& P) {
    std::set<std::size_t> out;
    auto active = initial_active(P);
    usable_rec(t, P, active, out);
    return out;
}

std::set<std::size_t> usable_rules(const ADPProblem& P) {
    std::set<std::size_t> out;
    for (const auto& a : P.adps)
        for (const auto& br : a.rhs)
            for (const auto& [pos, t] : annotated_subterms(br.t)) {
                auto u = usable_rules_of(anno_root(t), P);
                out.insert(u.begin(), u.end());
            }
    return out;
}

ADPProblem proc_usable_rules(const ADPProblem& P, Mode mode) {
    if (mode == Mode::Full)
        throw std::logic_error("usable rules processor refused: unsound for full rewriting (AST)");
    auto u = usable_rules(P);
    ADPProblem Q = P;
    for (std::size_t k = 0; k < Q.adps.size(); ++k)
        if (!u.count(k)) Q.adps[k].flag = false;
    return Q;
}

}  // namespace adp
