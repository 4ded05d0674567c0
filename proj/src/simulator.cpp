#include "adp/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

namespace adp {

std::pair<double, double> wilson_interval(std::size_t successes, std::size_t n, double z) {
    if (n == 0) return {0.0, 1.0};
    double nn = static_cast<double>(n);
    double ph = static_cast<double>(successes) / nn;
    double z2 = z * z;
    double denom = 1 + z2 / nn;
    double centre = (ph + z2 / (2 * nn)) / denom;
    double half = z * std::sqrt(ph * (1 - ph) / nn + z2 / (4 * nn * nn)) / denom;
    double lo = std::max(0.0, centre - half);
    double hi = std::min(1.0, centre + half);
    return {std::min(lo, ph), std::max(hi, ph)};
}

void validate(const SimConfig& cfg) {
    if (cfg.step_cap < 1) throw std::invalid_argument("step_cap must be at least 1");
    if (cfg.samples < 1) throw std::invalid_argument("samples must be at least 1");
}

std::string format_trace_line(const TraceLine& l, bool sharp_style) {
    return "p " + rational_to_string(l.p) + " | case " + l.rcase + " | pos " + l.pos + " | term " +
           to_string(l.term, sharp_style);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::mt19937_64 stream_for(std::uint64_t seed, std::size_t index) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(index) + 1)));
}

std::size_t pick_branch(const MultiDistribution& mu, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double r = u(rng);
    double acc = 0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        acc += mu[i].p.get_d();
        if (r < acc) return i;
    }
    return mu.size() - 1;
}

// Mutable term tree for Monte-Carlo runs. Nodes live in a pool and are
// recycled, and every node caches the number of redexes and innermost redexes
// below it.
struct MNode {
    int sym = 0;
    int parent = -1;
    int slot = 0;
    std::vector<int> args;
    std::vector<int> root_rules;
    double redex = 0;
    double inner = 0;
};

struct Pat {
    int var = -1;
    int sym = -1;
    std::vector<Pat> args;
};

class FastSystem {
public:
    explicit FastSystem(const PTRS& R) : R_(R) {
        for (const auto& r : R.rules) {
            std::map<std::string, int> vmap;
            CRule cr;
            cr.lhs = compile(r.lhs, vmap);
            for (const auto& b : r.rhs) cr.rhs.push_back(compile(b.t, vmap));
            cr.nvars = static_cast<int>(vmap.size());
            rules_.push_back(std::move(cr));
        }
        by_sym_.resize(names_.size());
        for (std::size_t i = 0; i < rules_.size(); ++i) by_sym_[rules_[i].lhs.sym].push_back(static_cast<int>(i));
        // Root matches of a shallow symbol do not depend on its arguments.
        shallow_.assign(names_.size(), true);
        for (const auto& cr : rules_) {
            std::vector<bool> seen(static_cast<std::size_t>(cr.nvars), false);
            for (const auto& a : cr.lhs.args) {
                if (a.var < 0 || seen[static_cast<std::size_t>(a.var)]) shallow_[static_cast<std::size_t>(cr.lhs.sym)] = false;
                if (a.var >= 0) seen[static_cast<std::size_t>(a.var)] = true;
            }
        }
    }

    void load(const Term& t) {
        top_ = 0;
        free_.clear();
        root_ = from_term(t, -1, 0);
    }

    bool normal() const { return nodes_[static_cast<std::size_t>(root_)].redex == 0; }

    Term to_term() const { return to_term(root_); }

    // Picks a redex according to the policy; returns the path and the rule.
    bool choose(RedexPolicy policy, std::mt19937_64& rng, std::vector<int>& path, int& rule) const {
        path.clear();
        bool innermost = is_innermost_policy(policy);
        const MNode* n = &at(root_);
        double total = innermost ? n->inner : n->redex;
        if (total <= 0) return false;
        if (policy == RedexPolicy::Random || policy == RedexPolicy::RandomInnermost ||
            policy == RedexPolicy::Exhaustive) {
            std::uniform_real_distribution<double> u(0.0, total);
            double r = u(rng);
            for (;;) {
                bool all_nf = std::all_of(n->args.begin(), n->args.end(), [&](int a) { return at(a).redex == 0; });
                double here = (!innermost || all_nf) ? static_cast<double>(n->root_rules.size()) : 0.0;
                if (r < here) {
                    rule = n->root_rules[static_cast<std::size_t>(r)];
                    return true;
                }
                r -= here;
                int next = -1;
                int last = -1;
                for (std::size_t i = 0; i < n->args.size(); ++i) {
                    const MNode& c = at(n->args[i]);
                    double w = innermost ? c.inner : c.redex;
                    if (w <= 0) continue;
                    last = static_cast<int>(i);
                    if (r < w) {
                        next = last;
                        break;
                    }
                    r -= w;
                }
                if (next < 0) {
                    if (last < 0) {
                        rule = n->root_rules.at(0);
                        return true;
                    }
                    next = last;
                    r = 0;
                }
                path.push_back(next);
                n = &at(n->args[static_cast<std::size_t>(next)]);
            }
        }
        bool left = policy == RedexPolicy::LeftmostOutermost || policy == RedexPolicy::InnermostLeftmost;
        for (;;) {
            if (!innermost && !n->root_rules.empty()) {
                rule = n->root_rules[0];
                return true;
            }
            int next = -1;
            int k = static_cast<int>(n->args.size());
            for (int j = 0; j < k; ++j) {
                int i = left ? j : k - 1 - j;
                if (at(n->args[static_cast<std::size_t>(i)]).redex > 0) {
                    next = i;
                    break;
                }
            }
            if (next < 0) {
                rule = n->root_rules.at(0);
                return true;
            }
            path.push_back(next);
            n = &at(n->args[static_cast<std::size_t>(next)]);
        }
    }

    void rewrite(const std::vector<int>& path, int rule, std::size_t branch) {
        int target = root_;
        for (int i : path) target = at(target).args[static_cast<std::size_t>(i)];
        const CRule& cr = rules_[static_cast<std::size_t>(rule)];
        binding_.assign(static_cast<std::size_t>(cr.nvars), -1);
        used_.assign(static_cast<std::size_t>(cr.nvars), false);
        if (!match(cr.lhs, target)) throw std::logic_error("chosen redex does not match");
        int parent = at(target).parent;
        int slot = at(target).slot;
        int fresh = build(cr.rhs[branch], parent, slot);
        release(target);
        if (parent < 0)
            root_ = fresh;
        else
            node(parent).args[static_cast<std::size_t>(slot)] = fresh;
        for (int p = parent; p >= 0; p = at(p).parent) refresh(p, !shallow_[static_cast<std::size_t>(at(p).sym)]);
    }

    const MultiDistribution& distribution(int rule) const { return R_.rules[static_cast<std::size_t>(rule)].rhs; }

private:
    struct CRule {
        Pat lhs;
        std::vector<Pat> rhs;
        int nvars = 0;
    };

    const MNode& at(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
    MNode& node(int i) { return nodes_[static_cast<std::size_t>(i)]; }

    int alloc(int sym, int parent, int slot) {
        int i;
        if (!free_.empty()) {
            i = free_.back();
            free_.pop_back();
        } else {
            if (static_cast<std::size_t>(top_) == nodes_.size()) nodes_.emplace_back();
            i = top_++;
        }
        MNode& n = node(i);
        n.sym = sym;
        n.parent = parent;
        n.slot = slot;
        n.args.clear();
        n.root_rules.clear();
        n.redex = n.inner = 0;
        return i;
    }

    // Frees the subtree at i, skipping children that were moved elsewhere.
    void release(int i) {
        for (int c : at(i).args)
            if (at(c).parent == i) release(c);
        free_.push_back(i);
    }

    int from_term(const Term& t, int parent, int slot) {
        if (t.is_var()) throw std::invalid_argument("simulation start term must be ground: " + to_string(t));
        int n = alloc(intern(t.name()), parent, slot);
        for (std::size_t i = 0; i < t.args().size(); ++i) {
            int c = from_term(t.args()[i], n, static_cast<int>(i));
            node(n).args.push_back(c);
        }
        refresh(n, true);
        return n;
    }

    Term to_term(int i) const {
        std::vector<Term> args;
        for (int a : at(i).args) args.push_back(to_term(a));
        return Term::app(names_[static_cast<std::size_t>(at(i).sym)], std::move(args));
    }

    int copy(int src, int parent, int slot) {
        int n = alloc(at(src).sym, parent, slot);
        for (std::size_t i = 0; i < at(src).args.size(); ++i) {
            int c = copy(at(src).args[i], n, static_cast<int>(i));
            node(n).args.push_back(c);
        }
        node(n).root_rules = at(src).root_rules;
        node(n).redex = at(src).redex;
        node(n).inner = at(src).inner;
        return n;
    }

    int build(const Pat& p, int parent, int slot) {
        if (p.var >= 0) {
            auto v = static_cast<std::size_t>(p.var);
            int b = binding_[v];
            if (used_[v]) return copy(b, parent, slot);
            used_[v] = true;
            node(b).parent = parent;
            node(b).slot = slot;
            return b;
        }
        int n = alloc(p.sym, parent, slot);
        for (std::size_t i = 0; i < p.args.size(); ++i) {
            int c = build(p.args[i], n, static_cast<int>(i));
            node(n).args.push_back(c);
        }
        refresh(n, true);
        return n;
    }

    void refresh(int i, bool rematch) {
        if (rematch) {
            std::vector<int> rr;
            auto sym = static_cast<std::size_t>(at(i).sym);
            if (sym < by_sym_.size())
                for (int r : by_sym_[sym]) {
                    binding_.assign(static_cast<std::size_t>(rules_[static_cast<std::size_t>(r)].nvars), -1);
                    if (match(rules_[static_cast<std::size_t>(r)].lhs, i)) rr.push_back(r);
                }
            node(i).root_rules = std::move(rr);
        }
        MNode& n = node(i);
        bool all_nf = true;
        double redex = static_cast<double>(n.root_rules.size());
        double inner = 0;
        for (int a : n.args) {
            redex += at(a).redex;
            inner += at(a).inner;
            if (at(a).redex > 0) all_nf = false;
        }
        if (all_nf) inner += static_cast<double>(n.root_rules.size());
        n.redex = redex;
        n.inner = inner;
    }

    int intern(const std::string& s) {
        auto it = ids_.find(s);
        if (it != ids_.end()) return it->second;
        int id = static_cast<int>(names_.size());
        ids_.emplace(s, id);
        names_.push_back(s);
        by_sym_.emplace_back();
        shallow_.push_back(true);
        return id;
    }

    Pat compile(const Term& t, std::map<std::string, int>& vmap) {
        Pat p;
        if (t.is_var()) {
            auto it = vmap.find(t.name());
            if (it == vmap.end()) it = vmap.emplace(t.name(), static_cast<int>(vmap.size())).first;
            p.var = it->second;
            return p;
        }
        p.sym = intern(t.name());
        for (const auto& a : t.args()) p.args.push_back(compile(a, vmap));
        return p;
    }

    bool equal(int a, int b) const {
        if (a == b) return true;
        const MNode& x = at(a);
        const MNode& y = at(b);
        if (x.sym != y.sym || x.args.size() != y.args.size()) return false;
        for (std::size_t i = 0; i < x.args.size(); ++i)
            if (!equal(x.args[i], y.args[i])) return false;
        return true;
    }

    bool match(const Pat& p, int n) {
        if (p.var >= 0) {
            int& slot = binding_[static_cast<std::size_t>(p.var)];
            if (slot < 0) {
                slot = n;
                return true;
            }
            return equal(slot, n);
        }
        const MNode& x = at(n);
        if (p.sym != x.sym || p.args.size() != x.args.size()) return false;
        for (std::size_t i = 0; i < p.args.size(); ++i)
            if (!match(p.args[i], x.args[i])) return false;
        return true;
    }

    const PTRS& R_;
    std::vector<CRule> rules_;
    std::map<std::string, int> ids_;
    std::vector<std::string> names_;
    std::vector<std::vector<int>> by_sym_;
    std::vector<bool> shallow_;
    std::vector<MNode> nodes_;
    std::vector<int> free_;
    int top_ = 0;
    int root_ = -1;
    std::vector<int> binding_;
    std::vector<bool> used_;
};

std::string path_string(const std::vector<int>& path) {
    Position p;
    for (int i : path) p.push_back(i + 1);
    return position_to_string(p);
}

// One step option of the exact expansion: a distribution with the weight of
// choosing it.
struct Option {
    Rational weight;
    MultiDistribution result;
};

std::vector<Option> ptrs_options(const Term& t, const PTRS& R, RedexPolicy policy) {
    std::vector<Option> out;
    if (policy == RedexPolicy::Random || policy == RedexPolicy::RandomInnermost ||
        policy == RedexPolicy::Exhaustive) {
        auto rs = redexes(t, R, policy == RedexPolicy::RandomInnermost);
        for (const auto& [rule, pos] : rs)
            out.push_back({Rational(1, static_cast<unsigned long>(rs.size())), apply_step(t, R, rule, pos).result});
        for (auto& o : out) o.weight.canonicalize();
        return out;
    }
    if (auto st = ptrs_step(t, R, policy)) out.push_back({Rational(1), st->result});
    return out;
}

std::vector<AdpStep> chain_steps(const Term& s, const ADPProblem& P, const SimConfig& cfg) {
    if (!has_annotation(s)) return {};
    if (cfg.chain_mode == Mode::Innermost) return adp_step_innermost(s, P);
    return adp_step_full(s, P, cfg.vrf);
}

std::vector<Option> chain_options(const Term& s, const ADPProblem& P, const SimConfig& cfg) {
    auto steps = chain_steps(s, P, cfg);
    std::vector<Option> out;
    if (steps.empty()) return out;
    if (cfg.strategy == RedexPolicy::Random || cfg.strategy == RedexPolicy::RandomInnermost ||
        cfg.strategy == RedexPolicy::Exhaustive) {
        for (const auto& st : steps) {
            Rational w(1, static_cast<unsigned long>(steps.size()));
            w.canonicalize();
            out.push_back({w, st.result});
        }
    } else {
        out.push_back({Rational(1), steps.front().result});
    }
    return out;
}

template <class OptionsFn>
Estimate exact_expand(const Term& start, const SimConfig& cfg, OptionsFn options) {
    Estimate e;
    e.exact = true;
    e.seed = cfg.seed;
    std::map<Term, Rational> frontier{{start, Rational(1)}};
    Rational leaf = 0;
    for (std::size_t d = 0; d < cfg.depth_cap && !frontier.empty(); ++d) {
        std::map<Term, Rational> next;
        for (const auto& [t, p] : frontier) {
            auto opts = options(t);
            if (opts.empty()) {
                leaf += p;
                continue;
            }
            for (const auto& o : opts)
                for (const auto& br : o.result) next[br.t] += p * o.weight * br.p;
            ++e.total_steps;
        }
        frontier = std::move(next);
        if (frontier.size() > cfg.frontier_limit) break;
    }
    Rational rest = 0;
    for (const auto& [t, p] : frontier) {
        if (options(t).empty())
            leaf += p;
        else
            rest += p;
    }
    e.leaf_mass = leaf;
    e.truncated_mass = rest;
    e.point = leaf.get_d();
    e.ci_low = e.point;
    e.ci_high = std::min(1.0, Rational(leaf + rest).get_d());
    return e;
}

void finish_mc(Estimate& e) {
    e.point = static_cast<double>(e.terminated) / static_cast<double>(e.samples);
    auto [lo, hi] = wilson_interval(e.terminated, e.samples);
    e.ci_low = lo;
    e.ci_high = hi;
}

}  // namespace

Estimate estimate_termination(const PTRS& R, const Term& start, const SimConfig& cfg) {
    validate(cfg);
    if (cfg.mode == SimMode::ChainTree)
        throw std::invalid_argument("chain-tree simulation needs an ADP problem");
    if (cfg.depth_cap > 0)
        return exact_expand(start, cfg, [&](const Term& t) { return ptrs_options(t, R, cfg.strategy); });
    FastSystem fs(R);
    Estimate e;
    e.seed = cfg.seed;
    e.samples = cfg.samples;
    std::vector<int> path;
    for (std::size_t s = 0; s < cfg.samples; ++s) {
        auto rng = stream_for(cfg.seed, s);
        fs.load(start);
        std::size_t steps = 0;
        int rule = 0;
        while (steps < cfg.step_cap && fs.choose(cfg.strategy, rng, path, rule)) {
            fs.rewrite(path, rule, pick_branch(fs.distribution(rule), rng));
            ++steps;
        }
        e.total_steps += steps;
        if (fs.normal()) ++e.terminated;
    }
    finish_mc(e);
    return e;
}

Estimate estimate_termination(const ADPProblem& P, const Term& start, const SimConfig& cfg) {
    validate(cfg);
    if (cfg.depth_cap > 0)
        return exact_expand(start, cfg, [&](const Term& t) { return chain_options(t, P, cfg); });
    Estimate e;
    e.seed = cfg.seed;
    e.samples = cfg.samples;
    for (std::size_t s = 0; s < cfg.samples; ++s) {
        auto rng = stream_for(cfg.seed, s);
        Term cur = start;
        std::size_t steps = 0;
        bool leaf = false;
        while (steps < cfg.step_cap) {
            auto opts = chain_options(cur, P, cfg);
            if (opts.empty()) {
                leaf = true;
                break;
            }
            std::uniform_int_distribution<std::size_t> u(0, opts.size() - 1);
            const auto& o = opts[u(rng)];
            cur = o.result[pick_branch(o.result, rng)].t;
            ++steps;
        }
        if (!leaf && chain_options(cur, P, cfg).empty()) leaf = true;
        e.total_steps += steps;
        if (leaf) ++e.terminated;
    }
    finish_mc(e);
    return e;
}

std::vector<TraceLine> sample_trace(const PTRS& R, const Term& start, const SimConfig& cfg, std::size_t index) {
    validate(cfg);
    FastSystem fs(R);
    fs.load(start);
    auto rng = stream_for(cfg.seed, index);
    std::vector<TraceLine> out;
    Rational p = 1;
    out.push_back({p, "-", "-", start});
    std::vector<int> path;
    int rule = 0;
    for (std::size_t steps = 0; steps < cfg.step_cap && fs.choose(cfg.strategy, rng, path, rule); ++steps) {
        const auto& mu = fs.distribution(rule);
        std::size_t b = pick_branch(mu, rng);
        fs.rewrite(path, rule, b);
        p *= mu[b].p;
        out.push_back({p, "-", path_string(path), fs.to_term()});
    }
    return out;
}

std::vector<TraceLine> sample_trace(const ADPProblem& P, const Term& start, const SimConfig& cfg, std::size_t index) {
    validate(cfg);
    auto rng = stream_for(cfg.seed, index);
    std::vector<TraceLine> out;
    Rational p = 1;
    Term cur = start;
    out.push_back({p, "-", "-", cur});
    for (std::size_t steps = 0; steps < cfg.step_cap; ++steps) {
        auto st = chain_steps(cur, P, cfg);
        if (st.empty()) break;
        std::size_t pick = 0;
        if (cfg.strategy == RedexPolicy::Random || cfg.strategy == RedexPolicy::RandomInnermost ||
            cfg.strategy == RedexPolicy::Exhaustive) {
            std::uniform_int_distribution<std::size_t> u(0, st.size() - 1);
            pick = u(rng);
        }
        const auto& s = st[pick];
        std::size_t b = pick_branch(s.result, rng);
        p *= s.result[b].p;
        cur = s.result[b].t;
        out.push_back({p, to_string(s.rcase), position_to_string(s.pos), cur});
    }
    return out;
}

std::optional<Witness> adversarial_search(const PTRS& R, const Term& start, std::size_t budget) {
    const RedexPolicy policies[] = {RedexPolicy::InnermostLeftmost, RedexPolicy::LeftmostOutermost,
                                    RedexPolicy::InnermostRightmost, RedexPolicy::RightmostOutermost};
    auto count = [&](const Term& t) { return Rational(static_cast<long>(redexes(t, R, true).size())); };
    Rational e0 = count(start);
    for (RedexPolicy pol : policies) {
        std::vector<Rational> ex{e0};
        std::map<Term, Rational> frontier{{start, Rational(1)}};
        for (std::size_t d = 0; d < budget && !frontier.empty(); ++d) {
            std::map<Term, Rational> next;
            for (const auto& [t, p] : frontier) {
                auto st = ptrs_step(t, R, pol);
                if (!st) continue;
                for (const auto& br : st->result) next[br.t] += p * br.p;
            }
            frontier = std::move(next);
            Rational e = 0;
            for (const auto& [t, p] : frontier) e += p * count(t);
            ex.push_back(e);
        }
        std::size_t best = 0;
        for (std::size_t d = 1; d < ex.size(); ++d)
            if (ex[d] > ex[best]) best = d;
        if (best == 0 || !(ex[best] > e0)) continue;
        Witness w;
        w.policy = pol;
        w.depth = best;
        w.expected_redexes = ex;
        Term cur = start;
        Rational p = 1;
        w.trace.push_back({p, "-", "-", cur});
        for (std::size_t d = 0; d < best; ++d) {
            auto st = ptrs_step(cur, R, pol);
            if (!st) break;
            std::size_t pick = 0;
            for (std::size_t i = 1; i < st->result.size(); ++i)
                if (count(st->result[i].t) > count(st->result[pick].t)) pick = i;
            p *= st->result[pick].p;
            cur = st->result[pick].t;
            w.trace.push_back({p, "-", position_to_string(st->pos), cur});
        }
        return w;
    }
    return std::nullopt;
}

}  // namespace adp
