#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace adp {

using Position = std::vector<int>;

std::string position_to_string(const Position& p);
bool is_prefix(const Position& p, const Position& q);
bool orthogonal(const Position& p, const Position& q);

class Term {
public:
    Term();
    static Term var(const std::string& name);
    static Term app(const std::string& name, std::vector<Term> args = {}, bool annotated = false);

    bool is_var() const;
    const std::string& name() const;
    bool annotated() const;
    const std::vector<Term>& args() const;
    std::size_t arity() const { return args().size(); }
    std::size_t hash() const;
    std::size_t size() const;
    bool same_node(const Term& o) const { return node_ == o.node_; }

    friend bool operator==(const Term& a, const Term& b);
    friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }
    friend bool operator<(const Term& a, const Term& b);

private:
    struct Node;
    std::shared_ptr<const Node> node_;
    explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
};

int compare(const Term& a, const Term& b);

struct TermHash {
    std::size_t operator()(const Term& t) const { return t.hash(); }
};

using Subst = std::map<std::string, Term>;

// Printing: annotated symbols are rendered in upper case (d -> D) when that is
// unambiguous, otherwise with a trailing '#'.
std::string to_string(const Term& t, bool sharp_style = false);
std::string to_string(const Subst& s);
std::string annotated_name(const std::string& name, bool sharp_style = false);

Term subterm_at(const Term& t, const Position& p);
Term replace_at(const Term& t, const Position& p, const Term& r);
bool valid_position(const Term& t, const Position& p);

std::vector<Position> positions(const Term& t);
std::vector<Position> function_positions(const Term& t);
std::vector<Position> variable_positions(const Term& t);
std::vector<Position> annotated_positions(const Term& t);

Term flat(const Term& t);
Term anno(const Term& t, const std::set<Position>& phi);
Term anno_root(const Term& t);
Term deanno_above(const Term& t, const Position& pi);
Term annotate_symbols(const Term& t, const std::set<std::string>& defined);
bool has_annotation(const Term& t);
std::size_t annotation_count(const Term& t);

std::vector<std::pair<Position, Term>> annotated_subterms(const Term& t);

std::vector<std::string> vars(const Term& t);
void collect_vars(const Term& t, std::set<std::string>& out);
void collect_symbols(const Term& t, std::map<std::string, int>& out);
bool is_ground(const Term& t);
bool is_linear(const Term& t);
int var_count(const Term& t, const std::string& x);
std::optional<std::string> root_symbol(const Term& t);

Term substitute(const Term& t, const Subst& s);
Subst compose(const Subst& first, const Subst& second);

std::optional<Subst> match(const Term& pattern, const Term& subject);
bool match_into(const Term& pattern, const Term& subject, Subst& s);
std::optional<Subst> unify(const Term& s, const Term& t);
std::optional<Subst> unify_all(const std::vector<std::pair<Term, Term>>& eqs);

bool is_instance_of(const Term& t, const Term& general);
bool variant(const Term& a, const Term& b);
bool is_subterm(const Term& small, const Term& big);
bool is_proper_subterm(const Term& small, const Term& big);

// Fresh names "_v0", "_v1", ... skipping any name already in use.
class FreshNames {
public:
    FreshNames() = default;
    explicit FreshNames(const std::set<std::string>& used) : used_(used) {}
    void reserve(const Term& t);
    void reserve(const std::string& name) { used_.insert(name); }
    std::string next();
    Term next_var() { return Term::var(next()); }

private:
    std::set<std::string> used_;
    int counter_ = 0;
};

Term cap(const Term& t, const std::set<std::string>& abstractable_roots);
Term cap(const Term& t, const std::set<std::string>& abstractable_roots, FreshNames& fresh);
Term ren(const Term& t);
Term ren(const Term& t, FreshNames& fresh);
Term cap_inverse(const Term& t, const std::set<std::string>& rhs_roots, bool collapsing);
Term cap_inverse(const Term& t, const std::set<std::string>& rhs_roots, bool collapsing, FreshNames& fresh);

// Renames the variables of t (consistently) to fresh names.
Term rename_apart(const Term& t, FreshNames& fresh, Subst* renaming = nullptr);

}  // namespace adp
