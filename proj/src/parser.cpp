#include "adp/parser.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace adp {

namespace {

enum class Tok { Ident, Arrow, LBrace, RBrace, LParen, RParen, Comma, Colon, Semi, Slash, Caret, End };

struct Token {
    Tok kind;
    std::string text;
    bool sharp = false;
    int line;
    int col;
};

bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

std::vector<Token> lex(const std::string& s) {
    std::vector<Token> out;
    int line = 1;
    int col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < s.size(); ++k, ++i) {
            if (s[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '#') {
            while (i < s.size() && s[i] != '\n') advance(1);
            continue;
        }
        int l = line;
        int cl = col;
        if (ident_char(c)) {
            std::size_t j = i;
            while (j < s.size() && ident_char(s[j])) ++j;
            Token t{Tok::Ident, s.substr(i, j - i), false, l, cl};
            advance(j - i);
            if (i < s.size() && s[i] == '#') {
                t.sharp = true;
                advance(1);
            }
            out.push_back(t);
            continue;
        }
        if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') {
            out.push_back({Tok::Arrow, "->", false, l, cl});
            advance(2);
            continue;
        }
        if (s.compare(i, 3, "\xE2\x86\x92") == 0) {
            out.push_back({Tok::Arrow, "->", false, l, cl});
            advance(3);
            continue;
        }
        Tok k;
        switch (c) {
            case '{': k = Tok::LBrace; break;
            case '}': k = Tok::RBrace; break;
            case '(': k = Tok::LParen; break;
            case ')': k = Tok::RParen; break;
            case ',': k = Tok::Comma; break;
            case ':': k = Tok::Colon; break;
            case ';': k = Tok::Semi; break;
            case '/': k = Tok::Slash; break;
            case '^': k = Tok::Caret; break;
            default: throw ParseError(std::string("unexpected character '") + c + "'", l, cl);
        }
        out.push_back({k, std::string(1, c), false, l, cl});
        advance(1);
    }
    out.push_back({Tok::End, "", false, line, col});
    return out;
}

// Raw syntax tree before variables and symbols are told apart.
struct Raw {
    std::string name;
    bool sharp = false;
    bool applied = false;
    std::vector<Raw> args;
    int line = 0;
    int col = 0;
};

struct RawBranch {
    std::string num;
    std::string den;
    Raw term;
    int line;
    int col;
};

struct RawRule {
    Raw lhs;
    std::vector<RawBranch> rhs;
    int flag = -1;
    int line;
    int col;
};

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    Token expect(Tok k, const char* what) {
        if (peek().kind != k) throw ParseError(std::string("expected ") + what + ", found '" + peek().text + "'", peek().line, peek().col);
        return take();
    }

    Raw term() {
        Token id = expect(Tok::Ident, "identifier");
        Raw r;
        r.name = id.text;
        r.sharp = id.sharp;
        r.line = id.line;
        r.col = id.col;
        if (peek().kind == Tok::LParen) {
            take();
            r.applied = true;
            r.args.push_back(term());
            while (peek().kind == Tok::Comma) {
                take();
                r.args.push_back(term());
            }
            expect(Tok::RParen, "')'");
        }
        return r;
    }

    bool at_var_decl() const {
        return peek().kind == Tok::LParen && peek(1).kind == Tok::Ident && peek(1).text == "var";
    }

    void var_decl(std::set<std::string>& decl) {
        take();
        take();
        while (peek().kind == Tok::Ident) {
            Token t = take();
            if (!t.text.empty() && t.text[0] == '_')
                throw ParseError("variable names may not start with '_'", t.line, t.col);
            decl.insert(t.text);
        }
        expect(Tok::RParen, "')' closing variable declaration");
    }

    std::vector<RawRule> rules(std::set<std::string>& decl, bool& declared) {
        std::vector<RawRule> out;
        while (peek().kind != Tok::End) {
            if (at_var_decl()) {
                declared = true;
                var_decl(decl);
                continue;
            }
            if (peek().kind == Tok::Semi) {
                take();
                continue;
            }
            RawRule rr;
            rr.line = peek().line;
            rr.col = peek().col;
            rr.lhs = term();
            expect(Tok::Arrow, "'->'");
            expect(Tok::LBrace, "'{'");
            rr.rhs.push_back(branch());
            while (peek().kind == Tok::Comma) {
                take();
                rr.rhs.push_back(branch());
            }
            expect(Tok::RBrace, "'}'");
            if (peek().kind == Tok::Caret) {
                take();
                Token f = expect(Tok::Ident, "'true' or 'false'");
                if (f.text == "true")
                    rr.flag = 1;
                else if (f.text == "false")
                    rr.flag = 0;
                else
                    throw ParseError("expected 'true' or 'false' after '^'", f.line, f.col);
            }
            if (peek().kind != Tok::End) expect(Tok::Semi, "';'");
            out.push_back(std::move(rr));
        }
        return out;
    }

    RawBranch branch() {
        RawBranch b;
        b.line = peek().line;
        b.col = peek().col;
        Token n = expect(Tok::Ident, "probability");
        b.num = n.text;
        if (peek().kind == Tok::Slash) {
            take();
            b.den = expect(Tok::Ident, "denominator").text;
        }
        expect(Tok::Colon, "':'");
        b.term = term();
        return b;
    }

    std::size_t pos_ = 0;

private:
    std::vector<Token> toks_;
};

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

void names_of(const Raw& r, std::set<std::string>& unapplied, std::set<std::string>& symbols) {
    if (r.applied || r.sharp || std::isdigit(static_cast<unsigned char>(r.name[0])))
        symbols.insert(r.name);
    else
        unapplied.insert(r.name);
    for (const auto& a : r.args) names_of(a, unapplied, symbols);
}

void count_names(const Raw& r, std::map<std::string, int>& uses) {
    ++uses[r.name];
    for (const auto& a : r.args) count_names(a, uses);
}

Term build(const Raw& r, const std::set<std::string>& symbols, bool allow_sharp) {
    if (!symbols.count(r.name)) {
        if (r.name[0] == '_') throw ParseError("variable names may not start with '_'", r.line, r.col);
        return Term::var(r.name);
    }
    if (r.sharp && !allow_sharp) throw ParseError("annotations are only allowed in ADP problems", r.line, r.col);
    std::vector<Term> args;
    for (const auto& a : r.args) args.push_back(build(a, symbols, allow_sharp));
    return Term::app(r.name, std::move(args), r.sharp);
}

Rational make_prob(const RawBranch& b) {
    if (!all_digits(b.num) || (!b.den.empty() && !all_digits(b.den)))
        throw ParseError("malformed probability", b.line, b.col);
    if (!b.den.empty() && all_digits(b.den) && mpz_class(b.den) == 0) throw ParseError("zero denominator", b.line, b.col);
    return parse_rational(b.den.empty() ? b.num : b.num + "/" + b.den);
}

}  // namespace

ParsedInput parse_input(const std::string& text) {
    Parser p(lex(text));
    std::set<std::string> decl;
    bool declared = false;
    auto raw = p.rules(decl, declared);
    if (raw.empty()) throw ParseError("no rules", 1, 1);

    bool adp_form = false;
    for (const auto& r : raw) {
        if (r.flag >= 0) adp_form = true;
    }
    for (const auto& r : raw)
        if (adp_form && r.flag < 0) throw ParseError("every rule of an ADP problem needs ^true or ^false", r.line, r.col);

    std::set<std::string> symbols;
    if (declared) {
        std::set<std::string> unapplied;
        for (const auto& r : raw) {
            names_of(r.lhs, unapplied, symbols);
            for (const auto& b : r.rhs) names_of(b.term, unapplied, symbols);
        }
        for (const auto& n : unapplied)
            if (!decl.count(n)) symbols.insert(n);
        for (const auto& n : decl) symbols.erase(n);
    } else {
        // An unapplied lhs root is a constant unless it occurs nowhere else.
        std::map<std::string, int> uses;
        for (const auto& r : raw) {
            count_names(r.lhs, uses);
            for (const auto& b : r.rhs) count_names(b.term, uses);
        }
        std::vector<std::set<std::string>> lhs_unapplied(raw.size());
        std::set<std::string> unapplied;
        for (std::size_t i = 0; i < raw.size(); ++i) {
            std::set<std::string> u;
            names_of(raw[i].lhs, u, symbols);
            if (raw[i].lhs.applied || raw[i].lhs.sharp || uses[raw[i].lhs.name] > 1) symbols.insert(raw[i].lhs.name);
            lhs_unapplied[i] = u;
            unapplied.insert(u.begin(), u.end());
        }
        for (std::size_t i = 0; i < raw.size(); ++i)
            for (const auto& b : raw[i].rhs) {
                std::set<std::string> u;
                names_of(b.term, u, symbols);
                for (const auto& n : u)
                    if (!lhs_unapplied[i].count(n)) symbols.insert(n);
                unapplied.insert(u.begin(), u.end());
            }
    }

    ParsedInput out;
    out.is_adp_problem = adp_form;
    std::vector<ProbRule> rules;
    std::vector<ADP> adps;
    for (const auto& r : raw) {
        Term lhs = build(r.lhs, symbols, adp_form);
        if (lhs.is_var())
            throw ParseError("left-hand side is a variable (a constant that occurs only here needs a (var ...) declaration)",
                             r.line, r.col);
        MultiDistribution mu;
        for (const auto& b : r.rhs) mu.push_back({make_prob(b), build(b.term, symbols, adp_form)});
        try {
            if (adp_form) {
                ADP a{lhs, mu, r.flag == 1};
                validate_adp(a);
                adps.push_back(a);
            } else {
                ProbRule pr{lhs, mu};
                validate_rule(pr);
                rules.push_back(pr);
            }
        } catch (const std::invalid_argument& e) {
            throw ParseError(e.what(), r.line, r.col);
        }
    }
    try {
        if (adp_form) {
            out.problem = make_problem(std::move(adps));
            for (const auto& a : out.problem.adps)
                for (const auto& b : a.rhs)
                    for (const auto& pos : annotated_positions(b.t))
                        if (!out.problem.signature.defined.count(subterm_at(b.t, pos).name()))
                            throw std::invalid_argument("annotated symbol " + subterm_at(b.t, pos).name() + " is not defined");
        } else {
            out.ptrs = make_ptrs(std::move(rules));
        }
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), 1, 1);
    }
    return out;
}

PTRS parse_ptrs(const std::string& text) {
    auto in = parse_input(text);
    if (in.is_adp_problem) throw ParseError("expected a PTRS, found an ADP problem", 1, 1);
    return in.ptrs;
}

ADPProblem parse_adp_problem(const std::string& text) {
    auto in = parse_input(text);
    if (!in.is_adp_problem) throw ParseError("expected an ADP problem (rules with ^true/^false)", 1, 1);
    return in.problem;
}

ParsedInput parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_input(ss.str());
}

Term parse_term(const std::string& text, const std::set<std::string>& variables) {
    Parser p(lex(text));
    Raw r = p.term();
    if (p.peek().kind != Tok::End) throw ParseError("trailing input after term", p.peek().line, p.peek().col);
    std::set<std::string> unapplied;
    std::set<std::string> symbols;
    names_of(r, unapplied, symbols);
    for (const auto& n : unapplied)
        if (!variables.count(n)) symbols.insert(n);
    return build(r, symbols, true);
}

}  // namespace adp
