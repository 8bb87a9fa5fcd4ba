#pragma once

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spi/ints.hpp"

namespace spi {

// One term of a sparse polynomial: nonzero coefficient times a monomial.
struct Term {
    std::vector<Int> exponent;
    Int coeff;
};

inline bool lex_less(const std::vector<Int>& a, const std::vector<Int>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Exact multivariate integer polynomial, stored as its nonzero terms in
// strictly increasing lexicographic exponent order.
class SparsePoly {
  public:
    explicit SparsePoly(size_t nvars) : nvars_(nvars) {}

    // Normalizes: sorts, merges duplicate exponents, drops zero coefficients.
    SparsePoly(size_t nvars, std::vector<Term> terms) : nvars_(nvars) {
        for (auto& t : terms) {
            if (t.exponent.size() != nvars)
                throw std::invalid_argument("SparsePoly: exponent arity mismatch");
            for (auto& e : t.exponent)
                if (e < 0) throw std::invalid_argument("SparsePoly: negative exponent");
        }
        std::sort(terms.begin(), terms.end(),
                  [](const Term& a, const Term& b) { return lex_less(a.exponent, b.exponent); });
        for (auto& t : terms) {
            if (!terms_.empty() && terms_.back().exponent == t.exponent)
                terms_.back().coeff += t.coeff;
            else
                terms_.push_back(std::move(t));
            if (!terms_.empty() && terms_.back().coeff == 0) terms_.pop_back();
        }
    }

    size_t nvars() const { return nvars_; }
    size_t term_count() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }
    const std::vector<Term>& terms() const { return terms_; }

    bool operator==(const SparsePoly& o) const {
        if (nvars_ != o.nvars_ || terms_.size() != o.terms_.size()) return false;
        for (size_t i = 0; i < terms_.size(); ++i)
            if (terms_[i].coeff != o.terms_[i].coeff ||
                terms_[i].exponent != o.terms_[i].exponent)
                return false;
        return true;
    }
    bool operator!=(const SparsePoly& o) const { return !(*this == o); }

    // Reference evaluation: binary powering per variable, one reduction per step.
    Int eval_mod(const std::vector<Int>& point, const Int& m) const {
        if (point.size() != nvars_)
            throw std::invalid_argument("SparsePoly::eval_mod: point arity mismatch");
        if (m < 2) throw std::invalid_argument("SparsePoly::eval_mod: modulus < 2");
        Int acc = 0;
        for (const auto& t : terms_) {
            Int v = floor_mod(t.coeff, m);
            for (size_t i = 0; i < nvars_; ++i)
                if (t.exponent[i] != 0)
                    v = v * mod_pow_int(point[i], t.exponent[i], m) % m;
            acc = (acc + v) % m;
        }
        return acc;
    }

    SparsePoly add(const SparsePoly& o) const { return combine(o, 1); }
    SparsePoly subtract(const SparsePoly& o) const { return combine(o, -1); }

    SparsePoly negate() const {
        SparsePoly r(nvars_);
        r.terms_ = terms_;
        for (auto& t : r.terms_) t.coeff = -t.coeff;
        return r;
    }

    // Total representation size: per term, coefficient bits plus the sum of
    // per-variable exponent bits.
    u64 bit_size_total() const {
        u64 s = 0;
        for (const auto& t : terms_) {
            s += bit_size(t.coeff);
            for (const auto& e : t.exponent) s += bit_size(e);
        }
        return s;
    }

  private:
    static Int mod_pow_int(const Int& base, const Int& exp, const Int& m) {
        Int r;
        mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), m.get_mpz_t());
        return r;
    }

    SparsePoly combine(const SparsePoly& o, int sign) const {
        if (nvars_ != o.nvars_)
            throw std::invalid_argument("SparsePoly: arity mismatch");
        SparsePoly r(nvars_);
        size_t i = 0, j = 0;
        while (i < terms_.size() || j < o.terms_.size()) {
            int which;
            if (i == terms_.size())
                which = 1;
            else if (j == o.terms_.size())
                which = -1;
            else if (terms_[i].exponent == o.terms_[j].exponent)
                which = 0;
            else
                which = lex_less(terms_[i].exponent, o.terms_[j].exponent) ? -1 : 1;
            if (which == -1) {
                r.terms_.push_back(terms_[i++]);
            } else if (which == 1) {
                Term t = o.terms_[j++];
                t.coeff *= sign;
                r.terms_.push_back(std::move(t));
            } else {
                Int c = terms_[i].coeff + sign * o.terms_[j].coeff;
                if (c != 0) r.terms_.push_back(Term{terms_[i].exponent, c});
                ++i, ++j;
            }
        }
        return r;
    }

    size_t nvars_;
    std::vector<Term> terms_;
};

// Element of Z[t] / (t^r - 1), stored sparsely. Entries hold exact integers
// or residues, depending on what produced them; zero entries are dropped.
struct CyclicPoly {
    u64 r = 0;
    std::map<u64, Int> entries;

    bool operator==(const CyclicPoly& o) const { return r == o.r && entries == o.entries; }
};

// Brute-force cyclic projection: substitute x_i -> t^{tau_i} and reduce the
// exponents mod r (and coefficients mod M when given). This is the oracle
// the evaluation-based projector is checked against.
inline CyclicPoly project_direct(const SparsePoly& f, const std::vector<u64>& tau, u64 r,
                                 const Int* M = nullptr) {
    if (r < 2) throw std::invalid_argument("project_direct: r < 2");
    if (tau.size() != f.nvars())
        throw std::invalid_argument("project_direct: tau arity mismatch");
    for (u64 t : tau)
        if (t == 0 || t >= r) throw std::invalid_argument("project_direct: tau out of range");
    CyclicPoly out;
    out.r = r;
    for (const auto& term : f.terms()) {
        Int dot = 0;
        for (size_t i = 0; i < tau.size(); ++i)
            dot += int_from_u64(tau[i]) * term.exponent[i];
        u64 k = u64_from_int(floor_mod(dot, int_from_u64(r)));
        out.entries[k] += term.coeff;
    }
    for (auto it = out.entries.begin(); it != out.entries.end();) {
        if (M) it->second = floor_mod(it->second, *M);
        if (it->second == 0)
            it = out.entries.erase(it);
        else
            ++it;
    }
    return out;
}

// --- text format ---------------------------------------------------------
// nvars <n>
// <signed coeff> : <e0> <e1> ... <e{n-1}>
// '#' starts a comment; blank lines ignored.

inline std::string serialize(const SparsePoly& f) {
    std::ostringstream os;
    os << "nvars " << f.nvars() << "\n";
    for (const auto& t : f.terms()) {
        os << t.coeff << " :";
        for (const auto& e : t.exponent) os << " " << e;
        os << "\n";
    }
    return os.str();
}

struct parse_error : std::runtime_error {
    explicit parse_error(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_no(line) {}
    int line_no;
};

namespace detail {

inline std::string strip_comment(const std::string& line) {
    auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

inline bool parse_int_token(const std::string& tok, Int& out) {
    if (tok.empty()) return false;
    size_t start = (tok[0] == '-' || tok[0] == '+') ? 1 : 0;
    if (start == tok.size()) return false;
    for (size_t i = start; i < tok.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(tok[i]))) return false;
    out = Int(tok.c_str());
    return true;
}

}  // namespace detail

inline SparsePoly parse_poly(std::istream& in) {
    std::string line;
    int line_no = 0;
    long nvars = -1;
    std::vector<Term> terms;
    std::map<std::vector<Int>, int> seen;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(detail::strip_comment(line));
        std::vector<std::string> toks;
        for (std::string t; ls >> t;) toks.push_back(t);
        if (toks.empty()) continue;
        if (nvars < 0) {
            if (toks.size() != 2 || toks[0] != "nvars")
                throw parse_error(line_no, "expected 'nvars <n>'");
            try {
                nvars = std::stol(toks[1]);
            } catch (...) {
                throw parse_error(line_no, "bad variable count");
            }
            if (nvars < 0) throw parse_error(line_no, "bad variable count");
            continue;
        }
        if (toks.size() != static_cast<size_t>(nvars) + 2 || toks[1] != ":")
            throw parse_error(line_no, "expected '<coeff> : <e0> ... <e" +
                                           std::to_string(nvars - 1) + ">'");
        Term term;
        if (!detail::parse_int_token(toks[0], term.coeff))
            throw parse_error(line_no, "bad coefficient");
        if (term.coeff == 0) throw parse_error(line_no, "zero coefficient");
        for (long i = 0; i < nvars; ++i) {
            Int e;
            if (!detail::parse_int_token(toks[2 + i], e) || e < 0)
                throw parse_error(line_no, "bad exponent");
            term.exponent.push_back(std::move(e));
        }
        if (!seen.emplace(term.exponent, line_no).second)
            throw parse_error(line_no, "duplicate exponent vector");
        terms.push_back(std::move(term));
    }
    if (nvars < 0) throw parse_error(line_no, "missing 'nvars' header");
    return SparsePoly(static_cast<size_t>(nvars), std::move(terms));
}

inline SparsePoly parse_poly(const std::string& text) {
    std::istringstream is(text);
    return parse_poly(is);
}

}  // namespace spi
