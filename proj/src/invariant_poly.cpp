#include "invpde/invariant_poly.hpp"

#include <algorithm>
#include <cctype>

#include "invpde/errors.hpp"

namespace invpde {

bool InvariantPoly::is_zero() const { return terms.empty(); }

int InvariantPoly::max_symbol() const {
    int mx = 0;
    for (const auto& [e, c] : terms) mx = std::max(mx, static_cast<int>(e.size()));
    return mx;
}

int InvariantPoly::weighted_degree(const std::vector<int>& exps) {
    int d = 0;
    for (std::size_t m = 0; m < exps.size(); ++m) d += static_cast<int>(m + 1) * exps[m];
    return d;
}

bool InvariantPoly::is_weighted_homogeneous() const {
    int deg = -1;
    for (const auto& [e, c] : terms) {
        int d = weighted_degree(e);
        if (deg < 0) deg = d;
        if (d != deg) return false;
    }
    return true;
}

void InvariantPoly::add_term(std::vector<int> exps, const Rational& coeff) {
    if (coeff.is_zero()) return;
    auto it = terms.find(exps);
    if (it == terms.end()) {
        terms.emplace(std::move(exps), coeff);
    } else {
        it->second += coeff;
        if (it->second.is_zero()) terms.erase(it);
    }
}

namespace {

struct Cursor {
    const std::string& s;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= s.size();
    }
    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }
};

long parse_integer(Cursor& c) {
    c.skip_ws();
    std::size_t start = c.pos;
    while (c.pos < c.s.size() && std::isdigit(static_cast<unsigned char>(c.s[c.pos]))) ++c.pos;
    if (c.pos == start) throw ParseError("expected integer", start);
    return std::stol(c.s.substr(start, c.pos - start));
}

Rational parse_coefficient(Cursor& c) {
    long num = parse_integer(c);
    if (c.peek() == '/') {
        ++c.pos;
        std::size_t at = c.pos;
        long den = parse_integer(c);
        if (den == 0) throw ParseError("zero denominator in coefficient", at);
        return Rational(num, den);
    }
    return Rational(num);
}

}  // namespace

InvariantPoly parse_poly(const std::string& spec, InvariantPoly::Family family) {
    const char symbol_letter = family == InvariantPoly::Family::Euclidean ? 't' : 'c';
    const int min_symbol = family == InvariantPoly::Family::Euclidean ? 1 : 2;

    InvariantPoly poly;
    poly.family = family;

    Cursor c{spec};
    if (c.done()) throw ParseError("empty polynomial spec", 0);
    std::vector<std::pair<std::vector<int>, Rational>> raw_terms;
    bool first = true;
    while (!c.done()) {
        int sign = 1;
        char p = c.peek();
        if (p == '+' || p == '-') {
            sign = p == '-' ? -1 : 1;
            ++c.pos;
        } else if (!first) {
            throw ParseError("expected '+' or '-' between terms", c.pos);
        }
        first = false;

        Rational coeff(sign);
        std::vector<int> exps;
        bool saw_factor = false;
        while (true) {
            char f = c.peek();
            if (std::isdigit(static_cast<unsigned char>(f))) {
                coeff *= parse_coefficient(c);
                saw_factor = true;
            } else if (f == symbol_letter) {
                ++c.pos;
                std::size_t at = c.pos;
                long idx = parse_integer(c);
                if (idx < min_symbol)
                    throw ParseError(std::string("symbol ") + symbol_letter +
                                         std::to_string(idx) + " is not valid for this family",
                                     at);
                int exp = 1;
                if (c.peek() == '^') {
                    ++c.pos;
                    std::size_t ep = c.pos;
                    exp = static_cast<int>(parse_integer(c));
                    if (exp < 0) throw ParseError("negative exponent", ep);
                }
                if (exps.size() < static_cast<std::size_t>(idx)) exps.resize(idx, 0);
                exps[idx - 1] += exp;
                saw_factor = true;
            } else {
                throw ParseError(std::string("unexpected character '") + f + "'", c.pos);
            }
            if (c.peek() == '*') {
                ++c.pos;
                continue;
            }
            char nxt = c.peek();
            if (nxt == '+' || nxt == '-' || nxt == '\0') break;
            // Implicit product without '*' is not part of the grammar.
            throw ParseError(std::string("unexpected character '") + nxt + "'", c.pos);
        }
        if (!saw_factor) throw ParseError("empty term", c.pos);
        raw_terms.emplace_back(std::move(exps), coeff);
    }

    // Pad exponent vectors to a common length and combine.
    std::size_t width = 0;
    for (const auto& [e, cf] : raw_terms) width = std::max(width, e.size());
    for (auto& [e, cf] : raw_terms) {
        e.resize(width, 0);
        poly.add_term(e, cf);
    }

    if (family == InvariantPoly::Family::Conformal && !poly.is_weighted_homogeneous())
        throw NotHomogeneous("conformal invariant polynomial must be weighted-homogeneous");
    return poly;
}

}  // namespace invpde
