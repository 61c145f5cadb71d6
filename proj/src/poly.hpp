#pragma once

// Internal multivariate polynomial / rational-function engine behind Expr.
// Not installed; the public surface is invpde/expr.hpp.

#include <map>
#include <optional>
#include <vector>

#include "invpde/expr.hpp"
#include "invpde/rational.hpp"

namespace invpde::detail {

// Power product over VarIds, factors sorted by VarId, exponents > 0.
struct Monomial {
    std::vector<std::pair<VarId, int>> factors;

    int degree() const {
        int d = 0;
        for (const auto& [v, e] : factors) d += e;
        return d;
    }
    bool empty() const { return factors.empty(); }
    int exponent_of(VarId v) const {
        for (const auto& [var, e] : factors)
            if (var == v) return e;
        return 0;
    }

    friend bool operator==(const Monomial& a, const Monomial& b) { return a.factors == b.factors; }
    friend bool operator!=(const Monomial& a, const Monomial& b) { return !(a == b); }
};

Monomial mono_mul(const Monomial& a, const Monomial& b);
// Divides a by b; nullopt when some exponent of b exceeds a's.
std::optional<Monomial> mono_div(const Monomial& a, const Monomial& b);

// Graded lexicographic order: total degree first, ties broken by the first
// variable (in VarId order, u most significant) with differing exponent,
// larger exponent meaning larger monomial.
bool mono_less(const Monomial& a, const Monomial& b);

struct MonoLess {
    bool operator()(const Monomial& a, const Monomial& b) const { return mono_less(a, b); }
};

class Poly {
public:
    using TermMap = std::map<Monomial, Rational, MonoLess>;

    Poly() = default;

    static Poly zero() { return Poly(); }
    static Poly constant(const Rational& c);
    static Poly one() { return constant(Rational(1)); }
    static Poly var(VarId v);

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
    }
    Rational constant_value() const;  // requires is_constant()

    const TermMap& terms() const { return terms_; }
    std::size_t term_count() const { return terms_.size(); }

    // Largest term in graded-lex order.
    const Monomial& leading_monomial() const { return std::prev(terms_.end())->first; }
    const Rational& leading_coefficient() const { return std::prev(terms_.end())->second; }

    void add_term(const Monomial& m, const Rational& c);

    Poly operator-() const;
    friend Poly operator+(const Poly& a, const Poly& b);
    friend Poly operator-(const Poly& a, const Poly& b);
    friend Poly operator*(const Poly& a, const Poly& b);
    Poly scaled(const Rational& c) const;
    Poly mul_monomial(const Monomial& m, const Rational& c) const;
    Poly pow(int e) const;  // e >= 0

    friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    int degree_in(VarId v) const;
    std::vector<VarId> variables() const;

private:
    TermMap terms_;
};

// p/q with all rational coefficients made integer and coprime and the leading
// coefficient positive. Canonical up to nothing further; deterministic.
Poly scalar_primitive(const Poly& p);

// Quotient when d divides p exactly; nullopt otherwise.
std::optional<Poly> try_exact_div(const Poly& p, const Poly& d);
Poly exact_div(const Poly& p, const Poly& d);

// Multivariate gcd over Q (primitive, positive leading coefficient).
// gcd(0, p) = scalar_primitive(p); gcd of nonzero constants is 1.
Poly poly_gcd(const Poly& a, const Poly& b);

// Exact square root of a polynomial, when one exists (the root with positive
// leading coefficient).
std::optional<Poly> poly_sqrt(const Poly& p);

// det(g) = 1 + sum du_i^2 as a polynomial.
Poly detg_poly(int n);

// Rewrites w^k with k >= 2 into det(g)^(k/2) * w^(k mod 2).
Poly reduce_w(const Poly& p, int n);

// Reduced rational function: num has w-degree <= 1, den is w-free, monic in
// graded-lex order, gcd(num, den) = 1.
struct RatFun {
    Poly num;
    Poly den = Poly::one();

    bool is_zero() const { return num.is_zero(); }
};

RatFun rf_make(Poly num, Poly den);  // reduces and normalizes
RatFun rf_add(const RatFun& a, const RatFun& b);
RatFun rf_neg(const RatFun& a);
RatFun rf_mul(const RatFun& a, const RatFun& b, int n);
RatFun rf_inv(const RatFun& a, int n);
RatFun rf_pow(const RatFun& a, int e, int n);

bool rf_equal(const RatFun& a, const RatFun& b);

// Exact square root of a reduced rational function, when one exists.
std::optional<RatFun> ratfun_sqrt(const RatFun& rf);

// Bridges between trees and rational functions.
RatFun to_ratfun(const Expr& e, int n);
Expr from_ratfun(const RatFun& rf);
Expr poly_to_expr(const Poly& p);

}  // namespace invpde::detail
