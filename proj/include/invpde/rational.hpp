#pragma once

#include <gmpxx.h>

#include <string>

#include "invpde/errors.hpp"

namespace invpde {

/// Arbitrary-precision rational number, always reduced to lowest terms with a
/// positive denominator. Thin value wrapper around GMP's mpq_class.
class Rational {
public:
    Rational() : q_(0) {}
    Rational(int n) : q_(n) {}               // NOLINT(google-explicit-constructor)
    Rational(long n) : q_(static_cast<long>(n)) {}  // NOLINT
    Rational(long num, long den) {
        if (den == 0) throw ZeroDenominator("rational with zero denominator");
        q_ = mpq_class(num, den);
        q_.canonicalize();
    }
    explicit Rational(const mpq_class& q) : q_(q) { q_.canonicalize(); }

    // Accepts "p", "-p", "p/q" in base 10.
    static Rational from_string(const std::string& s) {
        mpq_class q;
        if (q.set_str(s, 10) != 0)
            throw ParseError("invalid rational literal: " + s, 0);
        if (q.get_den() == 0) throw ZeroDenominator("rational with zero denominator: " + s);
        q.canonicalize();
        return Rational(q);
    }

    mpz_class numerator() const { return q_.get_num(); }
    mpz_class denominator() const { return q_.get_den(); }

    bool is_zero() const { return sgn(q_) == 0; }
    bool is_one() const { return q_ == 1; }
    int sign() const { return sgn(q_); }

    double to_double() const { return q_.get_d(); }

    std::string str() const {
        if (q_.get_den() == 1) return q_.get_num().get_str();
        return q_.get_num().get_str() + "/" + q_.get_den().get_str();
    }

    Rational operator-() const { return Rational(mpq_class(-q_)); }
    Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
    Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
    Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero()) throw ZeroDenominator("division by zero rational");
        q_ /= o.q_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.q_ == b.q_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.q_ != b.q_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.q_ < b.q_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.q_ <= b.q_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.q_ > b.q_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.q_ >= b.q_; }

    Rational pow(int e) const {
        if (e == 0) return Rational(1);
        if (is_zero()) {
            if (e < 0) throw ZeroDenominator("0 raised to a negative power");
            return Rational(0);
        }
        mpq_class base = e > 0 ? q_ : mpq_class(1) / q_;
        unsigned long k = static_cast<unsigned long>(e > 0 ? e : -static_cast<long>(e));
        mpq_class r;
        mpz_pow_ui(r.get_num_mpz_t(), base.get_num_mpz_t(), k);
        mpz_pow_ui(r.get_den_mpz_t(), base.get_den_mpz_t(), k);
        r.canonicalize();
        return Rational(r);
    }

    Rational abs() const { return sign() < 0 ? -*this : *this; }

    const mpq_class& raw() const { return q_; }

private:
    mpq_class q_;
};

}  // namespace invpde
