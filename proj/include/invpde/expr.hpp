#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "invpde/jet_point.hpp"
#include "invpde/rational.hpp"

namespace invpde {

/// Identifier of a jet-chart coordinate or the adjoined radical w with
/// w^2 = det(g) = 1 + sum_i u_i^2.
///
/// Kinds, in canonical order: u, x^i, u_i, u_ij (i <= j), w.
/// Indices are 1-based; unused index slots are zero.
struct VarId {
    enum class Kind : std::uint8_t { U = 0, X = 1, Du = 2, D2u = 3, W = 4 };

    Kind kind = Kind::U;
    std::uint8_t i = 0;
    std::uint8_t j = 0;

    static VarId u() { return {Kind::U, 0, 0}; }
    static VarId x(int i) { return {Kind::X, static_cast<std::uint8_t>(i), 0}; }
    static VarId du(int i) { return {Kind::Du, static_cast<std::uint8_t>(i), 0}; }
    // Stored with i <= j (u_ij = u_ji).
    static VarId d2u(int i, int j) {
        if (i > j) std::swap(i, j);
        return {Kind::D2u, static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(j)};
    }
    static VarId w() { return {Kind::W, 0, 0}; }

    int max_index() const { return j > i ? j : i; }

    friend bool operator==(const VarId& a, const VarId& b) {
        return a.kind == b.kind && a.i == b.i && a.j == b.j;
    }
    friend bool operator!=(const VarId& a, const VarId& b) { return !(a == b); }
    friend bool operator<(const VarId& a, const VarId& b) {
        if (a.kind != b.kind) return a.kind < b.kind;
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    }
};

enum class EmitFormat { Text, Latex, Json };

/// Immutable expression tree over the jet coordinates with exact rational
/// coefficients. Nodes are shared; copies are cheap. All simplification is
/// deferred to normalize(), which rewrites an expression into its canonical
/// rational-function form in the quotient ring Q(jet vars)[w]/(w^2 - det g).
class Expr {
public:
    enum class Kind { Constant, Variable, Sum, Product, Power };

    Expr() : Expr(constant(Rational(0))) {}

    static Expr constant(const Rational& c);
    static Expr integer(long k) { return constant(Rational(k)); }
    static Expr variable(VarId v);

    // Convenience variable builders.
    static Expr u() { return variable(VarId::u()); }
    static Expr x(int i) { return variable(VarId::x(i)); }
    static Expr du(int i) { return variable(VarId::du(i)); }
    static Expr d2u(int i, int j) { return variable(VarId::d2u(i, j)); }
    static Expr w() { return variable(VarId::w()); }

    static Expr sum(std::vector<Expr> args);
    static Expr product(std::vector<Expr> args);
    static Expr power(Expr base, int exponent);

    Kind kind() const;
    const Rational& constant_value() const;  // Constant only
    VarId var() const;                       // Variable only
    const std::vector<Expr>& args() const;   // Sum/Product only
    const Expr& base() const;                // Power only
    int exponent() const;                    // Power only

    /// Structural (syntactic) equality of trees.
    friend bool operator==(const Expr& a, const Expr& b) { return structurally_equal(a, b); }
    friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

    static bool structurally_equal(const Expr& a, const Expr& b);

private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

// Operator sugar for building trees.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator*(const Rational& c, const Expr& e);
Expr pow(const Expr& base, int exponent);

/// Canonical normal form for dimension n: a reduced numerator/denominator pair
/// of polynomials with w-degree <= 1 in the numerator, a w-free monic
/// denominator (graded-lex leading coefficient 1), rebuilt as a deterministic
/// tree. Idempotent; two expressions are equal iff their normal forms are
/// structurally identical.
Expr normalize(const Expr& e, int n);

/// True iff a and b have identical normal forms in dimension n.
bool nf_equal(const Expr& a, const Expr& b, int n);

/// True iff e normalizes to the zero expression.
bool nf_is_zero(const Expr& e, int n);

/// Simultaneous substitution followed by normalize. Unbound variables pass
/// through untouched.
Expr substitute(const Expr& e, const std::map<VarId, Expr>& bindings, int n);

/// Floating evaluation of e at a jet point; w evaluates to +sqrt(det g(p)).
double eval_numeric(const Expr& e, const JetPoint2& p);

std::string emit(const Expr& e, EmitFormat format);

/// Parses the JSON expression schema emitted by emit(e, Json).
Expr parse_expr_json(const std::string& json_text);

/// det(g) = 1 + sum_{i=1}^n u_i^2 as an expression.
Expr detg_expr(int n);

}  // namespace invpde
