#pragma once

#include <map>
#include <string>
#include <vector>

#include "invpde/rational.hpp"

namespace invpde {

/// Polynomial in abstract invariant symbols: tau_1..tau_n for the Euclidean
/// family (symbols t1..tn), tau_deg2..tau_deg_n traceless traces for the
/// conformal family (symbols c2..cn). deg(tau_m) = m; the conformal family
/// must be weighted-homogeneous.
struct InvariantPoly {
    enum class Family { Euclidean, Conformal };

    Family family = Family::Euclidean;
    // Exponent vector indexed by symbol number - 1 -> coefficient. All keys
    // have equal length max_symbol().
    std::map<std::vector<int>, Rational> terms;

    bool is_zero() const;
    int max_symbol() const;

    /// Weighted degree sum_m m*e_m of one term.
    static int weighted_degree(const std::vector<int>& exps);

    /// True when every term has the same weighted degree (vacuously true for
    /// the zero polynomial).
    bool is_weighted_homogeneous() const;

    void add_term(std::vector<int> exps, const Rational& coeff);
};

/// Parses "1/2*t1^2 - 1/2*t2" style specs. Symbols are t1..tn (euclidean) or
/// c2..cn (conformal); terms are rational coefficients times products of
/// symbol powers. Throws ParseError with the offending position, and
/// NotHomogeneous for a conformal spec with mixed weights.
InvariantPoly parse_poly(const std::string& spec, InvariantPoly::Family family);

}  // namespace invpde
