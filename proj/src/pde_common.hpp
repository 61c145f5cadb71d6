#pragma once

// Shared internals of the two PDE generators.

#include <vector>

#include "invpde/euclidean.hpp"
#include "invpde/invariant_poly.hpp"
#include "poly.hpp"

namespace invpde::detail {

// Splits the canonical form of F into numerator and exact cofactor, pulling a
// pure w factor out of the numerator when the w-parity is odd.
GeneratedPde clear_pde(const RatFun& rf, int n);

// F evaluated on the given invariant expressions, as a canonical RatFun.
RatFun invariant_poly_ratfun(const InvariantPoly& F, const std::vector<Expr>& values, int n);

// tr((g^{-1} Hess)^m), optionally of the traceless part, exactly in rational
// arithmetic on the jet's binary values.
std::vector<Rational> rational_conjugate_traces(const JetPoint2& p, bool traceless);

}  // namespace invpde::detail
