#pragma once

// The SE(n+1) case: fundamental forms of graph hypersurfaces, shape operator,
// power-trace and symmetric-function invariants, invariant PDE generation and
// the prolonged action on 2-jets by degree-2 re-graphing.

#include <vector>

#include "invpde/expr.hpp"
#include "invpde/invariant_poly.hpp"
#include "invpde/jet_point.hpp"
#include "invpde/linalg.hpp"

namespace invpde {

/// Rigid motion of R^{n+1} acting on (u, x) by p -> R p + t, with u the
/// leading coordinate. R must be special orthogonal to 1e-12.
struct EuclideanMotion {
    MatD R;                 // (n+1) x (n+1)
    std::vector<double> t;  // length n+1

    int ambient_dim() const { return R.rows; }
};

/// Throws NotRotation unless R^T R = I and det R = +1 within 1e-12.
void validate_motion(const EuclideanMotion& m);

/// m2 after m1.
EuclideanMotion compose(const EuclideanMotion& m2, const EuclideanMotion& m1);

using ExprMat = Mat<Expr>;

struct MetricData {
    ExprMat g;     // delta_ij + u_i u_j
    ExprMat ginv;  // (det(g) delta_ij - u_i u_j) / det(g)
    Expr detg;     // 1 + sum u_i^2
    ExprMat beta;  // u_ij / w
};

MetricData metric_data(int n);

/// Shape operator A = g^{-1} beta, entries normalized.
ExprMat shape_operator(int n);

/// Power traces tau_m = tr(A^m), m = 1..n, normalized.
std::vector<Expr> power_traces(int n);

/// Elementary symmetric functions from power sums via Newton's identities:
/// k sigma_k = sum_{m=1..k} (-1)^{m-1} sigma_{k-m} tau_m, sigma_0 = 1.
std::vector<Expr> newton_sigma(const std::vector<Expr>& taus, int n);
std::vector<double> newton_sigma(const std::vector<double>& taus);

/// An invariant equation with all denominators cleared: numerator is the
/// polynomial normal form whose zero set is the PDE, and cleared is the exact
/// cofactor, i.e. numerator = normalize(F(tau) * cleared). cleared is a
/// positive power product of det(g) and w, hence positive on real jets, so
/// the zero set is preserved.
struct GeneratedPde {
    Expr numerator;
    Expr cleared;
};

GeneratedPde generate_euclidean_pde(const InvariantPoly& F, int n);

/// Prolonged action on 2-jets: transforms the quadratic Taylor graph of p by
/// the motion and re-graphs the image. Throws NonAdmissible when the image
/// tangent plane is (numerically) vertical.
JetPoint2 euclidean_act(const EuclideanMotion& m, const JetPoint2& p);

/// Numeric invariants of a jet, bypassing the symbolic path: assembles g and
/// beta as floating matrices and takes traces of powers of g^{-1} beta.
std::vector<double> numeric_power_traces(const JetPoint2& p);

/// u-component of R (1, -du): its sign tells whether the motion preserves
/// the graph chart's co-orientation at p. Odd power traces satisfy
/// tau_m(m p) = s^m tau_m(p) with s this sign; they are preserved outright
/// only when s = +1.
double transported_normal_u(const EuclideanMotion& m, const JetPoint2& p);

/// Power traces evaluated through exact rational arithmetic on the jet's
/// binary values, with a single floating division by det(g)^(m/2) at the
/// end. Free of the cancellation that plagues direct evaluation on steep
/// jets; used by the verification harness.
std::vector<double> exact_power_traces(const JetPoint2& p);

}  // namespace invpde
