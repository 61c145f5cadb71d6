#pragma once

// The SO(1, n+2) case: Minkowski light-cone model of the conformal sphere,
// graded group elements, the action on 2-jets by re-graphing in standard
// coordinates, the conformal (traceless) shape operator and its relative
// invariants, and conformal PDE generation.

#include <string>
#include <utility>
#include <vector>

#include "invpde/euclidean.hpp"
#include "invpde/expr.hpp"
#include "invpde/invariant_poly.hpp"
#include "invpde/jet_point.hpp"
#include "invpde/linalg.hpp"

namespace invpde {

/// Vector of R^{1,n+2} in the ordered basis (p, e_0, e_1..e_n, q), with p, q
/// isotropic, <p,q> = 1 and the e_alpha orthonormal.
struct MinkowskiVector {
    int n = 0;
    std::vector<double> v;  // length n+3

    MinkowskiVector() = default;
    explicit MinkowskiVector(int dim) : n(dim), v(dim + 3, 0.0) {}
};

/// The Minkowski form eta in the (p, e_0..e_n, q) basis.
MatD minkowski_metric(int n);

double minkowski_inner(const MinkowskiVector& a, const MinkowskiVector& b);

/// Lift of a chart point to the light cone:
/// w = p + u e_0 + x + s(u,x) q with s = -(u^2 + |x|^2)/2; <w,w> = 0.
MinkowskiVector embed(double u, const std::vector<double>& x);

/// Chart coordinates of a null vector with nonzero p-component. Throws
/// ChartBoundary when the p-component vanishes and NotOnCone for non-null v.
std::pair<double, std::vector<double>> project(const MinkowskiVector& v);

/// Element of the Moebius group as a matrix preserving eta.
struct MoebiusElement {
    int n = 0;
    MatD M;  // (n+3) x (n+3)
};

/// Generators of the graded decomposition: unipotent translations g_minus and
/// g_plus with parameter xi in E = <e_0..e_n>, rotations of E, dilations from
/// the grading element, and the distinguished one-parameter subgroup
/// a_e0(t) = exp t(e_0 ^ p).
template <class K>
struct GradedGen {
    enum class Tag { GMinus, Rotation, Dilation, GPlus, AE0 };

    Tag tag = Tag::AE0;
    std::vector<K> xi;  // GMinus / GPlus, length n+1
    Mat<K> B;           // Rotation, (n+1) x (n+1)
    K a{1};             // Dilation
    K t{};              // AE0

    static GradedGen g_minus(std::vector<K> xi_) {
        GradedGen g;
        g.tag = Tag::GMinus;
        g.xi = std::move(xi_);
        return g;
    }
    static GradedGen rotation(Mat<K> b) {
        GradedGen g;
        g.tag = Tag::Rotation;
        g.B = std::move(b);
        return g;
    }
    static GradedGen dilation(K a_) {
        GradedGen g;
        g.tag = Tag::Dilation;
        g.a = std::move(a_);
        return g;
    }
    static GradedGen g_plus(std::vector<K> xi_) {
        GradedGen g;
        g.tag = Tag::GPlus;
        g.xi = std::move(xi_);
        return g;
    }
    static GradedGen a_e0(K t_) {
        GradedGen g;
        g.tag = Tag::AE0;
        g.t = std::move(t_);
        return g;
    }
};

using GradedGenerator = GradedGen<double>;
using GradedGeneratorQ = GradedGen<Rational>;

/// The (n+3)x(n+3) matrix of a generator; exact when K is Rational. Throws
/// NotRotation for a non-special-orthogonal rotation block and Error for a
/// non-positive dilation parameter.
template <class K>
Mat<K> build_element_matrix(const GradedGen<K>& gen, int n);

/// Double-precision element with the eta-preservation invariant validated.
MoebiusElement build_element(const GradedGenerator& gen, int n);

MoebiusElement moebius_mul(const MoebiusElement& a, const MoebiusElement& b);
MoebiusElement moebius_identity(int n);

/// Validates M^T eta M = eta within 1e-12 and wraps the matrix.
MoebiusElement moebius_from_matrix(const MatD& m, int n);

/// Action on 2-jets: lifts the quadratic graph of p to the cone, applies M
/// linearly, renormalizes by the p-component, re-graphs. Throws ChartBoundary
/// when the image leaves the affine chart and NonAdmissible when the image
/// tangent is vertical.
JetPoint2 moebius_act(const MoebiusElement& m, const JetPoint2& p);

/// Traceless part A - (tr A / n) Id of the shape operator, normalized.
ExprMat conformal_shape(int n);

/// Relative invariants tau_deg_h = tr(A_0^h) for h = 2..n. Throws
/// NoInvariants for n = 1.
std::vector<Expr> conformal_traces(int n);

/// Same numeric shortcut as numeric_power_traces, for the traceless operator.
std::vector<double> numeric_conformal_traces(const JetPoint2& p);

/// Cancellation-free evaluation of the traceless traces, exact rational up to
/// one floating division; used by the verification harness.
std::vector<double> exact_conformal_traces(const JetPoint2& p);

GeneratedPde generate_conformal_pde(const InvariantPoly& F, int n);

// JSON interfaces.
// MinkowskiVector: {"basis":"p,e0,...,en,q","v":[..]}.
std::string minkowski_to_json(const MinkowskiVector& v);
MinkowskiVector minkowski_from_json(const std::string& text);

// Moebius elements ingest either {"n":..,"matrix":[[..]]} (validated against
// eta) or {"n":..,"word":[{"gen":"g_minus","xi":[..]}, {"gen":"rotation",
// "B":[[..]]}, {"gen":"dilation","a":..}, {"gen":"g_plus","xi":[..]},
// {"gen":"a_e0","t":..}]}, applied left to right as a product.
MoebiusElement moebius_from_json(const std::string& text);

}  // namespace invpde
