#include "invpde/euclidean.hpp"

#include <cmath>

#include "invpde/series.hpp"
#include "pde_common.hpp"
#include "poly.hpp"

namespace invpde {

void validate_motion(const EuclideanMotion& m) {
    const int d = m.R.rows;
    if (m.R.cols != d || static_cast<int>(m.t.size()) != d)
        throw Error("euclidean motion has inconsistent dimensions");
    MatD gram = m.R.transposed() * m.R;
    if (max_abs_diff(gram, MatD::identity(d)) > 1e-12)
        throw NotRotation("motion matrix is not orthogonal within 1e-12");
    // det via Gaussian elimination
    MatD lu = m.R;
    double det = 1.0;
    for (int c = 0; c < d; ++c) {
        int best = c;
        for (int r = c + 1; r < d; ++r)
            if (std::abs(lu(r, c)) > std::abs(lu(best, c))) best = r;
        if (best != c) {
            for (int j = 0; j < d; ++j) std::swap(lu(c, j), lu(best, j));
            det = -det;
        }
        det *= lu(c, c);
        if (lu(c, c) == 0.0) break;
        for (int r = c + 1; r < d; ++r) {
            double f = lu(r, c) / lu(c, c);
            for (int j = c; j < d; ++j) lu(r, j) -= f * lu(c, j);
        }
    }
    if (std::abs(det - 1.0) > 1e-12)
        throw NotRotation("motion matrix must have determinant +1");
}

EuclideanMotion compose(const EuclideanMotion& m2, const EuclideanMotion& m1) {
    EuclideanMotion r;
    r.R = m2.R * m1.R;
    r.t.assign(m2.t.size(), 0.0);
    for (int i = 0; i < m2.R.rows; ++i) {
        double s = m2.t[i];
        for (int j = 0; j < m2.R.cols; ++j) s += m2.R(i, j) * m1.t[j];
        r.t[i] = s;
    }
    return r;
}

namespace {

ExprMat normalized(ExprMat m, int n) {
    for (Expr& e : m.a) e = normalize(e, n);
    return m;
}

}  // namespace

MetricData metric_data(int n) {
    MetricData md;
    md.detg = normalize(detg_expr(n), n);
    md.g = ExprMat(n, n);
    md.ginv = ExprMat(n, n);
    md.beta = ExprMat(n, n);
    Expr inv_detg = pow(detg_expr(n), -1);
    Expr inv_w = pow(Expr::w(), -1);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) {
            Expr delta = Expr::integer(i == j ? 1 : 0);
            md.g(i - 1, j - 1) = normalize(delta + Expr::du(i) * Expr::du(j), n);
            md.ginv(i - 1, j - 1) = normalize(
                (detg_expr(n) * delta - Expr::du(i) * Expr::du(j)) * inv_detg, n);
            md.beta(i - 1, j - 1) = normalize(Expr::d2u(i, j) * inv_w, n);
        }
    return md;
}

ExprMat shape_operator(int n) {
    MetricData md = metric_data(n);
    return normalized(md.ginv * md.beta, n);
}

std::vector<Expr> power_traces(int n) {
    ExprMat a = shape_operator(n);
    std::vector<Expr> taus;
    ExprMat p = a;
    taus.push_back(normalize(p.trace(), n));
    for (int m = 2; m <= n; ++m) {
        p = normalized(p * a, n);
        taus.push_back(normalize(p.trace(), n));
    }
    return taus;
}

std::vector<Expr> newton_sigma(const std::vector<Expr>& taus, int n) {
    const int k_max = static_cast<int>(taus.size());
    std::vector<Expr> sigma(k_max + 1);
    sigma[0] = Expr::integer(1);
    for (int k = 1; k <= k_max; ++k) {
        std::vector<Expr> parts;
        for (int m = 1; m <= k; ++m) {
            Expr term = sigma[k - m] * taus[m - 1];
            if (m % 2 == 0) term = -term;
            parts.push_back(term);
        }
        sigma[k] = normalize(Rational(1, k) * Expr::sum(std::move(parts)), n);
    }
    return std::vector<Expr>(sigma.begin() + 1, sigma.end());
}

std::vector<double> newton_sigma(const std::vector<double>& taus) {
    const int k_max = static_cast<int>(taus.size());
    std::vector<double> sigma(k_max + 1, 0.0);
    sigma[0] = 1.0;
    for (int k = 1; k <= k_max; ++k) {
        double s = 0.0;
        for (int m = 1; m <= k; ++m) {
            double term = sigma[k - m] * taus[m - 1];
            s += (m % 2 == 0) ? -term : term;
        }
        sigma[k] = s / k;
    }
    return std::vector<double>(sigma.begin() + 1, sigma.end());
}

namespace detail {

GeneratedPde clear_pde(const RatFun& rf, int n) {
    const VarId w = VarId::w();
    Poly p0, p1;  // num = p0 + p1 w
    for (const auto& [m, c] : rf.num.terms()) {
        if (m.exponent_of(w) == 0) {
            p0.add_term(m, c);
        } else {
            Monomial rest;
            for (const auto& [v, k] : m.factors)
                if (!(v == w)) rest.factors.emplace_back(v, k);
            p1.add_term(rest, c);
        }
    }
    GeneratedPde out;
    if (p0.is_zero() && !p1.is_zero()) {
        // F = p1 w / den: the zero set is {p1 = 0} since w > 0; the exact
        // cofactor is den/w = den w / det(g).
        out.numerator = from_ratfun(RatFun{p1, Poly::one()});
        RatFun cofactor = rf_mul(RatFun{rf.den, Poly::one()},
                                 rf_inv(RatFun{Poly::var(w), Poly::one()}, n), n);
        out.cleared = from_ratfun(cofactor);
    } else {
        out.numerator = from_ratfun(RatFun{rf.num, Poly::one()});
        out.cleared = from_ratfun(RatFun{rf.den, Poly::one()});
    }
    return out;
}

RatFun invariant_poly_ratfun(const InvariantPoly& F, const std::vector<Expr>& values, int n) {
    std::vector<RatFun> value_rfs;
    value_rfs.reserve(values.size());
    for (const Expr& v : values) value_rfs.push_back(to_ratfun(v, n));
    RatFun acc{Poly::zero(), Poly::one()};
    for (const auto& [exps, coeff] : F.terms) {
        RatFun term{Poly::constant(coeff), Poly::one()};
        for (std::size_t m = 0; m < exps.size(); ++m)
            if (exps[m] > 0) term = rf_mul(term, rf_pow(value_rfs.at(m), exps[m], n), n);
        acc = rf_add(acc, term);
    }
    return acc;
}

}  // namespace detail

GeneratedPde generate_euclidean_pde(const InvariantPoly& F, int n) {
    if (F.family != InvariantPoly::Family::Euclidean)
        throw Error("generate_euclidean_pde: polynomial is not in the euclidean family");
    if (F.is_zero()) throw EmptyEquation("invariant polynomial is identically zero");
    if (F.max_symbol() > n)
        throw Error("invariant polynomial uses tau_" + std::to_string(F.max_symbol()) +
                    " but n = " + std::to_string(n));
    std::vector<Expr> taus = power_traces(n);
    detail::RatFun rf = detail::invariant_poly_ratfun(F, taus, n);
    return detail::clear_pde(rf, n);
}

JetPoint2 euclidean_act(const EuclideanMotion& m, const JetPoint2& p) {
    validate_motion(m);
    const int n = p.n;
    if (m.ambient_dim() != n + 1) throw Error("motion dimension does not match jet dimension");

    // Ambient components of the graph (u(y), x(y)) around the basepoint.
    std::vector<Taylor2D> comp(n + 1, Taylor2D(n));
    comp[0].c0 = p.u;
    comp[0].c1 = p.du;
    comp[0].c2 = p.d2u;
    for (int i = 0; i < n; ++i) {
        comp[1 + i].c0 = p.x[i];
        comp[1 + i].c1[i] = 1.0;
    }

    std::vector<Taylor2D> image(n + 1, Taylor2D(n));
    for (int r = 0; r <= n; ++r) {
        Taylor2D acc = Taylor2D::constant(n, m.t[r]);
        for (int c = 0; c <= n; ++c) acc = t2_add(acc, comp[c].scaled(m.R(r, c)));
        image[r] = acc;
    }

    // Re-graph: z = X(y) - X(0) must be invertible at the basepoint.
    Taylor2MapD z;
    std::vector<double> new_x(n);
    for (int i = 0; i < n; ++i) {
        new_x[i] = image[1 + i].c0;
        Taylor2D zi = image[1 + i];
        zi.c0 = 0.0;
        z.comp.push_back(std::move(zi));
    }
    Taylor2MapD zinv;
    try {
        zinv = t2_invert_map(z, 1e-9);
    } catch (const NotInvertible&) {
        throw NonAdmissible("image tangent plane is vertical in the (u, x) chart");
    }
    Taylor2D new_u = t2_compose(image[0], zinv);

    JetPoint2 q(n);
    q.u = new_u.c0;
    q.x = std::move(new_x);
    q.du = new_u.c1;
    q.d2u = new_u.c2;
    // Symmetrize away roundoff.
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double s = 0.5 * (q.d2(i, j) + q.d2(j, i));
            q.d2(i, j) = q.d2(j, i) = s;
        }
    return q;
}

double transported_normal_u(const EuclideanMotion& m, const JetPoint2& p) {
    double s = m.R(0, 0);
    for (int j = 0; j < p.n; ++j) s -= m.R(0, 1 + j) * p.du[j];
    return s;
}

namespace detail {

// tr((g^{-1} Hess)^m) for m = 1..n, exactly.
std::vector<Rational> rational_conjugate_traces(const JetPoint2& p, bool traceless) {
    const int n = p.n;
    auto rq = [](double x) { return Rational(mpq_class(x)); };
    Mat<Rational> g(n, n), hess(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            g(i, j) = (i == j ? Rational(1) : Rational(0)) + rq(p.du[i]) * rq(p.du[j]);
            hess(i, j) = rq(p.d2(i, j));
        }
    Mat<Rational> a = invert(g) * hess;
    if (traceless) {
        Rational mean = a.trace() / Rational(n);
        for (int i = 0; i < n; ++i) a(i, i) -= mean;
    }
    std::vector<Rational> traces;
    Mat<Rational> pw = a;
    traces.push_back(pw.trace());
    for (int m = 2; m <= n; ++m) {
        pw = pw * a;
        traces.push_back(pw.trace());
    }
    return traces;
}

}  // namespace detail

std::vector<double> exact_power_traces(const JetPoint2& p) {
    std::vector<Rational> t = detail::rational_conjugate_traces(p, false);
    double detg = 1.0;
    for (double d : p.du) detg += d * d;
    std::vector<double> out;
    for (std::size_t m = 1; m <= t.size(); ++m)
        out.push_back(t[m - 1].to_double() / std::pow(detg, 0.5 * static_cast<double>(m)));
    return out;
}

std::vector<double> numeric_power_traces(const JetPoint2& p) {
    const int n = p.n;
    double detg = 1.0;
    for (double d : p.du) detg += d * d;
    const double w = std::sqrt(detg);
    MatD g(n, n);
    MatD beta(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            g(i, j) = (i == j ? 1.0 : 0.0) + p.du[i] * p.du[j];
            beta(i, j) = p.d2(i, j) / w;
        }
    MatD a = invert(g, 1e-300) * beta;
    std::vector<double> taus;
    MatD pw = a;
    taus.push_back(pw.trace());
    for (int m = 2; m <= n; ++m) {
        pw = pw * a;
        taus.push_back(pw.trace());
    }
    return taus;
}

}  // namespace invpde
