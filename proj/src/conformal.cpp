#include "invpde/conformal.hpp"

#include <cmath>

#include "invpde/series.hpp"
#include "json.hpp"
#include "pde_common.hpp"

namespace invpde {

MatD minkowski_metric(int n) {
    MatD eta(n + 3, n + 3);
    eta(0, n + 2) = eta(n + 2, 0) = 1.0;
    for (int a = 1; a <= n + 1; ++a) eta(a, a) = 1.0;
    return eta;
}

double minkowski_inner(const MinkowskiVector& a, const MinkowskiVector& b) {
    const int n = a.n;
    double s = a.v[0] * b.v[n + 2] + a.v[n + 2] * b.v[0];
    for (int k = 1; k <= n + 1; ++k) s += a.v[k] * b.v[k];
    return s;
}

MinkowskiVector embed(double u, const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    MinkowskiVector w(n);
    w.v[0] = 1.0;
    w.v[1] = u;
    double norm2 = u * u;
    for (int i = 0; i < n; ++i) {
        w.v[2 + i] = x[i];
        norm2 += x[i] * x[i];
    }
    w.v[n + 2] = -0.5 * norm2;
    return w;
}

std::pair<double, std::vector<double>> project(const MinkowskiVector& v) {
    const int n = v.n;
    double scale = 0.0;
    for (double c : v.v) scale = std::max(scale, std::abs(c));
    if (std::abs(minkowski_inner(v, v)) > 1e-9 * std::max(1.0, scale * scale))
        throw NotOnCone("vector is not on the light cone");
    if (std::abs(v.v[0]) <= 1e-12 * std::max(1.0, scale))
        throw ChartBoundary("vector has vanishing p-component");
    double u = v.v[1] / v.v[0];
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = v.v[2 + i] / v.v[0];
    return {u, x};
}

namespace {

template <class K>
K norm_squared(const std::vector<K>& xi) {
    K s{};
    for (const K& c : xi) s = s + c * c;
    return s;
}

template <class K>
K det_exact(Mat<K> m) {
    const int d = m.rows;
    K det{1};
    for (int c = 0; c < d; ++c) {
        int piv = -1;
        for (int r = c; r < d; ++r)
            if (pivot_size(m(r, c)) > 0.0) {
                piv = r;
                break;
            }
        if (piv < 0) return K{};
        if (piv != c) {
            for (int j = 0; j < d; ++j) std::swap(m(c, j), m(piv, j));
            det = K{} - det;
        }
        det = det * m(c, c);
        for (int r = c + 1; r < d; ++r) {
            K f = m(r, c) / m(c, c);
            for (int j = c; j < d; ++j) m(r, j) = m(r, j) - f * m(c, j);
        }
    }
    return det;
}

inline bool is_one_approx(double x) { return std::abs(x - 1.0) <= 1e-12; }
inline bool is_one_approx(const Rational& x) { return x.is_one(); }

template <class K>
void check_rotation_block(const Mat<K>& b) {
    const int d = b.rows;
    if (b.cols != d) throw NotRotation("rotation block is not square");
    Mat<K> gram = b.transposed() * b;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            K expected = i == j ? K{1} : K{};
            K diff = gram(i, j) - expected;
            if constexpr (std::is_same_v<K, double>) {
                if (std::abs(diff) > 1e-12) throw NotRotation("block is not orthogonal");
            } else {
                if (!(pivot_size(diff) == 0.0)) throw NotRotation("block is not orthogonal");
            }
        }
    if (!is_one_approx(det_exact(b))) throw NotRotation("rotation block must have det +1");
}

}  // namespace

template <class K>
Mat<K> build_element_matrix(const GradedGen<K>& gen, int n) {
    using Tag = typename GradedGen<K>::Tag;
    const int d = n + 3;
    Mat<K> m = Mat<K>::identity(d);
    switch (gen.tag) {
        case Tag::GMinus: {
            if (static_cast<int>(gen.xi.size()) != n + 1)
                throw Error("g_minus parameter must lie in E = R^{n+1}");
            // p -> p - xi - 1/2 |xi|^2 q ; eta in E -> eta + <xi,eta> q ; q -> q.
            const K half = K{1} / (K{1} + K{1});
            for (int a = 0; a <= n; ++a) {
                m(1 + a, 0) = K{} - gen.xi[a];
                m(d - 1, 1 + a) = gen.xi[a];
            }
            m(d - 1, 0) = K{} - half * norm_squared(gen.xi);
            break;
        }
        case Tag::GPlus: {
            if (static_cast<int>(gen.xi.size()) != n + 1)
                throw Error("g_plus parameter must lie in E = R^{n+1}");
            // p -> p ; eta in E -> <xi,eta> p + eta ; q -> -1/2|xi|^2 p - xi + q.
            const K half = K{1} / (K{1} + K{1});
            for (int a = 0; a <= n; ++a) {
                m(0, 1 + a) = gen.xi[a];
                m(1 + a, d - 1) = K{} - gen.xi[a];
            }
            m(0, d - 1) = K{} - half * norm_squared(gen.xi);
            break;
        }
        case Tag::Rotation: {
            check_rotation_block(gen.B);
            if (gen.B.rows != n + 1) throw NotRotation("rotation block must act on E = R^{n+1}");
            for (int a = 0; a <= n; ++a)
                for (int b = 0; b <= n; ++b) m(1 + a, 1 + b) = gen.B(a, b);
            break;
        }
        case Tag::Dilation: {
            bool positive;
            if constexpr (std::is_same_v<K, double>)
                positive = gen.a > 0.0;
            else
                positive = gen.a.sign() > 0;
            if (!positive) throw Error("dilation parameter must be positive");
            m(0, 0) = gen.a;
            m(d - 1, d - 1) = K{1} / gen.a;
            break;
        }
        case Tag::AE0: {
            // exp t(e_0 ^ p) = id + t e_0^p + 1/2 t^2 (e_0^p)^2:
            // p -> p, e_0 -> e_0 - t p, e_i -> e_i, q -> q + t e_0 - 1/2 t^2 p.
            const K half = K{1} / (K{1} + K{1});
            m(0, 1) = K{} - gen.t;
            m(1, d - 1) = gen.t;
            m(0, d - 1) = K{} - half * gen.t * gen.t;
            break;
        }
    }
    return m;
}

template Mat<double> build_element_matrix(const GradedGen<double>&, int);
template Mat<Rational> build_element_matrix(const GradedGen<Rational>&, int);

namespace {

void check_eta(const MatD& m, int n) {
    MatD eta = minkowski_metric(n);
    MatD g = m.transposed() * eta * m;
    if (max_abs_diff(g, eta) > 1e-12)
        throw NotRotation("matrix does not preserve the Minkowski form within 1e-12");
}

}  // namespace

MoebiusElement build_element(const GradedGenerator& gen, int n) {
    MoebiusElement e;
    e.n = n;
    e.M = build_element_matrix(gen, n);
    check_eta(e.M, n);
    return e;
}

MoebiusElement moebius_mul(const MoebiusElement& a, const MoebiusElement& b) {
    MoebiusElement r;
    r.n = a.n;
    r.M = a.M * b.M;
    return r;
}

MoebiusElement moebius_identity(int n) { return MoebiusElement{n, MatD::identity(n + 3)}; }

MoebiusElement moebius_from_matrix(const MatD& m, int n) {
    if (m.rows != n + 3 || m.cols != n + 3)
        throw Error("moebius matrix must be (n+3) x (n+3)");
    check_eta(m, n);
    return MoebiusElement{n, m};
}

JetPoint2 moebius_act(const MoebiusElement& el, const JetPoint2& p) {
    const int n = p.n;
    if (el.n != n) throw Error("moebius element dimension does not match jet dimension");

    // Cone lift of the graph as degree-2 Taylor data in y.
    std::vector<Taylor2D> comp(n + 3, Taylor2D(n));
    comp[0] = Taylor2D::constant(n, 1.0);  // p-component (lambda = 1)
    comp[1].c0 = p.u;
    comp[1].c1 = p.du;
    comp[1].c2 = p.d2u;
    for (int i = 0; i < n; ++i) {
        comp[2 + i].c0 = p.x[i];
        comp[2 + i].c1[i] = 1.0;
    }
    Taylor2D s = t2_mul(comp[1], comp[1]);
    for (int i = 0; i < n; ++i) s = t2_add(s, t2_mul(comp[2 + i], comp[2 + i]));
    comp[n + 2] = s.scaled(-0.5);

    std::vector<Taylor2D> image(n + 3, Taylor2D(n));
    for (int r = 0; r < n + 3; ++r) {
        Taylor2D acc(n);
        for (int c = 0; c < n + 3; ++c) {
            if (el.M(r, c) == 0.0) continue;
            acc = t2_add(acc, comp[c].scaled(el.M(r, c)));
        }
        image[r] = acc;
    }

    double scale = 0.0;
    for (int r = 0; r < n + 3; ++r) scale = std::max(scale, std::abs(image[r].c0));
    const Taylor2D& lambda = image[0];
    if (std::abs(lambda.c0) <= 1e-9 * std::max(1.0, scale))
        throw ChartBoundary("image basepoint leaves the lambda != 0 chart");

    Taylor2D u_chart = t2_div(image[1], lambda);
    Taylor2MapD z;
    std::vector<double> new_x(n);
    for (int i = 0; i < n; ++i) {
        Taylor2D xi = t2_div(image[2 + i], lambda);
        new_x[i] = xi.c0;
        xi.c0 = 0.0;
        z.comp.push_back(std::move(xi));
    }
    Taylor2MapD zinv;
    try {
        zinv = t2_invert_map(z, 1e-9);
    } catch (const NotInvertible&) {
        throw NonAdmissible("image tangent plane is vertical in the (u, x) chart");
    }
    Taylor2D new_u = t2_compose(u_chart, zinv);

    JetPoint2 q(n);
    q.u = new_u.c0;
    q.x = std::move(new_x);
    q.du = new_u.c1;
    q.d2u = new_u.c2;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double sym = 0.5 * (q.d2(i, j) + q.d2(j, i));
            q.d2(i, j) = q.d2(j, i) = sym;
        }
    return q;
}

ExprMat conformal_shape(int n) {
    ExprMat a = shape_operator(n);
    Expr mean = Rational(1, n) * a.trace();
    ExprMat a0 = a;
    for (int i = 0; i < n; ++i) a0(i, i) = a0(i, i) - mean;
    for (Expr& e : a0.a) e = normalize(e, n);
    return a0;
}

std::vector<Expr> conformal_traces(int n) {
    if (n < 2)
        throw NoInvariants("the traceless shape operator of a curve carries no invariants");
    ExprMat a0 = conformal_shape(n);
    std::vector<Expr> traces;
    ExprMat p = a0;
    for (int h = 2; h <= n; ++h) {
        p = p * a0;
        for (Expr& e : p.a) e = normalize(e, n);
        traces.push_back(normalize(p.trace(), n));
    }
    return traces;
}

std::vector<double> numeric_conformal_traces(const JetPoint2& p) {
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
    double mean = a.trace() / n;
    for (int i = 0; i < n; ++i) a(i, i) -= mean;
    std::vector<double> traces;
    MatD pw = a;
    for (int h = 2; h <= n; ++h) {
        pw = pw * a;
        traces.push_back(pw.trace());
    }
    return traces;
}

std::vector<double> exact_conformal_traces(const JetPoint2& p) {
    std::vector<Rational> t = detail::rational_conjugate_traces(p, true);
    double detg = 1.0;
    for (double d : p.du) detg += d * d;
    std::vector<double> out;
    for (std::size_t m = 2; m <= t.size(); ++m)
        out.push_back(t[m - 1].to_double() / std::pow(detg, 0.5 * static_cast<double>(m)));
    return out;
}

GeneratedPde generate_conformal_pde(const InvariantPoly& F, int n) {
    if (F.family != InvariantPoly::Family::Conformal)
        throw Error("generate_conformal_pde: polynomial is not in the conformal family");
    if (F.is_zero()) throw EmptyEquation("invariant polynomial is identically zero");
    if (!F.is_weighted_homogeneous())
        throw NotHomogeneous("conformal invariant polynomial must be weighted-homogeneous");
    if (F.max_symbol() > n)
        throw Error("invariant polynomial uses c" + std::to_string(F.max_symbol()) +
                    " but n = " + std::to_string(n));
    for (const auto& [exps, c] : F.terms)
        if (!exps.empty() && exps[0] != 0)
            throw Error("conformal polynomials have no degree-1 symbol");

    std::vector<Expr> traces = conformal_traces(n);
    // Symbol m corresponds to tau_deg_m = traces[m-2]; pad index 0 with zero.
    std::vector<Expr> values;
    values.push_back(Expr::integer(0));
    for (const Expr& t : traces) values.push_back(t);
    detail::RatFun rf = detail::invariant_poly_ratfun(F, values, n);
    return detail::clear_pde(rf, n);
}

// ---------------------------------------------------------------------------
// JSON interfaces
// ---------------------------------------------------------------------------

std::string minkowski_to_json(const MinkowskiVector& v) {
    std::string basis = "p,";
    for (int a = 0; a <= v.n; ++a) basis += "e" + std::to_string(a) + ",";
    basis += "q";
    nlohmann::json j;
    j["basis"] = basis;
    j["v"] = v.v;
    return j.dump();
}

MinkowskiVector minkowski_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& err) {
        throw ParseError(std::string("invalid Minkowski vector JSON: ") + err.what(), err.byte);
    }
    std::vector<double> v = j.at("v").get<std::vector<double>>();
    if (v.size() < 4) throw ParseError("Minkowski vector needs at least 4 components", 0);
    MinkowskiVector m(static_cast<int>(v.size()) - 3);
    m.v = std::move(v);
    return m;
}

MoebiusElement moebius_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& err) {
        throw ParseError(std::string("invalid Moebius element JSON: ") + err.what(), err.byte);
    }
    const int n = j.at("n").get<int>();
    if (j.contains("matrix")) {
        const auto& rows = j.at("matrix");
        MatD m(n + 3, n + 3);
        if (static_cast<int>(rows.size()) != n + 3)
            throw ParseError("matrix must be (n+3) x (n+3)", 0);
        for (int r = 0; r < n + 3; ++r)
            for (int c = 0; c < n + 3; ++c) m(r, c) = rows.at(r).at(c).get<double>();
        return moebius_from_matrix(m, n);
    }
    if (j.contains("word")) {
        MoebiusElement acc = moebius_identity(n);
        for (const auto& g : j.at("word")) {
            std::string name = g.at("gen").get<std::string>();
            GradedGenerator gen;
            if (name == "g_minus" || name == "g_plus") {
                std::vector<double> xi = g.at("xi").get<std::vector<double>>();
                gen = name == "g_minus" ? GradedGenerator::g_minus(std::move(xi))
                                        : GradedGenerator::g_plus(std::move(xi));
            } else if (name == "rotation") {
                const auto& rows = g.at("B");
                MatD b(n + 1, n + 1);
                for (int r = 0; r <= n; ++r)
                    for (int c = 0; c <= n; ++c) b(r, c) = rows.at(r).at(c).get<double>();
                gen = GradedGenerator::rotation(std::move(b));
            } else if (name == "dilation") {
                gen = GradedGenerator::dilation(g.at("a").get<double>());
            } else if (name == "a_e0") {
                gen = GradedGenerator::a_e0(g.at("t").get<double>());
            } else {
                throw ParseError("unknown generator: " + name, 0);
            }
            acc = moebius_mul(acc, build_element(gen, n));
        }
        return acc;
    }
    throw ParseError("Moebius element JSON needs 'matrix' or 'word'", 0);
}

}  // namespace invpde
