#pragma once

// Truncated degree-2 multivariate Taylor arithmetic. This is the algebra in
// which 2-jets are pushed forward under group actions: graphs are expanded to
// second order, transformed, divided, re-composed and re-graphed, all exactly
// modulo terms of total degree >= 3.

#include <vector>

#include "invpde/errors.hpp"
#include "invpde/linalg.hpp"
#include "invpde/rational.hpp"

namespace invpde {

/// c0 + c1.y + 1/2 y^T c2 y, truncated beyond total degree 2. c2 is kept
/// symmetric by construction.
template <class K>
struct Taylor2 {
    int n = 0;
    K c0{};
    std::vector<K> c1;
    std::vector<K> c2;  // n*n row-major, symmetric

    Taylor2() = default;
    explicit Taylor2(int vars)
        : n(vars), c1(vars, K{}), c2(static_cast<std::size_t>(vars) * vars, K{}) {}

    static Taylor2 constant(int vars, K c) {
        Taylor2 t(vars);
        t.c0 = std::move(c);
        return t;
    }
    static Taylor2 coordinate(int vars, int i) {
        Taylor2 t(vars);
        t.c1[i] = K{1};
        return t;
    }

    K q(int i, int j) const { return c2[static_cast<std::size_t>(i) * n + j]; }
    K& q(int i, int j) { return c2[static_cast<std::size_t>(i) * n + j]; }

    Taylor2 scaled(const K& s) const {
        Taylor2 r = *this;
        r.c0 = r.c0 * s;
        for (K& v : r.c1) v = v * s;
        for (K& v : r.c2) v = v * s;
        return r;
    }

    friend bool operator==(const Taylor2& a, const Taylor2& b) {
        return a.n == b.n && a.c0 == b.c0 && a.c1 == b.c1 && a.c2 == b.c2;
    }
};

template <class K>
struct Taylor2Map {
    std::vector<Taylor2<K>> comp;

    int domain_dim() const { return comp.empty() ? 0 : comp.front().n; }
    int range_dim() const { return static_cast<int>(comp.size()); }
};

template <class K>
Taylor2<K> t2_add(const Taylor2<K>& a, const Taylor2<K>& b) {
    Taylor2<K> r = a;
    r.c0 = r.c0 + b.c0;
    for (int i = 0; i < r.n; ++i) r.c1[i] = r.c1[i] + b.c1[i];
    for (std::size_t i = 0; i < r.c2.size(); ++i) r.c2[i] = r.c2[i] + b.c2[i];
    return r;
}

template <class K>
Taylor2<K> t2_sub(const Taylor2<K>& a, const Taylor2<K>& b) {
    return t2_add(a, b.scaled(K{-1}));
}

template <class K>
Taylor2<K> t2_mul(const Taylor2<K>& a, const Taylor2<K>& b) {
    Taylor2<K> r(a.n);
    r.c0 = a.c0 * b.c0;
    for (int i = 0; i < a.n; ++i) r.c1[i] = a.c0 * b.c1[i] + b.c0 * a.c1[i];
    for (int i = 0; i < a.n; ++i)
        for (int j = 0; j < a.n; ++j)
            r.q(i, j) = a.c0 * b.q(i, j) + b.c0 * a.q(i, j) + a.c1[i] * b.c1[j] +
                        a.c1[j] * b.c1[i];
    return r;
}

/// a * inverse(b) with inverse(b) = (1/b0)(1 - r + r^2), r = (b - b0)/b0.
template <class K>
Taylor2<K> t2_div(const Taylor2<K>& a, const Taylor2<K>& b) {
    if (b.c0 == K{}) throw NonUnit("t2_div: constant term of divisor is zero");
    K inv0 = K{1} / b.c0;
    Taylor2<K> r = b;  // r := (b - b0)/b0, so r.c0 = 0
    r.c0 = K{};
    r = r.scaled(inv0);
    Taylor2<K> inv = t2_sub(t2_mul(r, r), r);
    inv.c0 = inv.c0 + K{1};
    return t2_mul(a, inv.scaled(inv0));
}

/// Composition outer(inner_1(y), ..., inner_m(y)) for inner components with
/// zero constant term, exact to degree 2.
template <class K>
Taylor2<K> t2_compose(const Taylor2<K>& outer, const Taylor2Map<K>& inner) {
    const int m = outer.n;
    if (inner.range_dim() != m)
        throw BasepointMismatch("t2_compose: component count does not match outer arity");
    const int n = inner.domain_dim();
    for (const auto& h : inner.comp) {
        if (h.n != n) throw BasepointMismatch("t2_compose: mixed domain dimensions");
        if (!(h.c0 == K{}))
            throw BasepointMismatch("t2_compose: inner component has nonzero constant term");
    }
    Taylor2<K> r(n);
    r.c0 = outer.c0;
    // c1 = L^T F1 ; c2 = sum_j F1_j Q_j + L^T F2 L, L rows = inner gradients.
    for (int k = 0; k < n; ++k) {
        K s{};
        for (int j = 0; j < m; ++j) s = s + inner.comp[j].c1[k] * outer.c1[j];
        r.c1[k] = s;
    }
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
            K s{};
            for (int j = 0; j < m; ++j) s = s + outer.c1[j] * inner.comp[j].q(p, q);
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < m; ++k)
                    s = s + outer.q(j, k) * inner.comp[j].c1[p] * inner.comp[k].c1[q];
            r.q(p, q) = s;
        }
    return r;
}

/// Inverse of a square map with zero constant terms and nonsingular linear
/// part: g = L^{-1} z - 1/2 L^{-1} Q(L^{-1} z, L^{-1} z), so that
/// f(g(z)) = z modulo degree 3.
template <class K>
Taylor2Map<K> t2_invert_map(const Taylor2Map<K>& f, double rel_tol = 0.0) {
    const int n = f.range_dim();
    if (n == 0 || f.domain_dim() != n)
        throw NotInvertible("t2_invert_map: map is not square");
    for (const auto& h : f.comp)
        if (!(h.c0 == K{}))
            throw BasepointMismatch("t2_invert_map: nonzero constant term");
    Mat<K> L(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) L(j, k) = f.comp[j].c1[k];
    Mat<K> Linv;
    if (!try_invert(L, Linv, rel_tol)) throw NotInvertible("t2_invert_map: singular linear part");

    Taylor2Map<K> g;
    g.comp.assign(n, Taylor2<K>(n));
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) g.comp[j].c1[k] = Linv(j, k);
    // Quadratic part: -1/2 * sum_k Linv[j][k] * (Linv^T Q_k Linv).
    for (int k = 0; k < n; ++k) {
        Mat<K> Qk(n, n);
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q) Qk(p, q) = f.comp[k].q(p, q);
        Mat<K> conj = Linv.transposed() * Qk * Linv;
        for (int j = 0; j < n; ++j) {
            const K& c = Linv(j, k);
            for (int p = 0; p < n; ++p)
                for (int q = 0; q < n; ++q)
                    g.comp[j].q(p, q) = g.comp[j].q(p, q) - c * conj(p, q);
        }
    }
    return g;
}

using Taylor2D = Taylor2<double>;
using Taylor2Q = Taylor2<Rational>;
using Taylor2MapD = Taylor2Map<double>;
using Taylor2MapQ = Taylor2Map<Rational>;

}  // namespace invpde
