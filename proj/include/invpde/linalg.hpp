#pragma once

#include <cmath>
#include <vector>

#include "invpde/errors.hpp"
#include "invpde/rational.hpp"

namespace invpde {

/// Minimal dense matrix over a field-like scalar. Small dimensions only
/// (everything in this project is at most (n+3) x (n+3) with n <= 4).
template <class K>
struct Mat {
    int rows = 0, cols = 0;
    std::vector<K> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, K{}) {}

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = K{1};
        return m;
    }

    K& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    const K& operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

    Mat transposed() const {
        Mat t(cols, rows);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    friend Mat operator*(const Mat& x, const Mat& y) {
        Mat r(x.rows, y.cols);
        for (int i = 0; i < x.rows; ++i)
            for (int k = 0; k < x.cols; ++k) {
                const K& xik = x(i, k);
                for (int j = 0; j < y.cols; ++j) r(i, j) = r(i, j) + xik * y(k, j);
            }
        return r;
    }
    friend Mat operator+(const Mat& x, const Mat& y) {
        Mat r = x;
        for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] = r.a[i] + y.a[i];
        return r;
    }
    friend Mat operator-(const Mat& x, const Mat& y) {
        Mat r = x;
        for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] = r.a[i] - y.a[i];
        return r;
    }

    K trace() const {
        K t{};
        for (int i = 0; i < rows; ++i) t = t + (*this)(i, i);
        return t;
    }
};

using MatD = Mat<double>;
using VecD = std::vector<double>;

inline double pivot_size(double x) { return std::abs(x); }
inline double pivot_size(const Rational& x) { return x.is_zero() ? 0.0 : 1.0; }

/// Gauss-Jordan inverse with partial pivoting. Returns false when the largest
/// available pivot is <= rel_tol * max(1, largest initial entry); for exact
/// scalars rel_tol must be 0, meaning only exactly-zero pivots fail. The
/// max(1, .) floor means near-singularity is judged against the unit scale of
/// the chart data, not against the matrix's own (possibly tiny) entries.
template <class K>
bool try_invert(Mat<K> m, Mat<K>& out, double rel_tol = 0.0) {
    const int n = m.rows;
    double scale = 0.0;
    for (const K& v : m.a) scale = std::max(scale, pivot_size(v));
    if (scale == 0.0) return false;
    if (rel_tol > 0.0) scale = std::max(scale, 1.0);
    Mat<K> inv = Mat<K>::identity(n);
    for (int col = 0; col < n; ++col) {
        int best = -1;
        double best_size = rel_tol * scale;
        for (int r = col; r < n; ++r) {
            double s = pivot_size(m(r, col));
            if (s > best_size) {
                best_size = s;
                best = r;
            }
        }
        if (best < 0) return false;
        if (best != col) {
            for (int j = 0; j < n; ++j) {
                std::swap(m(col, j), m(best, j));
                std::swap(inv(col, j), inv(best, j));
            }
        }
        K piv = m(col, col);
        for (int j = 0; j < n; ++j) {
            m(col, j) = m(col, j) / piv;
            inv(col, j) = inv(col, j) / piv;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            K f = m(r, col);
            if (pivot_size(f) == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                m(r, j) = m(r, j) - f * m(col, j);
                inv(r, j) = inv(r, j) - f * inv(col, j);
            }
        }
    }
    out = std::move(inv);
    return true;
}

template <class K>
Mat<K> invert(const Mat<K>& m, double rel_tol = 0.0) {
    Mat<K> out;
    if (!try_invert(m, out, rel_tol)) throw NotInvertible("singular matrix");
    return out;
}

/// Matrix exponential by plain Taylor series; intended for operator norms
/// around 1 or below (random motion sampling), where 30 terms are exact to
/// double precision.
inline MatD mat_exp(const MatD& m) {
    MatD result = MatD::identity(m.rows);
    MatD term = MatD::identity(m.rows);
    for (int k = 1; k <= 30; ++k) {
        term = term * m;
        for (double& v : term.a) v /= k;
        result = result + term;
    }
    return result;
}

inline double frobenius_norm(const MatD& m) {
    double s = 0.0;
    for (double v : m.a) s += v * v;
    return std::sqrt(s);
}

inline double max_abs_diff(const MatD& a, const MatD& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.a.size(); ++i) s = std::max(s, std::abs(a.a[i] - b.a[i]));
    return s;
}

}  // namespace invpde
