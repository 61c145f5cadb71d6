#pragma once

#include <vector>

#include "invpde/errors.hpp"

namespace invpde {

/// A numeric point of the second-order jet space in an admissible chart:
/// the chart coordinates (u, x), the gradient entries u_i and the symmetric
/// Hessian entries u_ij of a graph through that point.
struct JetPoint2 {
    int n = 0;
    double u = 0.0;
    std::vector<double> x;    // length n
    std::vector<double> du;   // length n
    std::vector<double> d2u;  // n*n row-major, symmetric

    JetPoint2() = default;
    explicit JetPoint2(int dim)
        : n(dim), x(dim, 0.0), du(dim, 0.0), d2u(static_cast<std::size_t>(dim) * dim, 0.0) {}

    static JetPoint2 zero(int dim) { return JetPoint2(dim); }

    double d2(int i, int j) const { return d2u[static_cast<std::size_t>(i) * n + j]; }
    double& d2(int i, int j) { return d2u[static_cast<std::size_t>(i) * n + j]; }
};

}  // namespace invpde
