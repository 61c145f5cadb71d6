#pragma once

#include <map>
#include <string>
#include <vector>

#include "invpde/expr.hpp"
#include "invpde/jet_point.hpp"
#include "invpde/series.hpp"

namespace invpde {

/// A coordinate differential appearing in a contact form: du, du_i or dx^j.
struct CoordDifferential {
    enum class Kind { Du, Ddu, Dx };
    Kind kind = Kind::Du;
    int idx = 0;  // 1-based; 0 for du

    friend bool operator<(const CoordDifferential& a, const CoordDifferential& b) {
        if (a.kind != b.kind) return a.kind < b.kind;
        return a.idx < b.idx;
    }
    friend bool operator==(const CoordDifferential& a, const CoordDifferential& b) {
        return a.kind == b.kind && a.idx == b.idx;
    }
};

/// One Pfaff form of the second-order contact system: level 0 encodes
/// theta = du - u_i dx^i, level i >= 1 encodes theta_i = du_i - u_ij dx^j.
struct ContactForm {
    int level = 0;
    std::map<CoordDifferential, Expr> coeff;
};

/// Reads the 2-jet of the graph of f (Taylor data centered at x0) at x0.
JetPoint2 lift_graph(const Taylor2D& f, const std::vector<double>& x0);

/// Truncated total derivative D_i^(order) applied to e. The input may only
/// involve jet variables of order <= order-1 (and no radical w); supported
/// orders are 1 and 2.
Expr total_derivative(const Expr& e, int i, int order);

/// The forms theta, theta_1..theta_n.
std::vector<ContactForm> contact_forms(int n);

/// Contraction of a contact form with the total-derivative field D_i, as an
/// expression: du(D_i) = u_i, du_k(D_i) = u_ki, dx^j(D_i) = delta_ij.
/// Vanishes identically for every form returned by contact_forms.
Expr contact_contract_total(const ContactForm& form, int i, int n);

/// Translation of the fiber of J^2 -> J^1: adds the symmetric matrix v to the
/// second-order coordinates, leaving everything else fixed.
JetPoint2 fiber_translate(const JetPoint2& p, const std::vector<double>& v);

// JSON jet schema: {"n":2,"u":0.0,"x":[..],"du":[..],"d2u":[[..],[..]]}.
// d2u must be symmetric within 1e-12 on ingestion and is then symmetrized.
std::string jet_to_json(const JetPoint2& p);
JetPoint2 jet_from_json(const std::string& text);

}  // namespace invpde
