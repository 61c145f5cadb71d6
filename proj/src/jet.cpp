#include "invpde/jet.hpp"

#include <cmath>

#include "json.hpp"

namespace invpde {

JetPoint2 lift_graph(const Taylor2D& f, const std::vector<double>& x0) {
    JetPoint2 p(f.n);
    p.u = f.c0;
    p.x = x0;
    p.du = f.c1;
    p.d2u = f.c2;
    return p;
}

namespace {

int var_order(VarId v) {
    switch (v.kind) {
        case VarId::Kind::U:
        case VarId::Kind::X: return 0;
        case VarId::Kind::Du: return 1;
        case VarId::Kind::D2u: return 2;
        case VarId::Kind::W: return 3;  // treated as beyond any jet order
    }
    return 3;
}

int max_var_order(const Expr& e) {
    switch (e.kind()) {
        case Expr::Kind::Constant: return -1;
        case Expr::Kind::Variable: return var_order(e.var());
        case Expr::Kind::Power: return max_var_order(e.base());
        case Expr::Kind::Sum:
        case Expr::Kind::Product: {
            int m = -1;
            for (const Expr& a : e.args()) m = std::max(m, max_var_order(a));
            return m;
        }
    }
    return -1;
}

// Formal partial derivative of the tree with respect to one variable.
Expr diff(const Expr& e, VarId v) {
    switch (e.kind()) {
        case Expr::Kind::Constant: return Expr::integer(0);
        case Expr::Kind::Variable: return e.var() == v ? Expr::integer(1) : Expr::integer(0);
        case Expr::Kind::Sum: {
            std::vector<Expr> parts;
            for (const Expr& a : e.args()) parts.push_back(diff(a, v));
            return Expr::sum(std::move(parts));
        }
        case Expr::Kind::Product: {
            std::vector<Expr> parts;
            for (std::size_t i = 0; i < e.args().size(); ++i) {
                std::vector<Expr> factors = e.args();
                factors[i] = diff(factors[i], v);
                parts.push_back(Expr::product(std::move(factors)));
            }
            return Expr::sum(std::move(parts));
        }
        case Expr::Kind::Power: {
            int k = e.exponent();
            if (k == 0) return Expr::integer(0);
            return Expr::product({Expr::integer(k), Expr::power(e.base(), k - 1),
                                  diff(e.base(), v)});
        }
    }
    return Expr::integer(0);
}

// Collects the variables appearing in a tree.
void collect_vars(const Expr& e, std::vector<VarId>& out) {
    switch (e.kind()) {
        case Expr::Kind::Constant: return;
        case Expr::Kind::Variable: {
            for (VarId v : out)
                if (v == e.var()) return;
            out.push_back(e.var());
            return;
        }
        case Expr::Kind::Power: collect_vars(e.base(), out); return;
        case Expr::Kind::Sum:
        case Expr::Kind::Product:
            for (const Expr& a : e.args()) collect_vars(a, out);
            return;
    }
}

}  // namespace

Expr total_derivative(const Expr& e, int i, int order) {
    if (i < 1) throw Error("total_derivative: direction index must be >= 1");
    if (order < 1 || order > 2)
        throw OrderOverflow("total_derivative: only orders 1 and 2 are instantiated");
    if (max_var_order(e) >= order)
        throw OrderOverflow("total_derivative: expression involves jet variables of order >= " +
                            std::to_string(order));

    std::vector<VarId> vars;
    collect_vars(e, vars);

    std::vector<Expr> parts;
    parts.push_back(diff(e, VarId::x(i)));
    parts.push_back(Expr::product({Expr::du(i), diff(e, VarId::u())}));
    if (order >= 2) {
        for (VarId v : vars)
            if (v.kind == VarId::Kind::Du)
                parts.push_back(Expr::product({Expr::d2u(v.i, i), diff(e, v)}));
    }
    return Expr::sum(std::move(parts));
}

std::vector<ContactForm> contact_forms(int n) {
    std::vector<ContactForm> forms;
    ContactForm theta;
    theta.level = 0;
    theta.coeff[{CoordDifferential::Kind::Du, 0}] = Expr::integer(1);
    for (int j = 1; j <= n; ++j)
        theta.coeff[{CoordDifferential::Kind::Dx, j}] = -Expr::du(j);
    forms.push_back(std::move(theta));
    for (int i = 1; i <= n; ++i) {
        ContactForm th;
        th.level = i;
        th.coeff[{CoordDifferential::Kind::Ddu, i}] = Expr::integer(1);
        for (int j = 1; j <= n; ++j)
            th.coeff[{CoordDifferential::Kind::Dx, j}] = -Expr::d2u(i, j);
        forms.push_back(std::move(th));
    }
    return forms;
}

Expr contact_contract_total(const ContactForm& form, int i, int n) {
    std::vector<Expr> parts;
    for (const auto& [d, c] : form.coeff) {
        Expr value = Expr::integer(0);
        switch (d.kind) {
            case CoordDifferential::Kind::Du: value = Expr::du(i); break;
            case CoordDifferential::Kind::Ddu: value = Expr::d2u(d.idx, i); break;
            case CoordDifferential::Kind::Dx:
                value = Expr::integer(d.idx == i ? 1 : 0);
                break;
        }
        parts.push_back(Expr::product({c, value}));
    }
    return normalize(Expr::sum(std::move(parts)), n);
}

JetPoint2 fiber_translate(const JetPoint2& p, const std::vector<double>& v) {
    const int n = p.n;
    if (static_cast<int>(v.size()) != n * n)
        throw Error("fiber_translate: translation matrix has wrong size");
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(v[i * n + j] - v[j * n + i]) > 1e-12)
                throw NotSymmetric("fiber_translate: v is not symmetric");
    JetPoint2 q = p;
    for (int i = 0; i < n * n; ++i) q.d2u[i] += v[i];
    return q;
}

std::string jet_to_json(const JetPoint2& p) {
    nlohmann::json j;
    j["n"] = p.n;
    j["u"] = p.u;
    j["x"] = p.x;
    j["du"] = p.du;
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < p.n; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int k = 0; k < p.n; ++k) row.push_back(p.d2(i, k));
        rows.push_back(row);
    }
    j["d2u"] = rows;
    return j.dump();
}

JetPoint2 jet_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& err) {
        throw ParseError(std::string("invalid jet JSON: ") + err.what(), err.byte);
    }
    JetPoint2 p(j.at("n").get<int>());
    p.u = j.at("u").get<double>();
    p.x = j.at("x").get<std::vector<double>>();
    p.du = j.at("du").get<std::vector<double>>();
    const auto& rows = j.at("d2u");
    if (static_cast<int>(p.x.size()) != p.n || static_cast<int>(p.du.size()) != p.n ||
        static_cast<int>(rows.size()) != p.n)
        throw ParseError("jet JSON has inconsistent dimensions", 0);
    for (int i = 0; i < p.n; ++i)
        for (int k = 0; k < p.n; ++k) p.d2(i, k) = rows.at(i).at(k).get<double>();
    for (int i = 0; i < p.n; ++i)
        for (int k = i + 1; k < p.n; ++k) {
            if (std::abs(p.d2(i, k) - p.d2(k, i)) > 1e-12)
                throw NotSymmetric("jet JSON: d2u is not symmetric within 1e-12");
            double s = 0.5 * (p.d2(i, k) + p.d2(k, i));
            p.d2(i, k) = p.d2(k, i) = s;
        }
    return p;
}

}  // namespace invpde
