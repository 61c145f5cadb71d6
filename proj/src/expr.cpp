#include "invpde/expr.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"
#include "poly.hpp"

namespace invpde {

using detail::Poly;
using detail::RatFun;

struct Expr::Node {
    Kind kind = Kind::Constant;
    Rational value;
    VarId var_id;
    std::vector<Expr> args;  // Sum, Product; Power stores {base}
    int exponent = 0;
};

Expr Expr::constant(const Rational& c) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Constant;
    n->value = c;
    return Expr(std::move(n));
}

Expr Expr::variable(VarId v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Variable;
    n->var_id = v;
    return Expr(std::move(n));
}

Expr Expr::sum(std::vector<Expr> args) {
    if (args.empty()) return constant(Rational(0));
    if (args.size() == 1) return args.front();
    auto n = std::make_shared<Node>();
    n->kind = Kind::Sum;
    n->args = std::move(args);
    return Expr(std::move(n));
}

Expr Expr::product(std::vector<Expr> args) {
    if (args.empty()) return constant(Rational(1));
    if (args.size() == 1) return args.front();
    auto n = std::make_shared<Node>();
    n->kind = Kind::Product;
    n->args = std::move(args);
    return Expr(std::move(n));
}

Expr Expr::power(Expr base, int exponent) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Power;
    n->args.push_back(std::move(base));
    n->exponent = exponent;
    return Expr(std::move(n));
}

Expr::Kind Expr::kind() const { return node_->kind; }
const Rational& Expr::constant_value() const { return node_->value; }
VarId Expr::var() const { return node_->var_id; }
const std::vector<Expr>& Expr::args() const { return node_->args; }
const Expr& Expr::base() const { return node_->args.front(); }
int Expr::exponent() const { return node_->exponent; }

bool Expr::structurally_equal(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case Kind::Constant: return a.constant_value() == b.constant_value();
        case Kind::Variable: return a.var() == b.var();
        case Kind::Power:
            return a.exponent() == b.exponent() && structurally_equal(a.base(), b.base());
        case Kind::Sum:
        case Kind::Product: {
            if (a.args().size() != b.args().size()) return false;
            for (std::size_t i = 0; i < a.args().size(); ++i)
                if (!structurally_equal(a.args()[i], b.args()[i])) return false;
            return true;
        }
    }
    return false;
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) {
    return Expr::sum({a, Expr::product({Expr::integer(-1), b})});
}
Expr operator-(const Expr& a) { return Expr::product({Expr::integer(-1), a}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::product({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::product({a, Expr::power(b, -1)}); }
Expr operator*(const Rational& c, const Expr& e) { return Expr::product({Expr::constant(c), e}); }
Expr pow(const Expr& base, int exponent) { return Expr::power(base, exponent); }

Expr detg_expr(int n) {
    std::vector<Expr> terms{Expr::integer(1)};
    for (int i = 1; i <= n; ++i) terms.push_back(Expr::power(Expr::du(i), 2));
    return Expr::sum(std::move(terms));
}

namespace detail {

RatFun to_ratfun(const Expr& e, int n) {
    switch (e.kind()) {
        case Expr::Kind::Constant:
            return RatFun{Poly::constant(e.constant_value()), Poly::one()};
        case Expr::Kind::Variable: {
            VarId v = e.var();
            if (v.max_index() > n)
                throw Error("variable index exceeds dimension n=" + std::to_string(n));
            return RatFun{Poly::var(v), Poly::one()};
        }
        case Expr::Kind::Sum: {
            RatFun acc{Poly::zero(), Poly::one()};
            for (const Expr& a : e.args()) acc = rf_add(acc, to_ratfun(a, n));
            return acc;
        }
        case Expr::Kind::Product: {
            RatFun acc{Poly::one(), Poly::one()};
            for (const Expr& a : e.args()) {
                if (acc.is_zero()) return acc;
                acc = rf_mul(acc, to_ratfun(a, n), n);
            }
            return acc;
        }
        case Expr::Kind::Power:
            return rf_pow(to_ratfun(e.base(), n), e.exponent(), n);
    }
    throw std::logic_error("unreachable expr kind");
}

Expr poly_to_expr(const Poly& p) {
    if (p.is_zero()) return Expr::integer(0);
    std::vector<Expr> terms;
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        const auto& [m, c] = *it;
        if (m.empty()) {
            terms.push_back(Expr::constant(c));
            continue;
        }
        std::vector<Expr> factors;
        if (!c.is_one()) factors.push_back(Expr::constant(c));
        for (const auto& [v, e] : m.factors) {
            Expr var = Expr::variable(v);
            factors.push_back(e == 1 ? var : Expr::power(var, e));
        }
        terms.push_back(factors.size() == 1 ? factors.front() : Expr::product(std::move(factors)));
    }
    return terms.size() == 1 ? terms.front() : Expr::sum(std::move(terms));
}

Expr from_ratfun(const RatFun& rf) {
    Expr num = poly_to_expr(rf.num);
    if (rf.den.is_constant() && rf.den.constant_value().is_one()) return num;
    Expr inv = Expr::power(poly_to_expr(rf.den), -1);
    if (rf.num.is_constant() && rf.num.constant_value().is_one()) return inv;
    return Expr::product({num, inv});
}

}  // namespace detail

Expr normalize(const Expr& e, int n) { return detail::from_ratfun(detail::to_ratfun(e, n)); }

bool nf_equal(const Expr& a, const Expr& b, int n) {
    return detail::rf_equal(detail::to_ratfun(a, n), detail::to_ratfun(b, n));
}

bool nf_is_zero(const Expr& e, int n) { return detail::to_ratfun(e, n).is_zero(); }

namespace {

Expr substitute_tree(const Expr& e, const std::map<VarId, Expr>& bindings) {
    switch (e.kind()) {
        case Expr::Kind::Constant: return e;
        case Expr::Kind::Variable: {
            auto it = bindings.find(e.var());
            return it == bindings.end() ? e : it->second;
        }
        case Expr::Kind::Sum:
        case Expr::Kind::Product: {
            std::vector<Expr> args;
            args.reserve(e.args().size());
            for (const Expr& a : e.args()) args.push_back(substitute_tree(a, bindings));
            return e.kind() == Expr::Kind::Sum ? Expr::sum(std::move(args))
                                               : Expr::product(std::move(args));
        }
        case Expr::Kind::Power:
            return Expr::power(substitute_tree(e.base(), bindings), e.exponent());
    }
    throw std::logic_error("unreachable expr kind");
}

}  // namespace

namespace {

bool tree_contains(const Expr& e, VarId v) {
    switch (e.kind()) {
        case Expr::Kind::Constant: return false;
        case Expr::Kind::Variable: return e.var() == v;
        case Expr::Kind::Power: return tree_contains(e.base(), v);
        case Expr::Kind::Sum:
        case Expr::Kind::Product:
            for (const Expr& a : e.args())
                if (tree_contains(a, v)) return true;
            return false;
    }
    return false;
}

}  // namespace

Expr substitute(const Expr& e, const std::map<VarId, Expr>& bindings, int n) {
    // Normalize first so the radical rewrite w^2 -> det(g) has already
    // exposed the first-order variables to the bindings.
    Expr nf = normalize(e, n);
    bool binds_du = false;
    for (const auto& [v, repl] : bindings)
        if (v.kind == VarId::Kind::Du) binds_du = true;
    if (!binds_du || bindings.count(VarId::w()) || !tree_contains(nf, VarId::w()))
        return normalize(substitute_tree(nf, bindings), n);

    // A residual odd power of w must track the substituted det(g): resolve
    // w to the exact square root of the new determinant when it exists.
    std::map<VarId, Expr> full = bindings;
    Expr gamma = normalize(substitute_tree(detg_expr(n), bindings), n);
    auto root = detail::ratfun_sqrt(detail::to_ratfun(gamma, n));
    if (!root)
        throw Error("substitution leaves an unresolved radical: the substituted det(g) "
                    "is not an exact square");
    full[VarId::w()] = detail::from_ratfun(*root);
    return normalize(substitute_tree(nf, full), n);
}

namespace {

constexpr double kNearSingularTol = 1e-14;

double eval_tree(const Expr& e, const JetPoint2& p, double wval) {
    switch (e.kind()) {
        case Expr::Kind::Constant: return e.constant_value().to_double();
        case Expr::Kind::Variable: {
            VarId v = e.var();
            switch (v.kind) {
                case VarId::Kind::U: return p.u;
                case VarId::Kind::X: return p.x.at(v.i - 1);
                case VarId::Kind::Du: return p.du.at(v.i - 1);
                case VarId::Kind::D2u: return p.d2(v.i - 1, v.j - 1);
                case VarId::Kind::W: return wval;
            }
            return 0.0;
        }
        case Expr::Kind::Sum: {
            double s = 0.0;
            for (const Expr& a : e.args()) s += eval_tree(a, p, wval);
            return s;
        }
        case Expr::Kind::Product: {
            double s = 1.0;
            for (const Expr& a : e.args()) s *= eval_tree(a, p, wval);
            return s;
        }
        case Expr::Kind::Power: {
            double b = eval_tree(e.base(), p, wval);
            int k = e.exponent();
            if (k < 0) {
                double den = std::pow(b, -k);
                if (std::abs(den) < kNearSingularTol)
                    throw NearSingular("denominator below machine tolerance in eval");
                return 1.0 / den;
            }
            return std::pow(b, k);
        }
    }
    throw std::logic_error("unreachable expr kind");
}

}  // namespace

double eval_numeric(const Expr& e, const JetPoint2& p) {
    double detg = 1.0;
    for (double d : p.du) detg += d * d;
    return eval_tree(e, p, std::sqrt(detg));
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

namespace {

std::string var_name(VarId v, bool latex) {
    auto idx = [&](int k) { return std::to_string(k); };
    switch (v.kind) {
        case VarId::Kind::U: return "u";
        case VarId::Kind::X: return latex ? "x^{" + idx(v.i) + "}" : "x^" + idx(v.i);
        case VarId::Kind::Du: return latex ? "u_{" + idx(v.i) + "}" : "u_" + idx(v.i);
        case VarId::Kind::D2u:
            return latex ? "u_{" + idx(v.i) + idx(v.j) + "}" : "u_" + idx(v.i) + idx(v.j);
        case VarId::Kind::W: return "w";
    }
    return "?";
}

// True if the rendered form of e begins with a minus sign.
bool starts_negative(const Expr& e) {
    switch (e.kind()) {
        case Expr::Kind::Constant: return e.constant_value().sign() < 0;
        case Expr::Kind::Product: return !e.args().empty() && starts_negative(e.args().front());
        default: return false;
    }
}

Expr negate_head(const Expr& e) {
    if (e.kind() == Expr::Kind::Constant) return Expr::constant(-e.constant_value());
    if (e.kind() == Expr::Kind::Product) {
        std::vector<Expr> args = e.args();
        args.front() = negate_head(args.front());
        if (args.front().kind() == Expr::Kind::Constant &&
            args.front().constant_value().is_one() && args.size() > 1)
            args.erase(args.begin());
        return Expr::product(std::move(args));
    }
    return -e;
}

std::string render(const Expr& e, bool latex);

std::string render_atom(const Expr& e, bool latex) {
    std::string s = render(e, latex);
    if (e.kind() == Expr::Kind::Sum ||
        (e.kind() == Expr::Kind::Constant && e.constant_value().sign() < 0))
        return latex ? "\\left(" + s + "\\right)" : "(" + s + ")";
    return s;
}

std::string render(const Expr& e, bool latex) {
    switch (e.kind()) {
        case Expr::Kind::Constant: {
            const Rational& c = e.constant_value();
            if (latex && c.denominator() != 1) {
                std::string sign = c.sign() < 0 ? "-" : "";
                return sign + "\\frac{" + c.numerator().get_str().substr(c.sign() < 0 ? 1 : 0) +
                       "}{" + c.denominator().get_str() + "}";
            }
            return c.str();
        }
        case Expr::Kind::Variable: return var_name(e.var(), latex);
        case Expr::Kind::Sum: {
            std::string s;
            bool first = true;
            for (const Expr& a : e.args()) {
                if (first) {
                    s = render(a, latex);
                    first = false;
                } else if (starts_negative(a)) {
                    s += " - " + render(negate_head(a), latex);
                } else {
                    s += " + " + render(a, latex);
                }
            }
            return s;
        }
        case Expr::Kind::Product: {
            // Fold a leading +-1 coefficient into a bare sign.
            std::vector<Expr> args = e.args();
            std::string prefix;
            if (!args.empty() && args.front().kind() == Expr::Kind::Constant && args.size() > 1) {
                Rational c = args.front().constant_value();
                if (c == Rational(-1)) {
                    prefix = "-";
                    args.erase(args.begin());
                } else if (c.is_one()) {
                    args.erase(args.begin());
                }
            }
            std::string s;
            for (std::size_t i = 0; i < args.size(); ++i) {
                if (i) s += latex ? " " : "*";
                s += render_atom(args[i], latex);
            }
            return prefix + s;
        }
        case Expr::Kind::Power: {
            std::string b = render_atom(e.base(), latex);
            if (e.base().kind() == Expr::Kind::Power || e.base().kind() == Expr::Kind::Product)
                b = latex ? "\\left(" + b + "\\right)" : "(" + b + ")";
            std::string k = std::to_string(e.exponent());
            return latex ? b + "^{" + k + "}" : b + "^" + k;
        }
    }
    return "?";
}

const char* kind_string(VarId::Kind k) {
    switch (k) {
        case VarId::Kind::U: return "u";
        case VarId::Kind::X: return "x";
        case VarId::Kind::Du: return "du";
        case VarId::Kind::D2u: return "d2u";
        case VarId::Kind::W: return "w";
    }
    return "?";
}

nlohmann::json to_json_node(const Expr& e) {
    using nlohmann::json;
    switch (e.kind()) {
        case Expr::Kind::Constant: return json{{"c", e.constant_value().str()}};
        case Expr::Kind::Variable: {
            VarId v = e.var();
            json idx = json::array();
            if (v.kind == VarId::Kind::X || v.kind == VarId::Kind::Du) idx.push_back(v.i);
            if (v.kind == VarId::Kind::D2u) {
                idx.push_back(v.i);
                idx.push_back(v.j);
            }
            return json{{"v", {{"kind", kind_string(v.kind)}, {"idx", idx}}}};
        }
        case Expr::Kind::Sum:
        case Expr::Kind::Product: {
            json args = json::array();
            for (const Expr& a : e.args()) args.push_back(to_json_node(a));
            return json{{"op", e.kind() == Expr::Kind::Sum ? "+" : "*"}, {"args", args}};
        }
        case Expr::Kind::Power: {
            json args = json::array();
            args.push_back(to_json_node(e.base()));
            args.push_back(json{{"c", std::to_string(e.exponent())}});
            return json{{"op", "^"}, {"args", args}};
        }
    }
    return nullptr;
}

Expr from_json_node(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("expression node must be an object", 0);
    if (j.contains("c")) {
        if (j.at("c").is_number_integer())
            return Expr::integer(j.at("c").get<long>());
        return Expr::constant(Rational::from_string(j.at("c").get<std::string>()));
    }
    if (j.contains("v")) {
        const auto& v = j.at("v");
        std::string kind = v.at("kind").get<std::string>();
        std::vector<int> idx;
        if (v.contains("idx"))
            for (const auto& k : v.at("idx")) idx.push_back(k.get<int>());
        if (kind == "u") return Expr::u();
        if (kind == "w") return Expr::w();
        if (kind == "x" && idx.size() == 1) return Expr::x(idx[0]);
        if (kind == "du" && idx.size() == 1) return Expr::du(idx[0]);
        if (kind == "d2u" && idx.size() == 2) return Expr::d2u(idx[0], idx[1]);
        throw ParseError("invalid variable node: kind=" + kind, 0);
    }
    if (j.contains("op")) {
        std::string op = j.at("op").get<std::string>();
        const auto& args = j.at("args");
        if (op == "^") {
            if (args.size() != 2) throw ParseError("power node needs [base, exponent]", 0);
            Expr base = from_json_node(args[0]);
            const auto& en = args[1];
            long k = 0;
            if (en.is_object() && en.contains("c")) {
                if (en.at("c").is_number_integer()) {
                    k = en.at("c").get<long>();
                } else {
                    Rational r = Rational::from_string(en.at("c").get<std::string>());
                    if (r.denominator() != 1) throw ParseError("power exponent must be integer", 0);
                    k = r.numerator().get_si();
                }
            } else if (en.is_number_integer()) {
                k = en.get<long>();
            } else {
                throw ParseError("power exponent must be an integer constant", 0);
            }
            return Expr::power(std::move(base), static_cast<int>(k));
        }
        std::vector<Expr> parsed;
        for (const auto& a : args) parsed.push_back(from_json_node(a));
        if (op == "+") return Expr::sum(std::move(parsed));
        if (op == "*") return Expr::product(std::move(parsed));
        throw ParseError("unknown operator: " + op, 0);
    }
    throw ParseError("expression node must contain 'c', 'v' or 'op'", 0);
}

}  // namespace

std::string emit(const Expr& e, EmitFormat format) {
    switch (format) {
        case EmitFormat::Text: return render(e, false);
        case EmitFormat::Latex: return render(e, true);
        case EmitFormat::Json: return to_json_node(e).dump();
    }
    return {};
}

Expr parse_expr_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& err) {
        throw ParseError(std::string("invalid JSON: ") + err.what(), err.byte);
    }
    return from_json_node(j);
}

}  // namespace invpde
