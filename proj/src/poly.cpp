#include "poly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace invpde::detail {

Monomial mono_mul(const Monomial& a, const Monomial& b) {
    Monomial r;
    r.factors.reserve(a.factors.size() + b.factors.size());
    auto ia = a.factors.begin(), ib = b.factors.begin();
    while (ia != a.factors.end() && ib != b.factors.end()) {
        if (ia->first == ib->first) {
            r.factors.emplace_back(ia->first, ia->second + ib->second);
            ++ia;
            ++ib;
        } else if (ia->first < ib->first) {
            r.factors.push_back(*ia++);
        } else {
            r.factors.push_back(*ib++);
        }
    }
    r.factors.insert(r.factors.end(), ia, a.factors.end());
    r.factors.insert(r.factors.end(), ib, b.factors.end());
    return r;
}

std::optional<Monomial> mono_div(const Monomial& a, const Monomial& b) {
    Monomial r;
    auto ia = a.factors.begin();
    for (const auto& [v, e] : b.factors) {
        while (ia != a.factors.end() && ia->first < v) r.factors.push_back(*ia++);
        if (ia == a.factors.end() || !(ia->first == v) || ia->second < e) return std::nullopt;
        if (ia->second > e) r.factors.emplace_back(v, ia->second - e);
        ++ia;
    }
    r.factors.insert(r.factors.end(), ia, a.factors.end());
    return r;
}

bool mono_less(const Monomial& a, const Monomial& b) {
    const int da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    // Lex over variables in VarId order: at the first variable where the
    // exponents differ, the larger exponent wins.
    auto ia = a.factors.begin(), ib = b.factors.begin();
    while (ia != a.factors.end() && ib != b.factors.end()) {
        if (ia->first == ib->first) {
            if (ia->second != ib->second) return ia->second < ib->second;
            ++ia;
            ++ib;
        } else if (ia->first < ib->first) {
            // a has a positive exponent on an earlier variable, b has zero.
            return false;
        } else {
            return true;
        }
    }
    if (ia != a.factors.end()) return false;
    if (ib != b.factors.end()) return true;
    return false;
}

Poly Poly::constant(const Rational& c) {
    Poly p;
    if (!c.is_zero()) p.terms_.emplace(Monomial{}, c);
    return p;
}

Poly Poly::var(VarId v) {
    Poly p;
    Monomial m;
    m.factors.emplace_back(v, 1);
    p.terms_.emplace(std::move(m), Rational(1));
    return p;
}

Rational Poly::constant_value() const {
    if (terms_.empty()) return Rational(0);
    return terms_.begin()->second;
}

void Poly::add_term(const Monomial& m, const Rational& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        terms_.emplace(m, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

Poly Poly::operator-() const {
    Poly r;
    for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
    return r;
}

Poly operator+(const Poly& a, const Poly& b) {
    Poly r = a;
    for (const auto& [m, c] : b.terms_) r.add_term(m, c);
    return r;
}

Poly operator-(const Poly& a, const Poly& b) {
    Poly r = a;
    for (const auto& [m, c] : b.terms_) r.add_term(m, -c);
    return r;
}

Poly operator*(const Poly& a, const Poly& b) {
    Poly r;
    for (const auto& [ma, ca] : a.terms_)
        for (const auto& [mb, cb] : b.terms_) r.add_term(mono_mul(ma, mb), ca * cb);
    return r;
}

Poly Poly::scaled(const Rational& c) const {
    Poly r;
    if (c.is_zero()) return r;
    for (const auto& [m, coeff] : terms_) r.terms_.emplace(m, coeff * c);
    return r;
}

Poly Poly::mul_monomial(const Monomial& m, const Rational& c) const {
    Poly r;
    if (c.is_zero()) return r;
    for (const auto& [mm, coeff] : terms_) r.terms_.emplace(mono_mul(mm, m), coeff * c);
    return r;
}

Poly Poly::pow(int e) const {
    if (e < 0) throw std::logic_error("Poly::pow negative exponent");
    Poly r = Poly::one();
    Poly base = *this;
    while (e > 0) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

int Poly::degree_in(VarId v) const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.exponent_of(v));
    return d;
}

std::vector<VarId> Poly::variables() const {
    std::vector<VarId> vars;
    for (const auto& [m, c] : terms_)
        for (const auto& [v, e] : m.factors)
            if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    std::sort(vars.begin(), vars.end());
    return vars;
}

Poly scalar_primitive(const Poly& p) {
    if (p.is_zero()) return p;
    mpz_class num_gcd = 0, den_lcm = 1;
    for (const auto& [m, c] : p.terms()) {
        mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), c.numerator().get_mpz_t());
        mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), c.denominator().get_mpz_t());
    }
    Rational scale{mpq_class(den_lcm, num_gcd)};
    if (p.leading_coefficient().sign() < 0) scale = -scale;
    return p.scaled(scale);
}

std::optional<Poly> try_exact_div(const Poly& p, const Poly& d) {
    if (d.is_zero()) return std::nullopt;
    if (d.is_constant()) return p.scaled(Rational(1) / d.constant_value());
    Poly q;
    Poly r = p;
    const Monomial& dm = d.leading_monomial();
    const Rational& dc = d.leading_coefficient();
    while (!r.is_zero()) {
        auto m = mono_div(r.leading_monomial(), dm);
        if (!m) return std::nullopt;
        Rational c = r.leading_coefficient() / dc;
        q.add_term(*m, c);
        r = r - d.mul_monomial(*m, c);
    }
    return q;
}

Poly exact_div(const Poly& p, const Poly& d) {
    auto q = try_exact_div(p, d);
    if (!q) throw std::logic_error("exact_div: not divisible");
    return *q;
}

namespace {

// Univariate view in a chosen main variable: x-degree -> coefficient poly.
std::map<int, Poly> decompose(const Poly& p, VarId x) {
    std::map<int, Poly> coeffs;
    for (const auto& [m, c] : p.terms()) {
        int e = m.exponent_of(x);
        Monomial rest;
        for (const auto& [v, k] : m.factors)
            if (!(v == x)) rest.factors.emplace_back(v, k);
        coeffs[e].add_term(rest, c);
    }
    return coeffs;
}

Poly recompose(const std::map<int, Poly>& coeffs, VarId x) {
    Poly p;
    for (const auto& [e, coeff] : coeffs) {
        Monomial xm;
        if (e > 0) xm.factors.emplace_back(x, e);
        for (const auto& [m, c] : coeff.terms()) p.add_term(mono_mul(xm, m), c);
    }
    return p;
}

Poly content_in(const Poly& p, VarId x) {
    Poly g;
    for (const auto& [e, coeff] : decompose(p, x)) g = poly_gcd(g, coeff);
    return g;
}

int degree_of(const std::map<int, Poly>& u) { return u.empty() ? -1 : u.rbegin()->first; }

// Pseudo-remainder of univariate-view polynomials (coefficients are polys).
// Scaling by powers of lc(b) is irrelevant here: the caller strips content.
std::map<int, Poly> prem_uni(std::map<int, Poly> r, const std::map<int, Poly>& b) {
    const int db = degree_of(b);
    const Poly& lb = b.rbegin()->second;
    while (degree_of(r) >= db && degree_of(r) >= 0) {
        const int dr = degree_of(r);
        Poly lr = r.rbegin()->second;
        std::map<int, Poly> next;
        // next = lb*r - lr * x^(dr-db) * b ; the x^dr coefficient cancels.
        for (const auto& [e, c] : r) next[e] = lb * c;
        for (const auto& [e, c] : b) {
            int k = e + dr - db;
            auto it = next.find(k);
            if (it == next.end())
                next[k] = -(lr * c);
            else
                it->second = it->second - lr * c;
        }
        for (auto it = next.begin(); it != next.end();)
            it = it->second.is_zero() ? next.erase(it) : std::next(it);
        r = std::move(next);
    }
    return r;
}

}  // namespace

namespace {

// Common monomial factor of all terms.
Monomial monomial_content(const Poly& p) {
    Monomial m = p.terms().begin()->first;
    for (const auto& [mm, c] : p.terms()) {
        if (m.empty()) break;
        std::vector<std::pair<VarId, int>> kept;
        for (const auto& [v, e] : m.factors) {
            int other = mm.exponent_of(v);
            if (other > 0) kept.emplace_back(v, std::min(e, other));
        }
        m.factors = std::move(kept);
    }
    return m;
}

Monomial mono_common(const Monomial& a, const Monomial& b) {
    Monomial r;
    for (const auto& [v, e] : a.factors) {
        int other = b.exponent_of(v);
        if (other > 0) r.factors.emplace_back(v, std::min(e, other));
    }
    return r;
}

// Substitutes the integer xi for x. Assumes integer coefficients.
Poly eval_var(const Poly& p, VarId x, const mpz_class& xi) {
    Poly r;
    for (const auto& [m, c] : p.terms()) {
        int e = m.exponent_of(x);
        Monomial rest;
        for (const auto& [v, k] : m.factors)
            if (!(v == x)) rest.factors.emplace_back(v, k);
        mpz_class val = c.numerator();
        if (e > 0) {
            mpz_class pw;
            mpz_pow_ui(pw.get_mpz_t(), xi.get_mpz_t(), static_cast<unsigned long>(e));
            val *= pw;
        }
        r.add_term(rest, Rational(mpq_class(val)));
    }
    return r;
}

// Coefficient-wise balanced residue in (-xi/2, xi/2].
Poly balanced_digit(const Poly& p, const mpz_class& xi) {
    Poly r;
    mpz_class half = xi / 2;
    for (const auto& [m, c] : p.terms()) {
        mpz_class d;
        mpz_fdiv_r(d.get_mpz_t(), c.numerator().get_mpz_t(), xi.get_mpz_t());
        if (d > half) d -= xi;
        if (d != 0) r.add_term(m, Rational(mpq_class(d)));
    }
    return r;
}

mpz_class max_abs_coeff(const Poly& p) {
    mpz_class m = 0;
    for (const auto& [mm, c] : p.terms()) {
        mpz_class a = abs(c.numerator());
        if (a > m) m = a;
    }
    return m;
}

// Heuristic gcd over Z (Char & Geddes & Gonnet): evaluate one variable at a
// large integer, take the gcd recursively, lift back via balanced base-xi
// digits and certify with exact divisions. Las Vegas: retries with a larger
// evaluation point until the certificate holds.
std::optional<Poly> gcd_heu(const Poly& a, const Poly& b, int depth) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.is_constant() && b.is_constant()) {
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), a.constant_value().numerator().get_mpz_t(),
                b.constant_value().numerator().get_mpz_t());
        return Poly::constant(Rational(mpq_class(g)));
    }
    if (depth > 24) return std::nullopt;

    // Main variable: smallest combined degree among variables present.
    std::vector<VarId> vars = a.variables();
    for (VarId v : b.variables())
        if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    VarId x = vars.front();
    int best = a.degree_in(x) + b.degree_in(x);
    for (VarId v : vars) {
        int d = a.degree_in(v) + b.degree_in(v);
        if (d < best) {
            best = d;
            x = v;
        }
    }

    mpz_class na = max_abs_coeff(a), nb = max_abs_coeff(b);
    mpz_class xi = 2 * (na < nb ? na : nb) + 2;
    if (xi < 4) xi = 4;

    for (int attempt = 0; attempt < 8; ++attempt) {
        Poly ae = eval_var(a, x, xi);
        Poly be = eval_var(b, x, xi);
        std::optional<Poly> ge = gcd_heu(ae, be, depth + 1);
        if (ge) {
            // Lift g back to a polynomial in x.
            Poly g = *ge;
            Poly lifted;
            Monomial xm;
            xm.factors.emplace_back(x, 1);
            Monomial xpow;  // x^i
            for (int i = 0; !g.is_zero(); ++i) {
                if (i > 0) xpow = mono_mul(xpow, xm);
                Poly digit = balanced_digit(g, xi);
                if (i == 0)
                    lifted = lifted + digit;
                else
                    lifted = lifted + digit.mul_monomial(xpow, Rational(1));
                g = (g - digit).scaled(Rational(mpq_class(mpz_class(1), xi)));
            }
            if (!lifted.is_zero()) {
                lifted = scalar_primitive(lifted);
                if (try_exact_div(a, lifted) && try_exact_div(b, lifted)) return lifted;
            }
        }
        xi = xi * 37 / 5 + 29;  // grow the evaluation point and retry
    }
    return std::nullopt;
}

// Primitive PRS fallback; correct but slow on many variables.
Poly gcd_prs(const Poly& a, const Poly& b) {
    std::vector<VarId> va = a.variables();
    std::vector<VarId> vb = b.variables();
    std::optional<VarId> main;
    int best = 0;
    for (VarId v : va) {
        if (std::find(vb.begin(), vb.end(), v) == vb.end()) continue;
        int d = std::max(a.degree_in(v), b.degree_in(v));
        if (!main || d < best) {
            main = v;
            best = d;
        }
    }
    if (!main) return Poly::one();
    const VarId x = *main;

    Poly ca = content_in(a, x);
    Poly cb = content_in(b, x);
    Poly ppa = scalar_primitive(exact_div(a, ca));
    Poly ppb = scalar_primitive(exact_div(b, cb));
    Poly gc = poly_gcd(ca, cb);

    std::map<int, Poly> r0 = decompose(ppa, x);
    std::map<int, Poly> r1 = decompose(ppb, x);
    if (degree_of(r0) < degree_of(r1)) std::swap(r0, r1);

    Poly gpp;
    while (true) {
        std::map<int, Poly> r2 = prem_uni(r0, r1);
        if (r2.empty()) {
            Poly g1 = recompose(r1, x);
            Poly cont = content_in(g1, x);
            gpp = scalar_primitive(exact_div(g1, cont));
            break;
        }
        if (degree_of(r2) == 0) {
            gpp = Poly::one();
            break;
        }
        Poly p2 = recompose(r2, x);
        Poly cont = content_in(p2, x);
        p2 = scalar_primitive(exact_div(p2, cont));
        r0 = std::move(r1);
        r1 = decompose(p2, x);
    }
    return scalar_primitive(gc * gpp);
}

}  // namespace

Poly poly_gcd(const Poly& a, const Poly& b) {
    if (a.is_zero()) return scalar_primitive(b);
    if (b.is_zero()) return scalar_primitive(a);
    if (a.is_constant() || b.is_constant()) return Poly::one();
    if (try_exact_div(a, b)) return scalar_primitive(b);
    if (try_exact_div(b, a)) return scalar_primitive(a);

    // Pull out the common monomial factor, then run the heuristic gcd on the
    // integer-primitive parts.
    Monomial shared = mono_common(monomial_content(a), monomial_content(b));
    Poly pa = scalar_primitive(a);
    Poly pb = scalar_primitive(b);
    if (!shared.empty()) {
        Poly m;
        m.add_term(shared, Rational(1));
        pa = exact_div(pa, m);
        pb = exact_div(pb, m);
    }
    std::optional<Poly> g = gcd_heu(pa, pb, 0);
    Poly core = g ? *g : gcd_prs(pa, pb);
    if (!shared.empty()) {
        Poly m;
        m.add_term(shared, Rational(1));
        core = core * m;
    }
    return scalar_primitive(core);
}

namespace {

std::optional<Rational> rational_sqrt(const Rational& r) {
    if (r.sign() < 0) return std::nullopt;
    mpz_class num = r.numerator(), den = r.denominator();
    if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t()))
        return std::nullopt;
    mpz_class sn, sd;
    mpz_sqrt(sn.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(sd.get_mpz_t(), den.get_mpz_t());
    return Rational(mpq_class(sn, sd));
}

}  // namespace

std::optional<Poly> poly_sqrt(const Poly& p) {
    if (p.is_zero()) return Poly::zero();
    const Monomial& lm = p.leading_monomial();
    Monomial half;
    for (const auto& [v, e] : lm.factors) {
        if (e % 2 != 0) return std::nullopt;
        half.factors.emplace_back(v, e / 2);
    }
    auto lc = rational_sqrt(p.leading_coefficient());
    if (!lc) return std::nullopt;
    Poly s;
    s.add_term(half, *lc);
    Rational twice_lc = Rational(2) * (*lc);
    for (int guard = 0; guard < 4 * static_cast<int>(p.term_count()) + 16; ++guard) {
        Poly diff = p - s * s;
        if (diff.is_zero()) return s;
        auto m = mono_div(diff.leading_monomial(), half);
        if (!m) return std::nullopt;
        s.add_term(*m, diff.leading_coefficient() / twice_lc);
    }
    return std::nullopt;
}

std::optional<RatFun> ratfun_sqrt(const RatFun& rf) {
    auto sn = poly_sqrt(rf.num);
    if (!sn) return std::nullopt;
    auto sd = poly_sqrt(rf.den);
    if (!sd) return std::nullopt;
    return rf_make(std::move(*sn), std::move(*sd));
}

Poly detg_poly(int n) {
    Poly p = Poly::one();
    for (int i = 1; i <= n; ++i) p = p + Poly::var(VarId::du(i)) * Poly::var(VarId::du(i));
    return p;
}

Poly reduce_w(const Poly& p, int n) {
    const VarId w = VarId::w();
    bool needs = false;
    for (const auto& [m, c] : p.terms())
        if (m.exponent_of(w) >= 2) {
            needs = true;
            break;
        }
    if (!needs) return p;
    std::vector<Poly> detg_pows{Poly::one(), detg_poly(n)};
    auto detg_pow = [&](int k) -> const Poly& {
        while (static_cast<int>(detg_pows.size()) <= k)
            detg_pows.push_back(detg_pows.back() * detg_pows[1]);
        return detg_pows[k];
    };
    Poly r;
    for (const auto& [m, c] : p.terms()) {
        int e = m.exponent_of(w);
        if (e < 2) {
            r.add_term(m, c);
            continue;
        }
        Monomial rest;
        for (const auto& [v, k] : m.factors)
            if (!(v == w)) rest.factors.emplace_back(v, k);
        if (e & 1) rest = mono_mul(rest, Monomial{{{w, 1}}});
        for (const auto& [dm, dc] : detg_pow(e / 2).terms()) r.add_term(mono_mul(rest, dm), dc * c);
    }
    return r;
}

RatFun rf_make(Poly num, Poly den) {
    if (den.is_zero()) throw ZeroDenominator("rational function with zero denominator");
    if (num.is_zero()) return RatFun{Poly::zero(), Poly::one()};
    if (!den.is_constant()) {
        // Cheap detg-power peeling happens implicitly through the exact
        // trial-division fast paths inside poly_gcd.
        Poly g = poly_gcd(num, den);
        if (!g.is_constant()) {
            num = exact_div(num, g);
            den = exact_div(den, g);
        }
    }
    Rational lc = den.leading_coefficient();
    if (!lc.is_one()) {
        Rational inv = Rational(1) / lc;
        num = num.scaled(inv);
        den = den.scaled(inv);
    }
    return RatFun{std::move(num), std::move(den)};
}

RatFun rf_add(const RatFun& a, const RatFun& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    Poly g = poly_gcd(a.den, b.den);
    Poly da = g.is_constant() ? a.den : exact_div(a.den, g);
    Poly db = g.is_constant() ? b.den : exact_div(b.den, g);
    Poly num = a.num * db + b.num * da;
    Poly den = a.den * db;
    return rf_make(std::move(num), std::move(den));
}

RatFun rf_neg(const RatFun& a) { return RatFun{-a.num, a.den}; }

RatFun rf_mul(const RatFun& a, const RatFun& b, int n) {
    if (a.is_zero() || b.is_zero()) return RatFun{Poly::zero(), Poly::one()};
    // Cross-reduce first to keep the product small.
    Poly g1 = poly_gcd(a.num, b.den);
    Poly g2 = poly_gcd(b.num, a.den);
    Poly na = g1.is_constant() ? a.num : exact_div(a.num, g1);
    Poly db = g1.is_constant() ? b.den : exact_div(b.den, g1);
    Poly nb = g2.is_constant() ? b.num : exact_div(b.num, g2);
    Poly da = g2.is_constant() ? a.den : exact_div(a.den, g2);
    Poly num = reduce_w(na * nb, n);
    Poly den = da * db;
    return rf_make(std::move(num), std::move(den));
}

RatFun rf_inv(const RatFun& a, int n) {
    if (a.is_zero()) throw ZeroDenominator("inverse of zero expression");
    const VarId w = VarId::w();
    Poly p0, p1;  // num = p0 + p1*w
    for (const auto& [m, c] : a.num.terms()) {
        if (m.exponent_of(w) == 0) {
            p0.add_term(m, c);
        } else {
            Monomial rest;
            for (const auto& [v, k] : m.factors)
                if (!(v == w)) rest.factors.emplace_back(v, k);
            p1.add_term(rest, c);
        }
    }
    if (p1.is_zero()) return rf_make(a.den, p0);
    // 1/(p0 + p1 w) = (p0 - p1 w) / (p0^2 - p1^2 det g); det g is not a
    // square in Q(jet vars), so the denominator vanishes only for num = 0.
    Poly wvar = Poly::var(w);
    Poly conj = p0 - p1 * wvar;
    Poly nrm = p0 * p0 - p1 * p1 * detg_poly(n);
    return rf_make(a.den * conj, std::move(nrm));
}

RatFun rf_pow(const RatFun& a, int e, int n) {
    if (e == 0) {
        if (a.is_zero()) return RatFun{Poly::one(), Poly::one()};
        return RatFun{Poly::one(), Poly::one()};
    }
    RatFun base = e > 0 ? a : rf_inv(a, n);
    int k = e > 0 ? e : -e;
    RatFun r{Poly::one(), Poly::one()};
    while (k > 0) {
        if (k & 1) r = rf_mul(r, base, n);
        base = rf_mul(base, base, n);
        k >>= 1;
    }
    return r;
}

bool rf_equal(const RatFun& a, const RatFun& b) { return a.num == b.num && a.den == b.den; }

}  // namespace invpde::detail
