#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "invpde/euclidean.hpp"
#include "invpde/harness.hpp"
#include "invpde/invariant_poly.hpp"
#include "testutil.hpp"

using namespace invpde;
using namespace invpde::testutil;

namespace {

Expr subst_du_zero(const Expr& e, int n) {
    std::map<VarId, Expr> bind;
    for (int i = 1; i <= n; ++i) bind[VarId::du(i)] = Expr::integer(0);
    return substitute(e, bind, n);
}

EuclideanMotion rotation2d(double theta) {
    EuclideanMotion m;
    m.R = MatD(2, 2);
    m.R(0, 0) = std::cos(theta);
    m.R(0, 1) = -std::sin(theta);
    m.R(1, 0) = std::sin(theta);
    m.R(1, 1) = std::cos(theta);
    m.t = {0.0, 0.0};
    return m;
}

}  // namespace

TEST_CASE("metric data") {
    SUBCASE("n=1: det g = 1 + u_1^2") {
        MetricData md = metric_data(1);
        CHECK(nf_equal(md.detg, Expr::integer(1) + pow(Expr::du(1), 2), 1));
    }
    SUBCASE("n=2 flat gauge: g = I, beta = d2u") {
        MetricData md = metric_data(2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                Expr gij = subst_du_zero(md.g(i, j), 2);
                CHECK(gij == Expr::integer(i == j ? 1 : 0));
                Expr bij = subst_du_zero(md.beta(i, j), 2);
                CHECK(nf_equal(bij, Expr::d2u(i + 1, j + 1), 2));
            }
    }
    SUBCASE("n=2 at u_1=1, u_2=0: g^{-1} = diag(1/2, 1)") {
        // Independent oracle: invert the 2x2 matrix diag-plus-rank-one by hand.
        MetricData md = metric_data(2);
        std::map<VarId, Expr> bind = {{VarId::du(1), Expr::integer(1)},
                                      {VarId::du(2), Expr::integer(0)}};
        CHECK(substitute(md.ginv(0, 0), bind, 2) == Expr::constant(Rational(1, 2)));
        CHECK(substitute(md.ginv(1, 1), bind, 2) == Expr::integer(1));
        CHECK(nf_is_zero(substitute(md.ginv(0, 1), bind, 2), 2));
    }
    SUBCASE("g g^{-1} = I exactly for n = 1..4") {
        for (int n = 1; n <= 4; ++n) {
            MetricData md = metric_data(n);
            ExprMat prod = md.g * md.ginv;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    CHECK(nf_equal(prod(i, j), Expr::integer(i == j ? 1 : 0), n));
        }
    }
}

TEST_CASE("shape operator") {
    SUBCASE("flat gauge: A = d2u") {
        ExprMat a = shape_operator(2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                CHECK(nf_equal(subst_du_zero(a(i, j), 2), Expr::d2u(i + 1, j + 1), 2));
    }
    SUBCASE("sphere jet: A = I / r") {
        // du = 0, d2u = delta/r with r = 3 (rational substitution).
        ExprMat a = shape_operator(2);
        std::map<VarId, Expr> bind = {{VarId::du(1), Expr::integer(0)},
                                      {VarId::du(2), Expr::integer(0)},
                                      {VarId::d2u(1, 1), Expr::constant(Rational(1, 3))},
                                      {VarId::d2u(1, 2), Expr::integer(0)},
                                      {VarId::d2u(2, 2), Expr::constant(Rational(1, 3))}};
        CHECK(substitute(a(0, 0), bind, 2) == Expr::constant(Rational(1, 3)));
        CHECK(substitute(a(1, 1), bind, 2) == Expr::constant(Rational(1, 3)));
        CHECK(nf_is_zero(substitute(a(0, 1), bind, 2), 2));
    }
    SUBCASE("zero jet: A = 0") {
        ExprMat a = shape_operator(2);
        std::map<VarId, Expr> bind;
        for (int i = 1; i <= 2; ++i) {
            bind[VarId::du(i)] = Expr::integer(0);
            for (int j = i; j <= 2; ++j) bind[VarId::d2u(i, j)] = Expr::integer(0);
        }
        for (const Expr& e : a.a) CHECK(nf_is_zero(substitute(e, bind, 2), 2));
    }
}

TEST_CASE("power traces") {
    SUBCASE("tau_1 restricted to du = 0 is the Laplacian") {
        auto taus = power_traces(2);
        CHECK(nf_equal(subst_du_zero(taus[0], 2), Expr::d2u(1, 1) + Expr::d2u(2, 2), 2));
    }
    SUBCASE("zero jet: all traces vanish") {
        auto taus = power_traces(2);
        JetPoint2 z = JetPoint2::zero(2);
        for (const Expr& t : taus) CHECK(eval_numeric(t, z) == 0.0);
    }
    SUBCASE("unit sphere jet: tau_1 = 2, tau_2 = 2") {
        auto taus = power_traces(2);
        JetPoint2 p = JetPoint2::zero(2);
        p.d2(0, 0) = p.d2(1, 1) = 1.0;
        CHECK(eval_numeric(taus[0], p) == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(eval_numeric(taus[1], p) == doctest::Approx(2.0).epsilon(1e-14));
    }
    SUBCASE("tau_1 equals the displayed trace formula exactly") {
        // sum_ij (det(g) delta_ij - u_i u_j) u_ij / det(g)^{3/2}, with
        // det(g)^{3/2} written as det(g) * w.
        const int n = 2;
        Expr detg = detg_expr(n);
        std::vector<Expr> terms;
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j) {
                Expr delta = Expr::integer(i == j ? 1 : 0);
                terms.push_back((detg * delta - Expr::du(i) * Expr::du(j)) * Expr::d2u(i, j));
            }
        Expr display = Expr::sum(terms) / (detg * Expr::w());
        CHECK(nf_equal(power_traces(n)[0], display, n));
    }
}

TEST_CASE("newton_sigma") {
    SUBCASE("tau = (2,2) gives sigma = (2,1)") {
        auto s = newton_sigma(std::vector<double>{2.0, 2.0});
        CHECK(s[0] == doctest::Approx(2.0));
        CHECK(s[1] == doctest::Approx(1.0));
    }
    SUBCASE("zero taus give zero sigmas") {
        auto s = newton_sigma(std::vector<double>{0.0, 0.0, 0.0});
        for (double v : s) CHECK(v == 0.0);
    }
    SUBCASE("matches characteristic polynomial coefficients on random matrices") {
        SplitMix64 rng(111);
        for (int trial = 0; trial < 200; ++trial) {
            const int n = 3;
            MatD m(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) m(i, j) = m(j, i) = rng.uniform(-2, 2);
            std::vector<double> taus;
            MatD p = m;
            taus.push_back(p.trace());
            for (int k = 2; k <= n; ++k) {
                p = p * m;
                taus.push_back(p.trace());
            }
            auto sigma = newton_sigma(taus);
            // Brute-force char-poly oracle: det(mu I - m) expanded for 3x3.
            double a = m(0, 0), b = m(0, 1), c = m(0, 2);
            double d = m(1, 1), e = m(1, 2), f = m(2, 2);
            double e1 = a + d + f;
            double e2 = a * d + a * f + d * f - b * b - c * c - e * e;
            double e3 = a * (d * f - e * e) - b * (b * f - e * c) + c * (b * e - d * c);
            CHECK(close_rel(sigma[0], e1, 1e-12));
            CHECK(close_rel(sigma[1], e2, 1e-12));
            CHECK(close_rel(sigma[2], e3, 1e-12));
        }
    }
}

TEST_CASE("generate_euclidean_pde") {
    SUBCASE("minimal surface equation, n=2") {
        auto pde = generate_euclidean_pde(parse_poly("t1", InvariantPoly::Family::Euclidean), 2);
        Expr expected = (Expr::integer(1) + pow(Expr::du(2), 2)) * Expr::d2u(1, 1) -
                        Rational(2) * (Expr::du(1) * Expr::du(2) * Expr::d2u(1, 2)) +
                        (Expr::integer(1) + pow(Expr::du(1), 2)) * Expr::d2u(2, 2);
        CHECK(pde.numerator == normalize(expected, 2));
        // numerator = F * cleared holds exactly
        auto taus = power_traces(2);
        CHECK(nf_equal(pde.numerator, taus[0] * pde.cleared, 2));
    }
    SUBCASE("Monge-Ampere from 1/2 (tau_1^2 - tau_2)") {
        auto pde = generate_euclidean_pde(
            parse_poly("1/2*t1^2 - 1/2*t2", InvariantPoly::Family::Euclidean), 2);
        Expr expected = Expr::d2u(1, 1) * Expr::d2u(2, 2) - pow(Expr::d2u(1, 2), 2);
        CHECK(pde.numerator == normalize(expected, 2));
        auto taus = power_traces(2);
        Expr f = Rational(1, 2) * (taus[0] * taus[0] - taus[1]);
        CHECK(nf_equal(pde.numerator, f * pde.cleared, 2));
    }
    SUBCASE("tau_1 vanishes at the zero jet") {
        auto pde = generate_euclidean_pde(parse_poly("t1", InvariantPoly::Family::Euclidean), 2);
        CHECK(eval_numeric(pde.numerator, JetPoint2::zero(2)) == 0.0);
    }
    SUBCASE("zero polynomial is rejected") {
        CHECK_THROWS_AS(generate_euclidean_pde(
                            parse_poly("t1 - t1", InvariantPoly::Family::Euclidean), 2),
                        EmptyEquation);
    }
}

TEST_CASE("euclidean_act") {
    SUBCASE("pure translation shifts u and x only") {
        JetPoint2 p = sample_jet(2, 7, 1.0);
        EuclideanMotion m;
        m.R = MatD::identity(3);
        m.t = {0.5, -1.0, 2.0};
        JetPoint2 q = euclidean_act(m, p);
        CHECK(q.u == doctest::Approx(p.u + 0.5).epsilon(1e-15));
        CHECK(q.x[0] == doctest::Approx(p.x[0] - 1.0).epsilon(1e-15));
        CHECK(q.x[1] == doctest::Approx(p.x[1] + 2.0).epsilon(1e-15));
        for (int i = 0; i < 2; ++i) CHECK(q.du[i] == doctest::Approx(p.du[i]).epsilon(1e-15));
        for (int k = 0; k < 4; ++k) CHECK(q.d2u[k] == doctest::Approx(p.d2u[k]).epsilon(1e-15));
    }
    SUBCASE("quarter turn makes a flat tangent vertical") {
        JetPoint2 p = JetPoint2::zero(1);
        p.d2(0, 0) = 1.0;
        CHECK_THROWS_AS(euclidean_act(rotation2d(M_PI / 2), p), NonAdmissible);
    }
    SUBCASE("curvature of a parabola is preserved under a rotation") {
        JetPoint2 p = JetPoint2::zero(1);
        p.d2(0, 0) = 1.0;
        JetPoint2 q = euclidean_act(rotation2d(M_PI / 6), p);
        auto taus = power_traces(1);
        double before = eval_numeric(taus[0], p);
        double after = eval_numeric(taus[0], q);
        CHECK(close_rel(after, before, 1e-12));
        CHECK(before == doctest::Approx(1.0));
    }
    SUBCASE("group law: act(m2, act(m1, p)) = act(m2 m1, p)") {
        SplitMix64 rng(222);
        int done = 0;
        while (done < 100) {
            JetPoint2 p = sample_jet(2, rng.next(), 1.0);
            EuclideanMotion m1 = sample_motion(2, rng);
            EuclideanMotion m2 = sample_motion(2, rng);
            JetPoint2 q1, q2;
            try {
                q1 = euclidean_act(m2, euclidean_act(m1, p));
                q2 = euclidean_act(compose(m2, m1), p);
            } catch (const NonAdmissible&) {
                continue;
            }
            ++done;
            CHECK(close_rel(q1.u, q2.u, 1e-9));
            for (int i = 0; i < 2; ++i) {
                CHECK(close_rel(q1.x[i], q2.x[i], 1e-9));
                CHECK(close_rel(q1.du[i], q2.du[i], 1e-9));
            }
            for (int k = 0; k < 4; ++k) CHECK(close_rel(q1.d2u[k], q2.d2u[k], 1e-9));
        }
    }
    SUBCASE("non-orthogonal motion matrices are rejected") {
        EuclideanMotion bad;
        bad.R = MatD::identity(3);
        bad.R(0, 1) = 0.5;
        bad.t = {0, 0, 0};
        CHECK_THROWS_AS(euclidean_act(bad, sample_jet(2, 1, 1.0)), NotRotation);
    }
}

TEST_CASE("full invariance and cross-oracle on a quick sample") {
    for (int n = 1; n <= 3; ++n) {
        TrialReport r = run_invariance_suite(SuiteGroup::Euclidean, n, 50, 1e-9, 12345, 1);
        CHECK(r.failures == 0);
        CHECK(r.trials == 50);
    }
    // symbolic tau against direct floating assembly of g^{-1} beta
    SplitMix64 rng(333);
    for (int n = 1; n <= 3; ++n) {
        auto taus = power_traces(n);
        for (int trial = 0; trial < 20; ++trial) {
            JetPoint2 p = sample_jet(n, rng.next(), 1.0);
            auto numeric = numeric_power_traces(p);
            for (int m = 0; m < n; ++m)
                CHECK(close_rel(eval_numeric(taus[m], p), numeric[m], 1e-12));
        }
    }
}

TEST_CASE("odd traces transform by the co-orientation character") {
    // tau_m(m p) = s^m tau_m(p) with s the sign of the transported normal's
    // u-component; motions that turn the graph past vertical flip s.
    SplitMix64 rng(555);
    for (int n = 1; n <= 3; ++n) {
        auto taus = power_traces(n);
        int done = 0;
        while (done < 200) {
            JetPoint2 p = sample_jet(n, rng.next(), 1.0);
            EuclideanMotion m = sample_motion(n, rng);
            double s_val = transported_normal_u(m, p);
            if (std::abs(s_val) < 1e-3) continue;  // too close to vertical
            double s = s_val > 0 ? 1.0 : -1.0;
            JetPoint2 q;
            try {
                q = euclidean_act(m, p);
            } catch (const NonAdmissible&) {
                continue;
            }
            ++done;
            for (int k = 0; k < n; ++k) {
                double sm = (k % 2 == 0) ? s : 1.0;  // s^m for m = k+1
                double before = eval_numeric(taus[k], p);
                double after = eval_numeric(taus[k], q);
                CHECK(close_rel(after, sm * before, 1e-9));
            }
        }
    }

    // Deterministic flips: a half turn maps the parabola u = x^2/2 to
    // u = -x^2/2, and a 1-radian turn flips a steep graph.
    JetPoint2 parabola = JetPoint2::zero(1);
    parabola.d2(0, 0) = 1.0;
    CHECK(transported_normal_u(rotation2d(M_PI), parabola) < 0);
    JetPoint2 q = euclidean_act(rotation2d(M_PI), parabola);
    CHECK(q.d2(0, 0) == doctest::Approx(-1.0).epsilon(1e-12));

    JetPoint2 steep = JetPoint2::zero(1);
    steep.du[0] = 2.0;  // already past 60 degrees
    steep.d2(0, 0) = 0.5;
    EuclideanMotion turn = rotation2d(-1.0);
    REQUIRE(transported_normal_u(turn, steep) < 0);
    JetPoint2 flipped = euclidean_act(turn, steep);
    auto tau1 = power_traces(1);
    CHECK(close_rel(eval_numeric(tau1[0], flipped), -eval_numeric(tau1[0], steep), 1e-12));
}

TEST_CASE("sphere jets are umbilic: H^2 - K = 0") {
    SplitMix64 rng(444);
    Surface s = Surface::sphere(2, 1.7);
    auto taus = power_traces(2);
    for (int trial = 0; trial < 100; ++trial) {
        JetPoint2 p = s.jet_at(s.sample_point(rng));
        double t1 = eval_numeric(taus[0], p);
        double t2 = eval_numeric(taus[1], p);
        auto sigma = newton_sigma(std::vector<double>{t1, t2});
        double H = t1 / 2, K = sigma[1];
        CHECK(std::abs(H * H - K) <= 1e-10);
        // all principal curvatures equal 1/r
        CHECK(std::abs(std::abs(H) - 1.0 / 1.7) <= 1e-12);
    }
}

TEST_CASE("report is reproducible for a fixed seed") {
    TrialReport a = run_invariance_suite(SuiteGroup::Euclidean, 2, 40, 1e-9, 99, 1);
    TrialReport b = run_invariance_suite(SuiteGroup::Euclidean, 2, 40, 1e-9, 99, 1);
    CHECK(report_to_json(a) == report_to_json(b));
    CHECK_THROWS_AS(run_invariance_suite(SuiteGroup::Euclidean, 2, 0, 1e-9, 99, 1), Error);
}
