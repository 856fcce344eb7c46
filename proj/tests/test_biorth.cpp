#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ginprod/biorth.hpp"
#include "ginprod/dual.hpp"
#include "ginprod/quadrature.hpp"

using namespace ginprod;

namespace {

// P_n from the hypergeometric closed form, coefficient by coefficient:
// (-1)^{n-l}/(n-l)! prod_{j=0}^M (l+1+nu_j)_{n-l}.
Polynomial<Rational> p_oracle(const std::vector<long>& nu, int n) {
    std::vector<Rational> c(n + 1);
    for (int l = 0; l <= n; ++l) {
        Rational v = 1;
        for (int m = l + 1; m <= n; ++m) v *= m;  // nu_0 = 0
        for (long x : nu)
            for (int m = l + 1; m <= n; ++m) v *= m + x;
        Rational f = 1;
        for (int m = 2; m <= n - l; ++m) f *= m;
        c[l] = ((n - l) % 2 ? -v : v) / f;
    }
    return Polynomial<Rational>(c);
}

std::vector<ParamSet> integer_sweep(int Mmax, int numax) {
    std::vector<ParamSet> out;
    for (int M = 1; M <= Mmax; ++M) {
        std::vector<int> idx(M, 0);
        while (true) {
            std::vector<double> nu(idx.begin(), idx.end());
            out.emplace_back(M, nu);
            int i = 0;
            while (i < M && ++idx[i] > numax) idx[i++] = 0;
            if (i == M) break;
        }
    }
    return out;
}

// The weights decay like exp(-M x^{1/M}); beyond `upper` only quadrature
// noise of q_eval is left.
double integrate_positive(const std::function<double(double)>& f, double upper, double tol) {
    AdaptiveOptions opt;
    opt.abs_tol = tol;
    opt.singular_left = true;
    return integrate_adaptive_t<double>(f, 0.0, upper, opt).value;
}

}  // namespace

TEST(PCoeffs, SmallCases) {
    auto p0 = p_coeffs(ParamSet(2, {1.0, 2.0}), 0);
    ASSERT_TRUE(p0.exact);
    EXPECT_EQ(p0.q.degree(), 0);
    EXPECT_EQ(p0.q.coeff(0), 1);

    auto p1 = p_coeffs(ParamSet(1, {0.0}), 1);
    EXPECT_EQ(p1.q.coeff(1), 1);
    EXPECT_EQ(p1.q.coeff(0), -1);

    auto p2 = p_coeffs(ParamSet(2, {1.0, 2.0}), 1);
    EXPECT_EQ(p2.q.coeff(0), -6);

    auto l2 = p_coeffs(ParamSet(1, {0.0}), 2);
    EXPECT_EQ(l2.coeff_strings(), (std::vector<std::string>{"2", "-4", "1"}));
}

TEST(PCoeffs, MatchClosedFormAndAreMonic) {
    for (const auto& p : integer_sweep(3, 2)) {
        for (int n : {0, 1, 4, 9}) {
            auto P = p_coeffs(p, n);
            ASSERT_TRUE(P.exact);
            EXPECT_EQ(P.q.coeff(n), 1);
            auto ref = p_oracle(p.integer_nu(), n);
            for (int l = 0; l <= n; ++l) EXPECT_EQ(P.q.coeff(l), ref.coeff(l)) << n << " " << l;
        }
    }
}

TEST(PCoeffs, NonIntegerPath) {
    auto P = p_coeffs(ParamSet(2, {0.5, 1.5}), 1);
    EXPECT_FALSE(P.exact);
    EXPECT_NEAR(static_cast<double>(P.h.coeff(0)), -3.75, 1e-15);
    EXPECT_NEAR(static_cast<double>(P.h.coeff(1)), 1.0, 0.0);
}

TEST(PEval, SmallCases) {
    EXPECT_EQ(p_eval(ParamSet(2, {1.0, 2.0}), 0, 123.0), 1.0);
    EXPECT_NEAR(p_eval(ParamSet(2, {1.0, 2.0}), 1, 7.0), 1.0, 1e-15);
    const Rational x(3, 2);
    const double exact = static_cast<double>(p_oracle({0, 1}, 5)(x));
    EXPECT_NEAR(p_eval(ParamSet(2, {0.0, 1.0}), 5, 1.5), exact, 1e-12 * std::abs(exact));
}

TEST(PEval, AgreesWithExactArithmetic) {
    for (const auto& p : {ParamSet(1, {0.0}), ParamSet(2, {0.0, 1.0}), ParamSet(3, {1.0, 2.0, 3.0})}) {
        for (int n : {10, 40, 100}) {
            const auto ref = p_oracle(p.integer_nu(), n);
            for (double t : {0.01, 0.25, 0.5, 0.875, 1.0}) {
                const double x = 10.0 * n * t;
                const double exact = static_cast<double>(ref(Rational(x)));
                if (!std::isfinite(exact)) {
                    EXPECT_THROW(p_eval(p, n, x), PrecisionError);
                    continue;
                }
                const double v = p_eval(p, n, x);
                EXPECT_NEAR(v, exact, 1e-9 * std::abs(exact)) << p.M << " n=" << n << " x=" << x;
            }
        }
    }
}

TEST(PEval, NonFiniteArgument) {
    EXPECT_THROW(p_eval(ParamSet(1, {0.0}), 3, std::nan("")), DomainError);
    EXPECT_THROW(p_eval(ParamSet(1, {0.0}), -1, 1.0), ParameterError);
}

TEST(QEval, LaguerreCase) {
    ParamSet p(1, {0.0});
    EXPECT_NEAR(q_eval(p, 0, 1.0).value, std::exp(-1.0), 1e-13);
    // Q_k = (-1)^k L_k(y) e^{-y} / k!
    for (int k : {1, 2, 5})
        for (double y : {0.3, 1.0, 4.0}) {
            const double ref = (k % 2 ? -1.0 : 1.0) * std::laguerre(k, y) * std::exp(-y) / std::tgamma(k + 1.0);
            EXPECT_NEAR(q_eval(p, k, y).value, ref, 1e-8) << k << " " << y;
        }
}

TEST(QEval, NormalisationAndMoments) {
    for (const auto& p : {ParamSet(1, {0.0}), ParamSet(2, {0.0, 1.0}), ParamSet(2, {0.5, 0.0})}) {
        const double upper = p.M == 1 ? 60.0 : 400.0;
        auto moment = [&](int l, int k) {
            return integrate_positive(
                [&](double x) { return std::pow(x, l) * q_eval(p, k, x, 1e-14).value; }, upper, 1e-10);
        };
        EXPECT_NEAR(moment(0, 0), 1.0, 1e-6) << p.M;
        EXPECT_NEAR(moment(1, 1), 1.0, 1e-6) << p.M;
        EXPECT_NEAR(moment(0, 1), 0.0, 1e-6) << p.M;
        EXPECT_NEAR(moment(2, 2), 1.0, 1e-6) << p.M;
        EXPECT_NEAR(moment(1, 2), 0.0, 1e-6) << p.M;
        const int l = p.M == 1 ? 3 : 2, k = l - 1;
        const double exact = qk_moment_exact(p, l, k).value();
        EXPECT_NEAR(moment(l, k), exact, 1e-6 * exact) << p.M;
    }
    ParamSet lag(1, {0.0});
    const double m21 = integrate_positive([&](double x) { return x * x * q_eval(lag, 1, x, 1e-14).value; },
                                          60.0, 1e-10);
    EXPECT_NEAR(m21, 4.0, 1e-6);
}

TEST(QEval, BadArguments) {
    EXPECT_THROW(q_eval(ParamSet(1, {0.0}), 0, 0.0), DomainError);
    EXPECT_THROW(q_eval(ParamSet(1, {0.0}), -1, 1.0), ParameterError);
}

TEST(QkMoment, Exact) {
    ParamSet p(1, {0.0});
    EXPECT_EQ(qk_moment_exact(p, 1, 3).q, 0);
    EXPECT_EQ(qk_moment_exact(p, 3, 3).q, 1);
    EXPECT_EQ(qk_moment_exact(p, 2, 1).q, 4);
    ParamSet r(2, {0.5, 0.0});
    EXPECT_FALSE(qk_moment_exact(r, 2, 2).exact);
    EXPECT_NEAR(qk_moment_exact(r, 2, 2).value(), 1.0, 1e-30);
}

TEST(Pairing, Examples) {
    EXPECT_EQ(biorth_pairing(ParamSet(1, {0.0}), 0, 0).q, 1);
    EXPECT_EQ(biorth_pairing(ParamSet(2, {0.0, 1.0}), 3, 5).q, 0);
    EXPECT_EQ(biorth_pairing(ParamSet(3, {0.0, 1.0, 2.0}), 5, 5).q, 1);
}

TEST(Pairing, KroneckerDeltaOverSweep) {
    for (const auto& p : integer_sweep(3, 2))
        for (int j = 0; j <= 8; ++j)
            for (int k = 0; k <= 8; ++k) {
                auto s = biorth_pairing(p, j, k);
                ASSERT_TRUE(s.exact);
                EXPECT_EQ(s.q, j == k ? 1 : 0) << j << " " << k;
            }
}

TEST(Pairing, NonIntegerNu) {
    ParamSet p(2, {0.5, 1.25});
    for (int j = 0; j <= 6; ++j)
        for (int k = 0; k <= 6; ++k)
            EXPECT_NEAR(biorth_pairing(p, j, k).value(), j == k ? 1.0 : 0.0, 1e-25);
}

TEST(Recurrence, BCoeffExamples) {
    EXPECT_EQ(b_coeff(ParamSet(1, {2.0}), 0, 3).q, 9);
    EXPECT_THROW(b_coeff(ParamSet(1, {2.0}), 2, 3), ParameterError);
}

TEST(Recurrence, ACoeffDisplayedFormulas) {
    for (int nu1 : {0, 1, 3})
        for (long n = 0; n <= 8; ++n) {
            ParamSet p(1, {double(nu1)});
            EXPECT_EQ(a_coeff(p, 0, n).q, 2 * n + nu1 + 1);
            if (n >= 1) EXPECT_EQ(a_coeff(p, 1, n).q, n * (n + nu1));
        }
    for (int nu1 : {0, 2})
        for (int nu2 : {1, 3})
            for (long n = 0; n <= 8; ++n) {
                ParamSet p(2, {double(nu1), double(nu2)});
                EXPECT_EQ(a_coeff(p, 0, n).q,
                          3 * n * n + (3 + 2 * nu1 + 2 * nu2) * n + (1 + nu1 + nu2 + nu1 * nu2));
                if (n >= 2)
                    EXPECT_EQ(a_coeff(p, 2, n).q, n * (n - 1) * (n + nu1) * (n + nu1 - 1) * (n + nu2) *
                                                      (n + nu2 - 1));
            }
    EXPECT_EQ(a_coeff(ParamSet(2, {0.0, 1.0}), 2, 2).q, 24);
}

TEST(Recurrence, BothSummationOrdersAgree) {
    const auto nuf = nu_scalars<Rational>(ParamSet(3, {0.0, 1.0, 3.0}));
    for (int k = 0; k <= 3; ++k)
        for (long n = k; n <= 12; ++n)
            EXPECT_EQ(a_coeff_t(nuf, k, n), a_coeff_reversed_t(nuf, k, n));
}

TEST(Recurrence, Duality) {
    for (const auto& p : integer_sweep(3, 2))
        for (int k = 0; k <= p.M; ++k)
            for (long n = k; n <= 20; ++n) EXPECT_EQ(a_coeff(p, k, n).q, b_coeff(p, k, n - k).q);
}

TEST(Recurrence, ResidualVanishes) {
    EXPECT_TRUE(recurrence_residual(ParamSet(2, {0.0, 0.0}), 0).is_zero());
    EXPECT_TRUE(recurrence_residual(ParamSet(2, {0.0, 1.0}), 5).is_zero());
    EXPECT_TRUE(recurrence_residual(ParamSet(3, {1.0, 2.0, 3.0}), 10).is_zero());
    for (const auto& p : integer_sweep(3, 2))
        for (int n = 0; n <= 12; ++n) EXPECT_TRUE(recurrence_residual(p, n).is_zero()) << n;
}

TEST(Recurrence, PerturbationIsDetected) {
    EXPECT_FALSE(recurrence_residual(ParamSet(2, {0.0, 1.0}), 4, 1.0).is_zero());
}

TEST(Recurrence, DualResidualVanishes) {
    for (const auto& p : integer_sweep(3, 1))
        for (int n = 1; n <= 10; ++n) EXPECT_TRUE(dual_recurrence_residual(p, n).is_zero()) << n;
}

TEST(Recurrence, NonIntegerResidual) {
    auto r = recurrence_residual(ParamSet(2, {0.5, 1.5}), 6);
    EXPECT_FALSE(r.exact);
    EXPECT_TRUE(r.is_zero(1e-30 * std::max(1.0, p_coeffs(ParamSet(2, {0.5, 1.5}), 7).max_abs_coeff())));
}

TEST(LeadingOrder, DegreeAndCoefficient) {
    struct Case {
        ParamSet p;
        int k, degree;
        long lead;
    };
    const Case cases[] = {{ParamSet(1, {0.0}), 0, 1, 2},
                          {ParamSet(2, {0.0, 1.0}), 0, 2, 3},
                          {ParamSet(3, {0.0, 1.0, 2.0}), 3, 12, 1},
                          {ParamSet(3, {2.0, 0.0, 1.0}), 1, 6, 6}};
    for (const auto& c : cases) {
        auto lo = a_leading_order(c.p, c.k);
        EXPECT_EQ(lo.degree, c.degree);
        EXPECT_EQ(lo.leading.q, c.lead);
    }
}

TEST(Orthogonality, MultipleOrthogonality) {
    EXPECT_TRUE(mop_orthogonality_check(ParamSet(2, {0.0, 0.0}), 0).passed);
    auto r1 = mop_orthogonality_check(ParamSet(2, {0.0, 0.0}), 1);
    EXPECT_TRUE(r1.passed);
    EXPECT_GT(r1.conditions, 0);
    auto r7 = mop_orthogonality_check(ParamSet(3, {0.0, 1.0, 2.0}), 7);
    EXPECT_TRUE(r7.passed);
    EXPECT_TRUE(r7.failures.empty());
    EXPECT_THROW(mop_orthogonality_check(ParamSet(1, {0.5}), 2), ParameterError);
}
