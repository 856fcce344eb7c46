#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ginprod/kernel.hpp"

using namespace ginprod;

namespace {

KernelConfig config(std::vector<double> nu, int n) {
    KernelConfig c;
    c.params = ParamSet(static_cast<int>(nu.size()), nu);
    c.n = n;
    return c;
}

HardEdgeConfig hard(std::vector<double> nu) {
    HardEdgeConfig c;
    c.params = ParamSet(static_cast<int>(nu.size()), nu);
    return c;
}

// Laguerre ensemble: K_n(x,y) = sum_k k! L_k^nu(x) L_k^nu(y) y^nu e^{-y} / Gamma(k+nu+1)
double laguerre_kernel(unsigned nu, int n, double x, double y) {
    double s = 0;
    for (int k = 0; k < n; ++k)
        s += std::exp(std::lgamma(k + 1.0) - std::lgamma(k + nu + 1.0)) * std::assoc_laguerre(k, nu, x) *
             std::assoc_laguerre(k, nu, y);
    return s * std::pow(y, nu) * std::exp(-y);
}

// (1/4) \int_0^1 J_nu(sqrt(u x)) J_nu(sqrt(u y)) du
double bessel_kernel_quadrature(double nu, double x, double y) {
    auto f = [&](double u) {
        return std::cyl_bessel_j(nu, std::sqrt(u * x)) * std::cyl_bessel_j(nu, std::sqrt(u * y));
    };
    double s = 0;
    const int N = 2000;
    const auto r = gauss_legendre_rule(20);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < 20; ++j) {
            const double u = (i + 0.5 * (r.nodes[j] + 1)) / N;
            s += 0.5 * r.weights[j] * f(u) / N;
        }
    return 0.25 * s;
}

}  // namespace

TEST(Concomitant, Coefficients) {
    EXPECT_EQ(concomitant_coeffs(ParamSet(1, {2.5})).a, (std::vector<double>{-2.5, 1}));
    EXPECT_EQ(concomitant_coeffs(ParamSet(2, {0.0, 0.0})).a, (std::vector<double>{0, 0, 1}));
    EXPECT_EQ(concomitant_coeffs(ParamSet(3, {1.0, 2.0, 3.0})).a, (std::vector<double>{-6, 11, -6, 1}));
}

TEST(KnSum, OnePointIsTheWeight) {
    for (double x : {0.3, 1.0, 5.0}) EXPECT_NEAR(kn_sum(config({0}, 1), x, 1.0), std::exp(-1.0), 1e-13);
}

TEST(KnSum, LaguerreEnsemble) {
    for (unsigned nu : {0u, 1u, 2u})
        for (int n : {1, 3, 7})
            for (auto [x, y] : {std::pair{0.5, 0.5}, {1.0, 2.0}, {5.0, 0.7}, {3.0, 9.0}}) {
                const double ref = laguerre_kernel(nu, n, x, y);
                EXPECT_NEAR(kn_sum(config({double(nu)}, n), x, y), ref, 1e-11 * std::max(1.0, std::abs(ref)))
                    << nu << " " << n << " " << x << " " << y;
            }
}

TEST(KnSum, SymmetricInNu) {
    for (auto [x, y] : {std::pair{0.7, 1.9}, {2.0, 0.5}})
        EXPECT_NEAR(kn_sum(config({0, 1}, 4), x, y), kn_sum(config({1, 0}, 4), x, y), 1e-9);
    EXPECT_NEAR(kn_sum(config({0.5, 2, 1}, 3), 1.1, 0.4), kn_sum(config({2, 1, 0.5}, 3), 1.1, 0.4), 1e-9);
}

TEST(KnSum, BadPoint) {
    EXPECT_THROW(kn_sum(config({0}, 2), 1.0, 0.0), DomainError);
    EXPECT_THROW(kn_sum(config({0}, 0), 1.0, 1.0), ParameterError);
}

TEST(KnUIntegral, AgreesWithSum) {
    struct Case {
        std::vector<double> nu;
        int n;
        double x, y, tol;
    };
    const Case cases[] = {{{0, 1}, 5, 1, 2, 1e-8},
                          {{1}, 3, 0.5, 0.5, 1e-9},
                          {{0, 1, 2}, 8, 2, 5, 1e-7},
                          {{0}, 1, 0.4, 1, 1e-9},
                          {{0.5, 1.5}, 4, 0.8, 3, 1e-8}};
    for (const auto& c : cases) {
        const auto cfg = config(c.nu, c.n);
        const auto r = kn_u_integral(cfg, c.x, c.y);
        EXPECT_NEAR(r.value, kn_sum(cfg, c.x, c.y), c.tol) << c.n;
        EXPECT_GE(r.err_estimate, 0.0);
    }
}

TEST(KnContour, AgreesWithSum) {
    struct Case {
        std::vector<double> nu;
        int n;
        double x, y;
    };
    const Case cases[] = {{{0}, 2, 1, 1}, {{0, 1}, 5, 0.5, 2}, {{2}, 3, 4, 0.2}};
    for (const auto& c : cases) {
        const auto cfg = config(c.nu, c.n);
        const auto z = kn_contour_complex(cfg, c.x, c.y);
        EXPECT_NEAR(z.value.real(), kn_sum(cfg, c.x, c.y), 1e-6) << c.n;
        EXPECT_LE(std::abs(z.value.imag()), 1e-10);
    }
}

TEST(TraceMoment, Exact) {
    for (int n : {1, 2, 5})
        for (const auto& nu : {std::vector<double>{0}, {1, 2}, {0, 2, 1}})
            EXPECT_EQ(trace_moment(config(nu, n), 0).q, n);
    EXPECT_EQ(trace_moment(config({0, 0}, 1), 1).q, 1);
    EXPECT_EQ(trace_moment(config({1, 2}, 1), 1).q, 6);
    EXPECT_EQ(trace_moment(config({0}, 2), 1).q, 4);
}

TEST(TraceMoment, WishartOracle) {
    // complex Wishart n x n from an (n+nu) x n Ginibre block:
    // E tr W = n m and E tr W^2 = n m (n + m) with m = n + nu
    for (int nu : {0, 1, 3})
        for (int n : {1, 2, 4, 6}) {
            const long m = n + nu;
            EXPECT_EQ(trace_moment(config({double(nu)}, n), 1).q, n * m);
            EXPECT_EQ(trace_moment(config({double(nu)}, n), 2).q, n * m * (n + m));
        }
}

TEST(TraceMoment, NonIntegerPath) {
    auto s = trace_moment(config({0.5, 1.5}, 3), 0);
    EXPECT_FALSE(s.exact);
    EXPECT_NEAR(s.value(), 3.0, 1e-30);
}

TEST(KnSum, ReproducingProperty) {
    // \int K(x,t) K(t,y) dt = sum_{j,k} P_j(x) [\int Q_j P_k] Q_k(y)
    for (const auto& nu : {std::vector<double>{0, 1}, {1, 0, 2}}) {
        ParamSet p(static_cast<int>(nu.size()), nu);
        for (int n = 1; n <= 4; ++n) {
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) EXPECT_EQ(biorth_pairing(p, k, j).q, j == k ? 1 : 0);
        }
    }
    const auto cfg = config({0, 1}, 2);
    const KnSum K(cfg.params, cfg.n);
    const double x = 0.8, y = 1.7;
    AdaptiveOptions opt;
    opt.abs_tol = 1e-9;
    opt.singular_left = true;
    const double v =
        integrate_adaptive_t<double>([&](double t) { return K(x, t).value * K(t, y).value; }, 1e-12, 400.0, opt)
            .value;
    EXPECT_NEAR(v, kn_sum(cfg, x, y), 1e-7);
}

TEST(HardEdge, BesselCase) {
    const double ref = 4.0 * bessel_kernel_quadrature(0, 4, 4);
    EXPECT_NEAR(hard_edge_u(hard({0}), 1, 1).value, ref, 1e-10);
    EXPECT_NEAR(4.0 * bessel_kernel(0, 4, 4), ref, 1e-10);
    EXPECT_NEAR(hard_edge_bessel(1, 0.3, 0.7), hard_edge_u(hard({1}), 0.3, 0.7).value, 1e-10);
    EXPECT_NEAR(hard_edge_contour(hard({1}), 1, 1).value, hard_edge_bessel(1, 1, 1), 1e-8);
}

TEST(HardEdge, RepresentationsAgree) {
    EXPECT_NEAR(hard_edge_u(hard({0, 0}), 1, 2).value, hard_edge_contour(hard({0, 0}), 1, 2).value, 1e-8);
    EXPECT_NEAR(hard_edge_u(hard({0, 0}), 0.5, 0.5).value, hard_edge_contour(hard({0, 0}), 0.5, 0.5).value,
                1e-8);
    EXPECT_NEAR(hard_edge_integrable(hard({0, 1}), 1, 2).value, hard_edge_u(hard({0, 1}), 1, 2).value, 1e-8);
    EXPECT_NEAR(hard_edge_integrable(hard({0}), 1, 4).value, 4.0 * bessel_kernel(0, 4, 16), 1e-8);
    EXPECT_NEAR(hard_edge_integrable(hard({0.5, 1.5, 0}), 0.6, 2.5).value,
                hard_edge_u(hard({0.5, 1.5, 0}), 0.6, 2.5).value, 1e-7);
}

TEST(HardEdge, ContourIsReal) {
    const auto z = hard_edge_contour_complex(hard({0, 0}), 0.5, 0.5);
    EXPECT_LE(std::abs(z.value.imag()), 1e-10);
    const auto w = hard_edge_contour_complex(hard({2}), 0.7, 1.3);
    EXPECT_LE(std::abs(w.value.imag()), 1e-10);
}

TEST(HardEdge, DiagonalFromIntegrableForm) {
    const auto cfg = hard({0, 1});
    auto sym = [&](double d) {
        return 0.5 * (hard_edge_integrable(cfg, 2, 2 + d).value + hard_edge_integrable(cfg, 2, 2 - d).value);
    };
    const double extrapolated = (4 * sym(0.01) - sym(0.02)) / 3;
    EXPECT_NEAR(hard_edge_u(cfg, 2, 2).value, extrapolated, 1e-6);
}

TEST(HardEdge, ConcomitantVanishesOnDiagonal) {
    EXPECT_LE(std::abs(bilinear_concomitant(hard({0, 0}), 1, 1).value), 1e-8);
}

TEST(HardEdge, DiagonalGuard) {
    try {
        hard_edge_integrable(hard({0, 0}), 1, 1.0005);
        FAIL() << "expected the diagonal guard";
    } catch (const DomainError& e) {
        EXPECT_EQ(e.code(), "kernel.diagonal");
    }
}

TEST(Bessel, SymmetryAndDiagonal) {
    for (double nu : {0.0, 0.5, 2.0}) {
        EXPECT_NEAR(bessel_kernel(nu, 1.3, 4.1), bessel_kernel(nu, 4.1, 1.3), 1e-15);
        EXPECT_NEAR(bessel_kernel(nu, 2.0, 2.0), bessel_kernel_quadrature(nu, 2.0, 2.0), 1e-10);
        EXPECT_NEAR(bessel_kernel(nu, 2.0, 2.0 + 1e-7), bessel_kernel_quadrature(nu, 2.0, 2.0 + 1e-7), 1e-10);
    }
    EXPECT_NEAR(bessel_kernel(0, 1, 1), bessel_kernel_quadrature(0, 1, 1), 1e-10);
    EXPECT_THROW(bessel_kernel(-1.5, 1, 2), ParameterError);
}

TEST(Cauchy, Identity) {
    EXPECT_TRUE(cauchy_identity_check(0, 0, 1, 2, 1e-10).passed);
    const auto r = cauchy_identity_check(1, 0, 1, 2, 1e-8);
    EXPECT_TRUE(r.passed) << r.rel_dev;
    const auto h = cauchy_identity_check(0.5, 0.5, 0.5, 1.5, 1e-7);
    EXPECT_TRUE(h.passed) << h.rel_dev;
    EXPECT_THROW(cauchy_identity_check(-0.5, -0.6, 1, 2), ParameterError);
}

TEST(ScalingLimit, ApproachesBessel) {
    const std::vector<std::pair<double, double>> grid{{0.5, 0.5}, {1, 2}, {2, 1}};
    const ParamSet p(1, {0.0});
    const double e10 = scaling_limit_error(p, 10, grid), e20 = scaling_limit_error(p, 20, grid);
    EXPECT_LT(e20, e10);
    EXPECT_GT(e20 / e10, 0.3);
    EXPECT_LT(e20 / e10, 0.7);
    EXPECT_THROW(scaling_limit_error(p, 10, {}), ParameterError);
}
