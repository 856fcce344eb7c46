#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <utility>
#include <vector>

#include "ginprod/biorth.hpp"
#include "ginprod/dual.hpp"
#include "ginprod/specfun.hpp"

namespace ginprod {

struct KernelConfig {
    ParamSet params;
    int n = 1;
    double tol = 1e-12;

    void validate() const {
        params.validate();
        if (n < 1) throw ParameterError("kernel.n.range", "the kernel needs n >= 1");
        if (!(tol > 0)) throw ParameterError("kernel.tol", "tol must be positive");
    }
};

struct HardEdgeConfig {
    ParamSet params;
    double tol = 1e-12;
    double diagonal_guard = 1e-3;

    void validate() const {
        params.validate();
        if (!(tol > 0)) throw ParameterError("kernel.tol", "tol must be positive");
        if (!(diagonal_guard > 0))
            throw ParameterError("kernel.guard", "diagonal guard must be positive");
    }
};

struct ConcomitantCoeffs {
    std::vector<double> a;  // a_0..a_M
};

/// a_i with sum_i a_i x^i = prod_{i=1}^M (x - nu_i).
inline ConcomitantCoeffs concomitant_coeffs(const ParamSet& params) {
    params.validate();
    std::vector<double> c{1.0};
    for (double v : params.nu) {
        std::vector<double> next(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            next[i + 1] += c[i];
            next[i] -= v * c[i];
        }
        c = std::move(next);
    }
    return {c};
}

namespace detail {

inline void check_xy(double x, double y) {
    if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y))
        throw DomainError("kernel.xy", "kernel arguments must be positive and finite");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Finite n
// ---------------------------------------------------------------------------

/// sum_{k<n} P_k(x) Q_k(y), evaluated as sum P~_k(x) Q~_k(y) with the
/// normalizations N_k / k! moved between the two factors.
class KnSum {
public:
    KnSum(const ParamSet& params, int n, double log_range = 46.0)
        : params_(params), n_(n), table_(params, n - 1, log_range) {
        if (n < 1) throw ParameterError("kernel.n.range", "the kernel needs n >= 1");
    }

    EvalResult<double> operator()(double x, double y) const {
        detail::check_xy(x, y);
        const auto P = p_scaled_all(params_, n_ - 1, x);
        const auto Q = table_.eval_all(y);
        detail::CompensatedSum s;
        double err = 0.0;
        for (int k = 0; k < n_; ++k) {
            s.add(P[k] * Q[k].value);
            err += std::abs(P[k]) * Q[k].err_estimate;
        }
        return {s.value(), err, n_};
    }

private:
    ParamSet params_;
    int n_;
    QTable table_;
};

inline double kn_sum(const KernelConfig& cfg, double x, double y) {
    cfg.validate();
    return KnSum(cfg.params, cfg.n)(x, y).value;
}

namespace detail {

// \int_0^1 h(u) du where h(u) = a(u) * b(u) and b comes from a tabulated
// Mellin integral valid for u * zscale >= e^{-40}. `h` returns the product and
// the absolute table error at u. The interval below the validity cutoff is
// dropped with a bound from the endpoint value; table errors are summed over
// dyadic shells from the largest u * err(u).
template <class H>
EvalResult<double> u_integral(const H& h, double zscale, double tol) {
    const double u_lo = std::min(1e-6, std::exp(-40.0) / std::max(zscale, 1e-300));
    if (u_lo * zscale < std::exp(-40.5))
        throw DomainError("kernel.range", "argument below the tabulated range of the kernel");
    double weighted = 0.0;
    auto integrand = [&](double u) {
        const auto [v, e] = h(u);
        weighted = std::max(weighted, u * e);
        return v;
    };
    AdaptiveOptions opt;
    opt.abs_tol = tol;
    opt.rel_tol = tol;
    opt.singular_left = true;
    auto r = integrate_adaptive_t<double>(integrand, u_lo, 1.0, opt);
    const double shells = std::log(1.0 / u_lo) / std::log(2.0);
    r.err_estimate += weighted * shells + 2.0 * u_lo * std::abs(h(u_lo).first);
    return r;
}

}  // namespace detail

/// K_n(x,y) = -prod_{j=0}^M (n+nu_j) \int_0^1 P_{n-1}(ux) Q_n(uy) du
///          = -n \int_0^1 P~_{n-1}(ux) Q~_n(uy) du.
inline EvalResult<double> kn_u_integral(const KernelConfig& cfg, double x, double y) {
    cfg.validate();
    detail::check_xy(x, y);
    const int n = cfg.n;
    const QTable table(cfg.params, 0, 46.0 + std::log(n + 1.0));
    const auto factors = table.node_factors(n);
    auto h = [&](double u) {
        const double p = p_scaled(cfg.params, n - 1, u * x);
        const auto q = table.eval(factors, u * y);
        return std::pair<double, double>(-n * p * q.value, n * std::abs(p) * q.err_estimate);
    };
    return detail::u_integral(h, y, cfg.tol);
}

namespace detail {

// Smallest T with |F(c + i tau)| below eps * peak for all tau in [T, T+2].
template <class F>
double line_truncation(const F& f, double c, double eps, double start = 4.0,
                       double max_height = 2000.0) {
    double peak = 0.0;
    for (double tau = 0.0; tau <= start; tau += 0.25)
        peak = std::max({peak, std::abs(f(Complex(c, tau))), std::abs(f(Complex(c, -tau)))});
    double T = start;
    while (T < max_height) {
        double m = 0.0;
        for (double tau = T; tau <= T + 2.0; tau += 0.25) {
            const double v = std::max(std::abs(f(Complex(c, tau))), std::abs(f(Complex(c, -tau))));
            peak = std::max(peak, v);
            m = std::max(m, v);
        }
        if (m < eps * peak) return T;
        T += 2.0;
    }
    throw ConvergenceError("quad.truncation", "contour integrand does not decay", 0.0, peak);
}

struct TabulatedContour {
    std::vector<Complex> z, fw, cz, cfw;  // nodes and F * weight, fine and coarse
};

template <class F, class P>
TabulatedContour tabulate(const F& f, const ContourSpec& contour, const P& is_near) {
    const auto nodes = discretize(contour, 20, 1.0, 0.2, is_near);
    TabulatedContour t;
    t.z = nodes.z;
    t.cz = nodes.coarse_z;
    for (std::size_t i = 0; i < nodes.z.size(); ++i) t.fw.push_back(f(nodes.z[i]) * nodes.w[i]);
    for (std::size_t i = 0; i < nodes.coarse_z.size(); ++i)
        t.cfw.push_back(f(nodes.coarse_z[i]) * nodes.coarse_w[i]);
    return t;
}

// (1/(2 pi i))^2 \int ds \oint dt A(s) B(t) / (s - t) from tabulated contours.
inline EvalResult<Complex> double_contour(const TabulatedContour& S, const TabulatedContour& T) {
    auto sum = [](const std::vector<Complex>& sz, const std::vector<Complex>& sw,
                  const std::vector<Complex>& tz, const std::vector<Complex>& tw, double* scale) {
        Complex acc = 0.0;
        double sc = 0.0;
        for (std::size_t i = 0; i < sz.size(); ++i) {
            Complex inner = 0.0;
            double inner_abs = 0.0;
            for (std::size_t j = 0; j < tz.size(); ++j) {
                const Complex v = tw[j] / (sz[i] - tz[j]);
                inner += v;
                inner_abs += std::abs(v);
            }
            acc += sw[i] * inner;
            sc += std::abs(sw[i]) * inner_abs;
        }
        if (scale) *scale = sc;
        return acc;
    };
    double scale = 0.0;
    const Complex fine = sum(S.z, S.fw, T.z, T.fw, &scale);
    const Complex coarse = sum(S.cz, S.cfw, T.cz, T.cfw, nullptr);
    const double norm = 4.0 * std::numbers::pi * std::numbers::pi;
    const Complex value = -fine / norm;  // (2 pi i)^2 = -4 pi^2
    const double diff = std::abs(fine - coarse) / norm;
    scale /= norm;
    EvalResult<Complex> r;
    r.value = value;
    r.err_estimate = diff * std::min(1.0, diff / std::max(scale, 1e-300)) +
                     256.0 * std::numeric_limits<double>::epsilon() * scale;
    r.panels_used = static_cast<int>(S.z.size() * T.z.size());
    return r;
}

}  // namespace detail

/// Double contour form: s on Re s = -1/2, t on the rectangle
/// [-0.4, n+0.5] x [-1, 1] around 0..n, integrand
/// prod_j Gamma(s+nu_j+1)/Gamma(t+nu_j+1) Gamma(t-n+1)/Gamma(s-n+1)
/// x^t y^{-s-1} / (s-t). Gamma(s+1)/Gamma(s-n+1) and Gamma(t-n+1)/Gamma(t+1)
/// are taken as the rational functions they are.
inline EvalResult<Complex> kn_contour_complex(const KernelConfig& cfg, double x, double y) {
    cfg.validate();
    detail::check_xy(x, y);
    const int n = cfg.n;
    const auto& nu = cfg.params.nu;
    if (cfg.params.alpha() <= -0.4)
        throw GeometryError("contour.pole",
                            "the s-line at -1/2 needs every nu_j > -0.4 to clear the poles");
    const double lx = std::log(x), ly = std::log(y);
    auto A = [&](const Complex& s) {
        Complex v = std::exp(detail::log_gamma_sum(nu, s + 1.0) - (s + 1.0) * ly);
        for (int m = 1; m <= n; ++m) v *= s - static_cast<double>(n - m);  // (s-n+1)_n
        return v;
    };
    auto B = [&](const Complex& t) {
        Complex v = std::exp(t * lx - detail::log_gamma_sum(nu, t + 1.0));
        for (int m = 1; m <= n; ++m) v /= t - static_cast<double>(n - m);
        return v;
    };
    const double Ts = detail::line_truncation(A, -0.5, 1e-18);
    const auto s_contour = ContourSpec::vertical(-0.5, Ts);
    const auto t_contour = ContourSpec::rectangle(-0.4, n + 0.5, 1.0);
    const auto S = detail::tabulate(A, s_contour, [](const Complex& s) {
        return std::abs(s.imag()) < 1.5;
    });
    const auto T = detail::tabulate(B, t_contour, [](const Complex& t) { return t.real() < 0.2; });
    return detail::double_contour(S, T);
}

inline EvalResult<double> kn_contour(const KernelConfig& cfg, double x, double y) {
    const auto r = kn_contour_complex(cfg, x, y);
    return {r.value.real(), r.err_estimate + std::abs(r.value.imag()), r.panels_used};
}

/// \int x^p K_n(x,x) dx = sum_{k<n} sum_l [x^l]P_k \int x^{l+p} Q_k.
inline Scalar trace_moment(const KernelConfig& cfg, int p) {
    cfg.validate();
    if (p < 0) throw ParameterError("kernel.p", "moment order must be nonnegative");
    auto run = [&](auto tag) {
        using T = decltype(tag);
        const auto nuf = nu_scalars<T>(cfg.params);
        T s = 0;
        for (int k = 0; k < cfg.n; ++k) {
            const auto P = p_poly(nuf, k);
            for (int l = 0; l <= k; ++l) s += P.coeff(l) * qk_moment(nuf, l + p, k);
        }
        return ScalarTraits<T>::wrap(s);
    };
    if (cfg.params.all_integer()) return run(Rational{});
    return run(HighPrec{});
}

// ---------------------------------------------------------------------------
// Hard edge
// ---------------------------------------------------------------------------

/// K(x,y) = \int_0^1 f(ux) g(uy) du.
class HardEdgeU {
public:
    explicit HardEdgeU(const HardEdgeConfig& cfg, double ymax = 10.0)
        : cfg_(cfg), table_(cfg.params, ymax) {
        cfg.validate();
    }

    EvalResult<double> operator()(double x, double y) const {
        detail::check_xy(x, y);
        auto h = [&](double u) {
            const double f = small_f(cfg_.params, u * x);
            const auto g = table_.g(u * y);
            return std::pair<double, double>(f * g.value, std::abs(f) * g.err_estimate);
        };
        return detail::u_integral(h, y, cfg_.tol);
    }

private:
    HardEdgeConfig cfg_;
    GTable table_;
};

inline EvalResult<double> hard_edge_u(const HardEdgeConfig& cfg, double x, double y) {
    detail::check_xy(x, y);
    return HardEdgeU(cfg, std::max(10.0, 2.0 * y))(x, y);
}

/// Double contour form with sin(pi s)/sin(pi t): s on Re s = -1/2 (a hairpin
/// opening to the left for M = 1), t on a hairpin around [0, inf) crossing at
/// -0.4 with half-height 0.5. Gamma(s+1) sin(pi s) = -pi/Gamma(-s) and
/// 1/(Gamma(t+1) sin(pi t)) = -Gamma(-t)/pi.
inline EvalResult<Complex> hard_edge_contour_complex(const HardEdgeConfig& cfg, double x,
                                                     double y) {
    cfg.validate();
    detail::check_xy(x, y);
    const auto& nu = cfg.params.nu;
    if (cfg.params.alpha() <= -0.4)
        throw GeometryError("contour.pole",
                            "the s-contour at -1/2 needs every nu_j > -0.4 to clear the poles");
    const double lx = std::log(x), ly = std::log(y);
    auto A = [&](const Complex& s) {
        return std::exp(detail::log_gamma_sum(nu, s + 1.0) - log_gamma(-s) - (s + 1.0) * ly);
    };
    auto B = [&](const Complex& t) {
        return std::exp(log_gamma(-t) + t * lx - detail::log_gamma_sum(nu, t + 1.0));
    };
    // right truncation of the t-hairpin: |B| on the arms
    double peak = 0.0, Tt = 1.0;
    for (double r = -0.4;; r += 0.5) {
        const double m = std::abs(B(Complex(r, 0.5)));
        peak = std::max(peak, m);
        if (r > 2.0 && m < 1e-19 * peak) {
            Tt = r;
            break;
        }
        if (r > 4000.0) throw ConvergenceError("quad.truncation", "t-hairpin does not decay", 0.0, m);
    }
    const auto t_contour = ContourSpec::hairpin(-0.4, 0.5, Tt);
    ContourSpec s_contour;
    if (cfg.params.M >= 2) {
        s_contour = ContourSpec::vertical(-0.5, detail::line_truncation(A, -0.5, 1e-18));
    } else {
        double speak = 0.0, Ls = -1.0;
        for (double r = -0.5;; r -= 0.5) {
            const double m = std::abs(A(Complex(r, 0.5)));
            speak = std::max(speak, m);
            if (r < -3.0 && m < 1e-19 * speak) {
                Ls = r;
                break;
            }
            if (r < -4000.0)
                throw ConvergenceError("quad.truncation", "s-hairpin does not decay", 0.0, m);
        }
        s_contour = ContourSpec::left_hairpin(-0.5, 0.5, Ls);
    }
    const auto S = detail::tabulate(A, s_contour, [](const Complex& s) {
        return s.real() > -1.2 && std::abs(s.imag()) < 1.2;
    });
    const auto T = detail::tabulate(B, t_contour, [](const Complex& t) { return t.real() < 0.3; });
    return detail::double_contour(S, T);
}

inline EvalResult<double> hard_edge_contour(const HardEdgeConfig& cfg, double x, double y) {
    const auto r = hard_edge_contour_complex(cfg, x, y);
    return {r.value.real(), r.err_estimate + std::abs(r.value.imag()), r.panels_used};
}

/// B(f(x), g(y)) = (-1)^{M+1} sum_j (-1)^j Delta^j f(x) sum_{i<=M-j} a_{i+j}
/// Delta^i g(y) with Delta = x d/dx.
inline EvalResult<double> bilinear_concomitant(const HardEdgeConfig& cfg, double x, double y) {
    cfg.validate();
    detail::check_xy(x, y);
    const int M = cfg.params.M;
    const auto a = concomitant_coeffs(cfg.params).a;
    const auto F = small_f_all(cfg.params, x, M);
    std::vector<EvalResult<double>> G;
    for (int i = 0; i <= M; ++i) G.push_back(delta_g(cfg.params, i, y, cfg.tol));
    double total = 0.0, err = 0.0;
    for (int j = 0; j <= M; ++j) {
        double inner = 0.0, inner_err = 0.0;
        for (int i = 0; i <= M - j; ++i) {
            inner += a[i + j] * G[i].value;
            inner_err += std::abs(a[i + j]) * G[i].err_estimate;
        }
        const double sgn = (j % 2) ? -1.0 : 1.0;
        total += sgn * F[j].value * inner;
        err += std::abs(F[j].value) * inner_err + F[j].err_estimate * std::abs(inner);
    }
    if ((M + 1) % 2) total = -total;
    return {total, err, 0};
}

/// K(x,y) = B(f(x), g(y)) / (x - y), off the diagonal only.
inline EvalResult<double> hard_edge_integrable(const HardEdgeConfig& cfg, double x, double y) {
    cfg.validate();
    detail::check_xy(x, y);
    if (std::abs(x - y) < cfg.diagonal_guard)
        throw DomainError("kernel.diagonal",
                          "integrable form is 0/0 near x = y; use hard_edge_u there");
    auto b = bilinear_concomitant(cfg, x, y);
    b.value /= (x - y);
    b.err_estimate /= std::abs(x - y);
    return b;
}

/// Bessel kernel (J(sqrt x) sqrt y J'(sqrt y) - sqrt x J'(sqrt x) J(sqrt y)) /
/// (2 (x - y)); on the diagonal (J_nu^2 - J_{nu+1} J_{nu-1}) / 4 at sqrt x.
inline double bessel_kernel(double nu, double x, double y) {
    if (!(nu > -1.0)) throw ParameterError("param.nu.range", "Bessel kernel needs nu > -1");
    detail::check_xy(x, y);
    const double sx = std::sqrt(x), sy = std::sqrt(y);
    if (x == y) {
        const double j = bessel_j(nu, sx);
        return 0.25 * (j * j - boost::math::cyl_bessel_j(nu + 1.0, sx) *
                                   boost::math::cyl_bessel_j(nu - 1.0, sx));
    }
    if (std::abs(x - y) < 1e-5 * std::max(x, y)) {
        // K(x,y) = (1/4) \int_0^1 J(sqrt(ux)) J(sqrt(uy)) du
        auto f = [&](double u) {
            return u == 0.0 ? 0.0 : bessel_j(nu, std::sqrt(u * x)) * bessel_j(nu, std::sqrt(u * y));
        };
        AdaptiveOptions opt;
        opt.abs_tol = 1e-16;
        opt.singular_left = true;
        return 0.25 * integrate_adaptive_t<double>(f, 0.0, 1.0, opt).value;
    }
    return (bessel_j(nu, sx) * sy * bessel_j_prime(nu, sy) -
            sx * bessel_j_prime(nu, sx) * bessel_j(nu, sy)) /
           (2.0 * (x - y));
}

/// M = 1 hard-edge kernel from the Bessel kernel: 4 (y/x)^{nu/2} K^Bes(4x, 4y).
inline double hard_edge_bessel(double nu, double x, double y) {
    return 4.0 * std::pow(y / x, nu / 2.0) * bessel_kernel(nu, 4.0 * x, 4.0 * y);
}

struct CauchyReport {
    double lhs = 0.0, rhs = 0.0, rel_dev = 0.0, err = 0.0;
    bool passed = false;
};

/// \int_0^1 G^{1,0}_{0,3}(a; 0, -b | ux) G^{2,0}_{0,3}(b, 0; -a | uy) du
/// against (x/y)^a K(x, y) with M = 2, nu = (a+b, a). The left side uses the
/// G-functions in their own parameters: the residue series
/// sum_k (-1)^k z^{a+k} / (k! Gamma(1+a+k) Gamma(1+a+b+k)) and the line
/// integral of Gamma(b+s) Gamma(s) / Gamma(1+a-s) z^{-s}.
inline CauchyReport cauchy_identity_check(double a, double b, double x, double y,
                                          double tol = 1e-7) {
    if (!(a > -1.0) || !(b > -1.0) || !(a + b > -1.0))
        throw ParameterError("param.nu.range", "Cauchy check needs a, b, a+b > -1");
    detail::check_xy(x, y);
    auto G10 = [&](double z) {
        detail::CompensatedSum s;
        double term = std::pow(z, a) * rgamma(1.0 + a) * rgamma(1.0 + a + b);
        for (int k = 0; k < 400; ++k) {
            s.add(term);
            if (k > 4 && std::abs(term) < 1e-18 * std::abs(s.value()) && (k + 1.0) * (k + 1.0) > z)
                break;
            term *= -z / ((k + 1.0) * (1.0 + a + k) * (1.0 + a + b + k));
        }
        return s.value();
    };
    const double c = std::max(0.5, -b + 0.5);
    auto F = [a, b](const Complex& s) {
        return std::exp(log_gamma(b + s) + log_gamma(s) - log_gamma(1.0 + a - s));
    };
    const auto table = MellinTable::vertical(F, c, std::min(c, c + b), 46.0);
    auto h = [&](double u) {
        const double g1 = G10(u * x);
        const auto g2 = table.eval(u * y);
        return std::pair<double, double>(g1 * g2.value, std::abs(g1) * g2.err_estimate);
    };
    const auto lhs = detail::u_integral(h, y, 1e-14);
    HardEdgeConfig cfg;
    cfg.params = ParamSet(2, {a + b, a});
    cfg.tol = 1e-14;
    const auto k = hard_edge_u(cfg, x, y);
    CauchyReport rep;
    rep.lhs = lhs.value;
    rep.rhs = std::pow(x / y, a) * k.value;
    rep.err = lhs.err_estimate + std::pow(x / y, a) * k.err_estimate;
    rep.rel_dev = std::abs(rep.lhs - rep.rhs) / std::max(std::abs(rep.rhs), 1e-300);
    rep.passed = rep.rel_dev <= tol;
    return rep;
}

/// sup over the grid of |K_n(x/n, y/n)/n - K(x, y)|.
inline double scaling_limit_error(const ParamSet& params, int n,
                                  const std::vector<std::pair<double, double>>& grid) {
    params.validate();
    if (grid.empty()) throw ParameterError("kernel.grid", "scaling grid is empty");
    const KnSum kn(params, n);
    HardEdgeConfig hc;
    hc.params = params;
    hc.tol = 1e-14;
    double ymax = 0.0;
    for (const auto& [x, y] : grid) ymax = std::max(ymax, y);
    const HardEdgeU limit(hc, std::max(10.0, 2.0 * ymax));
    double sup = 0.0;
    for (const auto& [x, y] : grid) {
        const double kn_v = kn(x / n, y / n).value / n;
        sup = std::max(sup, std::abs(kn_v - limit(x, y).value));
    }
    return sup;
}

}  // namespace ginprod
