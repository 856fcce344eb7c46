#pragma once

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "ginprod/errors.hpp"
#include "ginprod/gamma.hpp"
#include "ginprod/params.hpp"
#include "ginprod/quadrature.hpp"

namespace ginprod {

inline double bessel_j(double nu, double x) {
    if (!(nu > -1.0)) throw ParameterError("param.nu.range", "bessel_j needs nu > -1");
    if (!(x >= 0.0)) throw DomainError("bessel.x", "bessel_j needs x >= 0");
    if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
    return boost::math::cyl_bessel_j(nu, x);
}

/// Derivative J'_nu(x) = (J_{nu-1}(x) - J_{nu+1}(x)) / 2.
inline double bessel_j_prime(double nu, double x) {
    return 0.5 * (boost::math::cyl_bessel_j(nu - 1.0, x) - boost::math::cyl_bessel_j(nu + 1.0, x));
}

inline double macdonald_k(double nu, double x) {
    if (!(x > 0.0)) throw DomainError("macdonald.x", "macdonald_k needs x > 0");
    return boost::math::cyl_bessel_k(std::abs(nu), x);
}

namespace detail {

inline Complex log_gamma_sum(const std::vector<double>& shifts, const Complex& s) {
    Complex r = 0.0;
    for (double a : shifts) r += log_gamma(s + a);
    return r;
}

/// (1/2 pi i) \int F(s) z^{-s} ds along Re s = c by integrate_vertical, for
/// integrands with real parameters (the result is real).
template <class F>
EvalResult<double> mellin_line(const F& f, double c, double tol_abs) {
    auto bound = sampled_decay_bound(f, c, 0.05);
    auto r = integrate_vertical(f, c, tol_abs, bound);
    return {r.value.real(), r.err_estimate + std::abs(r.value.imag()), r.panels_used};
}

/// Root of sum_j psi(c + a_j) = log x (the real saddle point of the
/// Mellin-Barnes integrand), clamped below by c_min.
inline double mellin_saddle(const std::vector<double>& a, double x, double c_min) {
    const double lx = std::log(x);
    double c = std::max(c_min, std::pow(x, 1.0 / static_cast<double>(a.size())));
    for (int it = 0; it < 60; ++it) {
        double g = -lx, dg = 0.0;
        for (double aj : a) {
            g += boost::math::digamma(c + aj);
            dg += boost::math::trigamma(c + aj);
        }
        double next = c - g / dg;
        if (next < c_min) next = 0.5 * (c + c_min);
        if (std::abs(next - c) < 1e-10 * std::max(1.0, c)) {
            c = next;
            break;
        }
        c = next;
    }
    return std::max(c, c_min);
}

// Mellin-Barnes G^{m,0}-type weight (1/2 pi i) \int s^p prod Gamma(s + a_j)
// x^{-s} ds, abscissa at the saddle for x > 1 and half a unit right of the
// rightmost pole otherwise. tol is relative to the integrand peak.
inline EvalResult<double> gamma_product_inverse(const std::vector<double>& a, int power, double x,
                                                double tol) {
    if (!(x > 0.0)) throw DomainError("weight.x", "weights are evaluated at x > 0");
    const double amin = *std::min_element(a.begin(), a.end());
    const double c_min = -amin + 0.5;
    const double c = (x > 1.0) ? mellin_saddle(a, x, c_min) : c_min;
    if (power > 0 && std::abs(c) < 1e-3)
        throw GeometryError("contour.pole", "abscissa too close to the zero of s^k");
    const double lx = std::log(x);
    auto f = [&](const Complex& s) {
        Complex v = std::exp(log_gamma_sum(a, s) - s * lx);
        for (int i = 0; i < power; ++i) v *= s;
        return v;
    };
    const double peak = std::abs(f(Complex(c, 0.0)));
    return mellin_line(f, c, std::max(tol * peak, std::numeric_limits<double>::min()));
}

}  // namespace detail

/// w_k(x) = (1/2 pi i) \int Gamma(s+nu_1+k) prod_{j>=2} Gamma(s+nu_j) x^{-s} ds.
/// `tol` is relative to the integrand peak on the line.
inline EvalResult<double> weight_w(const ParamSet& params, int k, double x, double tol = 1e-13) {
    params.validate();
    if (k < 0) throw ParameterError("weight.k", "weight index must be nonnegative");
    std::vector<double> a = params.nu;
    a[0] += k;
    return detail::gamma_product_inverse(a, 0, x, tol);
}

/// w~_k(x) = (1/2 pi i) \int s^k prod_{j>=1} Gamma(s+nu_j) x^{-s} ds.
inline EvalResult<double> weight_w_tilde(const ParamSet& params, int k, double x,
                                         double tol = 1e-13) {
    params.validate();
    if (k < 0) throw ParameterError("weight.k", "weight index must be nonnegative");
    return detail::gamma_product_inverse(params.nu, k, x, tol);
}

// ---------------------------------------------------------------------------
// Hard-edge factors
// ---------------------------------------------------------------------------

namespace detail {

// Neumaier compensated accumulator.
struct CompensatedSum {
    double sum = 0.0, comp = 0.0;
    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) comp += (sum - t) + v;
        else comp += (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

}  // namespace detail

/// Delta^j f(x) for j = 0..jmax with Delta = x d/dx, from the power series
/// sum_k k^j (-x)^k / (k! prod_j Gamma(nu_j + k + 1)).
inline std::vector<EvalResult<double>> small_f_all(const ParamSet& params, double x, int jmax,
                                                   SeriesBudget budget = {}) {
    params.validate();
    if (!(x >= 0.0)) throw DomainError("small_f.x", "f is evaluated at x >= 0");
    if (budget.max_terms < 1 || !(budget.tol > 0))
        throw ParameterError("series.budget", "series budget needs max_terms >= 1 and tol > 0");
    double term = 1.0;
    for (double v : params.nu) term *= rgamma(v + 1.0);
    std::vector<detail::CompensatedSum> acc(jmax + 1);
    std::vector<double> absacc(jmax + 1, 0.0);
    int small_run = 0;
    for (int k = 0; k < budget.max_terms; ++k) {
        double kp = 1.0;
        bool all_small = true;
        for (int j = 0; j <= jmax; ++j) {
            const double t = term * kp;
            acc[j].add(t);
            absacc[j] += std::abs(t);
            if (std::abs(t) > budget.tol * std::abs(acc[j].value())) all_small = false;
            kp *= k;
        }
        // terms decrease once k^{M+1} exceeds x
        const bool past_peak = std::pow(static_cast<double>(k + 1), params.M + 1) > 2.0 * x;
        small_run = (all_small && past_peak) ? small_run + 1 : 0;
        if (small_run >= 3 || (term == 0.0 && past_peak)) {
            std::vector<EvalResult<double>> out;
            for (int j = 0; j <= jmax; ++j)
                out.push_back({acc[j].value(),
                               4.0 * std::numeric_limits<double>::epsilon() * absacc[j], k + 1});
            return out;
        }
        double d = static_cast<double>(k + 1);
        for (double v : params.nu) d *= v + k + 1.0;
        term *= -x / d;
    }
    throw ConvergenceError("series.budget", "small_f series did not converge within max_terms",
                           acc[0].value(), std::abs(term));
}

/// f(x) = sum_k (-x)^k / (k! prod_j Gamma(nu_j + k + 1)).
inline double small_f(const ParamSet& params, double x, SeriesBudget budget = {}) {
    return small_f_all(params, x, 0, budget)[0].value;
}

/// Delta^j f(x).
inline double small_f_delta(const ParamSet& params, int j, double x, SeriesBudget budget = {}) {
    return small_f_all(params, x, j, budget)[j].value;
}

namespace detail {

inline double g_abscissa(const ParamSet& params) {
    return std::max(0.5, -params.alpha() + 0.5);
}

// For z < 1 the line moves toward the rightmost pole: |z^{-s}| on Re s = c
// is z^{-c}, so c = pole + 1/log(1/z) keeps the cancellation near e/delta.
inline double line_abscissa(double c0, double pole, double z) {
    if (z >= 1.0) return c0;
    const double delta = std::min(c0 - pole, 1.0 / std::max(1.0, -std::log(z)));
    return pole + delta;
}

// Integrand prod Gamma(u+nu_j)/Gamma(1-u) (-u)^i.
inline auto g_integrand(const ParamSet& params, int i) {
    return [nu = params.nu, i](const Complex& u) {
        Complex v = std::exp(log_gamma_sum(nu, u) - log_gamma(1.0 - u));
        for (int r = 0; r < i; ++r) v *= -u;
        return v;
    };
}

// Left truncation of the M = 1 hairpin: the integrand decays like
// z^R / Gamma(R)^2 along Re u = -R.
inline double g_hairpin_left(const ParamSet& params, double x0, double zmax, double eps) {
    const double v = params.nu[0];
    const double lz = std::log(std::max(zmax, 1e-300));
    double R = 2.0;
    for (; R < 2000.0; R += 1.0) {
        // |Gamma(u+nu)/Gamma(1-u)| ~ pi / (|sin| Gamma(1-u-nu) Gamma(1-u)) at u = -R
        const double lmag = std::log(std::numbers::pi / std::sinh(std::numbers::pi * 0.5)) -
                            std::lgamma(1.0 + R - v) - std::lgamma(1.0 + R) + R * lz;
        if (R > x0 + 4.0 && lmag < std::log(eps) && R * R > std::abs(zmax) * 4.0) break;
    }
    return x0 - R;
}

// M = 1 only: the poles at u = -nu-k are simple, and the residue sum
// sum_k (nu+k)^i (-1)^k z^{nu+k} / (k! Gamma(1+nu+k)) loses about e^{2 sqrt z}
// to cancellation.
inline constexpr double kResidueSeriesMax = 4.0;

inline EvalResult<double> g_residue_series(double nu, int i, double z) {
    double term = std::pow(z, nu) * rgamma(1.0 + nu);
    CompensatedSum acc;
    double absacc = 0.0;
    for (int k = 0; k < 200; ++k) {
        const double t = term * std::pow(nu + k, i);
        acc.add(t);
        absacc += std::abs(t);
        if (k > z && std::abs(t) <= 1e-18 * std::abs(acc.value())) break;
        term *= -z / ((k + 1.0) * (nu + k + 1.0));
    }
    return {acc.value(), 4.0 * std::numeric_limits<double>::epsilon() * absacc, 0};
}

}  // namespace detail

/// Delta^i g(y), Delta = y d/dy, with
/// g(y) = (1/2 pi i) \int prod_j Gamma(u+nu_j) / Gamma(1-u) y^{-u} du.
/// Vertical line at Re u = 1/2 for M >= 2; for M = 1 that line integral does
/// not converge absolutely and the contour is folded into a hairpin opening to
/// the left around the poles of Gamma(u + nu_1).
inline EvalResult<double> delta_g(const ParamSet& params, int i, double y, double tol = 1e-13) {
    params.validate();
    if (i < 0 || i > params.M)
        throw ParameterError("delta_g.i", "delta_g needs 0 <= i <= M");
    if (!(y > 0.0)) throw DomainError("big_g.y", "g is evaluated at y > 0");
    const double c = detail::g_abscissa(params);
    const double ly = std::log(y);
    auto base = detail::g_integrand(params, i);
    auto f = [&](const Complex& u) { return base(u) * std::exp(-u * ly); };
    if (params.M >= 2)
        return detail::mellin_line(f, detail::line_abscissa(c, -params.alpha(), y), tol);
    if (y <= detail::kResidueSeriesMax) return detail::g_residue_series(params.nu[0], i, y);
    const double left = detail::g_hairpin_left(params, c, y, tol * 1e-3);
    std::vector<Complex> poles;
    for (double m = 0; -params.nu[0] - m > left; m += 1.0) poles.push_back(-params.nu[0] - m);
    auto r = integrate_loop(f, ContourSpec::left_hairpin(c, 0.5, left), tol, poles);
    return {r.value.real(), r.err_estimate + std::abs(r.value.imag()), r.panels_used};
}

inline EvalResult<double> big_g(const ParamSet& params, double y, double tol = 1e-13) {
    return delta_g(params, 0, y, tol);
}

/// Tabulated g and its Delta-derivatives for many arguments in (0, zmax].
class GTable {
public:
    explicit GTable(const ParamSet& params, double zmax = 10.0, double log_range = 46.0)
        : params_(params) {
        params.validate();
        const double c = detail::g_abscissa(params);
        auto base = detail::g_integrand(params, 0);
        if (params.M >= 2) {
            table_ = MellinTable::vertical(base, c, c + params.alpha(),
                                           std::max(log_range, std::abs(std::log(zmax))));
        } else {
            const double left = detail::g_hairpin_left(params, c, zmax, 1e-19);
            const auto contour = ContourSpec::left_hairpin(c, 0.5, left);
            const auto nodes = discretize(contour, 20, 1.0, 1.0, [](const Complex&) { return false; });
            table_ = MellinTable::nodes(base, nodes);
        }
    }

    EvalResult<double> delta(int i, double z) const {
        if (params_.M == 1 && z <= detail::kResidueSeriesMax)
            return detail::g_residue_series(params_.nu[0], i, z);
        return table_.eval(z, [i](const Complex& u, std::size_t) {
            Complex p(1.0);
            for (int r = 0; r < i; ++r) p *= -u;
            return p;
        });
    }
    EvalResult<double> g(double z) const {
        if (params_.M == 1 && z <= detail::kResidueSeriesMax)
            return detail::g_residue_series(params_.nu[0], 0, z);
        return table_.eval(z);
    }
    const ParamSet& params() const { return params_; }

private:
    ParamSet params_;
    MellinTable table_;
};

}  // namespace ginprod
