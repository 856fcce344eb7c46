#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <vector>

#include "ginprod/biorth.hpp"
#include "ginprod/specfun.hpp"

namespace ginprod {

/// log of N_k / k! = prod_{j=1}^M Gamma(k + 1 + nu_j).
inline double log_norm_ratio(const ParamSet& params, int k) {
    double r = 0.0;
    for (double v : params.nu) r += std::lgamma(k + 1.0 + v);
    return r;
}

namespace detail {

inline double q_abscissa(const ParamSet& params) { return std::max(0.5, -params.alpha() + 0.5); }

// (-1)^k prod_{j>=1} Gamma(s+nu_j) (1-s)_k / k!, the integrand of
// Q~_k = Q_k N_k / k! with 1/Gamma(s-k) reflected.
inline auto q_integrand(const ParamSet& params, int k) {
    return [nu = params.nu, k](const Complex& s) {
        Complex v = std::exp(log_gamma_sum(nu, s));
        for (int m = 1; m <= k; ++m) v *= (static_cast<double>(m) - s) / static_cast<double>(m);
        return (k % 2) ? -v : v;
    };
}

}  // namespace detail

/// Q~_k(y) = Q_k(y) prod_j Gamma(k+1+nu_j) / k! by integrate_vertical.
inline EvalResult<double> q_scaled_eval(const ParamSet& params, int k, double y, double tol = 1e-13) {
    params.validate();
    if (k < 0) throw ParameterError("biorth.k.range", "Q_k needs k >= 0");
    if (!(y > 0.0)) throw DomainError("q.y", "Q_k is evaluated at y > 0");
    const double ly = std::log(y);
    auto base = detail::q_integrand(params, k);
    auto f = [&](const Complex& s) { return base(s) * std::exp(-s * ly); };
    return detail::mellin_line(
        f, detail::line_abscissa(detail::q_abscissa(params), -params.alpha(), y), tol);
}

/// Q_k(y) = (1/N_k) (1/2 pi i) \int prod_{j=0}^M Gamma(s+nu_j) / Gamma(s-k)
/// y^{-s} ds, N_k = prod_j Gamma(k+1+nu_j). `tol` applies to Q_k N_k / k!.
inline EvalResult<double> q_eval(const ParamSet& params, int k, double y, double tol = 1e-13) {
    auto r = q_scaled_eval(params, k, y, tol);
    const double scale = std::exp(-log_norm_ratio(params, k));
    r.value *= scale;
    r.err_estimate *= scale;
    return r;
}

/// Q~_0..Q~_kmax tabulated on one trapezoid line.
class QTable {
public:
    QTable(const ParamSet& params, int kmax, double log_range = 46.0) : params_(params), kmax_(kmax) {
        params.validate();
        if (kmax < 0) throw ParameterError("biorth.k.range", "kmax must be nonnegative");
        const double c = detail::q_abscissa(params);
        auto base = detail::q_integrand(params, 0);
        // largest |(1-s)_k / k!| over k <= kmax decides the truncation
        auto envelope = [kmax](const Complex& s, const Complex& v) {
            double lg = 0.0, best = 0.0;
            for (int m = 1; m <= kmax; ++m) {
                lg += std::log(std::abs(static_cast<double>(m) - s) / m);
                best = std::max(best, lg);
            }
            return std::abs(v) * std::exp(best);
        };
        table_ = MellinTable::vertical(base, c, c + params.alpha(),
                                       log_range + std::log(kmax + 1.0), envelope);
    }

    int kmax() const { return kmax_; }

    /// Q~_k(z) for k = 0..kmax.
    std::vector<EvalResult<double>> eval_all(double z) const {
        if (!(z > 0.0)) throw DomainError("q.y", "Q_k is evaluated at y > 0");
        const auto& s = table_.abscissae();
        const auto& F = table_.values();
        const double lz = std::log(z), h = table_.step();
        std::vector<Complex> fine(kmax_ + 1), coarse(kmax_ + 1);
        std::vector<double> scale(kmax_ + 1, 0.0);
        const Complex rot = std::exp(Complex(0.0, -h * lz));
        Complex ph(1.0);
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (j % 32 == 0) ph = std::exp(Complex(0.0, -s[j].imag() * lz));
            const double w = (j == 0) ? 0.5 : 1.0;
            Complex v = F[j] * ph * w;
            const bool even = (j % 2 == 0);
            for (int k = 0; k <= kmax_; ++k) {
                fine[k] += v;
                if (even) coarse[k] += v;
                scale[k] += std::abs(v);
                v *= (static_cast<double>(k + 1) - s[j]) / static_cast<double>(k + 1);
            }
            ph *= rot;
        }
        const double pre = std::exp(-table_.abscissa() * lz) * h / std::numbers::pi;
        std::vector<EvalResult<double>> out(kmax_ + 1);
        for (int k = 0; k <= kmax_; ++k) {
            const double sign = (k % 2) ? -1.0 : 1.0;
            const double vf = sign * pre * fine[k].real();
            const double vc = sign * 2.0 * pre * coarse[k].real();
            const double sc = pre * scale[k];
            const double diff = std::abs(vf - vc);
            out[k] = {vf,
                      diff * std::min(1.0, diff / std::max(sc, 1e-300)) +
                          64.0 * std::numeric_limits<double>::epsilon() * sc,
                      static_cast<int>(s.size())};
        }
        return out;
    }

    /// Q~_k(z) for one k; `factors` from node_factors(k) avoids recomputing
    /// the Pochhammer product.
    EvalResult<double> eval(const std::vector<Complex>& factors, double z) const {
        return table_.eval(z, [&](const Complex&, std::size_t j) { return factors[j]; });
    }

    std::vector<Complex> node_factors(int k) const {
        std::vector<Complex> out;
        for (const auto& s : table_.abscissae()) {
            Complex v = (k % 2) ? -1.0 : 1.0;
            for (int m = 1; m <= k; ++m) v *= (static_cast<double>(m) - s) / static_cast<double>(m);
            out.push_back(v);
        }
        return out;
    }

private:
    ParamSet params_;
    int kmax_;
    MellinTable table_;
};

/// P~_k(x) = P_k(x) k! / prod_j Gamma(k+1+nu_j) for k = 0..kmax, i.e.
/// sum_l (-1)^{k-l} binom(k,l) x^l / prod_{j>=1} Gamma(l+1+nu_j).
inline std::vector<double> p_scaled_all(const ParamSet& params, int kmax, double x) {
    params.validate();
    using HP = boost::multiprecision::cpp_bin_float_50;
    double d0 = 1.0;
    for (double v : params.nu) d0 *= rgamma(v + 1.0);
    std::vector<long double> d(kmax + 1);
    d[0] = d0;
    for (int l = 0; l < kmax; ++l) {
        long double q = 1.0L;
        for (double v : params.nu) q *= l + 1.0L + v;
        d[l + 1] = d[l] * x / q;
    }
    std::vector<double> out(kmax + 1);
    std::vector<HP> dh;
    std::vector<long double> binom{1.0L};
    for (int k = 0; k <= kmax; ++k) {
        if (k > 0) {
            std::vector<long double> next(k + 1, 1.0L);
            for (int l = 1; l < k; ++l) next[l] = binom[l - 1] + binom[l];
            binom = std::move(next);
        }
        long double s = 0.0L, sa = 0.0L;
        for (int l = 0; l <= k; ++l) {
            const long double t = binom[l] * d[l];
            s += ((k - l) % 2) ? -t : t;
            sa += std::fabs(t);
        }
        if (sa <= 1e6L * std::fabs(s)) {
            out[k] = static_cast<double>(s);
            continue;
        }
        if (dh.empty()) {
            dh.resize(kmax + 1);
            dh[0] = HP(d0);
            for (int l = 0; l < kmax; ++l) {
                HP q = 1;
                for (double v : params.nu) q *= HP(l + 1) + HP(v);
                dh[l + 1] = dh[l] * HP(x) / q;
            }
        }
        HP sh = 0, b = 1;
        for (int l = 0; l <= k; ++l) {
            sh += ((k - l) % 2) ? -b * dh[l] : b * dh[l];
            b = b * (k - l) / (l + 1);
        }
        out[k] = static_cast<double>(sh);
    }
    return out;
}

/// P~_k(x) for one k.
inline double p_scaled(const ParamSet& params, int k, double x) {
    return p_scaled_all(params, k, x)[k];
}

}  // namespace ginprod
