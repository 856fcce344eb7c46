#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "ginprod/errors.hpp"

namespace ginprod {

namespace detail {

inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczosCoef = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

inline bool is_nonpositive_integer(const std::complex<double>& z) {
    return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

// log Gamma for Re z >= 1/2
inline std::complex<double> log_gamma_right(std::complex<double> z) {
    const std::complex<double> w = z - 1.0;
    std::complex<double> a = kLanczosCoef[0];
    for (std::size_t i = 1; i < kLanczosCoef.size(); ++i)
        a += kLanczosCoef[i] / (w + static_cast<double>(i));
    const std::complex<double> t = w + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (w + 0.5) * std::log(t) - t + std::log(a);
}

// log sin(pi z) on the branch continuous in the closed upper half plane and
// real on (0, 1); conjugated below.
inline std::complex<double> log_sin_pi(std::complex<double> z) {
    const bool lower = z.imag() < 0.0;
    if (lower) z = std::conj(z);
    const std::complex<double> I(0.0, 1.0);
    const double pi = std::numbers::pi;
    const std::complex<double> e = std::exp(2.0 * pi * I * z);
    std::complex<double> r = -I * pi * z + std::log(1.0 - e) - std::log(2.0) + I * (pi / 2.0);
    return lower ? std::conj(r) : r;
}

}  // namespace detail

/// log Gamma(z) on the branch that is analytic in the plane cut along the
/// nonpositive real axis and real on the positive axis.
inline std::complex<double> log_gamma(std::complex<double> z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw DomainError("gamma.nonfinite", "log_gamma argument is not finite");
    if (detail::is_nonpositive_integer(z))
        throw DomainError("gamma.pole", "log_gamma evaluated at a pole");
    if (z.real() >= 0.5) return detail::log_gamma_right(z);
    return std::log(std::numbers::pi) - detail::log_sin_pi(z) - detail::log_gamma_right(1.0 - z);
}

inline std::complex<double> gamma(std::complex<double> z) { return std::exp(log_gamma(z)); }

/// 1/Gamma(z), zero at the poles.
inline std::complex<double> rgamma(std::complex<double> z) {
    if (detail::is_nonpositive_integer(z)) return 0.0;
    return std::exp(-log_gamma(z));
}

/// 1/Gamma(x) for real x, zero at the poles.
inline double rgamma(double x) {
    if (x <= 0.0 && x == std::floor(x)) return 0.0;
    return 1.0 / std::tgamma(x);
}

}  // namespace ginprod
