#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ginprod/errors.hpp"
#include "ginprod/params.hpp"
#include "ginprod/rational.hpp"

namespace ginprod {

/// Exact rational when every nu_j is a nonnegative integer, 50-digit binary
/// float otherwise.
struct Scalar {
    bool exact = true;
    Rational q = 0;
    HighPrec h = 0;

    static Scalar of(const Rational& v) { return {true, v, HighPrec(0)}; }
    static Scalar of(const HighPrec& v) { return {false, Rational(0), v}; }

    double value() const { return exact ? static_cast<double>(q) : static_cast<double>(h); }
    std::string str() const { return exact ? to_string(q) : to_string(h); }
    bool is_zero(double rel = 0.0) const {
        if (exact) return q == 0;
        return abs(h) <= rel;
    }
};

template <class T>
struct ScalarTraits;
template <>
struct ScalarTraits<Rational> {
    static Scalar wrap(const Rational& v) { return Scalar::of(v); }
};
template <>
struct ScalarTraits<HighPrec> {
    static Scalar wrap(const HighPrec& v) { return Scalar::of(v); }
};

/// Polynomial over the exact or high-precision scalar field.
struct ScalarPoly {
    bool exact = true;
    Polynomial<Rational> q;
    Polynomial<HighPrec> h;

    int degree() const { return exact ? q.degree() : h.degree(); }
    /// On the high-precision path "zero" means every coefficient is below
    /// rel times the scale the caller supplies.
    bool is_zero(double abs_tol = 0.0) const {
        if (exact) return q.is_zero();
        for (const auto& c : h.coeffs())
            if (abs(c) > abs_tol) return false;
        return true;
    }
    std::vector<std::string> coeff_strings() const {
        std::vector<std::string> out;
        if (exact) {
            for (const auto& c : q.coeffs()) out.push_back(to_string(c));
        } else {
            for (const auto& c : h.coeffs()) out.push_back(to_string(c));
        }
        if (out.empty()) out.push_back("0");
        return out;
    }
    double max_abs_coeff() const { return exact ? q.max_abs_coeff() : h.max_abs_coeff(); }
};

/// Monic P_n with exact or high-precision coefficients.
struct MonicPoly : ScalarPoly {};

template <class T>
std::vector<T> nu_scalars(const ParamSet& p) {
    std::vector<T> out;
    for (double v : p.nu_full()) out.push_back(T(v));
    return out;
}

template <class T>
Polynomial<T> p_poly(const std::vector<T>& nuf, int n) {
    if (n < 0) throw ParameterError("biorth.n.range", "polynomial degree must be nonnegative");
    // c_n = 1, c_l = -c_{l+1} * prod_j (l + nu_j + 1) / (n - l)
    std::vector<T> c(n + 1, T(0));
    c[n] = 1;
    for (int l = n - 1; l >= 0; --l) {
        T f = 1;
        for (const auto& v : nuf) f *= v + (l + 1);
        c[l] = -c[l + 1] * f / T(n - l);
    }
    return Polynomial<T>(std::move(c));
}

/// Coefficients of P_n.
inline MonicPoly p_coeffs(const ParamSet& params, int n) {
    MonicPoly out;
    out.exact = params.all_integer();
    if (out.exact)
        out.q = p_poly(nu_scalars<Rational>(params), n);
    else
        out.h = p_poly(nu_scalars<HighPrec>(params), n);
    return out;
}

/// \int_0^\infty x^l Q_k(x) dx.
template <class T>
T qk_moment(const std::vector<T>& nuf, int l, int k) {
    if (l < k) return T(0);
    T r = 1;
    for (const auto& v : nuf) r *= pochhammer<T>(v + (k + 1), l - k);
    return r / factorial<T>(l - k);
}

inline Scalar qk_moment_exact(const ParamSet& params, int l, int k) {
    if (l < 0 || k < 0) throw ParameterError("biorth.index", "moment indices must be nonnegative");
    if (params.all_integer()) return Scalar::of(qk_moment(nu_scalars<Rational>(params), l, k));
    return Scalar::of(qk_moment(nu_scalars<HighPrec>(params), l, k));
}

template <class T>
T biorth_pairing_t(const std::vector<T>& nuf, int j, int k) {
    const auto P = p_poly(nuf, j);
    T s = 0;
    for (int l = 0; l <= j; ++l) s += P.coeff(l) * qk_moment(nuf, l, k);
    return s;
}

/// \int P_j Q_k.
inline Scalar biorth_pairing(const ParamSet& params, int j, int k) {
    if (j < 0 || k < 0) throw ParameterError("biorth.index", "pairing indices must be nonnegative");
    if (params.all_integer()) return Scalar::of(biorth_pairing_t(nu_scalars<Rational>(params), j, k));
    return Scalar::of(biorth_pairing_t(nu_scalars<HighPrec>(params), j, k));
}

// ---------------------------------------------------------------------------
// Recurrence coefficients
// ---------------------------------------------------------------------------

template <class T>
T b_coeff_t(const std::vector<T>& nuf, int k, long n) {
    T pre = 1;
    for (const auto& v : nuf) pre *= pochhammer<T>(v + T(n + 1), k);
    T sum = 0;
    for (int j = 0; j <= k + 1; ++j) {
        T prod = 1;
        for (const auto& v : nuf) prod *= v + T(n + j);
        T term = prod / (factorial<T>(j) * factorial<T>(k + 1 - j));
        if ((k + 1 - j) % 2) sum -= term;
        else sum += term;
    }
    return pre * sum;
}

template <class T>
T a_coeff_reversed_t(const std::vector<T>& nuf, int k, long n) {
    T pre = 1;
    for (const auto& v : nuf) pre *= pochhammer<T>(v + T(n - k + 1), k);
    T sum = 0;
    for (int j = 0; j <= k + 1; ++j) {
        T prod = 1;
        for (const auto& v : nuf) prod *= v + T(n + 1 - j);
        T term = prod / (factorial<T>(j) * factorial<T>(k + 1 - j));
        if (j % 2) sum -= term;
        else sum += term;
    }
    return pre * sum;
}

inline void check_k(const ParamSet& params, int k) {
    if (k < 0 || k > params.M)
        throw ParameterError("biorth.k.range",
                             "recurrence index k must lie in [0, M], got " + std::to_string(k));
}

inline Scalar b_coeff(const ParamSet& params, int k, long n) {
    check_k(params, k);
    if (n < 0) throw ParameterError("biorth.n.range", "n must be nonnegative");
    if (params.all_integer()) return Scalar::of(b_coeff_t(nu_scalars<Rational>(params), k, n));
    return Scalar::of(b_coeff_t(nu_scalars<HighPrec>(params), k, n));
}

template <class T>
T a_coeff_t(const std::vector<T>& nuf, int k, long n) {
    const T fwd = b_coeff_t(nuf, k, n - k);
    const T rev = a_coeff_reversed_t(nuf, k, n);
    if constexpr (std::is_same_v<T, Rational>) {
        if (fwd != rev)
            throw NumericError("biorth.a.order", "summation orders disagree for a_{k,n}");
    } else {
        if (abs(fwd - rev) > T(1e-35) * (abs(fwd) + 1))
            throw NumericError("biorth.a.order", "summation orders disagree for a_{k,n}");
    }
    return fwd;
}

inline Scalar a_coeff(const ParamSet& params, int k, long n) {
    check_k(params, k);
    if (k > n)
        throw ParameterError("biorth.k.range", "a_{k,n} requires k <= n");
    if (params.all_integer()) return Scalar::of(a_coeff_t(nu_scalars<Rational>(params), k, n));
    return Scalar::of(a_coeff_t(nu_scalars<HighPrec>(params), k, n));
}

/// x P_n - P_{n+1} - sum_{k=0}^{min(M,n)} a_{k,n} P_{n-k}. `a0_shift` is
/// added to a_{0,n} (used to exercise the failure path of the verifier).
template <class T>
Polynomial<T> recurrence_residual_t(const std::vector<T>& nuf, int n, T a0_shift = T(0)) {
    const int M = static_cast<int>(nuf.size()) - 1;
    const Polynomial<T> x = Polynomial<T>::monomial(1);
    Polynomial<T> r = x * p_poly(nuf, n) - p_poly(nuf, n + 1);
    for (int k = 0; k <= std::min(M, n); ++k) {
        T a = b_coeff_t(nuf, k, n - k);
        if (k == 0) a += a0_shift;
        r -= p_poly(nuf, n - k) * a;
    }
    return r;
}

inline ScalarPoly recurrence_residual(const ParamSet& params, int n, double a0_shift = 0.0) {
    if (n < 0) throw ParameterError("biorth.n.range", "n must be nonnegative");
    ScalarPoly out;
    out.exact = params.all_integer();
    if (out.exact)
        out.q = recurrence_residual_t(nu_scalars<Rational>(params), n, Rational(a0_shift));
    else
        out.h = recurrence_residual_t(nu_scalars<HighPrec>(params), n, HighPrec(a0_shift));
    return out;
}

/// q_k(s) = (s - k)_k / prod_j Gamma(k + 1 + nu_j) as a polynomial in s.
template <class T>
Polynomial<T> q_poly(const std::vector<T>& nuf, int k) {
    Polynomial<T> p = Polynomial<T>::constant(T(1));
    for (int i = 0; i < k; ++i) p = p * Polynomial<T>::linear_root(T(k - i));
    T norm = 1;
    for (const auto& v : nuf) norm *= pochhammer<T>(v + 1, k);
    // Gamma(k+1+nu) = (nu+1)_k Gamma(nu+1); the Gamma(nu+1) factors are common
    // to every q_k and drop out of the identity being checked.
    return p * (T(1) / norm);
}

/// q_n(s+1) prod_{j>=1}(s + nu_j) - q_{n-1}(s) - sum_k b_{k,n} q_{n+k}(s).
template <class T>
Polynomial<T> dual_recurrence_residual_t(const std::vector<T>& nuf, int n) {
    const int M = static_cast<int>(nuf.size()) - 1;
    Polynomial<T> lhs = q_poly(nuf, n).shifted(T(1));
    for (int j = 1; j <= M; ++j) lhs = lhs * Polynomial<T>(std::vector<T>{nuf[j], T(1)});
    Polynomial<T> r = lhs;
    if (n >= 1) r -= q_poly(nuf, n - 1);
    for (int k = 0; k <= M; ++k) r -= q_poly(nuf, n + k) * b_coeff_t(nuf, k, n);
    return r;
}

inline ScalarPoly dual_recurrence_residual(const ParamSet& params, int n) {
    ScalarPoly out;
    out.exact = params.all_integer();
    if (out.exact) out.q = dual_recurrence_residual_t(nu_scalars<Rational>(params), n);
    else out.h = dual_recurrence_residual_t(nu_scalars<HighPrec>(params), n);
    return out;
}

struct LeadingOrder {
    int degree = -1;
    Scalar leading;
};

/// Degree and leading coefficient of n -> a_{k,n} from exact finite
/// differences over n = 0..(k+1)(M+1)+1.
inline LeadingOrder a_leading_order(const ParamSet& params, int k) {
    check_k(params, k);
    auto run = [&](auto tag) {
        using T = decltype(tag);
        const auto nuf = nu_scalars<T>(params);
        const int count = (k + 1) * (params.M + 1) + 2;
        std::vector<T> d;
        for (int n = 0; n < count; ++n) d.push_back(b_coeff_t(nuf, k, static_cast<long>(n) - k));
        // difference table; the degree is the last order with a nonzero row
        LeadingOrder lo;
        std::vector<T> row = d;
        for (int order = 0; order < count; ++order) {
            bool nonzero = false;
            for (const auto& v : row) {
                if constexpr (std::is_same_v<T, Rational>) nonzero = nonzero || v != 0;
                else nonzero = nonzero || abs(v) > T(1e-30) * (abs(d.back()) + 1);
            }
            if (nonzero) {
                lo.degree = order;
                lo.leading = ScalarTraits<T>::wrap(row.front() / factorial<T>(order));
            }
            std::vector<T> next;
            for (std::size_t i = 0; i + 1 < row.size(); ++i) next.push_back(row[i + 1] - row[i]);
            row = std::move(next);
            if (row.empty()) break;
        }
        return lo;
    };
    if (params.all_integer()) return run(Rational{});
    return run(HighPrec{});
}

struct OrthogonalityReport {
    bool passed = true;
    int conditions = 0;
    std::vector<std::string> failures;
};

/// Type II multiple orthogonality of P_n against w_0..w_{M-1} and
/// orthogonality against w~_0..w~_{n-1}, all from exact moments.
inline OrthogonalityReport mop_orthogonality_check(const ParamSet& params, int n) {
    if (!params.all_integer())
        throw ParameterError("biorth.exact-only",
                             "the orthogonality check needs nonnegative integer nu");
    const auto nuf = nu_scalars<Rational>(params);
    const int M = params.M;
    const auto P = p_poly(nuf, n);
    OrthogonalityReport rep;
    // \int x^t w_k = Gamma(t+1+nu_1+k) prod_{j>=2} Gamma(t+1+nu_j)
    auto w_moment = [&](int t, int k) {
        Rational r = factorial<Rational>(t + static_cast<int>(nuf[1]) + k);
        for (int j = 2; j <= M; ++j) r *= factorial<Rational>(t + static_cast<int>(nuf[j]));
        return r;
    };
    for (int k = 0; k < M; ++k) {
        const int count = (n - k + M - 1) / M;  // ceil((n-k)/M)
        for (int j = 0; j < count; ++j) {
            Rational s = 0;
            for (int l = 0; l <= n; ++l) s += P.coeff(l) * w_moment(l + j, k);
            ++rep.conditions;
            if (s != 0) {
                rep.passed = false;
                rep.failures.push_back("w_" + std::to_string(k) + " x^" + std::to_string(j) + ": " +
                                       to_string(s));
            }
        }
    }
    // \int x^t w~_k = (t+1)^k prod_{j>=1} Gamma(t+nu_j+1)
    for (int k = 0; k < n; ++k) {
        Rational s = 0;
        for (int l = 0; l <= n; ++l) {
            Rational m = 1;
            for (int i = 0; i < k; ++i) m *= (l + 1);
            for (int j = 1; j <= M; ++j) m *= factorial<Rational>(l + static_cast<int>(nuf[j]));
            s += P.coeff(l) * m;
        }
        ++rep.conditions;
        if (s != 0) {
            rep.passed = false;
            rep.failures.push_back("w~_" + std::to_string(k) + ": " + to_string(s));
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Floating evaluation of P_n
// ---------------------------------------------------------------------------

namespace detail {

struct PolyEval {
    long double value = 0;
    long double bound = 0;  // absolute error bound
};

// Compensated Horner in long double with coefficients carrying their own
// running error bounds.
inline PolyEval horner_compensated(const std::vector<long double>& c,
                                   const std::vector<long double>& cerr, long double x) {
    const long double u = std::numeric_limits<long double>::epsilon() / 2;
    long double s = c.back(), corr = 0.0L, absval = std::fabs(c.back());
    for (int i = static_cast<int>(c.size()) - 2; i >= 0; --i) {
        const long double p = s * x;
        const long double pe = std::fmal(s, x, -p);
        const long double t = p + c[i];
        const long double bb = t - p;
        const long double se = (p - (t - bb)) + (c[i] - bb);
        s = t;
        corr = corr * x + (pe + se);
        absval = absval * std::fabs(x) + std::fabs(c[i]);
    }
    long double ce = 0.0L;
    for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) ce = ce * std::fabs(x) + cerr[i];
    const long double n2 = 2.0L * static_cast<long double>(c.size());
    const long double gam = n2 * u / (1 - n2 * u);
    PolyEval r;
    r.value = s + corr;
    r.bound = u * std::fabs(r.value) + gam * gam * absval + ce;
    return r;
}

template <class F>
PolyEval horner_multiprecision(const ParamSet& params, int n, double x) {
    std::vector<F> nuf;
    for (double v : params.nu_full()) nuf.push_back(F(v));
    const auto P = p_poly(nuf, n);
    const F fx(x);
    F acc = 0, absval = 0;
    const auto& c = P.coeffs();
    for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) {
        acc = acc * fx + c[i];
        absval = absval * abs(fx) + abs(c[i]);
    }
    const F u = std::numeric_limits<F>::epsilon();
    const int ops = (params.M + 4) * (n + 1);
    PolyEval r;
    const F bound = u * ops * absval;
    // keep magnitudes in long double range; the caller checks overflow
    r.value = static_cast<long double>(acc);
    r.bound = static_cast<long double>(bound);
    return r;
}

}  // namespace detail

/// P_n(x) in floating point. Escalates from compensated long double to 100
/// and 300 digit arithmetic while the running error bound exceeds 1e-12
/// relative, then to exact rationals when nu is integer. Refuses
/// (PrecisionError) if no stage meets 1e-6 relative or the value overflows
/// double.
inline double p_eval(const ParamSet& params, int n, double x) {
    if (n < 0) throw ParameterError("biorth.n.range", "n must be nonnegative");
    if (!std::isfinite(x)) throw DomainError("biorth.x", "x must be finite");
    if (n == 0) return 1.0;
    auto accept = [](const detail::PolyEval& e, double rel) {
        return std::isfinite(static_cast<double>(e.value)) && e.bound <= rel * std::fabs(e.value);
    };
    auto finish = [&](const detail::PolyEval& e) {
        const double v = static_cast<double>(e.value);
        if (!std::isfinite(v))
            throw PrecisionError("biorth.p.overflow", "P_n(x) is outside the double range");
        return v;
    };
    // long double coefficients with running error bounds
    {
        const long double u = std::numeric_limits<long double>::epsilon() / 2;
        const auto nuf = params.nu_full();
        std::vector<long double> c(n + 1), ce(n + 1, 0.0L);
        c[n] = 1.0L;
        bool ok = true;
        for (int l = n - 1; l >= 0; --l) {
            long double f = 1.0L;
            long double ferr = 0.0L;
            for (double v : nuf) {
                f *= static_cast<long double>(v) + (l + 1);
                ferr += 2 * u;
            }
            c[l] = -c[l + 1] * f / (n - l);
            ce[l] = ce[l + 1] * f / (n - l) + std::fabs(c[l]) * (ferr + 3 * u);
            if (!std::isfinite(c[l])) ok = false;
        }
        if (ok && params.all_integer()) {
            // integer coefficients below 2^64 are exact
            for (int l = 0; l <= n; ++l)
                if (std::fabs(c[l]) < 1.8e19L) ce[l] = 0.0L;
        }
        if (ok) {
            const auto e = detail::horner_compensated(c, ce, x);
            if (accept(e, 1e-12)) return finish(e);
        }
    }
    using F100 = boost::multiprecision::cpp_bin_float_100;
    using F300 = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<300>>;
    const auto e100 = detail::horner_multiprecision<F100>(params, n, x);
    if (accept(e100, 1e-12)) return finish(e100);
    const auto e300 = detail::horner_multiprecision<F300>(params, n, x);
    if (accept(e300, 1e-12)) return finish(e300);
    if (params.all_integer() && std::isfinite(static_cast<double>(e300.value))) {
        const auto P = p_poly(nu_scalars<Rational>(params), n);
        return static_cast<double>(P(Rational(x)));
    }
    if (accept(e300, 1e-6)) return finish(e300);
    if (!std::isfinite(static_cast<double>(e300.value)))
        throw PrecisionError("biorth.p.overflow", "P_n(x) is outside the double range");
    throw PrecisionError("biorth.p.precision", "P_n(x) cannot be evaluated to 1e-6 relative");
}

}  // namespace ginprod
