#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <string>
#include <vector>

namespace ginprod {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;
using HighPrec = boost::multiprecision::cpp_bin_float_50;

inline std::string to_string(const Rational& r) { return r.str(); }
inline std::string to_string(const HighPrec& r) { return r.str(40, std::ios_base::scientific); }

inline bool is_zero(const Rational& r) { return r == 0; }
inline bool is_zero(const HighPrec& r) { return r == 0; }

template <class T>
double to_double(const T& v) {
    return static_cast<double>(v);
}

/// Rising factorial (a)_k.
template <class T>
T pochhammer(const T& a, int k) {
    T r = 1;
    for (int i = 0; i < k; ++i) r *= a + i;
    return r;
}

template <class T>
T factorial(int k) {
    T r = 1;
    for (int i = 2; i <= k; ++i) r *= i;
    return r;
}

template <class T>
T binomial(int n, int k) {
    if (k < 0 || k > n) return T(0);
    return factorial<T>(n) / (factorial<T>(k) * factorial<T>(n - k));
}

/// Dense polynomial with coefficients in ascending powers.
template <class T>
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<T> c) : c_(std::move(c)) { trim(); }
    static Polynomial constant(const T& v) { return Polynomial(std::vector<T>{v}); }
    static Polynomial monomial(int degree, const T& v = T(1)) {
        std::vector<T> c(degree + 1, T(0));
        c[degree] = v;
        return Polynomial(std::move(c));
    }
    /// (s - r)
    static Polynomial linear_root(const T& r) { return Polynomial(std::vector<T>{-r, T(1)}); }

    int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
    bool is_zero() const { return c_.empty(); }
    const std::vector<T>& coeffs() const { return c_; }
    T coeff(int i) const { return (i >= 0 && i < static_cast<int>(c_.size())) ? c_[i] : T(0); }

    template <class X>
    X operator()(const X& x) const {
        X acc = X(0);
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + X(*it);
        return acc;
    }

    Polynomial& operator+=(const Polynomial& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), T(0));
        for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
        trim();
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), T(0));
        for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
        trim();
        return *this;
    }
    Polynomial& operator*=(const T& s) {
        for (auto& v : c_) v *= s;
        trim();
        return *this;
    }
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, const T& s) { return a *= s; }
    friend Polynomial operator*(const T& s, Polynomial a) { return a *= s; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<T> c(a.c_.size() + b.c_.size() - 1, T(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
        return Polynomial(std::move(c));
    }

    /// p(s + h)
    Polynomial shifted(const T& h) const {
        Polynomial out;
        Polynomial basis = constant(T(1));
        const Polynomial step(std::vector<T>{h, T(1)});
        for (std::size_t i = 0; i < c_.size(); ++i) {
            out += basis * c_[i];
            basis = basis * step;
        }
        return out;
    }

    /// Largest |coefficient| as a double.
    double max_abs_coeff() const {
        double m = 0.0;
        for (const auto& v : c_) m = std::max(m, std::abs(to_double(v)));
        return m;
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == T(0)) c_.pop_back();
    }
    std::vector<T> c_;
};

}  // namespace ginprod
