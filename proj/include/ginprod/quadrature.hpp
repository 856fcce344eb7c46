#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "ginprod/errors.hpp"

namespace ginprod {

using Complex = std::complex<double>;

template <class T>
struct EvalResult {
    T value{};
    double err_estimate = 0.0;
    int panels_used = 0;
};

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const Complex& v) { return std::abs(v); }

inline bool finite_value(double v) { return std::isfinite(v); }
inline bool finite_value(const Complex& v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Gauss-Legendre rules
// ---------------------------------------------------------------------------

struct GaussRule {
    int order = 0;
    std::vector<double> nodes;    // ascending, in (-1, 1)
    std::vector<double> weights;  // positive
};

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
/// three-term Legendre recurrence. 1 <= order <= 512.
inline GaussRule gauss_legendre_rule(int order) {
    if (order < 1 || order > 512)
        throw ParameterError("quad.order.range",
                             "Gauss-Legendre order must lie in [1, 512], got " +
                                 std::to_string(order));
    GaussRule rule;
    rule.order = order;
    rule.nodes.assign(order, 0.0);
    rule.weights.assign(order, 0.0);
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // largest roots first
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            if (order == 1) {
                p1 = x;
                p0 = 1.0;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-17) break;
        }
        // recompute the derivative at the converged root
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= order; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        if (order == 1) p0 = 1.0, p1 = x;
        dp = order * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[order - 1 - i] = x;
        rule.nodes[i] = -x;
        rule.weights[order - 1 - i] = w;
        rule.weights[i] = w;
    }
    if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
    if (order == 1) {
        rule.nodes[0] = 0.0;
        rule.weights[0] = 2.0;
    }
    return rule;
}

// ---------------------------------------------------------------------------
// 15/31-point Gauss-Kronrod panel
// ---------------------------------------------------------------------------

namespace detail {

// QUADPACK dqk31 abscissae/weights; xgk[1], xgk[3], ... are the Gauss nodes.
inline constexpr double kXgk[16] = {
    0.998002298693397060285172840152271, 0.987992518020485428489565718586613,
    0.967739075679139134257347978784337, 0.937273392400705904307758947710209,
    0.897264532344081900882509656454496, 0.848206583410427216200648320774217,
    0.790418501442465932967649294817947, 0.724417731360170047416186054613938,
    0.650996741297416970533735895313275, 0.570972172608538847537226737253911,
    0.485081863640239680693655740232351, 0.394151347077563369897207370981045,
    0.299180007153168812166780024266389, 0.201194093997434522300628303394596,
    0.101142066918717499027074231447392, 0.0};
inline constexpr double kWgk[16] = {
    0.005377479872923348987792051430128, 0.015007947329316122538374763075807,
    0.025460847326715320186874001019653, 0.035346360791375846222037948478360,
    0.044589751324764876608227299373280, 0.053481524690928087265343147239430,
    0.062009567800670640285139230960803, 0.069854121318728258709520077099147,
    0.076849680757720378894432777482659, 0.083080502823133021038289247286104,
    0.088564443056211770647275443693774, 0.093126598170825321225486872747346,
    0.096642726983623678505179907627589, 0.099173598721791959332393173484603,
    0.100769845523875595044946662617570, 0.101330007014791549017374792767493};
inline constexpr double kWg[8] = {
    0.030753241996117268354628393577204, 0.070366047488108124709267416450667,
    0.107159220467171935011869546685869, 0.139570677926154314447804794511028,
    0.166269205816993933553200860481209, 0.186161000015562211026800561866423,
    0.198431485327111576456118326443839, 0.202578241925561272880620199967519};

template <class T>
struct Panel {
    double a = 0.0, b = 0.0;
    T value{};
    double err = 0.0;
    double floor = 0.0;  // rounding level 50 eps \int |f|
    double excess() const { return err - floor; }
    bool operator<(const Panel& o) const { return excess() < o.excess(); }
};

template <class T, class F>
Panel<T> gk31(const F& f, double a, double b) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double centr = 0.5 * (a + b);
    const double hlgth = 0.5 * (b - a);
    T fv1[15], fv2[15];
    const T fc = f(centr);
    T resg = kWg[7] * fc;
    T resk = kWgk[15] * fc;
    double resabs = kWgk[15] * magnitude(fc);
    for (int j = 0; j < 15; ++j) {
        const double absc = hlgth * kXgk[j];
        const T f1 = f(centr - absc);
        const T f2 = f(centr + absc);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
        resabs += kWgk[j] * (magnitude(f1) + magnitude(f2));
    }
    const T reskh = 0.5 * resk;
    double resasc = kWgk[15] * magnitude(fc - reskh);
    for (int j = 0; j < 15; ++j)
        resasc += kWgk[j] * (magnitude(fv1[j] - reskh) + magnitude(fv2[j] - reskh));
    const double dh = std::abs(hlgth);
    resasc *= dh;
    resabs *= dh;
    double err = magnitude((resk - resg) * hlgth);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    double floor = 0.0;
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
        floor = 50.0 * eps * resabs;
        err = std::max(floor, err);
    }
    if (!finite_value(resk))
        throw NumericError("quad.nonfinite", "integrand produced a non-finite value");
    return {a, b, resk * hlgth, err, floor};
}

}  // namespace detail

struct AdaptiveOptions {
    double abs_tol = 1e-12;
    double rel_tol = 0.0;
    int max_panels = 100000;
    // Geometric initial mesh toward an endpoint (ratio 1/4) for x^a log^r x
    // type endpoint singularities.
    bool singular_left = false;
    bool singular_right = false;
    int graded_levels = 30;
    int initial_panels = 1;
};

/// Globally adaptive bisection on [a, b] driven by the 15/31 Gauss-Kronrod
/// pair. Works for real- and complex-valued integrands. Refinement stops
/// early when what is left of the error estimate is rounding that bisection
/// cannot remove; the returned estimate still includes it.
template <class T, class F>
EvalResult<T> integrate_adaptive_t(const F& f, double a, double b, const AdaptiveOptions& opt) {
    if (!(a < b))
        throw ParameterError("quad.interval", "integrate_adaptive requires a < b");
    std::vector<double> breaks{a, b};
    const bool both = opt.singular_left && opt.singular_right;
    const double span = both ? 0.5 * (b - a) : (b - a);
    if (both) breaks.push_back(0.5 * (a + b));
    double w = span;
    for (int l = 0; l < opt.graded_levels && (opt.singular_left || opt.singular_right); ++l) {
        w *= 0.25;
        if (opt.singular_left) breaks.push_back(a + w);
        if (opt.singular_right) breaks.push_back(b - w);
    }
    if (!opt.singular_left && !opt.singular_right) {
        const int n0 = std::max(1, opt.initial_panels);
        for (int i = 1; i < n0; ++i) breaks.push_back(a + (b - a) * i / n0);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    std::priority_queue<detail::Panel<T>> heap;
    T total{};
    double total_err = 0.0, total_floor = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        auto p = detail::gk31<T>(f, breaks[i], breaks[i + 1]);
        total += p.value;
        total_err += p.err;
        total_floor += p.floor;
        heap.push(p);
    }
    int panels = static_cast<int>(heap.size());
    auto target = [&] { return std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(total)); };
    while (total_err > target() && total_err - total_floor > 0.5 * target()) {
        if (panels >= opt.max_panels)
            throw ConvergenceError("quad.budget", "adaptive quadrature exceeded its panel budget",
                                   detail::magnitude(total), total_err);
        auto worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b) ||
            (worst.b - worst.a) < 64 * std::numeric_limits<double>::epsilon() *
                                      std::max(std::abs(worst.a), std::abs(worst.b))) {
            break;  // cannot resolve further in double precision
        }
        heap.pop();
        auto l = detail::gk31<T>(f, worst.a, mid);
        auto r = detail::gk31<T>(f, mid, worst.b);
        total += (l.value + r.value) - worst.value;
        total_err += (l.err + r.err) - worst.err;
        total_floor += (l.floor + r.floor) - worst.floor;
        heap.push(l);
        heap.push(r);
        ++panels;
    }
    // re-sum to shed the accumulated update error
    T sum{};
    double err = 0.0;
    while (!heap.empty()) {
        sum += heap.top().value;
        err += heap.top().err;
        heap.pop();
    }
    return {sum, err, panels};
}

inline EvalResult<double> integrate_adaptive(const std::function<double(double)>& f, double a,
                                             double b, double tol,
                                             AdaptiveOptions opt = {}) {
    opt.abs_tol = tol;
    return integrate_adaptive_t<double>(f, a, b, opt);
}

/// Integral over [a, inf): a graded first cell [a, a+1] followed by doubling
/// cells until a cell contributes less than tol.
template <class F>
EvalResult<double> integrate_semi_infinite(const F& f, double a, double tol,
                                           bool singular_left = true, double first = 1.0) {
    AdaptiveOptions opt;
    opt.abs_tol = tol * 0.25;
    opt.singular_left = singular_left;
    auto head = integrate_adaptive_t<double>(f, a, a + first, opt);
    EvalResult<double> out = head;
    opt.singular_left = false;
    double lo = a + first, w = first;
    int quiet = 0;
    for (int cell = 0; cell < 200; ++cell) {
        opt.abs_tol = tol * 0.25;
        auto r = integrate_adaptive_t<double>(f, lo, lo + w, opt);
        out.value += r.value;
        out.err_estimate += r.err_estimate;
        out.panels_used += r.panels_used;
        lo += w;
        w *= 2.0;
        if (std::abs(r.value) < 1e-3 * tol) {
            if (++quiet >= 2) return out;
        } else {
            quiet = 0;
        }
    }
    throw ConvergenceError("quad.tail", "semi-infinite integral did not decay", out.value,
                           out.err_estimate);
}

// ---------------------------------------------------------------------------
// Complex contours
// ---------------------------------------------------------------------------

struct Segment {
    Complex from;
    Complex to;
    double length() const { return std::abs(to - from); }
};

inline double distance_to_segment(const Complex& p, const Segment& s) {
    const Complex d = s.to - s.from;
    const double len2 = std::norm(d);
    double u = len2 > 0 ? ((p - s.from) * std::conj(d)).real() / len2 : 0.0;
    u = std::clamp(u, 0.0, 1.0);
    return std::abs(p - (s.from + u * d));
}

/// Piecewise-linear integration contour, positively oriented.
///   VerticalLine:  c - iT  ->  c + iT
///   RectangleLoop: counterclockwise around [left, right] x [-h, h]
///   Hairpin:       from T + ih in to x0, down, and back out to T - ih
///                  (encircles the nonnegative real axis)
///   LeftHairpin:   from -T - ih in to x0, up, and back out to -T + ih
///                  (the deformation of an upward vertical line that wraps
///                  poles on the negative real axis)
struct ContourSpec {
    enum class Kind { VerticalLine, RectangleLoop, Hairpin, LeftHairpin };
    Kind kind = Kind::VerticalLine;
    double a = 0.0;  // abscissa / left edge / crossing x0
    double b = 0.0;  // half-height (line) / right edge / unused
    double h = 0.0;  // half-height for loops
    double T = 0.0;  // truncation for hairpins

    static ContourSpec vertical(double c, double half_height) {
        return {Kind::VerticalLine, c, half_height, 0.0, 0.0};
    }
    static ContourSpec rectangle(double left, double right, double half_height) {
        if (!(left < right) || !(half_height > 0))
            throw ParameterError("contour.rectangle", "rectangle needs left < right and h > 0");
        return {Kind::RectangleLoop, left, right, half_height, 0.0};
    }
    static ContourSpec hairpin(double x0, double half_height, double right_trunc) {
        if (!(x0 < 0) || !(half_height > 0) || !(right_trunc > x0))
            throw ParameterError("contour.hairpin",
                                 "hairpin must cross the real axis left of 0 and open to the right");
        return {Kind::Hairpin, x0, 0.0, half_height, right_trunc};
    }
    static ContourSpec left_hairpin(double x0, double half_height, double left_trunc) {
        if (!(half_height > 0) || !(left_trunc < x0))
            throw ParameterError("contour.hairpin", "left hairpin must open to the left");
        return {Kind::LeftHairpin, x0, 0.0, half_height, left_trunc};
    }

    std::vector<Segment> segments() const {
        const Complex I(0, 1);
        switch (kind) {
            case Kind::VerticalLine:
                return {{Complex(a, -b), Complex(a, b)}};
            case Kind::RectangleLoop:
                return {{Complex(a, -h), Complex(b, -h)},
                        {Complex(b, -h), Complex(b, h)},
                        {Complex(b, h), Complex(a, h)},
                        {Complex(a, h), Complex(a, -h)}};
            case Kind::Hairpin:
                return {{T + h * I, a + h * I}, {a + h * I, a - h * I}, {a - h * I, T - h * I}};
            case Kind::LeftHairpin:
                return {{T - h * I, a - h * I}, {a - h * I, a + h * I}, {a + h * I, T + h * I}};
        }
        return {};
    }

    double min_distance_to(const Complex& p) const {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& s : segments()) d = std::min(d, distance_to_segment(p, s));
        return d;
    }
};

/// (1/2 pi i) times the integral of f along the positively oriented contour.
/// Every declared pole must stay at least `exclusion` away from the path.
template <class F>
EvalResult<Complex> integrate_loop(const F& f, const ContourSpec& contour, double tol = 1e-12,
                                   std::span<const Complex> poles = {},
                                   double exclusion = 0.1) {
    for (const auto& p : poles) {
        if (contour.min_distance_to(p) < exclusion)
            throw GeometryError("contour.pole",
                                "contour passes within the exclusion distance of a pole");
    }
    const auto segs = contour.segments();
    EvalResult<Complex> out;
    for (const auto& s : segs) {
        const Complex d = s.to - s.from;
        auto g = [&](double u) -> Complex { return f(s.from + u * d) * d; };
        AdaptiveOptions opt;
        opt.abs_tol = tol * 2.0 * std::numbers::pi / static_cast<double>(segs.size());
        opt.initial_panels = std::max(1, static_cast<int>(std::ceil(s.length())));
        auto r = integrate_adaptive_t<Complex>(g, 0.0, 1.0, opt);
        out.value += r.value;
        out.err_estimate += r.err_estimate;
        out.panels_used += r.panels_used;
    }
    const Complex two_pi_i(0.0, 2.0 * std::numbers::pi);
    out.value /= two_pi_i;
    out.err_estimate /= 2.0 * std::numbers::pi;
    return out;
}

/// (1/2 pi i) * integral over Re s = c of f(s) ds. The line is truncated at the
/// smallest height T (doubling from 4) where decay_bound(T), a bound for the
/// two tails, drops below tol; the remainder is integrated by adaptive
/// Gauss-Kronrod panels of initial width 1.
template <class F, class B>
EvalResult<Complex> integrate_vertical(const F& f, double c, double tol, const B& decay_bound,
                                       double max_height = 4096.0) {
    double T = 4.0;
    double tail = decay_bound(T);
    while (!(tail < tol)) {
        T *= 2.0;
        if (T > max_height)
            throw ConvergenceError("quad.truncation",
                                   "vertical-line tail bound never fell below tolerance", 0.0,
                                   tail);
        tail = decay_bound(T);
    }
    auto g = [&](double tau) -> Complex { return f(Complex(c, tau)); };
    AdaptiveOptions opt;
    opt.abs_tol = tol * 2.0 * std::numbers::pi;
    opt.initial_panels = static_cast<int>(2 * T);
    auto r = integrate_adaptive_t<Complex>(g, -T, T, opt);
    r.value /= 2.0 * std::numbers::pi;
    r.err_estimate = r.err_estimate / (2.0 * std::numbers::pi) + tail;
    return r;
}

/// Tail bound for integrands with exponential decay along the line: the
/// larger endpoint modulus divided by the decay rate inferred from |f(T)| and
/// |f(2T)| (at least `min_rate`).
template <class F>
auto sampled_decay_bound(const F& f, double c, double min_rate = 0.5) {
    return [f, c, min_rate](double T) {
        const double m1 = std::max(std::abs(f(Complex(c, T))), std::abs(f(Complex(c, -T))));
        const double m2 =
            std::max(std::abs(f(Complex(c, 2 * T))), std::abs(f(Complex(c, -2 * T))));
        if (m1 == 0.0) return 0.0;
        double rate = (m2 > 0.0) ? std::log(m1 / m2) / T : 50.0;
        if (!(rate > min_rate)) return std::numeric_limits<double>::infinity();
        return m1 / rate / std::numbers::pi;
    };
}

// ---------------------------------------------------------------------------
// Tabulated contours (reused across many evaluations of a fixed integrand)
// ---------------------------------------------------------------------------

/// Composite Gauss nodes on a contour; `w` already includes dz. `coarse_*`
/// is the half-order rule on the same panels, used for error estimates.
struct ContourNodes {
    std::vector<Complex> z, w;
    std::vector<Complex> coarse_z, coarse_w;
};

/// Panels of length `near_len` where `is_near` holds for the panel midpoint
/// and up to `far_len` elsewhere.
template <class P>
ContourNodes discretize(const ContourSpec& contour, int order, double far_len, double near_len,
                        const P& is_near) {
    const GaussRule fine = gauss_legendre_rule(order);
    const GaussRule coarse = gauss_legendre_rule(std::max(1, order / 2));
    ContourNodes out;
    auto emit = [&](Complex a, Complex b) {
        const Complex mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int i = 0; i < fine.order; ++i) {
            out.z.push_back(mid + half * fine.nodes[i]);
            out.w.push_back(half * fine.weights[i]);
        }
        for (int i = 0; i < coarse.order; ++i) {
            out.coarse_z.push_back(mid + half * coarse.nodes[i]);
            out.coarse_w.push_back(half * coarse.weights[i]);
        }
    };
    const int merge = std::max(1, static_cast<int>(std::lround(far_len / near_len)));
    for (const auto& s : contour.segments()) {
        const int cells = std::max(1, static_cast<int>(std::ceil(s.length() / near_len)));
        const Complex step = (s.to - s.from) / static_cast<double>(cells);
        int i = 0;
        while (i < cells) {
            const Complex a = s.from + step * static_cast<double>(i);
            if (is_near(a + 0.5 * step)) {
                emit(a, a + step);
                ++i;
                continue;
            }
            int j = i + 1;
            while (j < cells && j - i < merge && !is_near(s.from + step * (j + 0.5))) ++j;
            emit(a, s.from + step * static_cast<double>(j));
            i = j;
        }
    }
    return out;
}

/// (1/2 pi i) \int F(s) z^{-s} ds for many z > 0 over one fixed contour, with
/// F tabulated once. Vertical lines use the trapezoid rule in Im s with
/// conjugate symmetry (F(conj s) = conj F(s)); other contours use the
/// composite Gauss nodes of `discretize`.
class MellinTable {
public:
    /// Line Re s = c. `strip` is the distance from the line to the nearest
    /// singularity of F, `log_range` the largest |log z| the table must serve.
    template <class F>
    static MellinTable vertical(const F& f, double c, double strip, double log_range,
                                double eps = 1e-18, double max_height = 5000.0) {
        return vertical(f, c, strip, log_range, [](const Complex&, const Complex& v) {
            return std::abs(v);
        }, eps, max_height);
    }

    /// As above; the line is truncated where envelope(s, F(s)) has dropped
    /// below eps times its running maximum.
    template <class F, class E>
    static MellinTable vertical(const F& f, double c, double strip, double log_range,
                                const E& envelope, double eps = 1e-18,
                                double max_height = 5000.0) {
        if (!(strip > 0))
            throw GeometryError("contour.pole", "Mellin-Barnes line passes through a pole");
        MellinTable t;
        t.line_ = true;
        t.c_ = c;
        const double d = 0.9 * strip;
        const double L = std::max(1.0, log_range);
        t.h_ = 2.0 * std::numbers::pi * d / (std::log(1.0 / eps) + d * L + 2.0);
        double peak = 0.0, last_unit = 0.0;
        double next_check = 1.0;
        for (int j = 0;; ++j) {
            const double tau = j * t.h_;
            const Complex v = f(Complex(c, tau));
            const double m = envelope(Complex(c, tau), v);
            if (!std::isfinite(m))
                throw NumericError("quad.nonfinite", "Mellin-Barnes integrand is not finite");
            peak = std::max(peak, m);
            last_unit = std::max(last_unit, m);
            t.s_.push_back(Complex(c, tau));
            t.f_.push_back(v);
            if (tau >= next_check) {
                if (tau >= 4.0 && last_unit < eps * peak) break;
                last_unit = 0.0;
                next_check += 1.0;
            }
            if (tau > max_height)
                throw ConvergenceError("quad.truncation",
                                       "Mellin-Barnes integrand does not decay along the line", 0.0,
                                       m);
        }
        return t;
    }

    /// Arbitrary contour from composite Gauss nodes; F is evaluated at both
    /// node sets.
    template <class F>
    static MellinTable nodes(const F& f, const ContourNodes& n) {
        MellinTable t;
        t.line_ = false;
        const Complex inv(0.0, -0.5 / std::numbers::pi);  // 1/(2 pi i)
        for (std::size_t i = 0; i < n.z.size(); ++i) {
            t.s_.push_back(n.z[i]);
            t.f_.push_back(f(n.z[i]) * n.w[i] * inv);
        }
        for (std::size_t i = 0; i < n.coarse_z.size(); ++i) {
            t.cs_.push_back(n.coarse_z[i]);
            t.cf_.push_back(f(n.coarse_z[i]) * n.coarse_w[i] * inv);
        }
        return t;
    }

    std::size_t size() const { return s_.size(); }
    const std::vector<Complex>& abscissae() const { return s_; }

    EvalResult<double> eval(double z) const {
        return eval(z, [](const Complex&, std::size_t) { return Complex(1.0); });
    }

    /// Same integral with an extra factor p(s, node index) in the integrand.
    template <class P>
    EvalResult<double> eval(double z, const P& p) const {
        if (!(z > 0)) throw DomainError("mellin.z", "Mellin-Barnes argument must be positive");
        const double lz = std::log(z);
        EvalResult<double> r;
        r.panels_used = static_cast<int>(s_.size());
        if (line_) {
            const Complex rot = std::exp(Complex(0.0, -t_step() * lz));
            Complex ph(1.0);
            Complex fine(0.0), coarse(0.0);
            double scale = 0.0;
            for (std::size_t j = 0; j < s_.size(); ++j) {
                if (j % 32 == 0) ph = std::exp(Complex(0.0, -s_[j].imag() * lz));
                const Complex v = f_[j] * p(s_[j], j) * ph;
                const double w = (j == 0) ? 0.5 : 1.0;
                fine += w * v;
                if (j % 2 == 0) coarse += w * v;
                scale += std::abs(v);
                ph *= rot;
            }
            const double pre = std::exp(-c_ * lz) * h_ / std::numbers::pi;
            const double vf = pre * fine.real();
            const double vc = 2.0 * pre * coarse.real();
            scale *= pre;
            const double diff = std::abs(vf - vc);
            r.value = vf;
            r.err_estimate = diff * std::min(1.0, diff / std::max(scale, 1e-300)) +
                             64.0 * std::numeric_limits<double>::epsilon() * scale;
            return r;
        }
        Complex fine(0.0), coarse(0.0);
        double scale = 0.0;
        for (std::size_t j = 0; j < s_.size(); ++j) {
            const Complex v = f_[j] * p(s_[j], j) * std::exp(-s_[j] * lz);
            fine += v;
            scale += std::abs(v);
        }
        for (std::size_t j = 0; j < cs_.size(); ++j)
            coarse += cf_[j] * p(cs_[j], j) * std::exp(-cs_[j] * lz);
        r.value = fine.real();
        const double diff = std::abs(fine - coarse);
        r.err_estimate = diff * std::min(1.0, diff / std::max(scale, 1e-300)) +
                         64.0 * std::numeric_limits<double>::epsilon() * scale;
        return r;
    }

    bool is_line() const { return line_; }
    double step() const { return h_; }
    double abscissa() const { return c_; }
    const std::vector<Complex>& values() const { return f_; }

private:
    double t_step() const { return h_; }
    bool line_ = true;
    double c_ = 0.0, h_ = 0.0;
    std::vector<Complex> s_, f_;    // fine nodes and F (times weight for non-line)
    std::vector<Complex> cs_, cf_;  // coarse nodes (non-line)
};

}  // namespace ginprod
