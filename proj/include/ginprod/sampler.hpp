#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "ginprod/kernel.hpp"

namespace ginprod {

using ComplexMatrix = Eigen::MatrixXcd;

/// Y_M = X_M ... X_1 with X_j of size N_j x N_{j-1}.
struct MatrixChainSpec {
    std::vector<int> dims;  // N_0..N_M

    int M() const { return static_cast<int>(dims.size()) - 1; }
    int n() const { return dims.front(); }

    void validate() const {
        if (dims.size() < 2)
            throw ParameterError("spec.dims", "dims needs N_0 and at least one more entry");
        for (int d : dims)
            if (d < 1) throw ParameterError("spec.dims", "matrix dimensions must be positive");
        if (*std::min_element(dims.begin(), dims.end()) != dims.front())
            throw ParameterError("spec.n0.min", "N_0 must be the smallest dimension");
    }

    /// nu_j = N_j - N_0 for j = 1..M.
    ParamSet params() const {
        validate();
        std::vector<double> nu;
        for (std::size_t j = 1; j < dims.size(); ++j) nu.push_back(dims[j] - dims[0]);
        return ParamSet(M(), nu);
    }
};

struct SampleBatch {
    MatrixChainSpec spec;
    std::uint64_t seed = 0;
    int trials = 0;
    std::vector<double> values;  // trials rows of n sorted values

    int n() const { return spec.n(); }
    double at(int trial, int i) const { return values[static_cast<std::size_t>(trial) * n() + i]; }
};

struct Histogram {
    std::vector<double> edges;
    std::vector<long long> counts;
    double total_mass = 0.0;          // points in range per trial
    std::vector<double> density;      // counts / (trials * width)
    std::vector<double> predicted;    // bin averages of K(x, x)
    double sup_discrepancy = 0.0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::mt19937_64 trial_engine(std::uint64_t seed, std::uint64_t trial) {
    std::uint64_t s = seed;
    const std::uint64_t a = splitmix64(s);
    std::uint64_t t = a ^ (trial * 0xD1B54A32D192ED03ULL);
    std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(t)),
                      static_cast<std::uint32_t>(splitmix64(t) >> 32),
                      static_cast<std::uint32_t>(splitmix64(t)),
                      static_cast<std::uint32_t>(splitmix64(t) >> 32)};
    return std::mt19937_64(seq);
}

inline int worker_count() {
    if (const char* env = std::getenv("GINPROD_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace detail

/// Entries have independent real and imaginary parts of variance 1/2.
inline ComplexMatrix draw_product(const MatrixChainSpec& spec, std::uint64_t seed,
                                  std::uint64_t trial_index) {
    spec.validate();
    auto eng = detail::trial_engine(seed, trial_index);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    auto draw = [&](int rows, int cols) {
        ComplexMatrix X(rows, cols);
        for (int j = 0; j < cols; ++j)
            for (int i = 0; i < rows; ++i) {
                const double re = normal(eng);
                const double im = normal(eng);
                X(i, j) = {re, im};
            }
        return X;
    };
    ComplexMatrix Y = draw(spec.dims[1], spec.dims[0]);
    for (std::size_t j = 2; j < spec.dims.size(); ++j) {
        ComplexMatrix X = draw(spec.dims[j], spec.dims[j - 1]);
        Y = (X * Y).eval();
    }
    return Y;
}

/// Eigenvalues of Y^* Y, ascending.
inline std::vector<double> squared_singular_values(const ComplexMatrix& Y) {
    if (!Y.allFinite()) throw DomainError("sampler.nonfinite", "matrix has non-finite entries");
    const ComplexMatrix A = Y.adjoint() * Y;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(A, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NumericError("sampler.eigen", "Hermitian eigensolver did not converge");
    std::vector<double> out(es.eigenvalues().data(),
                            es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(out.begin(), out.end());
    return out;
}

inline SampleBatch run_batch(const MatrixChainSpec& spec, std::uint64_t seed, int trials) {
    spec.validate();
    if (trials < 1) throw ParameterError("sampler.trials", "trials must be at least 1");
    SampleBatch batch{spec, seed, trials, {}};
    const int n = spec.n();
    batch.values.resize(static_cast<std::size_t>(trials) * n);
    const int workers = std::min(detail::worker_count(), trials);
    auto work = [&](int begin, int end) {
        for (int t = begin; t < end; ++t) {
            const auto ev = squared_singular_values(draw_product(spec, seed, t));
            std::copy(ev.begin(), ev.end(), batch.values.begin() + static_cast<std::size_t>(t) * n);
        }
    };
    if (workers == 1) {
        work(0, trials);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (trials + workers - 1) / workers;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(work, w * chunk, std::min(trials, (w + 1) * chunk));
        for (auto& th : pool) th.join();
    }
    return batch;
}

struct MomentComparison {
    int p = 0;
    double empirical = 0.0, std_error = 0.0, exact = 0.0, z = 0.0;
    bool flagged = false;
};

/// Mean over trials of sum_i x_i^p against the exact trace moment.
inline std::vector<MomentComparison> empirical_vs_exact_moments(const SampleBatch& batch,
                                                                const std::vector<int>& p_list) {
    if (batch.trials < 1) throw ParameterError("sampler.trials", "batch is empty");
    const ParamSet params = batch.spec.params();
    if (!params.all_integer())
        throw ParameterError("sampler.integer-nu", "the sampler needs integer nu");
    KernelConfig cfg;
    cfg.params = params;
    cfg.n = batch.n();
    std::vector<MomentComparison> out;
    for (int p : p_list) {
        MomentComparison m;
        m.p = p;
        m.exact = trace_moment(cfg, p).value();
        double mean = 0.0, m2 = 0.0;
        for (int t = 0; t < batch.trials; ++t) {
            double s = 0.0;
            for (int i = 0; i < batch.n(); ++i) s += std::pow(batch.at(t, i), p);
            const double d = s - mean;
            mean += d / (t + 1);
            m2 += d * (s - mean);
        }
        m.empirical = mean;
        m.std_error = batch.trials > 1 ? std::sqrt(m2 / (batch.trials - 1) / batch.trials) : 0.0;
        const double diff = m.empirical - m.exact;
        if (m.std_error > 0.0)
            m.z = diff / m.std_error;
        else
            m.z = std::abs(diff) <= 1e-12 * (1.0 + std::abs(m.exact)) ? 0.0 : INFINITY;
        m.flagged = std::abs(m.z) > 4.0;
        out.push_back(m);
    }
    return out;
}

/// Histogram of n x_i on [0, cutoff] against bin averages of K(x, x).
inline Histogram hard_edge_histogram(const SampleBatch& batch, int bins, double cutoff) {
    if (bins < 1) throw ParameterError("sampler.bins", "bins must be at least 1");
    if (!(cutoff > 0.0)) throw ParameterError("sampler.cutoff", "cutoff must be positive");
    const ParamSet params = batch.spec.params();
    Histogram h;
    const double width = cutoff / bins;
    for (int b = 0; b <= bins; ++b) h.edges.push_back(b * width);
    h.counts.assign(bins, 0);
    const int n = batch.n();
    for (double v : batch.values) {
        const double s = n * v;
        if (s < cutoff) ++h.counts[std::min(bins - 1, static_cast<int>(s / width))];
    }
    long long total = 0;
    for (auto c : h.counts) total += c;
    h.total_mass = static_cast<double>(total) / batch.trials;
    HardEdgeConfig hc;
    hc.params = params;
    hc.tol = 1e-10;
    const HardEdgeU K(hc, std::max(10.0, 2.0 * cutoff));
    // below x_floor, K(x, x) ~ x^alpha log^{r-1}(1/x) with alpha = min nu_j of
    // multiplicity r, so \int_0^e K ~ e K(e, e) / (1 + alpha)
    const double x_floor = 1e-10;
    const double alpha = params.alpha();
    const int r = params.alpha_multiplicity();
    auto f = [&](double x) { return K(x, x).value; };
    double f_floor = -1.0;
    auto mass_below = [&](double e) {
        if (e <= 0.0) return 0.0;
        if (f_floor < 0.0) f_floor = f(x_floor);
        const double fe = f_floor * std::pow(e / x_floor, alpha) *
                          std::pow(std::log(e) / std::log(x_floor), r - 1);
        return e * fe / (1.0 + alpha);
    };
    for (int b = 0; b < bins; ++b) {
        const double lo = h.edges[b], hi = h.edges[b + 1];
        double mass = 0.0;
        if (hi <= x_floor) {
            mass = mass_below(hi) - mass_below(lo);
        } else {
            AdaptiveOptions opt;
            opt.abs_tol = 1e-8;
            opt.rel_tol = 1e-8;
            opt.singular_left = (lo < x_floor);
            mass = integrate_adaptive_t<double>(f, std::max(lo, x_floor), hi, opt).value;
            if (lo < x_floor) mass += mass_below(x_floor) - mass_below(lo);
        }
        const double avg = mass / width;
        h.predicted.push_back(avg);
        h.density.push_back(h.counts[b] / (static_cast<double>(batch.trials) * width));
        h.sup_discrepancy = std::max(h.sup_discrepancy, std::abs(h.density.back() - avg));
    }
    return h;
}

}  // namespace ginprod
