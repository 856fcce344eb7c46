#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "ginprod/errors.hpp"

namespace ginprod {

/// Model parameters: the number of factors M and nu_1..nu_M (nu_0 = 0 is
/// implicit).
struct ParamSet {
    int M = 1;
    std::vector<double> nu{0.0};

    ParamSet() = default;
    ParamSet(int m, std::vector<double> v) : M(m), nu(std::move(v)) { validate(); }
    explicit ParamSet(std::vector<double> v) : M(static_cast<int>(v.size())), nu(std::move(v)) {
        validate();
    }

    void validate() const {
        if (M < 1) throw ParameterError("param.M.range", "M must be a positive integer");
        if (static_cast<int>(nu.size()) != M)
            throw ParameterError("param.nu.count",
                                 "expected " + std::to_string(M) + " values of nu, got " +
                                     std::to_string(nu.size()));
        for (double v : nu) {
            if (!std::isfinite(v) || !(v > -1.0)) {
                std::ostringstream os;
                os << "every nu_j must exceed -1, got " << v;
                throw ParameterError("param.nu.range", os.str());
            }
        }
    }

    /// nu_0 = 0 followed by nu_1..nu_M.
    std::vector<double> nu_full() const {
        std::vector<double> out{0.0};
        out.insert(out.end(), nu.begin(), nu.end());
        return out;
    }
    double alpha() const { return *std::min_element(nu.begin(), nu.end()); }
    int alpha_multiplicity() const {
        const double a = alpha();
        return static_cast<int>(std::count(nu.begin(), nu.end(), a));
    }
    bool all_integer() const {
        return std::all_of(nu.begin(), nu.end(),
                           [](double v) { return v == std::floor(v) && v >= 0.0; });
    }
    std::vector<long> integer_nu() const {
        std::vector<long> out;
        for (double v : nu) out.push_back(static_cast<long>(v));
        return out;
    }
};

struct SeriesBudget {
    int max_terms = 2000;
    double tol = 1e-17;
};

}  // namespace ginprod
