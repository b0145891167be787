#pragma once

// Reference implementations used only by the tests. Each one follows a different
// route from the library code: explicit series, brute-force root finding and
// direct matrix eigenvalues.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

// P(k, x) for integer k: 1 - e^{-x} sum_{j<k} x^j / j!.
inline double erlang_cdf(int k, double x) {
    if (k == 0) return 1.0;
    if (x <= 0.0) return 0.0;
    double term = 1.0;
    double sum = 1.0;
    for (int j = 1; j < k; ++j) {
        term *= x / j;
        sum += term;
    }
    return 1.0 - std::exp(-x) * sum;
}

// CDF of a sum of t Gamma(shape, scale) blocks with integer shape.
inline double integer_gamma_sum_cdf(int shape, double scale, int t, double x) {
    return erlang_cdf(t * shape, x / scale);
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iterations = 200) {
    double flo = f(lo);
    for (int i = 0; i < iterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Quantile of the integer-shape gamma sum by plain bisection.
inline double integer_gamma_sum_quantile(int shape, double scale, int t, double p) {
    double hi = 1.0;
    while (integer_gamma_sum_cdf(shape, scale, t, hi) < p) hi *= 2.0;
    return bisect([&](double x) { return integer_gamma_sum_cdf(shape, scale, t, x) - p; }, 0.0, hi);
}

// Truncated Poisson(lambda) pmf shifted by one: Pr{T = t} = e^{-l} l^{t-1} / (t-1)!.
inline std::vector<double> shifted_poisson(double lambda, int deadline) {
    std::vector<double> pmf(static_cast<std::size_t>(deadline));
    double term = std::exp(-lambda);
    for (int t = 1; t <= deadline; ++t) {
        pmf[static_cast<std::size_t>(t - 1)] = term;
        term *= lambda / t;
    }
    return pmf;
}

struct Moments {
    double mu;
    double sigma2;
};

// Moments of T-hat = k M + T by summing over the number k of deadline violations.
inline Moments renewal_moments(const std::vector<double>& pmf, double eps) {
    const double m = static_cast<double>(pmf.size());
    double first = 0.0;
    double second = 0.0;
    double weight = 1.0 - eps;
    for (int k = 0; k < 20000 && weight > 1e-300; ++k) {
        for (std::size_t i = 0; i < pmf.size(); ++i) {
            const double total = k * m + static_cast<double>(i + 1);
            const double p = weight * pmf[i] / (1.0 - eps);
            first += p * total;
            second += p * total * total;
        }
        weight *= eps;
    }
    return {first, second - first * first};
}

// Largest eigenvalue of a 2x2 matrix [[a, b], [c, d]] with real spectrum.
inline double spectral_radius_2x2(double a, double b, double c, double d) {
    const double tr = a + d;
    const double det = a * d - b * c;
    return 0.5 * (tr + std::sqrt(tr * tr - 4.0 * det));
}

// log spectral radius of P diag(1, e^{theta r}) for the ON-OFF discrete chain.
inline double discrete_lmgf(double p11, double p22, double theta, double r) {
    const double w = std::exp(theta * r);
    return std::log(spectral_radius_2x2(p11, (1.0 - p11) * w, 1.0 - p22, p22 * w));
}

// Largest eigenvalue of the generator [[-alpha, alpha], [beta, -beta]] + diag(0, x).
inline double fluid_generator_eigen(double alpha, double beta, double x) {
    return spectral_radius_2x2(-alpha, alpha, beta, x - beta);
}

} // namespace oracle
