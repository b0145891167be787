#include "harq_ee/fading.hpp"

#include "harq_ee/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace harq_ee {

namespace {

constexpr int kMaxSeriesTerms = 100000;
constexpr double kTiny = 1e-300;

// Prefactor x^a e^{-x} / Gamma(a), evaluated in log space.
double gamma_prefactor(double a, double x) {
    return std::exp(a * std::log(x) - x - std::lgamma(a));
}

double lower_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int n = 0; n < kMaxSeriesTerms; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17) {
            return sum * gamma_prefactor(a, x);
        }
    }
    throw NumericError("incomplete gamma series did not converge");
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
double upper_continued_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxSeriesTerms; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-17) {
            return h * gamma_prefactor(a, x);
        }
    }
    throw NumericError("incomplete gamma continued fraction did not converge");
}

// Acklam's rational approximation; only used to seed Newton.
double normal_quantile_seed(double p) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Standardized (unit-scale) gamma quantile: solves P(shape, y) = p.
double standard_gamma_quantile(double shape, double p) {
    // Wilson-Hilferty seed, with the small-y asymptote as a fallback.
    const double z = normal_quantile_seed(p);
    const double k = 1.0 / (9.0 * shape);
    double y = shape * std::pow(1.0 - k + z * std::sqrt(k), 3.0);
    if (!(y > 0.0) || !std::isfinite(y)) {
        y = std::exp((std::log(p) + std::lgamma(shape + 1.0)) / shape);
    }

    double lo = 0.0;
    double hi = y;
    while (regularized_gamma_p(shape, hi) < p) {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi)) throw NumericError("gamma quantile bracket overflow");
    }
    y = std::clamp(y, lo, hi);

    for (int iter = 0; iter < 200; ++iter) {
        const double f = regularized_gamma_p(shape, y) - p;
        if (f == 0.0) return y;
        if (f < 0.0) {
            lo = y;
        } else {
            hi = y;
        }
        const double density = std::exp((shape - 1.0) * std::log(y) - y - std::lgamma(shape));
        double next = y - f / density;
        if (!(next > lo && next < hi) || !std::isfinite(next)) {
            next = 0.5 * (lo + hi);
        }
        if (std::abs(next - y) <= 4.0 * std::numeric_limits<double>::epsilon() * y ||
            hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
            return next;
        }
        y = next;
    }
    return y;
}

} // namespace

FadingModel FadingModel::rayleigh(double mean_power) {
    FadingModel model{FadingFamily::Rayleigh, mean_power, 1.0};
    model.validate();
    return model;
}

FadingModel FadingModel::nakagami(double m_shape, double mean_power) {
    FadingModel model{FadingFamily::Nakagami, mean_power, m_shape};
    model.validate();
    return model;
}

double FadingModel::block_shape() const {
    return family == FadingFamily::Rayleigh ? 1.0 : m_shape;
}

double FadingModel::scale() const {
    return mean_power / block_shape();
}

void FadingModel::validate() const {
    detail::require(mean_power > 0.0 && std::isfinite(mean_power),
                    "fading mean power must be positive");
    if (family == FadingFamily::Nakagami) {
        detail::require(m_shape >= 0.5 && std::isfinite(m_shape),
                        "Nakagami shape m must be at least 0.5");
    }
}

std::string_view to_string(FadingFamily family) {
    return family == FadingFamily::Rayleigh ? "rayleigh" : "nakagami";
}

double regularized_gamma_p(double a, double x) {
    detail::require(a > 0.0, "incomplete gamma shape must be positive");
    detail::require(x >= 0.0, "incomplete gamma argument must be nonnegative");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < a + 1.0) return lower_series(a, x);
    return 1.0 - upper_continued_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
    detail::require(a > 0.0, "incomplete gamma shape must be positive");
    detail::require(x >= 0.0, "incomplete gamma argument must be nonnegative");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < a + 1.0) return 1.0 - lower_series(a, x);
    return upper_continued_fraction(a, x);
}

double sum_cdf(const FadingModel& model, int t, double x) {
    model.validate();
    detail::require(t >= 0, "number of summed blocks must be nonnegative");
    detail::require(x >= 0.0, "sum_cdf argument must be nonnegative");
    if (t == 0) return 1.0;
    return regularized_gamma_p(t * model.block_shape(), x / model.scale());
}

double sum_pdf(const FadingModel& model, int t, double x) {
    model.validate();
    detail::require(t >= 1, "density needs at least one block");
    detail::require(x >= 0.0, "density argument must be nonnegative");
    const double shape = t * model.block_shape();
    const double scale = model.scale();
    if (x == 0.0) {
        if (shape < 1.0) return std::numeric_limits<double>::infinity();
        return shape == 1.0 ? 1.0 / scale : 0.0;
    }
    const double y = x / scale;
    return std::exp((shape - 1.0) * std::log(y) - y - std::lgamma(shape)) / scale;
}

double sum_quantile(const FadingModel& model, int blocks, double p) {
    model.validate();
    detail::require(blocks >= 1, "quantile needs at least one block");
    detail::require(p > 0.0 && p < 1.0, "quantile probability must lie in (0, 1), got " +
                                            std::to_string(p));
    return model.scale() * standard_gamma_quantile(blocks * model.block_shape(), p);
}

} // namespace harq_ee
