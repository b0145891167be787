#include "harq_ee/optimize.hpp"

#include "harq_ee/error.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace harq_ee {

namespace {

// Relative slack for flat plateaus (e.g. the zero-clamped tail of a throughput).
bool strictly_above(double a, double b) {
    return a > b + 1e-13 * (std::abs(a) + std::abs(b));
}

} // namespace

Extremum maximize_unimodal(const std::function<double(double)>& f, double lo, double hi,
                           double tolerance, int scan_points) {
    detail::require(hi > lo, "search interval must be nonempty");
    detail::require(tolerance > 0.0, "search tolerance must be positive");
    detail::require(scan_points >= 3, "scan needs at least three points");

    const double step = (hi - lo) / (scan_points - 1);
    std::vector<double> xs(static_cast<std::size_t>(scan_points));
    std::vector<double> ys(xs.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xs[i] = (i + 1 == xs.size()) ? hi : lo + step * static_cast<double>(i);
        ys[i] = f(xs[i]);
        if (ys[i] > ys[best]) best = i;
    }

    // Unimodality: once the scan has strictly decreased it must not strictly increase again.
    bool descending = false;
    for (std::size_t i = 1; i < ys.size(); ++i) {
        if (strictly_above(ys[i - 1], ys[i])) {
            descending = true;
        } else if (descending && strictly_above(ys[i], ys[i - 1])) {
            throw NumericError("objective is not unimodal on the search interval");
        }
    }

    double a = xs[best == 0 ? 0 : best - 1];
    double b = xs[best + 1 == xs.size() ? best : best + 1];
    double fa = ys[best == 0 ? 0 : best - 1];
    double fb = ys[best + 1 == xs.size() ? best : best + 1];
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    Extremum incumbent{xs[best], ys[best]};

    while (b - a > tolerance) {
        // Three-point condition: some interior point must not lie below both ends.
        if (strictly_above(std::min(fa, fb), std::max(f1, f2))) {
            throw NumericError("golden-section bracket lost its interior maximum");
        }
        if (f1 >= f2) {
            b = x2;
            fb = f2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            fa = f1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
        if (f1 > incumbent.value) incumbent = {x1, f1};
        if (f2 > incumbent.value) incumbent = {x2, f2};
    }
    const double mid = 0.5 * (a + b);
    const double f_mid = f(mid);
    if (f_mid > incumbent.value) incumbent = {mid, f_mid};
    return incumbent;
}

Extremum minimize_unimodal(const std::function<double(double)>& f, double lo, double hi,
                           double tolerance, int scan_points) {
    Extremum e = maximize_unimodal([&](double x) { return -f(x); }, lo, hi, tolerance, scan_points);
    e.value = -e.value;
    return e;
}

} // namespace harq_ee
