#pragma once

#include <functional>

namespace harq_ee {

struct Extremum {
    double argument = 0.0;
    double value = 0.0;
};

/// Maximizes a unimodal f on [lo, hi].
///
/// A uniform scan of `scan_points` locates the peak; golden-section search then
/// refines it inside the bracketing scan cell until the bracket is narrower than
/// `tolerance`. Throws NumericError when the scan shows more than one strict
/// local maximum or when a golden-section step violates the three-point bracket.
Extremum maximize_unimodal(const std::function<double(double)>& f, double lo, double hi,
                           double tolerance, int scan_points = 64);

/// Minimization counterpart of maximize_unimodal.
Extremum minimize_unimodal(const std::function<double(double)>& f, double lo, double hi,
                           double tolerance, int scan_points = 64);

} // namespace harq_ee
