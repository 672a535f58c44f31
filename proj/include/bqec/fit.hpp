#pragma once

#include <vector>

namespace bqec {

struct LogLogFit {
    double exponent = 0.0;
    double intercept = 0.0;
    // largest |log y - (intercept + exponent log x)|
    double max_residual = 0.0;
};

// Least-squares line through (log x, log y). Throws if any value is non-positive.
LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

std::vector<double> logspace(double lo, double hi, int points);

}  // namespace bqec
