#include "bqec/fit.hpp"

#include <cmath>
#include <stdexcept>

namespace bqec {

LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit needs at least two matched points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::domain_error("log-log fit needs positive data");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
        sx += lx.back();
        sy += ly.back();
        sxx += lx.back() * lx.back();
        sxy += lx.back() * ly.back();
    }
    double den = n * sxx - sx * sx;
    if (den == 0.0) throw std::invalid_argument("fit abscissae are degenerate");
    LogLogFit f;
    f.exponent = (n * sxy - sx * sy) / den;
    f.intercept = (sy - f.exponent * sx) / n;
    for (std::size_t i = 0; i < lx.size(); ++i)
        f.max_residual = std::max(f.max_residual, std::abs(ly[i] - f.intercept - f.exponent * lx[i]));
    return f;
}

std::vector<double> logspace(double lo, double hi, int points) {
    if (points < 1 || !(lo > 0.0) || !(hi > 0.0)) throw std::invalid_argument("bad logspace arguments");
    std::vector<double> out;
    if (points == 1) return {lo};
    const double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < points; ++i) out.push_back(std::exp(a + (b - a) * i / (points - 1)));
    out.front() = lo;
    out.back() = hi;
    return out;
}

}  // namespace bqec
