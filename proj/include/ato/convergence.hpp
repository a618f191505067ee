// convergence.hpp: Log-log slope fits for order-of-error checks.

#pragma once

#include <cmath>
#include <limits>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ato {

struct SlopeFit {
    double slope{0.0};
    std::size_t points{0};  // samples above the noise floor used in the fit
    bool vacuous{false};    // every residual sits below the noise floor
};

// Least-squares slope of log(y) against log(x). Samples with y below `noise_floor`
// are dropped; a fit left with one sample reports that sample decayed past the
// floor and is treated as vacuous only when nothing is left at all.
inline SlopeFit fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y,
                                 double noise_floor = 1e-13) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_loglog_slope: need >= 2 samples");
    std::vector<double> lx;
    std::vector<double> ly;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!(x[k] > 0.0)) throw std::invalid_argument("fit_loglog_slope: abscissae must be positive");
        if (y[k] >= noise_floor) {
            lx.push_back(std::log(x[k]));
            ly.push_back(std::log(y[k]));
        }
    }
    SlopeFit fit;
    fit.points = lx.size();
    if (lx.empty()) {
        fit.vacuous = true;
        return fit;
    }
    if (lx.size() == 1) {
        // the remaining samples fell through the floor: decay faster than anything we can measure
        fit.slope = std::numeric_limits<double>::infinity();
        return fit;
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        mx += lx[k];
        my += ly[k];
    }
    mx /= static_cast<double>(lx.size());
    my /= static_cast<double>(lx.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        sxy += (lx[k] - mx) * (ly[k] - my);
        sxx += (lx[k] - mx) * (lx[k] - mx);
    }
    fit.slope = sxy / sxx;
    return fit;
}

} // namespace ato
