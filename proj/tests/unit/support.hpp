#pragma once

#include <cmath>
#include <vector>

#include "aperiod/model.hpp"
#include "aperiod/noise.hpp"

namespace aperiod::testing {

/// dX = -lambda X dt + sigma dW, one mode per entry.
inline ModelSpec ou_model(std::vector<double> lambda, std::vector<double> q, double sigma) {
    ModelSpec m;
    m.dim_state = lambda.size();
    m.dim_noise = q.size();
    m.spectrum = std::move(lambda);
    m.q_eigenvalues = std::move(q);
    m.drift.base.assign(m.dim_state, 0.0);
    m.diffusion.base_sigma.assign(m.dim_noise, sigma);
    return m;
}

/// Scalar model with forcing amplitude * cos(omega t), saturating gains c, gamma.
inline ModelSpec forced_model(double lambda, double amplitude, double omega, double sigma, double c = 0.0,
                              double gamma = 0.0) {
    ModelSpec m = ou_model({lambda}, {1.0}, sigma);
    m.drift.modes.push_back({{amplitude}, omega, 0.0});
    m.drift.nonlinearity_gain = c;
    m.diffusion.state_gain = gamma;
    return m;
}

inline std::size_t ulp_distance(double a, double b) {
    if (a == b) return 0;
    std::size_t n = 0;
    double x = std::fmin(a, b);
    const double hi = std::fmax(a, b);
    while (x < hi && n < 1000000) {
        x = std::nextafter(x, hi);
        ++n;
    }
    return n;
}

}  // namespace aperiod::testing
