#include "rng.hpp"

#include <cmath>

namespace liketally {

double Rng::uniform_open01() {
    double u;
    do {
        u = uniform01();
    } while (u <= 0.0);
    return u;
}

double Rng::normal() {
    // Polar rejection; no cached spare so the draw count per call is
    // data-dependent but the stream stays reproducible.
    for (;;) {
        double a = 2.0 * uniform01() - 1.0;
        double b = 2.0 * uniform01() - 1.0;
        double s = a * a + b * b;
        if (s > 0.0 && s < 1.0) return a * std::sqrt(-2.0 * std::log(s) / s);
    }
}

double Rng::gamma(double shape, double scale) {
    if (shape < 1.0) {
        double u = uniform_open01();
        return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = normal();
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        double u = uniform_open01();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
}

long long Rng::poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    if (lambda < 30.0) {
        const double limit = std::exp(-lambda);
        long long k = 0;
        double prod = uniform01();
        while (prod > limit) {
            ++k;
            prod *= uniform01();
        }
        return k;
    }
    // PTRS transformed rejection (Hormann 1993).
    const double b = 0.931 + 2.53 * std::sqrt(lambda);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        double u = uniform01() - 0.5;
        double v = uniform01();
        double us = 0.5 - std::fabs(u);
        double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<long long>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        double k = kf;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            k * std::log(lambda) - lambda - std::lgamma(k + 1.0)) {
            return static_cast<long long>(kf);
        }
    }
}

long long Rng::uniform_int(long long lo, long long hi) {
    double span = static_cast<double>(hi - lo + 1);
    long long offset = static_cast<long long>(uniform01() * span);
    if (offset >= hi - lo + 1) offset = hi - lo;  // guard the u ~ 1 edge
    return lo + offset;
}

}  // namespace liketally
