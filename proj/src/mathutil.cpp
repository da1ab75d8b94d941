#include "mathutil.hpp"

#include <boost/math/special_functions/digamma.hpp>

namespace liketally {

double lgamma_ratio(double m, long long y) {
    if (y <= 0) return 0.0;
    if (y <= 32) {
        double sum = 0.0;
        for (long long i = 0; i < y; ++i) sum += std::log(m + static_cast<double>(i));
        return sum;
    }
    double yd = static_cast<double>(y);
    if (m > 1e8) {
        // Stirling difference: lnG(m+y) - lnG(m)
        //   = y*ln m + (m+y-1/2)*log1p(y/m) - y + [1/(12(m+y)) - 1/(12m)]
        double r = yd / m;
        return yd * std::log(m) + (m + yd - 0.5) * std::log1p(r) - yd +
               (1.0 / (12.0 * (m + yd)) - 1.0 / (12.0 * m));
    }
    return std::lgamma(m + yd) - std::lgamma(m);
}

double digamma_diff(double m, long long y) {
    if (y <= 0) return 0.0;
    if (y <= 64) {
        double sum = 0.0;
        for (long long i = 0; i < y; ++i) sum += 1.0 / (m + static_cast<double>(i));
        return sum;
    }
    double yd = static_cast<double>(y);
    if (m > 1e8) {
        // psi(z) ~ ln z - 1/(2z); the difference keeps full precision.
        return std::log1p(yd / m) + yd / (2.0 * m * (m + yd));
    }
    return boost::math::digamma(m + yd) - boost::math::digamma(m);
}

}  // namespace liketally
