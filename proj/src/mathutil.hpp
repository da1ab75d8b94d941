#pragma once

#include <cmath>

namespace liketally {

// lnGamma(m + y) - lnGamma(m) for integer y >= 0, stable when y << m.
// Small y uses the exact product expansion; huge m uses a Stirling
// difference so the Poisson limit (m -> inf) does not lose precision to
// cancellation between two large lgamma values.
double lgamma_ratio(double m, long long y);

// digamma(m + y) - digamma(m) for integer y >= 0, same stability concerns.
double digamma_diff(double m, long long y);

// Two-sided normal p-value for a z statistic.
inline double normal_two_sided_p(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

// Upper tail of chi-square with 1 degree of freedom.
inline double chi2_1_sf(double x) {
    if (x <= 0.0) return 1.0;
    return std::erfc(std::sqrt(x / 2.0));
}

// Phi^{-1}(0.975), the 95% two-sided normal critical value.
inline constexpr double kNormal975 = 1.959963984540054;

}  // namespace liketally
