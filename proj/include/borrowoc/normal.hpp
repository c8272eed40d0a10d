#pragma once

#include <cmath>

#include <boost/math/distributions/normal.hpp>

namespace borrowoc {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;
inline constexpr double kInvSqrt2 = 0.70710678118654752440;

/// Standard normal density.
inline double norm_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

inline double norm_pdf(double x, double mean, double sd) {
    return norm_pdf((x - mean) / sd) / sd;
}

inline double norm_logpdf(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return -0.5 * z * z - std::log(sd) - kLogSqrt2Pi;
}

/// Standard normal CDF via erfc; accurate far into both tails.
inline double norm_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

inline double norm_cdf(double x, double mean, double sd) {
    return norm_cdf((x - mean) / sd);
}

/// Inverse standard normal CDF, p in (0,1).
inline double norm_quantile(double p) {
    static const boost::math::normal_distribution<double> unit{};
    return boost::math::quantile(unit, p);
}

} // namespace borrowoc
