// Modified Bessel functions I0 and I1 of a real nonnegative argument,
// plus exponentially scaled variants e^{-z} I0(z), e^{-z} I1(z).
//
// Small arguments use the defining power series (all terms positive, no
// cancellation); large arguments use the asymptotic expansion of the scaled
// function, which stays O(1) for any z. Crossover at z = 15, where the
// asymptotic truncation floor (~e^{-2z}) is already below 1e-13 relative.

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lossyline {

/// Accuracy contract of this implementation.
struct BesselAccuracy {
    static constexpr double target_rel_error = 1e-12;
    static constexpr double argument_max = 700.0;
};

namespace detail {

inline void check_bessel_arg(double z, const char* fn) {
    if (!std::isfinite(z) || z < 0.0)
        throw std::invalid_argument(std::string(fn) + ": argument must be finite and >= 0, got " +
                                    std::to_string(z));
}

constexpr double kBesselSeriesCutoff = 15.0;

// sum_k (z^2/4)^k / (k!)^2
inline double i0_series(double z) {
    const double q = 0.25 * z * z;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 1000; ++k) {
        term *= q / (static_cast<double>(k) * static_cast<double>(k));
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return sum;
}

// (z/2) sum_k (z^2/4)^k / (k! (k+1)!)
inline double i1_series(double z) {
    const double q = 0.25 * z * z;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 1000; ++k) {
        term *= q / (static_cast<double>(k) * static_cast<double>(k + 1));
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return 0.5 * z * sum;
}

// e^{-z} I_nu(z) ~ (1/sqrt(2 pi z)) sum_k (-1)^k a_k(nu) / z^k,
// a_k(nu) = prod_{j=1..k} (4 nu^2 - (2j-1)^2) / (8 j).
// Summed to the smallest term (error ~ e^{-2z} relative).
inline double i_scaled_asymptotic(double z, int nu) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0;
    double sum = 1.0;
    double prev = std::numeric_limits<double>::max();
    for (int k = 1; k < 60; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= -(mu - odd * odd) / (8.0 * k * z);
        if (std::abs(term) >= prev) break;  // divergent tail reached
        sum += term;
        prev = std::abs(term);
        if (prev < 1e-17 * std::abs(sum)) break;
    }
    return sum / std::sqrt(2.0 * M_PI * z);
}

}  // namespace detail

/// I0(z), z >= 0.
inline double bessel_i0(double z) {
    detail::check_bessel_arg(z, "bessel_i0");
    if (z <= detail::kBesselSeriesCutoff) return detail::i0_series(z);
    return detail::i_scaled_asymptotic(z, 0) * std::exp(z);
}

/// I1(z), z >= 0.
inline double bessel_i1(double z) {
    detail::check_bessel_arg(z, "bessel_i1");
    if (z <= detail::kBesselSeriesCutoff) return detail::i1_series(z);
    return detail::i_scaled_asymptotic(z, 1) * std::exp(z);
}

/// e^{-z} I0(z); never overflows for large z.
inline double bessel_i0_scaled(double z) {
    detail::check_bessel_arg(z, "bessel_i0_scaled");
    if (z <= detail::kBesselSeriesCutoff) return detail::i0_series(z) * std::exp(-z);
    return detail::i_scaled_asymptotic(z, 0);
}

/// e^{-z} I1(z); never overflows for large z.
inline double bessel_i1_scaled(double z) {
    detail::check_bessel_arg(z, "bessel_i1_scaled");
    if (z <= detail::kBesselSeriesCutoff) return detail::i1_series(z) * std::exp(-z);
    return detail::i_scaled_asymptotic(z, 1);
}

}  // namespace lossyline
