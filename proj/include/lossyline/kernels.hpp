// Closed-form retarded Green function of the damped wave equation
//   U_tt - U_xx + 2 m U_t = 0
// and the boundary (2nd-kind) kernel that propagates a source voltage
// U(0,t) = u0(t) down the line.
//
// The retarded kernel is supported on the forward light cone and, up to an
// overall normalization, equals e^{-m t} I0(m sqrt(lambda)), lambda = t^2-x^2.
// The boundary kernel splits into an exact light-cone impulse of weight
// e^{-m x} plus a smooth tail. Two published forms of the tail disagree by a
// factor m / (2 sqrt(lambda)):
//   PaperLiteral:          2 x e^{-m t} I1(m sqrt(lambda))
//   DerivativeConsistent:  e^{-m t} (m x / sqrt(lambda)) I1(m sqrt(lambda))
// The second is the x-derivative of the retarded kernel through the chain
// rule. Both are implemented; calibration against the FDTD solver
// (calibration.hpp) picks the default rather than trusting either form.
//
// Exponent pairing: products e^{-m t} I(z) with z = m sqrt(lambda) <= m t are
// evaluated through the scaled Bessel functions once z > 30, combining the
// exponents before exponentiation so neither factor overflows.

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

#include "lossyline/bessel.hpp"

namespace lossyline {

enum class KernelVariant {
    PaperLiteral,
    DerivativeConsistent,
};

inline const char* variant_name(KernelVariant v) {
    return v == KernelVariant::PaperLiteral ? "paper_literal" : "derivative_consistent";
}

inline KernelVariant variant_from_name(const std::string& name) {
    if (name == "paper_literal") return KernelVariant::PaperLiteral;
    if (name == "derivative_consistent") return KernelVariant::DerivativeConsistent;
    throw std::invalid_argument("unknown kernel variant: " + name);
}

/// Overall constant of the retarded kernel; validated by calibration, not
/// assumed. paper() reproduces the printed form (sign -1, scale 1);
/// standard_wave() is the conventional 1D retarded normalization (+1/2).
struct KernelNormalization {
    double scale = 1.0;
    int sign = -1;

    static KernelNormalization paper() { return {1.0, -1}; }
    static KernelNormalization standard_wave() { return {0.5, +1}; }
};

namespace detail {

constexpr double kScaledExponentThreshold = 30.0;

// e^{-m t} I0(m sqrt(lambda)), overflow-safe: z = m sqrt(lambda) <= m t, so
// the combined exponent z - m t never overflows even when both factors do.
inline double damped_i0(double m, double t, double lambda) {
    const double z = m * std::sqrt(lambda);
    if (m * t > kScaledExponentThreshold) return bessel_i0_scaled(z) * std::exp(z - m * t);
    return std::exp(-m * t) * bessel_i0(z);
}

inline double damped_i1(double m, double t, double lambda) {
    const double z = m * std::sqrt(lambda);
    if (m * t > kScaledExponentThreshold) return bessel_i1_scaled(z) * std::exp(z - m * t);
    return std::exp(-m * t) * bessel_i1(z);
}

}  // namespace detail

/// Retarded Green function. Zero outside the forward cone (t <= 0 or
/// t < |x|); on and inside it, norm * e^{-m t} I0(m sqrt(t^2 - x^2)).
/// Even in x.
inline double greens_retarded(double x, double t, double m,
                              KernelNormalization norm = KernelNormalization::paper()) {
    if (m < 0.0) throw std::invalid_argument("greens_retarded: m must be >= 0");
    if (!std::isfinite(x) || !std::isfinite(t))
        throw std::invalid_argument("greens_retarded: x and t must be finite");
    const double ax = std::abs(x);
    if (t <= 0.0 || t < ax) return 0.0;
    const double lambda = (t - ax) * (t + ax);
    return norm.sign * norm.scale * detail::damped_i0(m, t, lambda);
}

/// Boundary kernel at (x, t), split into the light-cone impulse coefficient
/// (the weight multiplying u0(t - x) in the response) and the smooth tail
/// value for t > x. The impulse weight e^{-m x} is variant-independent; it
/// is the exact reduction of the delta(lambda) term.
struct BoundaryKernelValue {
    double impulse_weight = 0.0;
    double smooth = 0.0;
};

inline BoundaryKernelValue greens_boundary(double x, double t, double m, KernelVariant variant) {
    if (!(x > 0.0))
        throw std::invalid_argument("greens_boundary: x must be > 0 (downstream of the source)");
    if (m < 0.0) throw std::invalid_argument("greens_boundary: m must be >= 0");
    BoundaryKernelValue out;
    out.impulse_weight = std::exp(-m * x);
    if (t <= x) return out;  // tail not yet inside the cone
    const double lambda = (t - x) * (t + x);
    switch (variant) {
        case KernelVariant::PaperLiteral:
            out.smooth = 2.0 * x * detail::damped_i1(m, t, lambda);
            break;
        case KernelVariant::DerivativeConsistent:
            out.smooth = (m * x / std::sqrt(lambda)) * detail::damped_i1(m, t, lambda);
            break;
    }
    return out;
}

/// DC / low-frequency asymptotic of the retarded kernel:
/// -(t e^{-m t} / pi) * sin(m x) / x, with the x -> 0 sinc limit taken
/// analytically.
inline double greens_dc_asymptotic(double x, double t, double m) {
    if (!(t > 0.0)) throw std::invalid_argument("greens_dc_asymptotic: t must be > 0");
    if (!(m > 0.0)) throw std::invalid_argument("greens_dc_asymptotic: m must be > 0");
    const double prefactor = -t * std::exp(-m * t) / M_PI;
    if (std::abs(m * x) < 1e-8) return prefactor * m * (1.0 - (m * x) * (m * x) / 6.0);
    return prefactor * std::sin(m * x) / x;
}

/// The two resonance poles omega_{1/2}(k) = -i m +/- sqrt(k^2 - m^2).
/// For |k| < m the square root turns imaginary and both poles sit on the
/// negative imaginary axis; in all cases Im(omega) <= 0 (causality).
inline std::pair<std::complex<double>, std::complex<double>> pole_frequencies(double k, double m) {
    if (m < 0.0) throw std::invalid_argument("pole_frequencies: m must be >= 0");
    const std::complex<double> base(0.0, -m);
    const double ak = std::abs(k);
    if (ak >= m) {
        const double w0 = std::sqrt((ak - m) * (ak + m));
        return {base + w0, base - w0};
    }
    const std::complex<double> iw0(0.0, std::sqrt((m - ak) * (m + ak)));
    return {base + iw0, base - iw0};
}

}  // namespace lossyline
