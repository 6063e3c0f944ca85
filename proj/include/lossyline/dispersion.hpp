// Plane-wave basis of the damped line, its dispersion law, the three signal
// speeds, packet synthesis by frequency-domain superposition, and the
// uncertainty floor on delay measurements.
//
// In normalized units the dispersion law is omega0(k) = sqrt(k^2 - m^2):
// the basis wave phi(omega0 | x, t) = exp(-m t - i (omega0 t - k x)) damps
// uniformly in time at rate m while the packet envelope travels at the
// group speed k/omega0 (> 1), tempered to the effective speed u by the
// loss of the e-folded forward edge.

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

#include "lossyline/quadrature.hpp"

namespace lossyline {

/// omega0 = sqrt(k^2 - m^2). Throws for |k| < m (evanescent mode).
inline double omega0_of_k(double k, double m) {
    if (m < 0.0) throw std::invalid_argument("omega0_of_k: m must be >= 0");
    const double ak = std::abs(k);
    if (ak < m)
        throw std::domain_error("omega0_of_k: |k| < m, evanescent mode does not propagate");
    return std::sqrt((ak - m) * (ak + m));
}

/// Inverse of omega0_of_k on omega0 >= 0: k = sqrt(omega0^2 + m^2).
inline double k_of_omega0(double omega0, double m) {
    if (omega0 < 0.0) throw std::invalid_argument("k_of_omega0: omega0 must be >= 0");
    if (m < 0.0) throw std::invalid_argument("k_of_omega0: m must be >= 0");
    return std::hypot(omega0, m);
}

/// v_ph = omega0 / sqrt(omega0^2 + m^2), in (0, 1].
inline double phase_velocity(double omega0, double m) {
    if (!(omega0 > 0.0)) throw std::invalid_argument("phase_velocity: omega0 must be > 0");
    if (m < 0.0) throw std::invalid_argument("phase_velocity: m must be >= 0");
    return omega0 / std::hypot(omega0, m);
}

/// v_gr = sqrt(omega0^2 + m^2) / omega0 = k / omega0, always >= 1.
inline double group_velocity(double omega0, double m) {
    if (m < 0.0) throw std::invalid_argument("group_velocity: m must be >= 0");
    if (omega0 == 0.0)
        throw std::domain_error("group_velocity: divergent at the cutoff omega0 = 0");
    if (omega0 < 0.0) throw std::invalid_argument("group_velocity: omega0 must be > 0");
    return std::hypot(omega0, m) / omega0;
}

/// Effective packet speed u = (sqrt(omega0^2 + m^2) - pi m) / omega0.
/// Not clamped: the approximation is only meaningful for propagating
/// signals, so the result is flagged when u <= 0 or omega0 < 2 m.
struct EffectiveSpeed {
    double u = 0.0;
    bool low_frequency = false;  // approximation outside its validity range
};

inline EffectiveSpeed effective_speed(double omega0, double m) {
    if (!(omega0 > 0.0)) throw std::invalid_argument("effective_speed: omega0 must be > 0");
    if (m < 0.0) throw std::invalid_argument("effective_speed: m must be >= 0");
    EffectiveSpeed out;
    out.u = (std::hypot(omega0, m) - M_PI * m) / omega0;
    out.low_frequency = (out.u <= 0.0) || (omega0 < 2.0 * m);
    return out;
}

/// Minimal physically resolvable delay slice at signal frequency omega0.
inline double min_delay_uncertainty(double omega0) {
    if (!(omega0 > 0.0)) throw std::invalid_argument("min_delay_uncertainty: omega0 must be > 0");
    return 1.0 / omega0;
}

/// One propagating basis wave. Constructed from (k, m) with |k| >= m.
struct BasisWave {
    double omega0 = 0.0;
    double k = 0.0;
    double m = 0.0;

    static BasisWave from_k(double k, double m) {
        BasisWave w;
        w.omega0 = omega0_of_k(k, m);
        w.k = k;
        w.m = m;
        return w;
    }
    static BasisWave from_omega0(double omega0, double m) {
        BasisWave w;
        w.omega0 = omega0;
        w.k = k_of_omega0(omega0, m);
        w.m = m;
        return w;
    }

    std::complex<double> value(double x, double t) const {
        const std::complex<double> phase(-m * t, -(omega0 * t - k * x));
        return std::exp(phase);
    }
};

/// Band-limited spectrum: complex amplitude density on [omega_low, omega_high].
struct PacketSpectrum {
    double omega_low = 0.0;
    double omega_high = 0.0;
    std::function<std::complex<double>(double)> amplitude;
};

struct PacketResult {
    std::complex<double> value{0.0, 0.0};
    double error_estimate = 0.0;
    bool converged = true;
};

/// U(x,t) = integral over the band of U(omega0) phi(omega0 | x, t).
/// Composite Gauss-Legendre with `quad_points` total nodes; the error
/// estimate is the change under halving the panel count.
inline PacketResult build_packet(const PacketSpectrum& spec, double m, double x, double t,
                                 int quad_points = 256) {
    if (!(spec.omega_low > 0.0) || !(spec.omega_high > spec.omega_low))
        throw std::invalid_argument("build_packet: need 0 < omega_low < omega_high");
    if (!spec.amplitude) throw std::invalid_argument("build_packet: amplitude function not set");
    if (quad_points < 16) throw std::invalid_argument("build_packet: quad_points must be >= 16");
    if (m < 0.0) throw std::invalid_argument("build_packet: m must be >= 0");

    const auto integrand_part = [&](double w, bool real_part) {
        const BasisWave wave = BasisWave::from_omega0(w, m);
        const std::complex<double> v = spec.amplitude(w) * wave.value(x, t);
        return real_part ? v.real() : v.imag();
    };

    const int panels = std::max(1, quad_points / 16);
    const auto run = [&](int np, int order, bool re) {
        return integrate_composite([&](double w) { return integrand_part(w, re); }, spec.omega_low,
                                   spec.omega_high, np, order);
    };
    const std::complex<double> fine(run(panels, 16, true), run(panels, 16, false));
    // halve the resolution for the error estimate: fewer panels, or a lower
    // order when a single panel is all there is
    const std::complex<double> rough =
        panels >= 2 ? std::complex<double>(run(panels / 2, 16, true), run(panels / 2, 16, false))
                    : std::complex<double>(run(1, 7, true), run(1, 7, false));

    PacketResult out;
    out.value = fine;
    out.error_estimate = std::abs(fine - rough);
    const double scale = std::max(std::abs(fine), 1e-300);
    out.converged = out.error_estimate <= 1e-6 * scale;
    return out;
}

}  // namespace lossyline
