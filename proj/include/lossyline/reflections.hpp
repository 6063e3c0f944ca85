// Finite-line response as a truncated image sum over reflection orders.
// The far end carries the reflection coefficient Gamma; the source end is
// treated as matched (no re-reflection). Order s contributes
//   Gamma^{2s}   U_r(x + 2s xbar, t)       (right-moving image)
//   Gamma^{2s+1} U_l(2s xbar - x, t)       (left-moving image)
// where the left-moving response at signed position xi < 0 equals the
// right-moving one at distance |xi| (the kernel is even in x), so both
// image families evaluate through the same scalar response at the image
// distance; left images with nonpositive printed argument (s = 0) are
// skipped. Images beyond the signal front contribute exactly zero.

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "lossyline/response.hpp"
#include "lossyline/waveform.hpp"

namespace lossyline {

/// Finite line in normalized units: flight-time length xbar = lbar / v [s]
/// and far-end reflection coefficient.
struct FiniteLine {
    double xbar = 0.0;
    double gamma = 0.0;
};

/// Standard termination mismatch: (Z_L - Z0)/(Z_L + Z0).
/// Open circuit (Z_L = inf) gives +1, short gives -1, matched gives 0.
inline double reflection_coefficient(double z_load, double z0) {
    if (!(z0 > 0.0) || std::isinf(z0))
        throw std::invalid_argument("reflection_coefficient: z0 must be finite and > 0");
    if (!(z_load >= 0.0))
        throw std::invalid_argument("reflection_coefficient: z_load must be >= 0");
    if (std::isinf(z_load)) return 1.0;
    return (z_load - z0) / (z_load + z0);
}

/// Observable reflection orders: the flying signal decays over the time
/// 1/m, so N_r = floor((1/m) / xbar). A lossless line has an unbounded
/// budget, reported as `cap` with the capped flag set.
struct ReflectionBudget {
    int n_r = 0;
    double decay_time = 0.0;  // 1/m [s]; multiply by v for the decay length
    bool capped = false;
};

inline ReflectionBudget reflection_budget(double xbar, double m, int cap = 32) {
    if (!(xbar > 0.0)) throw std::invalid_argument("reflection_budget: xbar must be > 0");
    if (m < 0.0) throw std::invalid_argument("reflection_budget: m must be >= 0");
    ReflectionBudget out;
    if (m == 0.0) {
        out.n_r = cap;
        out.decay_time = std::numeric_limits<double>::infinity();
        out.capped = true;
        return out;
    }
    out.decay_time = 1.0 / m;
    out.n_r = std::max(0, static_cast<int>(std::floor(out.decay_time / xbar)));
    return out;
}

/// Partial image sum at 0 <= x <= xbar, truncated at budget.n_r orders and
/// stopped early once a term's envelope bound |Gamma|^{2s} e^{-m(x + 2s
/// xbar)} max|u0| falls below 1e-12 of the accumulated magnitude.
inline ResponseSample reflected_response_value(const FiniteLine& line, double x, double t,
                                               const Waveform& u0, double m,
                                               const ReflectionBudget& budget,
                                               KernelConfig cfg = {}, double rel_tol = 1e-8) {
    if (!(line.xbar > 0.0)) throw std::invalid_argument("reflected_response: xbar must be > 0");
    if (x < 0.0 || x > line.xbar)
        throw std::invalid_argument("reflected_response: x must lie in [0, xbar]");
    if (std::abs(line.gamma) > 1.0)
        throw std::invalid_argument("reflected_response: |Gamma| must be <= 1");

    ResponseSample total;
    total.t = t;
    const double gamma = line.gamma;
    const double max_u = u0.max_abs();
    double accumulated_scale = 0.0;

    for (int s = 0; s <= budget.n_r; ++s) {
        const double g_even = std::pow(gamma, 2 * s);
        if (s > 0 && g_even == 0.0) break;

        const double x_right = x + 2.0 * s * line.xbar;
        if (s > 0 && x_right > t && 2.0 * s * line.xbar - x > t) break;  // nothing arrived yet
        if (t >= x_right && g_even != 0.0) {
            const ResponseSample term = response_value(x_right, t, m, u0, cfg, rel_tol);
            total.value += g_even * term.value;
            total.quad_error += std::abs(g_even) * term.quad_error;
            total.converged = total.converged && term.converged;
            total.arrived = true;
        } else if (s == 0) {
            total.arrived = t >= x;
        }

        const double x_left = 2.0 * s * line.xbar - x;
        const double g_odd = g_even * gamma;
        if (x_left > 0.0 && g_odd != 0.0 && t >= x_left) {
            const ResponseSample term = response_value(x_left, t, m, u0, cfg, rel_tol);
            total.value += g_odd * term.value;
            total.quad_error += std::abs(g_odd) * term.quad_error;
            total.converged = total.converged && term.converged;
        }

        accumulated_scale = std::max(accumulated_scale, std::abs(total.value));
        const double envelope = std::abs(g_even) * std::exp(-m * x_right) * max_u;
        if (accumulated_scale > 0.0 && envelope < 1e-12 * accumulated_scale) break;
    }
    return total;
}

inline std::vector<ResponseSample> reflected_response(const FiniteLine& line, double x,
                                                      const std::vector<double>& times,
                                                      const Waveform& u0, double m,
                                                      const ReflectionBudget& budget,
                                                      KernelConfig cfg = {},
                                                      double rel_tol = 1e-8) {
    std::vector<ResponseSample> out;
    out.reserve(times.size());
    for (double t : times)
        out.push_back(reflected_response_value(line, x, t, u0, m, budget, cfg, rel_tol));
    return out;
}

/// delay_time over the reflected response.
inline DelayResult reflected_delay(const FiniteLine& line, double x, double b,
                                   const Waveform& u0, double m, const DelaySearch& opts,
                                   KernelConfig cfg = {}, double rel_tol = 1e-8) {
    const ReflectionBudget budget = reflection_budget(line.xbar, m);
    const double omega = u0.dominant_omega();
    const double floor = omega > 0.0 ? 1.0 / omega : 0.0;
    auto eval = [&](double t) {
        return reflected_response_value(line, x, t, u0, m, budget, cfg, rel_tol).value;
    };
    const double u_ref = opts.umax == UmaxConvention::InputMax ? u0.max_abs() : -1.0;
    return detail::delay_search(x, b, floor, opts, eval, u_ref);
}

}  // namespace lossyline
