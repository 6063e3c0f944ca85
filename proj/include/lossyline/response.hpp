// Transient response of the semi-infinite line by boundary-kernel
// convolution, delay-time extraction, and the literal DC (leading transfer
// mode) delay equation.
//
// The convolution U(x,t) = int_0^tau G^S(x,t') u0(t-t') dt' is evaluated in
// the substituted variable s = sqrt(t'^2 - x^2), which absorbs the
// square-root behaviour of the kernel at the light cone: both tail variants
// become smooth integrands in s,
//   PaperLiteral:          2 x  int ds  s I1(m s) e^{-m h} u0(t - h) / h
//   DerivativeConsistent:  m x  int ds    I1(m s) e^{-m h} u0(t - h) / h
// with h = sqrt(s^2 + x^2) the retarded time. The integration window is
// clipped to the support of u0 and split at its breakpoints.

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "lossyline/bessel.hpp"
#include "lossyline/kernels.hpp"
#include "lossyline/quadrature.hpp"
#include "lossyline/waveform.hpp"

namespace lossyline {

/// Kernel settings for response evaluation. The defaults are the
/// calibration winner (see calibration.hpp); KernelNormalization::paper()
/// style overrides can be passed explicitly.
struct KernelConfig {
    KernelVariant variant = KernelVariant::DerivativeConsistent;
    double scale = 1.0;
    int sign = +1;
};

struct ResponseSample {
    double t = 0.0;
    double value = 0.0;
    double quad_error = 0.0;
    bool converged = true;
    bool arrived = false;  // false while t < x
};

struct ResponseRequest {
    double x = 0.0;
    std::vector<double> times;
    double m = 0.0;
    KernelConfig kernel{};
    double rel_tol = 1e-8;
};

namespace detail {

// Smooth-tail integral in s on [s_lo, s_hi], split at the waveform
// breakpoints mapped through s_b = sqrt((t - b)^2 - x^2).
template <class F>
QuadResult response_tail(double x, double t, double m, F&& u0,
                         std::span<const double> breakpoints, KernelVariant variant,
                         double rel_tol, double scale_hint) {
    QuadResult total;
    const double lambda_hi = (t - x) * (t + x);
    if (lambda_hi <= 0.0 || m == 0.0) return total;  // I1(0) = 0: no tail
    const double s_hi = std::sqrt(lambda_hi);

    const auto integrand = [&](double s) {
        const double h = std::hypot(s, x);
        const double base = damped_i1(m, h, s * s) * u0(t - h) / h;
        return variant == KernelVariant::PaperLiteral ? 2.0 * x * s * base : m * x * base;
    };

    std::vector<double> cuts;
    cuts.push_back(0.0);
    for (double b : breakpoints) {
        const double dt = t - b;
        if (dt <= x) continue;  // breakpoint outside the cone at this t
        const double sb = std::sqrt((dt - x) * (dt + x));
        if (sb > 0.0 && sb < s_hi) cuts.push_back(sb);
    }
    cuts.push_back(s_hi);
    std::sort(cuts.begin(), cuts.end());

    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (!(cuts[i + 1] > cuts[i])) continue;
        const QuadResult piece =
            integrate_adaptive(integrand, cuts[i], cuts[i + 1], rel_tol, scale_hint);
        total.value += piece.value;
        total.error_estimate += piece.error_estimate;
        total.converged = total.converged && piece.converged;
        total.evaluations += piece.evaluations;
    }
    return total;
}

}  // namespace detail

/// Single-point response for an arbitrary source callable with support
/// [0, t_ac]. The scalar and multiconductor paths both run through here.
template <class F>
ResponseSample response_value_fn(double x, double t, double m, F&& u0, double t_ac,
                                 std::span<const double> breakpoints,
                                 KernelConfig cfg = {}, double rel_tol = 1e-8,
                                 double scale_hint = 0.0) {
    if (!(x > 0.0)) throw std::invalid_argument("response: x must be > 0");
    if (m < 0.0) throw std::invalid_argument("response: m must be >= 0");
    if (!(t_ac > 0.0)) throw std::invalid_argument("response: waveform duration must be > 0");

    ResponseSample sample;
    sample.t = t;
    if (t < x) return sample;  // causal zero ahead of the light cone
    sample.arrived = true;

    const double impulse = std::exp(-m * x) * u0(t - x);
    const QuadResult tail =
        detail::response_tail(x, t, m, u0, breakpoints, cfg.variant, rel_tol, scale_hint);
    sample.value = cfg.sign * cfg.scale * (impulse + tail.value);
    sample.quad_error = cfg.scale * tail.error_estimate;
    sample.converged = tail.converged;
    return sample;
}

inline ResponseSample response_value(double x, double t, double m, const Waveform& u0,
                                     KernelConfig cfg = {}, double rel_tol = 1e-8) {
    return response_value_fn(x, t, m, u0, u0.duration(), u0.breakpoints(), cfg, rel_tol,
                             u0.max_abs());
}

/// Response sampled on the request's time grid (sorted ascending).
inline std::vector<ResponseSample> response_at(const ResponseRequest& req, const Waveform& u0) {
    if (!std::is_sorted(req.times.begin(), req.times.end()))
        throw std::invalid_argument("response_at: times must be sorted ascending");
    std::vector<ResponseSample> out;
    out.reserve(req.times.size());
    for (double t : req.times)
        out.push_back(response_value(req.x, t, req.m, u0, req.kernel, req.rel_tol));
    return out;
}

/// Threshold-crossing search result. `uncertainty_floor` is the minimal
/// physically resolvable delay slice 1/omega0 for the input's dominant
/// frequency (0 when the input has no finite dominant rate).
struct DelayResult {
    double delay = 0.0;
    double threshold_b = 0.0;
    double uncertainty_floor = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    double u_max = 0.0;
};

enum class UmaxConvention {
    ResponseMax,  // U_max = max response at the observation point (default)
    InputMax,     // U_max = max |u0|; the response may never reach b * U_max
};

struct DelaySearch {
    double t_end = 0.0;  // end of the evaluation window (required)
    int points_per_decade = 64;
    UmaxConvention umax = UmaxConvention::ResponseMax;
};

class NoCrossingError : public std::runtime_error {
  public:
    NoCrossingError(double achieved_fraction)
        : std::runtime_error("delay_time: response never reaches the requested threshold "
                             "(achieved fraction " +
                             std::to_string(achieved_fraction) + ")"),
          achieved_fraction(achieved_fraction) {}
    double achieved_fraction;
};

namespace detail {

// Grid bracketing then bisection against a fixed threshold. `u_ref` is the
// U_max the threshold fraction refers to (response max or input max).
template <class Eval>
DelayResult delay_search(double x, double b, double uncertainty_floor, const DelaySearch& opts,
                         Eval&& response, double fixed_u_ref) {
    if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("delay_time: b must be in (0,1)");
    if (!(opts.t_end > x)) throw std::invalid_argument("delay_time: window must extend past x");

    // Geometric grid in the offset t - x, points_per_decade per decade.
    const double span = opts.t_end - x;
    const double off_lo = span * 1e-9;
    std::vector<double> grid;
    grid.push_back(x);
    const int steps =
        static_cast<int>(std::ceil(opts.points_per_decade * std::log10(span / off_lo)));
    for (int i = 0; i <= steps; ++i)
        grid.push_back(x + off_lo * std::pow(span / off_lo, static_cast<double>(i) / steps));

    std::vector<double> vals;
    vals.reserve(grid.size());
    double response_max = 0.0;
    for (double t : grid) {
        const double v = response(t);
        vals.push_back(v);
        response_max = std::max(response_max, v);
    }

    DelayResult out;
    out.threshold_b = b;
    out.uncertainty_floor = uncertainty_floor;
    out.u_max = fixed_u_ref > 0.0 ? fixed_u_ref : response_max;
    const double threshold = b * out.u_max;

    std::size_t hit = grid.size();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (vals[i] >= threshold) {
            hit = i;
            break;
        }
    }
    if (hit == grid.size()) throw NoCrossingError(response_max / out.u_max);
    if (hit == 0) {  // already above threshold at arrival: delta = x
        out.delay = x;
        out.bracket_lo = out.bracket_hi = x;
        return out;
    }

    double lo = grid[hit - 1], hi = grid[hit];
    const double tol = std::max(1e-6 * x, 1e-15);
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (response(mid) >= threshold)
            hi = mid;
        else
            lo = mid;
    }
    out.delay = hi;
    out.bracket_lo = lo;
    out.bracket_hi = hi;
    return out;
}

}  // namespace detail

/// Smallest delta >= x with U(x, delta) = b * U_max, by grid bracketing and
/// bisection to max(1e-6 x, 1e-15) in time.
inline DelayResult delay_time(double x, double b, const Waveform& u0, double m,
                              const DelaySearch& opts, KernelConfig cfg = {},
                              double rel_tol = 1e-8) {
    const double omega = u0.dominant_omega();
    const double floor = omega > 0.0 ? 1.0 / omega : 0.0;
    auto eval = [&](double t) { return response_value(x, t, m, u0, cfg, rel_tol).value; };
    const double u_ref = opts.umax == UmaxConvention::InputMax ? u0.max_abs() : -1.0;
    return detail::delay_search(x, b, floor, opts, eval, u_ref);
}

class NoRootError : public std::runtime_error {
  public:
    NoRootError(double attained_max)
        : std::runtime_error("dc_delay_literal: left-hand side never reaches b "
                             "(attained maximum " +
                             std::to_string(attained_max) + ")"),
          attained_max(attained_max) {}
    double attained_max;
};

/// Left-hand side of the literal DC delay equation.
inline double dc_delay_lhs(double x, double t, double m) {
    const double bracket1 = std::sin(m * x) / (x * x) - m * std::cos(m * x) / x;
    const double e = std::exp(-m * t);
    const double bracket2 = (t + 1.0 / m) * e - 1.0 / m;
    return (t * e / M_PI) * bracket1 * bracket2;
}

/// Solves the literal DC delay equation lhs(t) = b for the smallest positive
/// root by geometric scan plus bisection. The equation is kept verbatim and
/// quarantined here; delay_time is the recommended general path.
inline double dc_delay_literal(double x, double b, double m) {
    if (!(m > 0.0)) throw std::invalid_argument("dc_delay_literal: m must be > 0");
    if (!(x > 0.0)) throw std::invalid_argument("dc_delay_literal: x must be > 0");
    if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("dc_delay_literal: b must be in (0,1)");

    const auto f = [&](double t) { return dc_delay_lhs(x, t, m) - b; };

    // scan t over [1e-6/m, 60/m]: the lhs vanishes at both ends
    const double t_lo = 1e-6 / m, t_hi = 60.0 / m;
    const int steps = static_cast<int>(std::ceil(64.0 * std::log10(t_hi / t_lo)));
    double attained_max = 0.0;
    double prev_t = t_lo, prev_f = f(t_lo);
    double root_lo = 0.0, root_hi = 0.0;
    bool bracketed = false;
    for (int i = 1; i <= steps; ++i) {
        const double t = t_lo * std::pow(t_hi / t_lo, static_cast<double>(i) / steps);
        const double ft = f(t);
        attained_max = std::max(attained_max, ft + b);
        if (!bracketed && prev_f < 0.0 && ft >= 0.0) {
            root_lo = prev_t;
            root_hi = t;
            bracketed = true;
        }
        prev_t = t;
        prev_f = ft;
    }
    if (!bracketed) throw NoRootError(attained_max);

    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (root_lo + root_hi);
        const double fm = f(mid);
        if (std::abs(fm) <= 1e-12) return mid;
        if (fm < 0.0)
            root_lo = mid;
        else
            root_hi = mid;
        if (root_hi - root_lo < 1e-16 * root_hi) break;
    }
    return 0.5 * (root_lo + root_hi);
}

}  // namespace lossyline
