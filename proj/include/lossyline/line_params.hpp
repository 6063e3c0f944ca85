// Per-unit-length line parameters and the derived propagation constants.
//
// Everything downstream of this header works in normalized units: positions
// are flight times x = l/v (seconds), the wave speed is 1, and the only
// surviving physical parameter is the decay rate m = r/(2*ell). Conversion
// to and from physical units (ohm/cm, H/cm, F/cm, cm, s) happens at the CLI
// boundary only.

#pragma once

#include <cmath>
#include <stdexcept>

namespace lossyline {

/// Uniform-line densities: r [ohm/cm], ell [H/cm], c [F/cm].
struct LineParams {
    double r = 0.0;
    double ell = 0.0;
    double c = 0.0;
};

/// v [cm/s], m [1/s], z0 [ohm].
struct DerivedParams {
    double v = 0.0;
    double m = 0.0;
    double z0 = 0.0;
};

inline void validate(const LineParams& p) {
    if (!std::isfinite(p.r) || p.r < 0.0)
        throw std::invalid_argument("LineParams: r must be finite and >= 0 (dissipative line)");
    if (!std::isfinite(p.ell) || p.ell <= 0.0)
        throw std::invalid_argument("LineParams: ell must be finite and > 0");
    if (!std::isfinite(p.c) || p.c <= 0.0)
        throw std::invalid_argument("LineParams: c must be finite and > 0");
}

/// v = 1/sqrt(c*ell), m = r/(2*ell), z0 = sqrt(ell/c).
inline DerivedParams derive_params(const LineParams& p) {
    validate(p);
    DerivedParams d;
    d.v = 1.0 / std::sqrt(p.c * p.ell);
    d.m = p.r / (2.0 * p.ell);
    d.z0 = std::sqrt(p.ell / p.c);
    return d;
}

/// Physical length [cm] to normalized position x = l/v [s].
inline double normalize_position(double l, double v) {
    if (l < 0.0) throw std::invalid_argument("normalize_position: length must be >= 0");
    if (!(v > 0.0)) throw std::invalid_argument("normalize_position: wave speed must be > 0");
    return l / v;
}

inline double denormalize_position(double x, double v) {
    if (x < 0.0) throw std::invalid_argument("denormalize_position: position must be >= 0");
    if (!(v > 0.0)) throw std::invalid_argument("denormalize_position: wave speed must be > 0");
    return x * v;
}

/// A spacetime sample in normalized units (x >= 0, both in seconds).
struct NormalizedPoint {
    double x = 0.0;
    double t = 0.0;
};

/// Light-cone variable lambda = t^2 - x^2. Positive strictly inside the
/// forward cone, zero on it, negative outside.
struct LightConeVariable {
    double lambda = 0.0;
    bool inside() const { return lambda > 0.0; }
    bool on_cone() const { return lambda == 0.0; }
    bool outside() const { return lambda < 0.0; }
};

inline LightConeVariable light_cone(double x, double t) {
    return LightConeVariable{t * t - x * x};
}

inline LightConeVariable light_cone(const NormalizedPoint& p) { return light_cone(p.x, p.t); }

}  // namespace lossyline
