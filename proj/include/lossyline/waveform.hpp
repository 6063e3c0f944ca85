// Source voltage shapes u0(t). Every waveform vanishes outside [0, t_ac]
// (the source is applied during a limited time only); breakpoints() lists
// the times where the shape is not smooth so quadrature can split there.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace lossyline {

enum class WaveformKind { Step, Ramp, SineBurst, GaussianPulse, Sampled };

class Waveform {
  public:
    static Waveform step(double amplitude, double duration, double onset = 0.0) {
        Waveform w(WaveformKind::Step, amplitude, duration, onset);
        w.breakpoints_ = {onset, duration};
        w.dominant_omega_ = std::numeric_limits<double>::infinity();  // ideal edge
        return w;
    }

    static Waveform ramp(double amplitude, double rise_width, double duration,
                         double onset = 0.0) {
        if (!(rise_width > 0.0)) throw std::invalid_argument("Waveform::ramp: rise_width <= 0");
        Waveform w(WaveformKind::Ramp, amplitude, duration, onset);
        w.width_ = rise_width;
        w.breakpoints_ = {onset, std::min(onset + rise_width, duration), duration};
        w.dominant_omega_ = 1.0 / rise_width;
        return w;
    }

    static Waveform sine_burst(double amplitude, double omega, double duration,
                               double onset = 0.0) {
        if (!(omega > 0.0)) throw std::invalid_argument("Waveform::sine_burst: omega <= 0");
        Waveform w(WaveformKind::SineBurst, amplitude, duration, onset);
        w.omega_ = omega;
        w.breakpoints_ = {onset, duration};
        w.dominant_omega_ = omega;
        return w;
    }

    static Waveform gaussian_pulse(double amplitude, double width, double center,
                                   double duration) {
        if (!(width > 0.0)) throw std::invalid_argument("Waveform::gaussian_pulse: width <= 0");
        Waveform w(WaveformKind::GaussianPulse, amplitude, duration, 0.0);
        w.width_ = width;
        w.center_ = center;
        w.breakpoints_ = {0.0, duration};
        w.dominant_omega_ = 1.0 / width;
        return w;
    }

    /// Uniform samples starting at t = 0, linearly interpolated.
    static Waveform sampled(std::vector<double> values, double dt) {
        if (values.size() < 2) throw std::invalid_argument("Waveform::sampled: need >= 2 samples");
        if (!(dt > 0.0)) throw std::invalid_argument("Waveform::sampled: dt <= 0");
        const double duration = dt * static_cast<double>(values.size() - 1);
        Waveform w(WaveformKind::Sampled, 0.0, duration, 0.0);
        w.samples_ = std::move(values);
        w.dt_ = dt;
        w.breakpoints_ = {0.0, duration};
        w.dominant_omega_ = 0.0;  // unknown spectrum: no uncertainty-floor claim
        for (double v : w.samples_) w.amplitude_ = std::max(w.amplitude_, std::abs(v));
        return w;
    }

    double operator()(double t) const {
        if (t < 0.0 || t > duration_) return 0.0;
        switch (kind_) {
            case WaveformKind::Step:
                return t >= onset_ ? amplitude_ : 0.0;
            case WaveformKind::Ramp: {
                if (t < onset_) return 0.0;
                const double u = (t - onset_) / width_;
                return amplitude_ * std::min(u, 1.0);
            }
            case WaveformKind::SineBurst:
                return t >= onset_ ? amplitude_ * std::sin(omega_ * (t - onset_)) : 0.0;
            case WaveformKind::GaussianPulse: {
                const double d = (t - center_) / width_;
                return amplitude_ * std::exp(-0.5 * d * d);
            }
            case WaveformKind::Sampled: {
                const double pos = t / dt_;
                const auto i = static_cast<std::size_t>(pos);
                if (i + 1 >= samples_.size()) return samples_.back();
                const double frac = pos - static_cast<double>(i);
                return samples_[i] + frac * (samples_[i + 1] - samples_[i]);
            }
        }
        return 0.0;
    }

    WaveformKind kind() const { return kind_; }
    double duration() const { return duration_; }
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    double max_abs() const { return std::abs(amplitude_); }

    /// Characteristic angular rate of the input: the burst frequency, the
    /// reciprocal rise/pulse width, +inf for an ideal step, 0 (unknown)
    /// for sampled data.
    double dominant_omega() const { return dominant_omega_; }

  private:
    Waveform(WaveformKind kind, double amplitude, double duration, double onset)
        : kind_(kind), amplitude_(amplitude), duration_(duration), onset_(onset) {
        if (!std::isfinite(amplitude)) throw std::invalid_argument("Waveform: non-finite amplitude");
        if (!(duration > 0.0)) throw std::invalid_argument("Waveform: duration must be > 0");
        if (onset < 0.0 || onset > duration)
            throw std::invalid_argument("Waveform: onset must lie in [0, duration]");
    }

    WaveformKind kind_;
    double amplitude_;
    double duration_;  // t_ac
    double onset_;
    double width_ = 0.0;
    double center_ = 0.0;
    double omega_ = 0.0;
    double dt_ = 0.0;
    double dominant_omega_ = 0.0;
    std::vector<double> samples_;
    std::vector<double> breakpoints_;
};

}  // namespace lossyline
