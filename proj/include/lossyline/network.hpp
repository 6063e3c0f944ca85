// Multiconductor generalization: N coupled lines sharing one series
// resistance density. The capacitance and inductance matrices must satisfy
// cap * ind = I / v^2, which makes the decay a symmetric mass tensor
// m_hat = (r v^2 / 2) cap = (r / 2) ind^{-1}. Its eigenbasis decouples the
// network into independent scalar lines; propagation runs per mode through
// the scalar response path and is projected back onto the line basis.

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "lossyline/linalg.hpp"
#include "lossyline/response.hpp"
#include "lossyline/waveform.hpp"

namespace lossyline {

struct NetworkSpec {
    int n = 0;
    Matrix cap;  // F/cm, symmetric positive definite
    Matrix ind;  // H/cm, symmetric positive definite
    double r = 0.0;
    double v2 = 0.0;  // extracted from the compatibility product cap*ind
};

/// Tridiagonal capacitance pattern: 2 c_grd + c_m on the end diagonal,
/// 2 c_grd + 2 c_m in the interior, -c_m off-diagonal. Reproduces the
/// 3-conductor matrix exactly at n = 3 and decouples when c_m = 0.
inline Matrix build_tridiagonal_cap(double c_grd, double c_m, int n) {
    if (!(c_grd > 0.0)) throw std::invalid_argument("build_tridiagonal_cap: c_grd must be > 0");
    if (c_m < 0.0) throw std::invalid_argument("build_tridiagonal_cap: c_m must be >= 0");
    if (n < 1) throw std::invalid_argument("build_tridiagonal_cap: n must be >= 1");
    Matrix cap(n);
    for (int i = 0; i < n; ++i) {
        const bool end_row = (i == 0 || i == n - 1);
        cap(i, i) = 2.0 * c_grd + (end_row ? c_m : 2.0 * c_m);
        if (i + 1 < n) {
            cap(i, i + 1) = -c_m;
            cap(i + 1, i) = -c_m;
        }
    }
    if (n == 1) cap(0, 0) = 2.0 * c_grd + c_m;  // single line keeps the end-row rule
    return cap;
}

class CompatibilityError : public std::invalid_argument {
  public:
    CompatibilityError(int i, int j, double deviation)
        : std::invalid_argument("NetworkSpec: cap*ind deviates from (1/v^2) I at entry (" +
                                std::to_string(i) + "," + std::to_string(j) + ") by relative " +
                                std::to_string(deviation)),
          row(i), col(j), rel_deviation(deviation) {}
    int row, col;
    double rel_deviation;
};

namespace detail {

inline void require_spd(const Matrix& a, const char* name) {
    if (!is_symmetric(a, 1e-10))
        throw std::invalid_argument(std::string("NetworkSpec: ") + name + " must be symmetric");
    const EigenSym e = jacobi_eigen(a);
    if (e.values.front() <= 0.0)
        throw std::invalid_argument(std::string("NetworkSpec: ") + name +
                                    " must be positive definite");
}

}  // namespace detail

/// Validates symmetry, positive definiteness, and the compatibility product
/// cap*ind = I / v^2 (relative tolerance 1e-8 per entry against 1/v^2).
inline NetworkSpec make_network(Matrix cap, Matrix ind, double r) {
    if (cap.size() != ind.size())
        throw std::invalid_argument("NetworkSpec: cap and ind dimensions differ");
    if (r < 0.0) throw std::invalid_argument("NetworkSpec: r must be >= 0");
    detail::require_spd(cap, "cap");
    detail::require_spd(ind, "ind");

    const int n = cap.size();
    const Matrix prod = cap * ind;
    double trace = 0.0;
    for (int i = 0; i < n; ++i) trace += prod(i, i);
    const double inv_v2 = trace / n;  // product should be (1/v^2) I
    if (!(inv_v2 > 0.0)) throw std::invalid_argument("NetworkSpec: cap*ind trace must be > 0");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double expected = i == j ? inv_v2 : 0.0;
            const double dev = std::abs(prod(i, j) - expected) / inv_v2;
            if (dev > 1e-8) throw CompatibilityError(i, j, dev);
        }

    NetworkSpec spec;
    spec.n = n;
    spec.cap = std::move(cap);
    spec.ind = std::move(ind);
    spec.r = r;
    spec.v2 = 1.0 / inv_v2;
    return spec;
}

/// Builds ind = (1/v^2) cap^{-1}, which satisfies compatibility by
/// construction; the constraint makes one of the two matrices redundant.
inline NetworkSpec make_network_from_cap(Matrix cap, double r, double v) {
    if (!(v > 0.0)) throw std::invalid_argument("NetworkSpec: wave speed must be > 0");
    Matrix ind = inverse(cap);
    const double inv_v2 = 1.0 / (v * v);
    for (int i = 0; i < ind.size(); ++i)
        for (int j = 0; j < ind.size(); ++j) ind(i, j) *= inv_v2;
    return make_network(std::move(cap), std::move(ind), r);
}

struct MassTensor {
    Matrix m;  // 1/s, symmetric positive (semi)definite
};

/// Computes both forms (r v^2 / 2) cap and (r / 2) ind^{-1}; they must agree
/// entrywise to relative 1e-6, and the ind^{-1} form is returned.
inline MassTensor mass_tensor(const NetworkSpec& spec) {
    const Matrix inv_ind = inverse(spec.ind);
    const int n = spec.n;
    Matrix from_ind(n), from_cap(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            from_ind(i, j) = 0.5 * spec.r * inv_ind(i, j);
            from_cap(i, j) = 0.5 * spec.r * spec.v2 * spec.cap(i, j);
        }
    const double scale = std::max(from_ind.max_abs(), 1e-300);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (std::abs(from_ind(i, j) - from_cap(i, j)) > 1e-6 * scale)
                throw std::invalid_argument(
                    "mass_tensor: dual forms disagree beyond 1e-6 at entry (" +
                    std::to_string(i) + "," + std::to_string(j) + ")");
    return MassTensor{std::move(from_ind)};
}

struct ModalBasis {
    std::vector<double> rates;  // modal decay rates m_i, ascending
    Matrix vectors;             // orthonormal columns epsilon_i
};

inline ModalBasis modal_decompose(const MassTensor& mt) {
    EigenSym e = jacobi_eigen(mt.m);
    return ModalBasis{std::move(e.values), std::move(e.vectors)};
}

enum class VoltageBasis { Line, Modal };

/// Voltage components tagged with the basis they live in; mixing bases in
/// arithmetic is rejected.
struct VoltageVector {
    std::vector<double> u;
    VoltageBasis basis = VoltageBasis::Line;
};

inline VoltageVector to_modal(const ModalBasis& basis, const VoltageVector& line) {
    if (line.basis != VoltageBasis::Line)
        throw std::invalid_argument("to_modal: input must be in the line basis");
    const int n = basis.vectors.size();
    if (static_cast<int>(line.u.size()) != n)
        throw std::invalid_argument("to_modal: component count does not match the basis");
    VoltageVector out{std::vector<double>(n, 0.0), VoltageBasis::Modal};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out.u[i] += basis.vectors(j, i) * line.u[j];
    return out;
}

inline VoltageVector to_line(const ModalBasis& basis, const VoltageVector& modal) {
    if (modal.basis != VoltageBasis::Modal)
        throw std::invalid_argument("to_line: input must be in the modal basis");
    const int n = basis.vectors.size();
    if (static_cast<int>(modal.u.size()) != n)
        throw std::invalid_argument("to_line: component count does not match the basis");
    VoltageVector out{std::vector<double>(n, 0.0), VoltageBasis::Line};
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) out.u[j] += basis.vectors(j, i) * modal.u[i];
    return out;
}

inline VoltageVector add(const VoltageVector& a, const VoltageVector& b) {
    if (a.basis != b.basis)
        throw std::invalid_argument("VoltageVector: cross-basis arithmetic is forbidden");
    if (a.u.size() != b.u.size())
        throw std::invalid_argument("VoltageVector: component counts differ");
    VoltageVector out = a;
    for (std::size_t i = 0; i < out.u.size(); ++i) out.u[i] += b.u[i];
    return out;
}

/// Line-basis response of the coupled network at position x: project the
/// input onto the modal basis, propagate each mode as a scalar line with its
/// own decay rate, and project back. u_in holds one source waveform per
/// line, all applied at x = 0.
inline std::vector<std::vector<ResponseSample>> network_response(
    const NetworkSpec& spec, double x, const std::vector<double>& times,
    const std::vector<Waveform>& u_in, KernelConfig cfg = {}, double rel_tol = 1e-8) {
    if (static_cast<int>(u_in.size()) != spec.n)
        throw std::invalid_argument("network_response: need one source waveform per line");

    const ModalBasis basis = modal_decompose(mass_tensor(spec));
    const int n = spec.n;

    double t_ac = 0.0;
    double scale_hint = 0.0;
    std::vector<double> cuts;
    for (const Waveform& w : u_in) {
        t_ac = std::max(t_ac, w.duration());
        scale_hint = std::max(scale_hint, w.max_abs());
        cuts.insert(cuts.end(), w.breakpoints().begin(), w.breakpoints().end());
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    // modal samples [mode][time]
    std::vector<std::vector<ResponseSample>> modal(n);
    for (int i = 0; i < n; ++i) {
        const auto modal_input = [&, i](double t) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += basis.vectors(j, i) * u_in[j](t);
            return s;
        };
        modal[i].reserve(times.size());
        for (double t : times)
            modal[i].push_back(response_value_fn(x, t, basis.rates[i], modal_input, t_ac, cuts,
                                                 cfg, rel_tol, scale_hint));
    }

    std::vector<std::vector<ResponseSample>> out(n);
    for (int j = 0; j < n; ++j) {
        out[j].resize(times.size());
        for (std::size_t k = 0; k < times.size(); ++k) {
            ResponseSample s;
            s.t = times[k];
            s.arrived = modal.empty() ? false : modal[0][k].arrived;
            for (int i = 0; i < n; ++i) {
                const double w = basis.vectors(j, i);
                s.value += w * modal[i][k].value;
                s.quad_error += std::abs(w) * modal[i][k].quad_error;
                s.converged = s.converged && modal[i][k].converged;
            }
            out[j][k] = s;
        }
    }
    return out;
}

}  // namespace lossyline
