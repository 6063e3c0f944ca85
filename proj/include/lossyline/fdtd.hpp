// Finite-difference time-domain solver for the damped wave equation in
// normalized units (wave speed 1),
//   U_tt - U_xx + 2 m U_t = 0,
// and its N-conductor matrix form with 2 m_hat U_t. This is the independent
// oracle the analytic kernels are calibrated and tested against: same
// physics, entirely different discretization.
//
// Scheme: leapfrog with the damping term time-centered,
//   (U+ - 2U + U-)/dt^2 = Lap(U) - 2m (U+ - U-)/(2 dt),
// which keeps second-order accuracy (a forward difference would not). The
// source enters as a left-boundary Dirichlet value U(0,t) = u0(t). The far
// end is either reflecting (open = mirror ghost, short = pinned zero) or a
// first-order Mur one-way condition for infinite-line emulation; the Mur
// residual reflection (~1e-3) is the dominant floor on achievable oracle
// agreement.

#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lossyline/linalg.hpp"
#include "lossyline/network.hpp"
#include "lossyline/waveform.hpp"

namespace lossyline {

enum class FdtdBoundary {
    AbsorbingRight,   // first-order Mur one-way condition
    ReflectingOpen,   // Neumann mirror, reflection coefficient +1
    ReflectingShort,  // pinned zero, reflection coefficient -1
    Matched,          // alias of AbsorbingRight (frequency-independent match)
};

struct FdtdGrid {
    double dx = 0.0;      // normalized spatial step [s]
    double dt = 0.0;      // time step [s], CFL: dt <= 0.9 dx
    double length = 0.0;  // normalized domain size [s]
    FdtdBoundary boundary = FdtdBoundary::AbsorbingRight;
};

inline FdtdGrid make_grid(double length, double dx, double cfl = 0.9,
                          FdtdBoundary boundary = FdtdBoundary::AbsorbingRight) {
    if (!(length > 0.0) || !(dx > 0.0) || dx > length)
        throw std::invalid_argument("FdtdGrid: need 0 < dx <= length");
    if (!(cfl > 0.0) || cfl > 0.9 + 1e-12)
        throw std::invalid_argument("FdtdGrid: CFL factor must be in (0, 0.9]");
    return FdtdGrid{dx, cfl * dx, length, boundary};
}

/// Domain long enough that a far-end artifact cannot reach any probe within
/// the window (the wave must travel to the far end and back).
inline double safe_domain_length(double t_end, double max_probe_x, double margin = 0.0) {
    return 0.5 * (t_end + max_probe_x) + margin;
}

struct FdtdResult {
    std::vector<double> times;
    std::vector<std::vector<double>> probes;  // [probe][step]
    std::vector<double> probe_positions;      // snapped to grid nodes
};

/// Optional per-step field observer (used for snapshot dumps and tests).
struct FdtdObserver {
    int stride = 0;  // call every `stride` steps; 0 disables
    std::function<void(double t, const std::vector<double>& field)> callback;
};

namespace detail {

inline void check_grid(const FdtdGrid& grid) {
    if (!(grid.dx > 0.0) || !(grid.length > 0.0))
        throw std::invalid_argument("FdtdGrid: dx and length must be > 0");
    if (!(grid.dt > 0.0) || grid.dt > 0.9 * grid.dx * (1.0 + 1e-12))
        throw std::invalid_argument("FdtdGrid: CFL violated, need 0 < dt <= 0.9 dx");
}

inline std::vector<std::size_t> probe_indices(const FdtdGrid& grid, std::size_t nodes,
                                              const std::vector<double>& probes) {
    std::vector<std::size_t> idx;
    idx.reserve(probes.size());
    for (double x : probes) {
        if (x < 0.0 || x > grid.length)
            throw std::invalid_argument("fdtd: probe outside the domain");
        idx.push_back(std::min(nodes - 1,
                               static_cast<std::size_t>(std::llround(x / grid.dx))));
    }
    return idx;
}

}  // namespace detail

/// Scalar solve up to t_end with source callable u0(t).
template <class F>
FdtdResult fdtd_solve_fn(const FdtdGrid& grid, double m, F&& u0, double t_end,
                         const std::vector<double>& probe_positions,
                         const FdtdObserver& observer = {}) {
    detail::check_grid(grid);
    if (m < 0.0) throw std::invalid_argument("fdtd_solve: m must be >= 0");
    if (!(t_end > 0.0)) throw std::invalid_argument("fdtd_solve: t_end must be > 0");

    const auto nodes = static_cast<std::size_t>(std::floor(grid.length / grid.dx)) + 1;
    const auto steps = static_cast<std::size_t>(std::ceil(t_end / grid.dt));
    const double c2 = (grid.dt / grid.dx) * (grid.dt / grid.dx);
    const double damp = m * grid.dt;
    const double mur = (grid.dt - grid.dx) / (grid.dt + grid.dx);

    std::vector<double> prev(nodes, 0.0), cur(nodes, 0.0), next(nodes, 0.0);
    prev[0] = u0(0.0);

    // second-order smooth start from zero initial field and velocity
    for (std::size_t j = 1; j + 1 < nodes; ++j)
        cur[j] = 0.5 * c2 * (prev[j + 1] - 2.0 * prev[j] + prev[j - 1]);
    cur[0] = u0(grid.dt);

    FdtdResult result;
    const auto idx = detail::probe_indices(grid, nodes, probe_positions);
    for (std::size_t i : idx) result.probe_positions.push_back(static_cast<double>(i) * grid.dx);
    result.probes.resize(idx.size());
    result.times.reserve(steps + 1);

    const auto record = [&](std::size_t n, const std::vector<double>& field) {
        result.times.push_back(static_cast<double>(n) * grid.dt);
        for (std::size_t p = 0; p < idx.size(); ++p) result.probes[p].push_back(field[idx[p]]);
        if (observer.stride > 0 && n % static_cast<std::size_t>(observer.stride) == 0)
            observer.callback(static_cast<double>(n) * grid.dt, field);
    };
    record(0, prev);
    record(1, cur);

    // physical solutions stay within a small multiple of the source swing
    double source_max = std::abs(u0(0.0));

    for (std::size_t n = 1; n < steps; ++n) {
        for (std::size_t j = 1; j + 1 < nodes; ++j) {
            const double lap = cur[j + 1] - 2.0 * cur[j] + cur[j - 1];
            next[j] = (2.0 * cur[j] - (1.0 - damp) * prev[j] + c2 * lap) / (1.0 + damp);
        }
        next[0] = u0(static_cast<double>(n + 1) * grid.dt);
        const std::size_t J = nodes - 1;
        switch (grid.boundary) {
            case FdtdBoundary::AbsorbingRight:
            case FdtdBoundary::Matched:
                next[J] = cur[J - 1] + mur * (next[J - 1] - cur[J]);
                break;
            case FdtdBoundary::ReflectingOpen: {
                const double lap = 2.0 * (cur[J - 1] - cur[J]);  // mirror ghost
                next[J] = (2.0 * cur[J] - (1.0 - damp) * prev[J] + c2 * lap) / (1.0 + damp);
                break;
            }
            case FdtdBoundary::ReflectingShort:
                next[J] = 0.0;
                break;
        }
        std::swap(prev, cur);
        std::swap(cur, next);
        record(n + 1, cur);

        source_max = std::max(source_max, std::abs(cur[0]));
        if ((n & 63u) == 0) {
            double mx = 0.0;
            for (double v : cur) mx = std::max(mx, std::abs(v));
            if (!std::isfinite(mx) || mx > 100.0 * source_max + 1e-30)
                throw std::runtime_error("fdtd_solve: instability detected at t = " +
                                         std::to_string(static_cast<double>(n) * grid.dt) +
                                         ", max |U| = " + std::to_string(mx));
        }
    }
    return result;
}

inline FdtdResult fdtd_solve(const FdtdGrid& grid, double m, const Waveform& u0, double t_end,
                             const std::vector<double>& probe_positions,
                             const FdtdObserver& observer = {}) {
    return fdtd_solve_fn(grid, m, u0, t_end, probe_positions, observer);
}

struct FdtdMatrixResult {
    std::vector<double> times;
    // values[probe][line][step]
    std::vector<std::vector<std::vector<double>>> probes;
    std::vector<double> probe_positions;
};

/// Vector leapfrog for the matrix telegraph equation. The damping update
/// factor (I + dt m_hat) is inverted once and applied per node per step;
/// at n = 1 this reduces to fdtd_solve arithmetic exactly.
inline FdtdMatrixResult fdtd_solve_matrix(const FdtdGrid& grid, const NetworkSpec& spec,
                                          const std::vector<Waveform>& u_in, double t_end,
                                          const std::vector<double>& probe_positions) {
    detail::check_grid(grid);
    if (static_cast<int>(u_in.size()) != spec.n)
        throw std::invalid_argument("fdtd_solve_matrix: need one source waveform per line");
    if (!(t_end > 0.0)) throw std::invalid_argument("fdtd_solve_matrix: t_end must be > 0");

    const int nc = spec.n;
    const Matrix mhat = mass_tensor(spec).m;
    Matrix a_plus(nc), a_minus(nc);
    for (int i = 0; i < nc; ++i)
        for (int j = 0; j < nc; ++j) {
            a_plus(i, j) = (i == j ? 1.0 : 0.0) + grid.dt * mhat(i, j);
            a_minus(i, j) = (i == j ? 1.0 : 0.0) - grid.dt * mhat(i, j);
        }
    const Matrix a_inv = inverse(a_plus);

    const auto nodes = static_cast<std::size_t>(std::floor(grid.length / grid.dx)) + 1;
    const auto steps = static_cast<std::size_t>(std::ceil(t_end / grid.dt));
    const double c2 = (grid.dt / grid.dx) * (grid.dt / grid.dx);
    const double mur = (grid.dt - grid.dx) / (grid.dt + grid.dx);

    // field[j*nc + comp]
    std::vector<double> prev(nodes * nc, 0.0), cur(nodes * nc, 0.0), next(nodes * nc, 0.0);
    const auto set_source = [&](std::vector<double>& field, double t) {
        for (int comp = 0; comp < nc; ++comp) field[comp] = u_in[comp](t);
    };
    set_source(prev, 0.0);
    for (std::size_t j = 1; j + 1 < nodes; ++j)
        for (int comp = 0; comp < nc; ++comp) {
            const std::size_t at = j * nc + comp;
            cur[at] = 0.5 * c2 * (prev[at + nc] - 2.0 * prev[at] + prev[at - nc]);
        }
    set_source(cur, grid.dt);

    FdtdMatrixResult result;
    const auto idx = detail::probe_indices(grid, nodes, probe_positions);
    for (std::size_t i : idx) result.probe_positions.push_back(static_cast<double>(i) * grid.dx);
    result.probes.assign(idx.size(), std::vector<std::vector<double>>(nc));
    result.times.reserve(steps + 1);
    const auto record = [&](std::size_t n, const std::vector<double>& field) {
        result.times.push_back(static_cast<double>(n) * grid.dt);
        for (std::size_t p = 0; p < idx.size(); ++p)
            for (int comp = 0; comp < nc; ++comp)
                result.probes[p][comp].push_back(field[idx[p] * nc + comp]);
    };
    record(0, prev);
    record(1, cur);

    std::vector<double> rhs(nc), upd(nc);
    double source_max = 0.0;
    for (int comp = 0; comp < nc; ++comp) source_max = std::max(source_max, std::abs(prev[comp]));
    for (std::size_t n = 1; n < steps; ++n) {
        for (std::size_t j = 1; j + 1 < nodes; ++j) {
            const std::size_t at = j * nc;
            for (int comp = 0; comp < nc; ++comp) {
                const double lap = cur[at + nc + comp] - 2.0 * cur[at + comp] +
                                   cur[at - nc + comp];
                double aminus_prev = 0.0;
                for (int k = 0; k < nc; ++k) aminus_prev += a_minus(comp, k) * prev[at + k];
                rhs[comp] = 2.0 * cur[at + comp] - aminus_prev + c2 * lap;
            }
            for (int comp = 0; comp < nc; ++comp) {
                double s = 0.0;
                for (int k = 0; k < nc; ++k) s += a_inv(comp, k) * rhs[k];
                upd[comp] = s;
            }
            for (int comp = 0; comp < nc; ++comp) next[at + comp] = upd[comp];
        }
        set_source(next, static_cast<double>(n + 1) * grid.dt);
        const std::size_t J = (nodes - 1) * nc;
        switch (grid.boundary) {
            case FdtdBoundary::AbsorbingRight:
            case FdtdBoundary::Matched:
                for (int comp = 0; comp < nc; ++comp)
                    next[J + comp] = cur[J - nc + comp] +
                                     mur * (next[J - nc + comp] - cur[J + comp]);
                break;
            case FdtdBoundary::ReflectingOpen:
                for (int comp = 0; comp < nc; ++comp) {
                    const double lap = 2.0 * (cur[J - nc + comp] - cur[J + comp]);
                    double aminus_prev = 0.0;
                    for (int k = 0; k < nc; ++k) aminus_prev += a_minus(comp, k) * prev[J + k];
                    rhs[comp] = 2.0 * cur[J + comp] - aminus_prev + c2 * lap;
                }
                for (int comp = 0; comp < nc; ++comp) {
                    double s = 0.0;
                    for (int k = 0; k < nc; ++k) s += a_inv(comp, k) * rhs[k];
                    next[J + comp] = s;
                }
                break;
            case FdtdBoundary::ReflectingShort:
                for (int comp = 0; comp < nc; ++comp) next[J + comp] = 0.0;
                break;
        }
        std::swap(prev, cur);
        std::swap(cur, next);
        record(n + 1, cur);

        for (int comp = 0; comp < nc; ++comp)
            source_max = std::max(source_max, std::abs(cur[comp]));
        if ((n & 63u) == 0) {
            double mx = 0.0;
            for (double v : cur) mx = std::max(mx, std::abs(v));
            if (!std::isfinite(mx) || mx > 100.0 * source_max + 1e-30)
                throw std::runtime_error("fdtd_solve_matrix: instability detected at t = " +
                                         std::to_string(static_cast<double>(n) * grid.dt) +
                                         ", max |U| = " + std::to_string(mx));
        }
    }
    return result;
}

}  // namespace lossyline
