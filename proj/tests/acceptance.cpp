// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. The CLI binary path is passed as argv[1] (used by the
// determinism criterion).

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lossyline/lossyline.hpp"
#include "oracle_helpers.hpp"

using namespace lossyline;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int n, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s  (%s)\n", pass ? "PASS" : "FAIL", n, name.c_str(),
                detail.c_str());
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

// ------------------------------------------------------------- criterion 1

void criterion_parameters() {
    const auto t0 = std::chrono::steady_clock::now();
    const DerivedParams d = derive_params({37.8, 2.3e-8, 3.28e-13});
    const double m_err = std::abs(d.m - 8.1e8) / 8.1e8;
    const double z_err = std::abs(d.z0 - 266.5) / 266.5;
    const double ld = d.v / d.m;
    const double ld_err = std::abs(ld - 14.1) / 14.1;
    const ReflectionBudget budget = reflection_budget(normalize_position(3.6, d.v), d.m);
    const bool nr_ok = std::abs(budget.n_r - 4) <= 1;
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    const bool pass = m_err <= 0.01 && z_err <= 0.02 && ld_err <= 0.02 && nr_ok && ms < 1000;
    report(1, "published parameter regression", pass,
           "m=" + fmt(d.m) + " dev=" + fmt(m_err) + " (tol 0.01), z0=" + fmt(d.z0) +
               " dev=" + fmt(z_err) + " (tol 0.02), v/m=" + fmt(ld) + " dev=" + fmt(ld_err) +
               " (tol 0.02), N_r=" + std::to_string(budget.n_r) + " (4 +/- 1)");
}

// ------------------------------------------------------------- criterion 2

void criterion_dispersion() {
    oracle::Rng rng(1001);
    double worst_prod = 0.0, worst_k = 0.0, worst_fd = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double w = std::exp(rng.uniform(-6.0, 6.0));
        const double m = rng.uniform(0.0, 10.0);
        const double prod_dev = std::abs(phase_velocity(w, m) * group_velocity(w, m) - 1.0);
        const double k = k_of_omega0(w, m);
        const double k_dev = std::abs(w * w + m * m - k * k) / (k * k);
        worst_prod = std::max(worst_prod, prod_dev);
        worst_k = std::max(worst_k, k_dev);
        if (i < 300) {  // finite differences are costlier; 300 samples
            const double h = 1e-6 * k;
            // the slope diverges at the cutoff: the centered stencil is
            // well-posed (inside the domain, truncation under 1e-6) only
            // with k - m well clear of h
            if (k - m <= 1e3 * h) continue;
            const double fd = (omega0_of_k(k + h, m) - omega0_of_k(k - h, m)) / (2.0 * h);
            worst_fd = std::max(worst_fd, std::abs(fd - group_velocity(w, m)) /
                                              group_velocity(w, m));
        }
    }
    const bool pass = worst_prod <= 1e-12 && worst_k <= 1e-12 && worst_fd <= 1e-6;
    report(2, "dispersion identities", pass,
           "max |vph*vgr-1|=" + fmt(worst_prod) + ", max |w^2+m^2-k^2|/k^2=" + fmt(worst_k) +
               " (tol 1e-12), max d-omega/dk dev=" + fmt(worst_fd) + " (tol 1e-6)");
}

// ------------------------------------------------------------- criterion 3

void criterion_bessel() {
    double worst = 0.0;
    for (int i = 0; i <= 5000; ++i) {
        const double z = 50.0 * i / 5000.0;
        const double r0 = static_cast<double>(oracle::bessel_i0_series(z));
        const double r1 = static_cast<double>(oracle::bessel_i1_series(z));
        worst = std::max(worst, std::abs(bessel_i0(z) - r0) / r0);
        if (z > 0.0) worst = std::max(worst, std::abs(bessel_i1(z) - r1) / r1);
    }
    double worst_fd = 0.0;
    const double h = 1e-5;
    for (int i = 0; i <= 500; ++i) {
        const double z = 0.1 + (50.0 - 0.1) * i / 500.0;
        const double fd = (bessel_i0(z + h) - bessel_i0(z - h)) / (2.0 * h);
        worst_fd = std::max(worst_fd, std::abs(fd - bessel_i1(z)) / bessel_i1(z));
    }
    const bool pass = worst <= 1e-12 && worst_fd <= 1e-8;
    report(3, "special functions vs series oracle", pass,
           "max rel err=" + fmt(worst) + " (tol 1e-12), derivative dev=" + fmt(worst_fd) +
               " (tol 1e-8)");
}

// ------------------------------------------------------------- criterion 4

void criterion_pde_residual() {
    oracle::Rng rng(1002);
    const auto interior = [](double x, double t, double m) {
        return std::exp(-m * t) * bessel_i0(m * std::sqrt(t * t - x * x));
    };
    double worst = 0.0;
    int tested = 0;
    while (tested < 1000) {
        const double m = rng.uniform(0.2, 4.0);
        const double t = rng.uniform(0.5, 5.0);
        const double x = rng.uniform(0.0, 0.95 * t);
        if (t * t - x * x <= 0.01 * t * t) continue;
        const double h = 1e-4 * std::max({t, x, 1.0});
        const double g = interior(x, t, m);
        const double gtt = (interior(x, t + h, m) - 2.0 * g + interior(x, t - h, m)) / (h * h);
        const double gxx = (interior(x + h, t, m) - 2.0 * g + interior(x - h, t, m)) / (h * h);
        const double gt = (interior(x, t + h, m) - interior(x, t - h, m)) / (2.0 * h);
        const double res = std::abs(gtt - gxx + 2.0 * m * gt);
        const double scale = std::max({std::abs(gtt), std::abs(gxx), std::abs(2.0 * m * gt)});
        worst = std::max(worst, res / scale);
        ++tested;
    }
    report(4, "kernel satisfies the damped wave equation", worst <= 1e-5,
           "max rel residual=" + fmt(worst) + " at 1000 interior points (tol 1e-5)");
}

// ------------------------------------------------------------- criterion 5

void criterion_oracle_equivalence() {
    const CalibrationReport rep = calibrate_kernel();
    const bool unique = rep.runner_up_l2 > rep.l2_error;
    bool regimes_ok = true;
    std::string regime_detail;
    for (const auto& cs : rep.cases) {
        regimes_ok = regimes_ok && cs.l2_error <= 1e-2;
        regime_detail += " mx=" + fmt(cs.m * cs.x) + ":" + fmt(cs.l2_error);
    }

    // lossless limit: the analytic path is the exact delayed copy and the
    // FDTD deviation from it is pure discretization error
    const Waveform pulse = Waveform::gaussian_pulse(1.0, 0.08, 0.4, 0.8);
    const double x = 1.0, t_end = 3.0, dx = 0.002;
    const FdtdGrid grid = make_grid(safe_domain_length(t_end, x, 40.0 * dx), dx);
    const FdtdResult fd = fdtd_solve(grid, 0.0, pulse, t_end, {x});
    std::vector<double> analytic, copy;
    for (std::size_t i = 0; i < fd.times.size(); ++i) {
        analytic.push_back(
            response_value(fd.probe_positions[0], fd.times[i], 0.0, pulse, rep.winner).value);
        copy.push_back(pulse(fd.times[i] - fd.probe_positions[0]));
    }
    const double exactness = oracle::rel_l2(analytic, copy);
    const double disc = oracle::rel_l2(analytic, fd.probes[0]);
    const bool lossless_ok = exactness <= 1e-14 && disc <= 5e-3;

    const bool pass = unique && regimes_ok && lossless_ok &&
                      rep.winner.variant == KernelVariant::DerivativeConsistent;
    report(5, "analytic response equals the FDTD oracle", pass,
           "winner=" + std::string(variant_name(rep.winner.variant)) + " scale=" +
               fmt(rep.winner.scale) + " sign=" + (rep.winner.sign > 0 ? "+1" : "-1") +
               ", unique=" + (unique ? "yes" : "no") + ", rel L2 per regime:" + regime_detail +
               " (tol 1e-2), lossless copy dev=" + fmt(exactness) + " fdtd disc=" + fmt(disc));
}

// ------------------------------------------------------------- criterion 6

void criterion_delay() {
    const Waveform step = Waveform::step(1.0, 20.0);
    const DelayResult lossless = delay_time(2.0, 0.5, step, 0.0, {.t_end = 10.0});
    const bool step_ok = std::abs(lossless.delay - 2.0) <= std::max(1e-6 * 2.0, 1e-15);

    const DelayResult d50 = delay_time(1.0, 0.5, step, 1.0, {.t_end = 15.0});
    const DelayResult d90 = delay_time(1.0, 0.9, step, 1.0, {.t_end = 15.0});
    const bool monotone_ok = d90.delay >= d50.delay;

    const double omega = 30.0;
    const Waveform burst = Waveform::sine_burst(1.0, omega, 8.0);
    const DelayResult with_floor = delay_time(1.0, 0.5, burst, 0.5, {.t_end = 8.0});
    const bool floor_ok = with_floor.uncertainty_floor == 1.0 / omega &&
                          lossless.uncertainty_floor == 0.0;

    report(6, "delay extraction", step_ok && monotone_ok && floor_ok,
           "lossless step delta=" + fmt(lossless.delay) + " (x=2), delta(0.9)-delta(0.5)=" +
               fmt(d90.delay - d50.delay) + " >= 0, floor=" + fmt(with_floor.uncertainty_floor) +
               " = 1/omega");
}

// ------------------------------------------------------------- criterion 7

void criterion_reflections() {
    const Waveform pulse = Waveform::gaussian_pulse(1.0, 0.1, 0.5, 1.0);
    const FiniteLine matched{1.0, 0.0};
    const ReflectionBudget b4{4, 0.0, true};
    double worst_matched = 0.0;
    for (double t : {0.7, 1.3, 2.0, 2.8}) {
        const double a = reflected_response_value(matched, 0.6, t, pulse, 0.8, b4).value;
        const double bb = response_value(0.6, t, 0.8, pulse).value;
        worst_matched = std::max(worst_matched,
                                 std::abs(a - bb) / std::max(1e-300, std::abs(bb)));
    }

    // step-front ringing of the leapfrog decays like dx^(1/3); grids are
    // sized for a clear margin under the tolerance
    const Waveform step = Waveform::step(1.0, 3.0);
    const auto mirror_case = [&](double gamma, FdtdBoundary bc, double probe, double t_end,
                                 double dx) {
        const FdtdGrid grid = make_grid(1.0, dx, 0.9, bc);
        const FdtdResult fd = fdtd_solve(grid, 0.0, step, t_end, {probe});
        const FiniteLine line{1.0, gamma};
        std::vector<double> mine;
        for (double t : fd.times)
            mine.push_back(reflected_response_value(line, probe, t, step, 0.0, b4).value);
        return oracle::rel_l2(mine, fd.probes[0]);
    };
    const double open_err = mirror_case(+1.0, FdtdBoundary::ReflectingOpen, 1.0, 2.9, 1.0 / 6400);
    const double short_err =
        mirror_case(-1.0, FdtdBoundary::ReflectingShort, 0.1, 2.05, 1.0 / 20000);

    const bool pass = worst_matched <= 1e-12 && open_err <= 2e-2 && short_err <= 2e-2;
    report(7, "reflection superposition", pass,
           "matched dev=" + fmt(worst_matched) + " (tol 1e-12), open-end L2=" + fmt(open_err) +
               ", short-end L2=" + fmt(short_err) + " (tol 2e-2)");
}

// ------------------------------------------------------------- criterion 8

void criterion_network() {
    // n = 1 reduction
    Matrix cap1(1);
    cap1(0, 0) = 2.0;
    const NetworkSpec single = make_network_from_cap(cap1, 1.6, 1.0);
    const double m1 = mass_tensor(single).m(0, 0);
    const Waveform pulse = Waveform::gaussian_pulse(1.0, 0.1, 0.5, 1.0);
    const std::vector<double> times{0.6, 1.2, 1.9, 2.7};
    const auto net1 = network_response(single, 1.0, times, {pulse});
    double reduction_dev = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double scalar = response_value(1.0, times[k], m1, pulse).value;
        reduction_dev = std::max(reduction_dev, std::abs(net1[0][k].value - scalar) /
                                                    std::max(1e-300, std::abs(scalar)));
    }

    // printed 3x3 structure
    const double cg = 1.0, cm = 0.5;
    const Matrix cap = build_tridiagonal_cap(cg, cm, 3);
    const bool structure_ok = cap(0, 0) == 2 * cg + cm && cap(1, 1) == 2 * cg + 2 * cm &&
                              cap(2, 2) == 2 * cg + cm && cap(0, 1) == -cm && cap(1, 2) == -cm &&
                              cap(0, 2) == 0.0;

    // dual mass-tensor forms
    const NetworkSpec spec = make_network_from_cap(cap, 1.0, 1.0);
    const MassTensor mt = mass_tensor(spec);
    double dual_dev = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            dual_dev = std::max(dual_dev, std::abs(mt.m(i, j) - 0.5 * spec.v2 * spec.cap(i, j)) /
                                              mt.m.max_abs());

    // eigendecomposition round trip
    oracle::Rng rng(1003);
    double recon_dev = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
        Matrix sym(5);
        for (int i = 0; i < 5; ++i)
            for (int j = i; j < 5; ++j) sym(i, j) = sym(j, i) = rng.uniform(-2.0, 2.0);
        const ModalBasis basis = modal_decompose(MassTensor{sym});
        double fro = 0.0, dev = 0.0;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) {
                double r = 0.0;
                for (int k = 0; k < 5; ++k)
                    r += basis.vectors(i, k) * basis.rates[k] * basis.vectors(j, k);
                dev += (r - sym(i, j)) * (r - sym(i, j));
                fro += sym(i, j) * sym(i, j);
            }
        recon_dev = std::max(recon_dev, std::sqrt(dev / fro));
    }

    // coupled crosstalk against the matrix FDTD oracle
    const Waveform off = Waveform::step(0.0, 0.8);
    const Waveform drive = Waveform::gaussian_pulse(1.0, 0.08, 0.4, 0.8);
    const double x = 1.0, t_end = 3.0, dx = 0.002;
    const FdtdGrid grid = make_grid(safe_domain_length(t_end, x, 40.0 * dx), dx);
    const FdtdMatrixResult fd = fdtd_solve_matrix(grid, spec, {drive, off, off}, t_end, {x});
    const auto net = network_response(spec, fd.probe_positions[0], fd.times, {drive, off, off});
    double xtalk_err = 0.0;
    for (int line = 0; line < 3; ++line) {
        std::vector<double> mine;
        for (std::size_t k = 0; k < fd.times.size(); ++k) mine.push_back(net[line][k].value);
        xtalk_err = std::max(xtalk_err, oracle::rel_l2(mine, fd.probes[0][line]));
    }

    const bool pass = reduction_dev <= 1e-12 && structure_ok && dual_dev <= 1e-6 &&
                      recon_dev <= 1e-10 && xtalk_err <= 2e-2;
    report(8, "multiconductor network", pass,
           "n=1 dev=" + fmt(reduction_dev) + " (tol 1e-12), 3x3 structure=" +
               (structure_ok ? "exact" : "WRONG") + ", dual forms dev=" + fmt(dual_dev) +
               " (tol 1e-6), eigen round-trip=" + fmt(recon_dev) +
               " (tol 1e-10), crosstalk L2=" + fmt(xtalk_err) + " (tol 2e-2)");
}

// ------------------------------------------------------------- criterion 9

void criterion_dc_delay() {
    // root-bearing configuration: m x = 5
    const double m = 1.0, x = 5.0;
    double peak = 0.0;
    for (int i = 1; i < 4000; ++i) peak = std::max(peak, dc_delay_lhs(x, 0.005 * i, m));
    bool root_ok = false;
    double residual = 1.0;
    if (peak > 0.0) {
        const double b = 0.5 * peak;
        const double root = dc_delay_literal(x, b, m);
        residual = std::abs(dc_delay_lhs(x, root, m) - b);
        root_ok = residual <= 1e-10;
    }

    // no-root configuration reports the attained maximum
    bool noroot_ok = false;
    double attained = 0.0;
    try {
        dc_delay_literal(1.0, 0.5, 1.0);
    } catch (const NoRootError& e) {
        noroot_ok = true;
        attained = e.attained_max;
    }

    report(9, "literal DC delay equation", root_ok && noroot_ok,
           "root residual=" + fmt(residual) + " (tol 1e-10), no-root reported with attained max=" +
               fmt(attained));
}

// ------------------------------------------------------------ criterion 10

std::string run_cli(const std::string& cli, const std::string& args) {
    const std::string cmd = "'" + cli + "' " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return {};
    std::string out;
    std::array<char, 4096> buf;
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
    pclose(pipe);
    return out;
}

void criterion_determinism(const char* cli_path) {
    if (cli_path == nullptr) {
        report(10, "CLI determinism", false, "no CLI path given on the command line");
        return;
    }
    const fs::path cfg = fs::temp_directory_path() / "lossyline_acceptance_cfg.json";
    std::ofstream(cfg) << R"({
      "line": {"r": 37.8, "ell": 2.3e-8, "c": 3.28e-13},
      "input": {"kind": "gauss", "amplitude": 1.0, "width": 5e-11, "onset": 1.5e-10,
                "duration": 3e-10},
      "positions_cm": [1.8, 3.6],
      "time": {"start": 0.0, "stop": 1.2e-9, "points": 60}
    })";
    bool pass = true;
    std::string detail;
    for (const std::string sub : {"params", "response", "delay", "calibrate"}) {
        const std::string args =
            sub + (sub == "calibrate" ? "" : " --config '" + cfg.string() + "'");
        const std::string a = run_cli(cli_path, args);
        const std::string b = run_cli(cli_path, args);
        const bool same = !a.empty() && a == b;
        pass = pass && same;
        detail += sub + (same ? "=stable " : "=UNSTABLE ");
    }
    report(10, "CLI determinism", pass, detail);
}

}  // namespace

int main(int argc, char** argv) {
    criterion_parameters();
    criterion_dispersion();
    criterion_bessel();
    criterion_pde_residual();
    criterion_oracle_equivalence();
    criterion_delay();
    criterion_reflections();
    criterion_network();
    criterion_dc_delay();
    criterion_determinism(argc > 1 ? argv[1] : nullptr);
    if (g_failures > 0)
        std::printf("%d of 10 criteria failed\n", g_failures);
    else
        std::printf("all 10 criteria passed\n");
    return g_failures;
}
