#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <stdexcept>

#include "lossyline/dispersion.hpp"
#include "oracle_helpers.hpp"

using namespace lossyline;

TEST_CASE("dispersion law at pinned points", "[dispersion]") {
    CHECK(omega0_of_k(3.0, 3.0) == 0.0);
    CHECK(omega0_of_k(5.0, 3.0) == Catch::Approx(4.0).epsilon(1e-15));
    CHECK(omega0_of_k(1.0, 0.0) == 1.0);
    CHECK_THROWS_AS(omega0_of_k(1.0, 3.0), std::domain_error);  // evanescent
}

TEST_CASE("phase velocity", "[dispersion]") {
    CHECK(phase_velocity(4.0, 3.0) == Catch::Approx(0.8).epsilon(1e-15));
    CHECK(phase_velocity(123.0, 0.0) == 1.0);
    CHECK(phase_velocity(1e-9, 5.0) < 1e-9);
    CHECK_THROWS_AS(phase_velocity(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("group velocity and the two forms of the law", "[dispersion]") {
    CHECK(group_velocity(4.0, 3.0) == Catch::Approx(1.25).epsilon(1e-15));
    CHECK(group_velocity(7.0, 0.0) == 1.0);
    CHECK_THROWS_AS(group_velocity(0.0, 3.0), std::domain_error);

    // sqrt(w^2+m^2)/w versus k/w with k from the inverse dispersion law
    const double w = 2.0 * M_PI * 8.1e8, m = 8.1e8;
    const double direct = std::sqrt(w * w + m * m) / w;
    const double via_k = k_of_omega0(w, m) / w;
    CHECK(direct == Catch::Approx(via_k).epsilon(1e-15));
}

TEST_CASE("effective speed with the forward-edge loss", "[dispersion]") {
    CHECK(effective_speed(4.0, 0.0).u == 1.0);
    CHECK_FALSE(effective_speed(4.0, 0.0).low_frequency);

    const EffectiveSpeed desk = effective_speed(2.0 * M_PI * 3e9, 8.1e8);
    CHECK(desk.u < 1.0);
    CHECK(desk.u > 0.0);
    CHECK_FALSE(desk.low_frequency);

    // at omega0 = m the approximation breaks down: (sqrt(2) - pi) < 0, flagged
    const EffectiveSpeed broken = effective_speed(1.0, 1.0);
    CHECK(broken.u == Catch::Approx(std::sqrt(2.0) - M_PI).epsilon(1e-14));
    CHECK(broken.u < 0.0);
    CHECK(broken.low_frequency);
}

TEST_CASE("delay uncertainty floor", "[dispersion]") {
    CHECK(min_delay_uncertainty(1e9) == 1e-9);
    CHECK(min_delay_uncertainty(2.0 * M_PI * 3e9) == Catch::Approx(5.305e-11).epsilon(1e-3));
    CHECK(min_delay_uncertainty(2e9) < min_delay_uncertainty(1e9));
    CHECK_THROWS_AS(min_delay_uncertainty(0.0), std::invalid_argument);
}

TEST_CASE("reciprocal velocity identity and dispersion round trip", "[dispersion]") {
    oracle::Rng rng(21);
    for (int i = 0; i < 2000; ++i) {
        const double w = std::exp(rng.uniform(-6.0, 6.0));
        const double m = rng.uniform(0.0, 10.0);
        CHECK(phase_velocity(w, m) * group_velocity(w, m) == Catch::Approx(1.0).epsilon(1e-14));
        // the algebraic identity holds on the whole domain
        const double k = k_of_omega0(w, m);
        CHECK(w * w + m * m == Catch::Approx(k * k).epsilon(1e-14));
        if (m > 0.0) CHECK(effective_speed(w, m).u < group_velocity(w, m));
    }
    for (int i = 0; i < 2000; ++i) {
        // the w -> k -> w round trip is representation-limited near the
        // cutoff (k rounds away w^2/2m), so it is pinned for w >= m
        const double m = rng.uniform(0.0, 10.0);
        const double w = m + std::exp(rng.uniform(-6.0, 6.0));
        CHECK(omega0_of_k(k_of_omega0(w, m), m) == Catch::Approx(w).epsilon(1e-14));
    }
}

TEST_CASE("group velocity equals d omega0 / d k", "[dispersion]") {
    oracle::Rng rng(22);
    int tested = 0;
    while (tested < 300) {
        const double w = std::exp(rng.uniform(-2.0, 4.0));
        const double m = rng.uniform(0.0, 5.0);
        const double k = k_of_omega0(w, m);
        const double h = 1e-6 * k;
        // near the cutoff the slope diverges and the centered stencil is
        // no longer second-order at the 1e-6 level
        if (k - m <= 1e3 * h) continue;
        const double fd = (omega0_of_k(k + h, m) - omega0_of_k(k - h, m)) / (2.0 * h);
        CHECK(fd == Catch::Approx(group_velocity(w, m)).epsilon(1e-6));
        ++tested;
    }
}

TEST_CASE("basis wave amplitude decays as exp(-2 m t)", "[dispersion]") {
    oracle::Rng rng(23);
    for (int i = 0; i < 200; ++i) {
        const double m = rng.uniform(0.0, 4.0);
        const double w = std::exp(rng.uniform(-1.0, 3.0));
        const double x = rng.uniform(0.0, 5.0);
        const double t = rng.uniform(0.0, 5.0);
        const BasisWave wave = BasisWave::from_omega0(w, m);
        const double ratio = std::norm(wave.value(x, t)) / std::norm(wave.value(x, 0.0));
        CHECK(ratio == Catch::Approx(std::exp(-2.0 * m * t)).epsilon(1e-12));
    }
}

TEST_CASE("narrow band packet reduces to one basis wave", "[dispersion]") {
    const double m = 0.7, wc = 5.0, half = 1e-6;
    PacketSpectrum spec{wc - half, wc + half, [](double) { return std::complex<double>(1.0, 0.0); }};
    for (double t : {0.3, 1.0, 2.5}) {
        const PacketResult got = build_packet(spec, m, 0.0, t, 64);
        const std::complex<double> expect =
            2.0 * half * BasisWave::from_omega0(wc, m).value(0.0, t);
        CHECK(std::abs(got.value - expect) <= 1e-9 * std::abs(expect));
        CHECK(got.converged);
    }
}

TEST_CASE("lossless packet translates rigidly", "[dispersion]") {
    PacketSpectrum spec{2.0, 6.0, [](double w) {
                            const double d = (w - 4.0) / 0.8;
                            return std::complex<double>(std::exp(-d * d), 0.0);
                        }};
    for (double x : {0.5, 1.7}) {
        for (double t : {2.0, 3.4}) {
            const double here = std::abs(build_packet(spec, 0.0, x, t, 512).value);
            const double origin = std::abs(build_packet(spec, 0.0, 0.0, t - x, 512).value);
            CHECK(here == Catch::Approx(origin).epsilon(1e-10).margin(1e-12));
        }
    }
}

TEST_CASE("packet quadrature converges under doubling", "[dispersion]") {
    PacketSpectrum spec{1.0, 9.0, [](double w) {
                            const double d = (w - 5.0) / 1.5;
                            return std::complex<double>(std::exp(-d * d), 0.0);
                        }};
    const PacketResult a = build_packet(spec, 0.4, 1.0, 2.0, 256);
    const PacketResult b = build_packet(spec, 0.4, 1.0, 2.0, 512);
    CHECK(std::abs(a.value - b.value) <= 1e-8 * std::abs(b.value));
    CHECK(b.converged);
    CHECK(b.error_estimate <= 1e-8 * std::abs(b.value));
}

TEST_CASE("undersampled oscillatory packet reports its error", "[dispersion]") {
    // high carrier over a wide band at late time: 16 nodes cannot resolve it
    PacketSpectrum spec{100.0, 400.0, [](double) { return std::complex<double>(1.0, 0.0); }};
    const PacketResult coarse = build_packet(spec, 0.0, 0.0, 37.123, 16);
    CHECK_FALSE(coarse.converged);
    CHECK(coarse.error_estimate > 0.0);
}

TEST_CASE("envelope peak drifts at the group velocity", "[dispersion]") {
    const double m = 3.0, wc = 20.0;
    PacketSpectrum spec{wc - 4.0, wc + 4.0, [=](double w) {
                            const double d = (w - wc) / 1.0;
                            return std::complex<double>(std::exp(-d * d), 0.0);
                        }};
    const auto peak_at = [&](double t) {
        double best_x = 0.0, best = -1.0;
        for (int i = 0; i <= 1200; ++i) {
            const double x = t * (0.8 + 0.4 * i / 1200.0);
            const double a = std::abs(build_packet(spec, m, x, t, 128).value);
            if (a > best) {
                best = a;
                best_x = x;
            }
        }
        return best_x;
    };
    const double t1 = 6.0, t2 = 10.0;
    const double drift = (peak_at(t2) - peak_at(t1)) / (t2 - t1);
    CHECK(drift == Catch::Approx(group_velocity(wc, m)).epsilon(0.02));
}
