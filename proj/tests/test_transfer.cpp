#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "afc/transfer.hpp"
#include "oracles.hpp"

using namespace afc;

namespace {

FrequencyGrid fgrid(std::size_t n = 1 << 13) { return FrequencyGrid(0.0, 40.0, n); }

SpectralProfile flat_profile(double alphaL, std::size_t n = 1 << 13) {
    SpectralProfile p;
    p.grid = fgrid(n);
    p.alpha_L.assign(n, alphaL);
    return p;
}

SpectralProfile lorentz_profile(double f0, double gamma, double alphaL, std::size_t n = 1 << 13) {
    SpectralProfile p;
    p.grid = fgrid(n);
    p.alpha_L.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        double x = 2.0 * (p.grid.freq_mhz(k) - f0) / gamma;
        p.alpha_L[k] = alphaL / (1.0 + x * x);
    }
    return p;
}

// random smooth profile: constant background plus gaussian bumps, clipped at zero
SpectralProfile random_profile(std::mt19937_64& rng, std::size_t n = 1 << 12) {
    std::uniform_real_distribution<double> ubg(0.0, 4.0), uamp(-2.0, 4.0), uw(0.5, 4.0),
        uc(-12.0, 12.0);
    std::uniform_int_distribution<int> nb(1, 6);
    SpectralProfile p;
    p.grid = fgrid(n);
    p.alpha_L.assign(n, ubg(rng));
    int bumps = nb(rng);
    for (int b = 0; b < bumps; ++b) {
        double a = uamp(rng), w = uw(rng), c = uc(rng);
        for (std::size_t k = 0; k < n; ++k) {
            double u = (p.grid.freq_mhz(k) - c) / w;
            p.alpha_L[k] += a * std::exp(-u * u);
        }
    }
    for (auto& v : p.alpha_L) v = std::max(v, 0.0);
    return p;
}

} // namespace

TEST_CASE("transparent medium is the identity") {
    auto tf = make_transfer_function(flat_profile(0.0));
    for (std::size_t k = 0; k < tf.response.size(); k += 101)
        REQUIRE(std::abs(tf.response[k] - cplx{1.0, 0.0}) < 1e-12);

    TimeGrid tg = paired_time_grid(tf.grid);
    Pulse in = gaussian_pulse(tg, 200.0, 0.1);
    Pulse out = propagate(in, tf);
    double err = 0.0;
    for (std::size_t m = 0; m < in.envelope.size(); ++m)
        err = std::max(err, std::abs(out.envelope[m] - in.envelope[m]));
    CHECK(err < 1e-10);
}

TEST_CASE("uniform absorber obeys Beer-Lambert") {
    auto tf = make_transfer_function(flat_profile(6.0));
    TimeGrid tg = paired_time_grid(tf.grid);
    Pulse in = gaussian_pulse(tg, 200.0, 0.1);
    Pulse out = propagate(in, tf);
    CHECK(out.energy() / in.energy() == Catch::Approx(std::exp(-6.0)).epsilon(1e-6));
}

TEST_CASE("single Lorentzian line matches the analytic causal response") {
    // The periodized Hilbert transform carries an O(gamma/span) tail-truncation error, so the
    // oracle comparison uses a line narrow against the span.
    const double f0 = 1.0, gamma = 1.0, alphaL = 3.0;
    SpectralProfile prof;
    prof.grid = FrequencyGrid(0.0, 320.0, 1 << 15);
    prof.alpha_L.resize(prof.grid.n_points);
    for (std::size_t k = 0; k < prof.grid.n_points; ++k) {
        double x = 2.0 * (prof.grid.freq_mhz(k) - f0) / gamma;
        prof.alpha_L[k] = alphaL / (1.0 + x * x);
    }
    auto tf = make_transfer_function(prof);
    double err = 0.0;
    for (std::size_t k = 0; k < tf.grid.n_points; ++k) {
        auto expect = oracle::lorentz_line_response(tf.grid.freq_mhz(k), f0, gamma, alphaL);
        err = std::max(err, std::abs(tf.response[k] - expect));
    }
    CHECK(err < 8e-3);
    CHECK(impulse_precursor_fraction(tf) < 1e-6);
}

TEST_CASE("weak Lorentzian line rings down at the free-induction rate") {
    const double gamma = 1.0, alphaL = 0.2;  // weak line: h ~ delta - (aL/2) FID
    SpectralProfile prof;
    prof.grid = FrequencyGrid(0.0, 320.0, 1 << 15);
    prof.alpha_L.resize(prof.grid.n_points);
    for (std::size_t k = 0; k < prof.grid.n_points; ++k) {
        double x = 2.0 * prof.grid.freq_mhz(k) / gamma;
        prof.alpha_L[k] = alphaL / (1.0 + x * x);
    }
    auto tf = make_transfer_function(prof);
    std::vector<cplx> h(tf.response);
    fft_core(h, -1);
    TimeGrid tg = paired_time_grid(tf.grid, 0.0, false);
    double t1 = 300.0, t2 = 900.0;  // ns, past the t = 0 delta
    auto m1 = static_cast<std::size_t>(t1 / tg.dt_ns);
    auto m2 = static_cast<std::size_t>(t2 / tg.dt_ns);
    double rate = std::log(std::abs(h[m1]) / std::abs(h[m2])) /
                  ((tg.time_ns(m2) - tg.time_ns(m1)) * kMHzNs);
    CHECK(rate == Catch::Approx(std::numbers::pi * gamma).epsilon(0.10));
    CHECK(impulse_precursor_fraction(tf) < 1e-6);
}

TEST_CASE("passivity and causality on random smooth profiles") {
    std::mt19937_64 rng(4242);
    for (int it = 0; it < 40; ++it) {
        auto prof = random_profile(rng);
        auto tf = make_transfer_function(prof);
        for (std::size_t k = 0; k < tf.response.size(); k += 37)
            REQUIRE(std::abs(tf.response[k]) <= 1.0 + 1e-12);
        REQUIRE(impulse_precursor_fraction(tf) < 1e-6);

        TimeGrid tg = paired_time_grid(tf.grid);
        Pulse in = gaussian_pulse(tg, 150.0, 0.1);
        Pulse out = propagate(in, tf);
        REQUIRE(out.energy() <= in.energy() * (1.0 + 1e-9));
    }
}

TEST_CASE("phase-free variant attenuates without dispersion") {
    auto prof = lorentz_profile(0.0, 2.0, 3.0);
    auto tf = make_transfer_function(prof, false);
    for (std::size_t k = 0; k < tf.response.size(); k += 101)
        REQUIRE(tf.response[k].imag() == 0.0);
}

TEST_CASE("grid mismatch is rejected") {
    auto tf = make_transfer_function(flat_profile(1.0, 1 << 13));
    TimeGrid other(0.0, 1000.0, 1 << 12);
    Pulse in = gaussian_pulse(other, 100.0, 0.1, 0.0, 0.0, 500.0);
    CHECK_THROWS_AS(propagate(in, tf), config_error);
}

TEST_CASE("span must cover 4x the comb extent") {
    MaterialParams mat;
    mat.probe_window_offset_mhz = 0.0;
    mat.excited_splitting_limit_mhz = 50.0;
    CombParams comb;  // delta 1.2, gamma 0.3
    comb.n_peaks = 12;  // teeth span 13.2 + delta -> extent 14.4, needs span >= 57.6
    auto prof = build_comb(comb, mat, FrequencyGrid(0.0, 40.0, 1 << 14));
    CHECK_THROWS_AS(make_transfer_function(prof), config_error);
}
