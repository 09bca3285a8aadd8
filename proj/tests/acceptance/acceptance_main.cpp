// Acceptance suite: each criterion prints one [PASS]/[FAIL] line with the measured values.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "afc/runners.hpp"
#include "../oracles.hpp"

using namespace afc;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void line(const char* id, bool pass, const std::string& detail) {
    std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string num(double v) { return fmt_num(v); }

// Numeric forward efficiency of one scenario point.
double numeric_eta(const Scenario& sc) {
    auto prof = sc.profile();
    auto tf = make_transfer_function(prof, sc.kk_phase);
    Pulse in = sc.storage_pulse();
    Pulse out = propagate(in, tf);
    return echo_efficiency(in, out, sc.comb.delta_mhz, sc.T2_for_echo()).efficiency;
}

// ---------------------------------------------------------------- A1
void a1() {
    double e64 = analytic_efficiency(6.0, 4.0);
    double e66 = analytic_efficiency(6.0, 6.0);
    double d64 = std::abs(e64 - oracle::eq2_brute(6.0, 4.0));
    double d66 = std::abs(e66 - oracle::eq2_brute(6.0, 6.0));
    bool pass = d64 < 1e-6 && d66 < 1e-6;
    line("A1", pass,
         "analytic_efficiency(6,4) = " + num(e64) + ", (6,6) = " + num(e66) +
             "; |delta| vs brute force = " + num(d64) + ", " + num(d66) + " (< 1e-6)");
}

// ---------------------------------------------------------------- A2
void a2() {
    Scenario sc = load_preset("forward-cap");
    auto eta_of = [&sc](double alphaL) {
        Scenario pt = sc;
        pt.comb.alphaL = alphaL;
        return numeric_eta(pt);
    };
    auto cap = max_forward_efficiency(eta_of, sc.axis1->lo, sc.axis1->hi, sc.axis1->n);
    double ratio = cap.alphaL_at_max / 40.0;
    bool pass = std::abs(cap.eta_max - 0.54) <= 0.02 && std::abs(ratio - 2.0) <= 0.1;
    line("A2", pass,
         "F = 40 sweep: eta_max = " + num(cap.eta_max) + " (0.54 +- 0.02), peak at alphaL/F = " +
             num(ratio) + " (2.0 +- 0.1)");
}

// ---------------------------------------------------------------- A3
void a3() {
    // delta = 1.2 MHz with the 200 kHz published linewidth; at 300 kHz the four-tooth comb's
    // dispersion skews the maximum to the experimental 800 ns (see the unit suite)
    Scenario sc = load_preset("fig3-gamma200");
    auto prof = sc.profile();
    auto tf = make_transfer_function(prof, sc.kk_phase);
    TimeGrid tg = sc.time_grid();
    Pulse in = sc.storage_pulse();
    Pulse out = propagate(in, tf);
    auto echo = echo_efficiency(in, out, sc.comb.delta_mhz, sc.T2_for_echo());

    auto ens = sample_ensemble(prof, 100000, sc.seed);
    auto mc = ensemble_first_echo(prof, ens, sc.comb.delta_mhz, tg.dt_ns, sc.material.optical_T2_us);

    const double expect = 1000.0 / 1.2;
    double d_tf = std::abs(echo.measured_delay_ns() - expect);
    double d_mc = std::abs(mc.peak_time_ns - expect);
    bool pass = d_tf <= tg.dt_ns && d_mc <= tg.dt_ns;
    line("A3", pass,
         "echo delay: transfer-function " + num(echo.measured_delay_ns()) + " ns (arrival-relative), "
             "ensemble " + num(mc.peak_time_ns) + " ns vs 1/delta = " + num(expect) +
             " ns (grid step " + num(tg.dt_ns) + " ns)");
}

// ---------------------------------------------------------------- A4
void a4() {
    MaterialParams mat;
    mat.probe_window_offset_mhz = 0.0;
    mat.excited_splitting_limit_mhz = 30.0;
    FrequencyGrid fg(0.0, 60.0, 1 << 14);
    TimeGrid tg = paired_time_grid(fg);

    double worst = 0.0;
    std::string detail;
    bool pass = true;
    std::uint64_t seed = 42;
    for (double F : {2.0, 4.0, 8.0}) {
        for (double alphaL : {2.0, 6.0, 10.0}) {
            CombParams comb;
            comb.delta_mhz = 1.0;
            comb.gamma_fwhm_mhz = comb.delta_mhz / F;
            comb.alphaL = alphaL;
            comb.n_peaks = 11;
            auto prof = build_comb(comb, mat, fg);
            auto tf = make_transfer_function(prof);
            Pulse in = gaussian_pulse(tg, 400.0, 0.1);
            Pulse out = propagate(in, tf);
            double eta_tf = echo_efficiency(in, out, comb.delta_mhz, 100.0).efficiency;

            auto ens = sample_ensemble(prof, 100000, seed++);
            double eta_mc =
                ensemble_first_echo(prof, ens, comb.delta_mhz, tg.dt_ns, 100.0).efficiency;
            double d = std::abs(eta_tf - eta_mc);
            worst = std::max(worst, d);
            if (d >= 0.02) {
                pass = false;
                detail += " [F=" + num(F) + ",aL=" + num(alphaL) + ": tf=" + num(eta_tf) +
                          " mc=" + num(eta_mc) + "]";
            }
        }
    }
    line("A4", pass,
         "transfer-function vs ensemble efficiency on the 9-point grid, worst |delta| = " +
             num(worst) + " (< 0.02)" + detail);
}

// ---------------------------------------------------------------- A5
void a5() {
    std::mt19937_64 rng(20260810);
    std::uniform_real_distribution<double> ubg(0.0, 4.0), uamp(-2.0, 4.0), uw(0.5, 4.0),
        uc(-12.0, 12.0), uF(2.0, 10.0), ud(0.8, 2.0), ua(0.5, 10.0), upit(6.0, 18.0), u01(0.0, 1.0);
    std::uniform_int_distribution<int> nbumps(1, 6), npk(1, 7);

    const int total = 1000;
    int bad_causal = 0, bad_passive = 0;
    double worst_pre = 0.0, worst_gain = 0.0;
    const std::size_t n = 1 << 12;
    FrequencyGrid fg(0.0, 40.0, n);
    TimeGrid tg = paired_time_grid(fg);

    for (int it = 0; it < total; ++it) {
        SpectralProfile prof;
        double kind = u01(rng);
        if (kind < 0.4) {
            // smooth random bumps on a floor
            prof.grid = fg;
            prof.alpha_L.assign(n, ubg(rng));
            int nb = nbumps(rng);
            for (int b = 0; b < nb; ++b) {
                double a = uamp(rng), w = uw(rng), c = uc(rng);
                for (std::size_t k = 0; k < n; ++k) {
                    double u = (fg.freq_mhz(k) - c) / w;
                    prof.alpha_L[k] += a * std::exp(-u * u);
                }
            }
            for (auto& v : prof.alpha_L) v = std::max(v, 0.0);
        } else {
            // pit, with or without a comb of gaussian or lorentzian teeth
            MaterialParams mat;
            mat.pit_width_mhz = upit(rng);
            mat.probe_window_offset_mhz = 0.0;
            mat.excited_splitting_limit_mhz = 30.0;
            mat.inhomogeneous_alphaL = ubg(rng);
            if (kind < 0.55) {
                prof = build_pit(mat, fg, 0.1 * u01(rng));
            } else {
                CombParams comb;
                comb.delta_mhz = ud(rng);
                comb.gamma_fwhm_mhz = comb.delta_mhz / uF(rng);
                if (comb.gamma_fwhm_mhz < 8.0 * fg.resolution_mhz())
                    comb.gamma_fwhm_mhz = 8.0 * fg.resolution_mhz();
                comb.alphaL = ua(rng);
                comb.peak_shape = u01(rng) < 0.5 ? PeakShape::gaussian : PeakShape::lorentzian;
                std::size_t fit = max_peak_count(comb, mat);
                comb.n_peaks = std::min<std::size_t>(fit, 1 + static_cast<std::size_t>(npk(rng)));
                if (comb.delta_mhz * (comb.n_peaks + 1) > 0.25 * fg.span_mhz)
                    comb.n_peaks = 1;
                prof = build_comb(comb, mat, fg);
            }
        }
        auto tf = make_transfer_function(prof);
        double pre = impulse_precursor_fraction(tf);
        worst_pre = std::max(worst_pre, pre);
        if (!(pre < 1e-6)) ++bad_causal;

        Pulse in = gaussian_pulse(tg, 120.0 + 280.0 * u01(rng), 0.1);
        Pulse out = propagate(in, tf);
        double gain = out.energy() / in.energy();
        worst_gain = std::max(worst_gain, gain);
        if (!(gain <= 1.0 + 1e-9)) ++bad_passive;
    }
    bool pass = bad_causal == 0 && bad_passive == 0;
    line("A5", pass,
         std::to_string(total) + " randomized profiles: worst precursor fraction = " +
             num(worst_pre) + " (< 1e-6), worst energy gain = " + num(worst_gain) + " (<= 1)");
}

// ---------------------------------------------------------------- A6
void a6() {
    Scenario sc = load_preset("fig3");
    sc.inject_eta = 0.25;
    const int seeds = 200;
    int covered = 0, refused = 0;
    fs::path dir = fs::temp_directory_path() / "afcmem_acceptance_a6";
    for (int s = 0; s < seeds; ++s) {
        sc.seed = 10000 + s;
        sc.detector.seed = sc.seed;
        try {
            auto run = run_counts(sc, (dir / std::to_string(s)).string());
            if (std::abs(run.eta.eta - 0.25) <= 2.0 * run.eta.std_error) ++covered;
        } catch (const analysis_error&) {
            ++refused;  // a seed the analysis rejects counts against the coverage budget
        }
    }
    fs::remove_all(dir);

    // lossless chain expectation, Monte Carlo mean vs the closed form 5.25
    double closed = expected_total_counts(0.1, sc.detector);
    IntensityTrace tr;
    {
        TimeGrid fine = TimeGrid::from_step(-600.0, 2.0, 1200);
        tr.grid = fine;
        tr.value.resize(fine.n_points);
        double sum = 0.0;
        for (std::size_t m = 0; m < fine.n_points; ++m) {
            double u = 2.0 * fine.time_ns(m) / 200.0;
            tr.value[m] = std::exp(-kLn2 * u * u);
            sum += tr.value[m];
        }
        for (auto& v : tr.value) v *= 0.1 / (sum * 2.0);
    }
    DetectorParams lossless = sc.detector;
    lossless.dark_rate_hz = 0.0;
    double mc_sum = 0.0;
    for (int s = 0; s < seeds; ++s) {
        lossless.seed = 99000 + s;
        mc_sum += simulate_counts(tr, lossless, -600.0, 1200.0).total();
    }
    double mc_mean = mc_sum / seeds;
    double sigma_mean = std::sqrt(5.25 / seeds);

    bool pass = covered >= static_cast<int>(0.95 * seeds) && std::abs(closed - 5.25) < 1e-12 &&
                std::abs(mc_mean - 5.25) < 4.0 * sigma_mean;
    line("A6", pass,
         "coverage " + std::to_string(covered) + "/" + std::to_string(seeds) + " (need >= 190, " +
             std::to_string(refused) + " refused); closed-form lossless counts = " + num(closed) +
             ", Monte Carlo mean = " + num(mc_mean) + " (5.25 +- " + num(4.0 * sigma_mean) + ")");
}

// ---------------------------------------------------------------- A7
void a7() {
    fs::path dir = fs::temp_directory_path() / "afcmem_acceptance_a7";
    fs::remove_all(dir);

    auto fig4 = run_interference(load_preset("fig4"), (dir / "fig4").string());
    bool period_ok = std::abs(fig4.beat_period_ns - 435.0) <= 5.0;
    bool flip_ok = std::abs(fig4.phase_difference_rad - std::numbers::pi) <= 0.05;

    auto ideal = run_interference(load_preset("ideal"), (dir / "ideal").string());
    bool ideal_ok = std::abs(ideal.fit_phase0.visibility - 1.0) <= 0.01;

    auto mism = run_interference(load_preset("mismatched"), (dir / "mism").string());
    double expect_v = oracle::two_wave_visibility(1.0, 0.25);
    bool mism_ok = std::abs(mism.fit_phase0.visibility - expect_v) <= 0.01;

    // pipeline recovery of an injected visibility of 0.83 through photon counting
    double s = 0.83;
    double r = std::pow((2.0 - std::sqrt(4.0 - 4.0 * s * s)) / (2.0 * s), 2.0);
    TimeGrid tg = TimeGrid::from_step(0.0, 2.0, 1400);
    auto beat = synthetic_beat_trace(tg, 1.0, r, 2.3, 0.0);
    IntensityTrace tr;
    tr.grid = tg;
    tr.value = beat;
    for (auto& v : tr.value) v *= 1e-4;  // ~35 signal counts per bin over a ~10-count floor
    DetectorParams det;
    det.shots = 400000;
    det.dark_rate_hz = 1000.0;
    det.seed = 4242;
    auto hist = simulate_counts(tr, det, 0.0, 2700.0);
    auto vfit = visibility(hist, 0.0, 4.0 * 1000.0 / 2.3, 2.3);
    bool recover_ok = std::abs(vfit.visibility - 0.83) <= std::max(0.02, 2.0 * vfit.std_error);

    fs::remove_all(dir);
    bool pass = period_ok && flip_ok && ideal_ok && mism_ok && recover_ok;
    line("A7", pass,
         "fig4 beat period = " + num(fig4.beat_period_ns) + " ns (435 +- 5), phase flip = " +
             num(fig4.phase_difference_rad) + " rad (pi +- 0.05); ideal V = " +
             num(ideal.fit_phase0.visibility) + " (1.00 +- 0.01); mismatched V = " +
             num(mism.fit_phase0.visibility) + " (" + num(expect_v) + " +- 0.01); recovered V = " +
             num(vfit.visibility) + " (0.83 injected)");
}

// ---------------------------------------------------------------- A8
void a8() {
    auto opt = optimal_finesse(6.0);
    auto [f_scan, eta_scan] =
        oracle::scan_max([](double F) { return oracle::eq2_brute(6.0, F); }, 1.0, 100.0, 1e-4);
    const double h = 1e-4;
    double d = (analytic_efficiency(6.0, opt.F_opt + h) - analytic_efficiency(6.0, opt.F_opt - h)) /
               (2.0 * h);
    bool pass = std::abs(opt.F_opt - f_scan) < 1e-3 && std::abs(d) < 1e-6;
    line("A8", pass,
         "optimal_finesse(6): F = " + num(opt.F_opt) + " vs scan " + num(f_scan) +
             " (|dF| < 1e-3), |deta/dF| = " + num(std::abs(d)) + " (< 1e-6), eta = " +
             num(opt.eta_opt) + " vs scan " + num(eta_scan));
}

// ---------------------------------------------------------------- A9
void a9() {
    fs::path dir = fs::temp_directory_path() / "afcmem_acceptance_a9";
    fs::remove_all(dir);
    Scenario sc = load_preset("fig3");
    sc.inject_eta = 0.25;
    auto r1 = run_counts(sc, (dir / "r1").string());
    auto r2 = run_counts(sc, (dir / "r2").string());
    auto bytes = [](const fs::path& p) {
        std::ifstream f(p, std::ios::binary);
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };
    bool identical = bytes(dir / "r1" / "reference_hist.csv") ==
                         bytes(dir / "r2" / "reference_hist.csv") &&
                     bytes(dir / "r1" / "echo_hist.csv") == bytes(dir / "r2" / "echo_hist.csv") &&
                     bytes(dir / "r1" / "report.txt") == bytes(dir / "r2" / "report.txt");
    fs::remove_all(dir);

    Scenario coarse = load_preset("fig3");
    Scenario fine = coarse;
    fine.fgrid = FrequencyGrid(0.0, 80.0, 1 << 16);
    double eta_c = numeric_eta(coarse);
    double eta_f = numeric_eta(fine);
    double dgrid = std::abs(eta_c - eta_f);

    Scenario coarse200 = load_preset("fig3-gamma200");
    Scenario fine200 = coarse200;
    fine200.fgrid = FrequencyGrid(0.0, 80.0, 1 << 16);
    double dgrid200 = std::abs(numeric_eta(coarse200) - numeric_eta(fine200));

    bool pass = identical && dgrid < 1e-3 && dgrid200 < 1e-3;
    line("A9", pass,
         std::string("same seed byte-identical: ") + (identical ? "yes" : "no") +
             "; grid-doubling efficiency shifts = " + num(dgrid) + ", " + num(dgrid200) +
             " (< 1e-3)");
}

} // namespace

int main() {
    auto t0 = std::chrono::steady_clock::now();
    a1();
    a2();
    a3();
    a4();
    a5();
    a6();
    a7();
    a8();
    a9();
    auto dt = std::chrono::duration_cast<std::chrono::seconds>(std::chrono::steady_clock::now() - t0);
    std::printf("%d/9 criteria passed in %lld s\n", 9 - g_failures,
                static_cast<long long>(dt.count()));
    return g_failures;
}
