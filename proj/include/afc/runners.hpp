#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "afc/csv.hpp"
#include "afc/detection.hpp"
#include "afc/echo.hpp"
#include "afc/ensemble.hpp"
#include "afc/fitting.hpp"
#include "afc/interference.hpp"
#include "afc/scenario.hpp"
#include "afc/transfer.hpp"

namespace afc {

using Report = std::vector<std::pair<std::string, std::string>>;

inline void report_add(Report& r, const std::string& key, double v) {
    r.emplace_back(key, fmt_num(v));
}
inline void report_add(Report& r, const std::string& key, const std::string& v) {
    r.emplace_back(key, v);
}

// Full provenance: every input parameter goes into the report next to the results.
inline Report scenario_report(const Scenario& sc) {
    Report r;
    report_add(r, "scenario.name", sc.name);
    report_add(r, "scenario.seed", static_cast<double>(sc.seed));
    report_add(r, "material.inhomogeneous_fwhm_mhz", sc.material.inhomogeneous_fwhm_mhz);
    report_add(r, "material.inhomogeneous_alphaL", sc.material.inhomogeneous_alphaL);
    report_add(r, "material.pit_width_mhz", sc.material.pit_width_mhz);
    report_add(r, "material.excited_splitting_limit_mhz", sc.material.excited_splitting_limit_mhz);
    report_add(r, "material.optical_T2_us", sc.material.optical_T2_us);
    report_add(r, "material.probe_window_offset_mhz", sc.material.probe_window_offset_mhz);
    report_add(r, "comb.enabled", sc.comb_enabled ? "on" : "off");
    report_add(r, "comb.delta_mhz", sc.comb.delta_mhz);
    report_add(r, "comb.gamma_fwhm_mhz", sc.comb.gamma_fwhm_mhz);
    report_add(r, "comb.alphaL", sc.comb.alphaL);
    report_add(r, "comb.n_peaks", static_cast<double>(sc.comb.n_peaks));
    report_add(r, "comb.peak_shape", to_string(sc.comb.peak_shape));
    report_add(r, "comb.background_alphaL", sc.comb.background_alphaL);
    report_add(r, "grid.center_mhz", sc.fgrid.center_mhz);
    report_add(r, "grid.span_mhz", sc.fgrid.span_mhz);
    report_add(r, "grid.n_points", static_cast<double>(sc.fgrid.n_points));
    report_add(r, "storage_pulse.shape", std::string(sc.storage.shape == PulseShape::gaussian
                                                         ? "gaussian"
                                                         : sc.storage.shape == PulseShape::supergaussian
                                                               ? "supergaussian"
                                                               : "sechyp"));
    report_add(r, "storage_pulse.fwhm_ns", sc.storage.fwhm_ns);
    report_add(r, "storage_pulse.supergauss_n", static_cast<double>(sc.storage.supergauss_n));
    report_add(r, "storage_pulse.mean_photons", sc.storage.mean_photons);
    report_add(r, "storage_pulse.carrier_detuning_mhz", sc.storage.carrier_detuning_mhz);
    report_add(r, "storage_pulse.phase_rad", sc.storage.phase_rad);
    if (sc.probe) {
        report_add(r, "probe_pulse.shape", std::string("supergaussian"));
        report_add(r, "probe_pulse.fwhm_ns", sc.probe->fwhm_ns);
        report_add(r, "probe_pulse.supergauss_n", static_cast<double>(sc.probe->supergauss_n));
        report_add(r, "probe_pulse.mean_photons", sc.probe->mean_photons);
        report_add(r, "probe_pulse.carrier_detuning_mhz", sc.probe->carrier_detuning_mhz);
        report_add(r, "probe_pulse.phase_rad", sc.probe->phase_rad);
    }
    report_add(r, "detector.quantum_efficiency", sc.detector.quantum_efficiency);
    report_add(r, "detector.pinhole_efficiency", sc.detector.pinhole_efficiency);
    report_add(r, "detector.gate_ns", sc.detector.gate_ns);
    report_add(r, "detector.dark_rate_hz", sc.detector.dark_rate_hz);
    report_add(r, "detector.shots", static_cast<double>(sc.detector.shots));
    report_add(r, "detector.rep_rate_khz", sc.detector.rep_rate_khz);
    report_add(r, "detector.bin_ns", sc.detector.bin_ns);
    report_add(r, "run.kk_phase", sc.kk_phase ? "on" : "off");
    report_add(r, "run.decoherence", sc.decoherence ? "on" : "off");
    return r;
}

inline void write_report(const std::filesystem::path& path, const Report& report) {
    std::ofstream f(path);
    if (!f) throw config_error("cannot write " + path.string());
    for (const auto& [k, v] : report) f << k << " = " << v << '\n';
}

// Run directory: exact when pinned, timestamped subdirectory of the scenario out_dir otherwise.
inline std::filesystem::path make_run_dir(const Scenario& sc, const std::string& command,
                                          const std::string& pinned_out) {
    std::filesystem::path dir;
    if (!pinned_out.empty()) {
        dir = pinned_out;
    } else {
        auto now = std::chrono::system_clock::now();
        std::time_t tt = std::chrono::system_clock::to_time_t(now);
        char buf[32];
        std::strftime(buf, sizeof(buf), "%Y%m%d-%H%M%S", std::gmtime(&tt));
        dir = std::filesystem::path(sc.out_dir) / (sc.name + "-" + command + "-" + buf);
    }
    std::filesystem::create_directories(dir);
    std::ofstream mf(dir / "manifest.txt");
    mf << "command = " << command << "\nscenario = " << sc.name << "\nseed = " << sc.seed << '\n';
    return dir;
}

struct EfficiencyRun {
    EchoResult echo;
    double eta_numeric = 0.0;
    double eta_analytic = 0.0;
    double finesse_value = 0.0;
    double mean_depth = 0.0;
    double reference_transmission = 0.0;
    std::filesystem::path dir;
};

inline EfficiencyRun run_efficiency(const Scenario& sc, const std::string& out_dir = "") {
    sc.validate();
    EfficiencyRun run;
    SpectralProfile prof = sc.profile();
    TransferFunction tf = make_transfer_function(prof, sc.kk_phase);
    Pulse input = sc.storage_pulse();
    Pulse output = propagate(input, tf);

    SpectralProfile pit = build_pit(sc.material, sc.fgrid, sc.comb.background_alphaL);
    Pulse reference = propagate(input, make_transfer_function(pit, sc.kk_phase));
    run.reference_transmission = reference.energy() / input.energy();

    if (sc.comb_enabled) {
        run.echo = echo_efficiency(input, output, sc.comb.delta_mhz, sc.T2_for_echo());
        run.eta_numeric = run.echo.efficiency;
        run.finesse_value = finesse(sc.comb);
        run.eta_analytic = analytic_efficiency(sc.comb.alphaL, run.finesse_value);
        run.mean_depth = mean_comb_depth(prof);
    } else {
        run.echo.output = output;
        run.eta_numeric = 0.0;
        run.eta_analytic = 0.0;
    }

    run.dir = make_run_dir(sc, "efficiency", out_dir);
    write_profile_csv((run.dir / "profile.csv").string(), prof);
    double t_lo = input.meta.center_ns - 3.0 * sc.storage.fwhm_ns;
    double t_hi = sc.comb_enabled ? 2.5 * sc.echo_time_ns() + 3.0 * sc.storage.fwhm_ns
                                  : input.meta.center_ns + 3.0 * sc.storage.fwhm_ns;
    write_pulse_csv((run.dir / "input_pulse.csv").string(), input, t_lo, t_hi);
    write_pulse_csv((run.dir / "output_pulse.csv").string(), output, t_lo, t_hi);
    write_pulse_csv((run.dir / "reference_pulse.csv").string(), reference, t_lo, t_hi);

    Report rep = scenario_report(sc);
    report_add(rep, "result.eta_numeric", run.eta_numeric);
    report_add(rep, "result.eta_analytic", run.eta_analytic);
    report_add(rep, "result.finesse", run.finesse_value);
    report_add(rep, "result.mean_comb_depth", run.mean_depth);
    report_add(rep, "result.transmitted_fraction", run.echo.transmitted_fraction);
    report_add(rep, "result.echo_time_ns", run.echo.echo_time_ns);
    report_add(rep, "result.echo_peak_time_ns", run.echo.echo_peak_time_ns);
    report_add(rep, "result.reference_transmission", run.reference_transmission);
    write_report(run.dir / "report.txt", rep);
    return run;
}

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

namespace detail {

inline void apply_axis(CombParams& comb, const std::string& param, double value) {
    if (param == "alphaL") {
        comb.alphaL = value;
    } else if (param == "F") {
        comb.gamma_fwhm_mhz = comb.delta_mhz / value;
    } else if (param == "delta") {
        comb.delta_mhz = value;
    } else if (param == "gamma") {
        comb.gamma_fwhm_mhz = value;
    } else {
        throw config_error("sweep axis must be one of alphaL|F|delta|gamma, got '" + param + "'");
    }
}

} // namespace detail

struct SweepResult {
    std::vector<SweepRow> rows;
    std::optional<SweepRow> peak;  // interior maximum of the numeric column
    std::filesystem::path dir;
};

inline SweepResult run_sweep(const Scenario& sc, std::size_t workers = 1,
                             const std::string& out_dir = "") {
    if (!sc.axis1 || sc.axis1->n == 0)
        throw config_error("run_sweep: no sweep axis configured (add a [sweep] section)");
    const SweepAxis& a1 = *sc.axis1;
    std::vector<SweepAxis> axes{a1};
    if (sc.axis2) axes.push_back(*sc.axis2);

    auto axis_value = [](const SweepAxis& ax, std::size_t i) {
        if (ax.n == 1) return ax.lo;
        return ax.lo + (ax.hi - ax.lo) * static_cast<double>(i) / static_cast<double>(ax.n - 1);
    };

    std::size_t total = a1.n * (sc.axis2 ? sc.axis2->n : 1);
    std::vector<SweepRow> rows(total);

    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (;;) {
            std::size_t idx = next.fetch_add(1);
            if (idx >= total) return;
            std::size_t i1 = sc.axis2 ? idx / sc.axis2->n : idx;
            std::size_t i2 = sc.axis2 ? idx % sc.axis2->n : 0;
            Scenario pt = sc;
            detail::apply_axis(pt.comb, a1.param, axis_value(a1, i1));
            if (sc.axis2) detail::apply_axis(pt.comb, sc.axis2->param, axis_value(*sc.axis2, i2));
            SweepRow row;
            row.alphaL = pt.comb.alphaL;
            row.F = pt.comb.delta_mhz / pt.comb.gamma_fwhm_mhz;
            try {
                row.eta_analytic = analytic_efficiency(row.alphaL, row.F);
            } catch (const std::exception&) {
                row.eta_analytic = std::nan("");
            }
            try {
                SpectralProfile prof = pt.profile();
                TransferFunction tf = make_transfer_function(prof, pt.kk_phase);
                Pulse input = pt.storage_pulse();
                Pulse output = propagate(input, tf);
                auto echo = echo_efficiency(input, output, pt.comb.delta_mhz, pt.T2_for_echo());
                row.eta_numeric = echo.efficiency;
            } catch (const std::exception& e) {
                row.eta_numeric = std::nan("");
                row.status = std::string("invalid: ") + e.what();
                // keep the row, flagged
            }
            rows[idx] = row;
        }
    };
    std::vector<std::thread> pool;
    std::size_t nw = std::max<std::size_t>(1, workers);
    for (std::size_t w = 0; w + 1 < nw; ++w) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();

    SweepResult res;
    res.rows = std::move(rows);

    // interior maximum of the numeric column (the forward-cap summary row)
    std::size_t best = 0;
    bool any = false;
    for (std::size_t i = 0; i < res.rows.size(); ++i) {
        if (std::isnan(res.rows[i].eta_numeric)) continue;
        if (!any || res.rows[i].eta_numeric > res.rows[best].eta_numeric) {
            best = i;
            any = true;
        }
    }
    if (any && best > 0 && best + 1 < res.rows.size() && !sc.axis2 &&
        !std::isnan(res.rows[best - 1].eta_numeric) && !std::isnan(res.rows[best + 1].eta_numeric)) {
        const auto& r0 = res.rows[best - 1];
        const auto& r1 = res.rows[best];
        const auto& r2 = res.rows[best + 1];
        double x0 = a1.param == "alphaL" ? r0.alphaL : r0.F;
        double x1 = a1.param == "alphaL" ? r1.alphaL : r1.F;
        double x2 = a1.param == "alphaL" ? r2.alphaL : r2.F;
        SweepRow peak = r1;
        double xv = parabolic_vertex(x0, r0.eta_numeric, x1, r1.eta_numeric, x2, r2.eta_numeric);
        if (a1.param == "alphaL")
            peak.alphaL = xv;
        else
            peak.F = xv;
        peak.status = "max";
        res.peak = peak;
    }

    res.dir = make_run_dir(sc, "sweep", out_dir);
    auto rows_out = res.rows;
    if (res.peak) rows_out.push_back(*res.peak);
    write_sweep_csv((res.dir / "sweep.csv").string(), rows_out);
    Report rep = scenario_report(sc);
    report_add(rep, "sweep.axis", a1.param);
    report_add(rep, "sweep.points", static_cast<double>(total));
    if (res.peak) {
        report_add(rep, "result.eta_max", res.peak->eta_numeric);
        report_add(rep, "result.alphaL_at_max", res.peak->alphaL);
        report_add(rep, "result.F_at_max", res.peak->F);
    }
    write_report(res.dir / "report.txt", rep);
    return res;
}

// ---------------------------------------------------------------------------
// Interference
// ---------------------------------------------------------------------------

struct InterferenceRun {
    BeatFit fit_phase0;
    BeatFit fit_phase_pi;
    double phase_difference_rad = 0.0;
    double beat_period_ns = 0.0;
    std::filesystem::path dir;
};

inline InterferenceRun run_interference(const Scenario& sc, const std::string& out_dir = "") {
    InterferenceRun run;
    const double f_beat = sc.interference.synthetic
                              ? sc.interference.beat_freq_mhz
                              : std::abs((sc.probe ? sc.probe->carrier_detuning_mhz : 0.0) -
                                         sc.storage.carrier_detuning_mhz);

    TimeGrid tg = sc.time_grid();
    std::vector<double> trace0, trace_pi;
    double window_lo, window_hi;

    if (sc.interference.synthetic) {
        double period = 1000.0 / f_beat;
        window_lo = 0.0;
        window_hi = 4.0 * period;
        double I1 = 1.0, I2 = sc.interference.amplitude_ratio;
        trace0 = synthetic_beat_trace(tg, I1, I2, f_beat, 0.0);
        trace_pi = synthetic_beat_trace(tg, I1, I2, f_beat, std::numbers::pi);
    } else {
        if (!sc.probe)
            throw config_error("run_interference: scenario has no [probe_pulse] section");
        sc.validate();
        SpectralProfile prof = sc.profile();
        // the probe must ride a transparent window
        double off = sc.material.probe_window_offset_mhz;
        if (off <= 0.0)
            throw constraint_error("run_interference: no probe window reserved "
                                   "(material.probe_window_offset_mhz <= 0)");
        double worst = 0.0;
        for (double f = off - 0.5; f <= off + 0.5; f += prof.grid.resolution_mhz())
            worst = std::max(worst, prof.at(f));
        if (worst > sc.comb.background_alphaL + 0.05 * sc.comb.alphaL + 1e-9)
            throw constraint_error("run_interference: probe window at " + std::to_string(off) +
                                   " MHz is absorbing (alphaL up to " + std::to_string(worst) + ")");

        TransferFunction tf = make_transfer_function(prof, sc.kk_phase);
        Pulse storage = sc.storage_pulse();
        Pulse echo = propagate(storage, tf);

        PulseSpec probe_spec = *sc.probe;
        Pulse probe0 = sc.make_pulse(probe_spec, sc.echo_time_ns());
        probe_spec.phase_rad += std::numbers::pi;
        Pulse probe_pi = sc.make_pulse(probe_spec, sc.echo_time_ns());
        Pulse probe0_out = propagate(probe0, tf);
        Pulse probe_pi_out = propagate(probe_pi, tf);

        trace0 = interference_trace(echo, probe0_out);
        trace_pi = interference_trace(echo, probe_pi_out);
        double t_echo = sc.echo_time_ns();
        double half = 0.75 * t_echo;  // wide enough for at least two interior fringe minima
        window_lo = t_echo - half;
        window_hi = t_echo + half;
    }

    // measured beat period from the pi-flip difference: the envelopes cancel, leaving the pure
    // beat, and demodulation refines the frequency from the carrier-offset starting point
    double f_measured = f_beat;
    {
        std::vector<double> tt, diff;
        for (std::size_t m = 0; m < tg.n_points; ++m) {
            double t = tg.time_ns(m);
            if (t >= window_lo && t < window_hi) {
                tt.push_back(t);
                diff.push_back(trace0[m] - trace_pi[m]);
            }
        }
        f_measured = detail::refine_freq_ac(tt, diff, f_beat);
        run.beat_period_ns = 1000.0 / f_measured;
    }

    run.fit_phase0 = visibility_trace(tg, trace0, window_lo, window_hi, f_measured);
    run.fit_phase_pi = visibility_trace(tg, trace_pi, window_lo, window_hi, f_measured);
    double dph = std::abs(run.fit_phase0.phase_rad - run.fit_phase_pi.phase_rad);
    while (dph > 2.0 * std::numbers::pi) dph -= 2.0 * std::numbers::pi;
    if (dph > std::numbers::pi) dph = 2.0 * std::numbers::pi - dph;
    run.phase_difference_rad = dph;

    run.dir = make_run_dir(sc, "interference", out_dir);
    write_trace_csv((run.dir / "beat_phase0.csv").string(), tg, trace0, window_lo - 200.0,
                    window_hi + 200.0);
    write_trace_csv((run.dir / "beat_phase_pi.csv").string(), tg, trace_pi, window_lo - 200.0,
                    window_hi + 200.0);
    Report rep = scenario_report(sc);
    report_add(rep, "interference.mode", sc.interference.synthetic ? "synthetic" : "propagation");
    report_add(rep, "result.visibility_phase0", run.fit_phase0.visibility);
    report_add(rep, "result.visibility_stderr", run.fit_phase0.std_error);
    report_add(rep, "result.visibility_phase_pi", run.fit_phase_pi.visibility);
    report_add(rep, "result.beat_period_ns", run.beat_period_ns);
    report_add(rep, "result.beat_freq_mhz", run.fit_phase0.freq_mhz);
    report_add(rep, "result.phase_difference_rad", run.phase_difference_rad);
    write_report(run.dir / "report.txt", rep);
    return run;
}

// ---------------------------------------------------------------------------
// Counting pipeline
// ---------------------------------------------------------------------------

struct CountsRun {
    CountHistogram reference;
    CountHistogram echo;
    EfficiencyEstimate eta;
    double expected_lossless_counts = 0.0;
    std::optional<BeatFit> beat;
    std::filesystem::path dir;
};

inline CountsRun run_counts(const Scenario& sc, const std::string& out_dir = "") {
    if (sc.detector.shots == 0) throw analysis_error("run_counts: shots = 0, no data to simulate");
    sc.validate();
    CountsRun run;

    Pulse input = sc.storage_pulse();
    SpectralProfile pit = build_pit(sc.material, sc.fgrid, sc.comb.background_alphaL);
    Pulse reference = propagate(input, make_transfer_function(pit, sc.kk_phase));
    IntensityTrace ref_trace = IntensityTrace::from_pulse(reference);

    // arrival time after the medium transit (the pit is dispersive even where transparent)
    double ref_peak_ns = input.meta.center_ns;
    {
        double best = -1.0;
        for (std::size_t m = 0; m < ref_trace.value.size(); ++m)
            if (ref_trace.value[m] > best) {
                best = ref_trace.value[m];
                ref_peak_ns = ref_trace.grid.time_ns(m);
            }
    }

    const double t_echo = sc.echo_time_ns();
    double injected_delay = t_echo;
    IntensityTrace echo_trace;
    if (sc.inject_eta) {
        // synthetic injection: the echo is a delayed replica with a known area ratio
        echo_trace.grid = ref_trace.grid;
        echo_trace.value.assign(ref_trace.value.size(), 0.0);
        auto shift = static_cast<std::size_t>(std::lround(t_echo / ref_trace.grid.dt_ns));
        injected_delay = static_cast<double>(shift) * ref_trace.grid.dt_ns;
        for (std::size_t m = 0; m + shift < ref_trace.value.size(); ++m)
            echo_trace.value[m + shift] = *sc.inject_eta * ref_trace.value[m];
    } else {
        SpectralProfile prof = sc.profile();
        Pulse output = propagate(input, make_transfer_function(prof, sc.kk_phase));
        echo_trace = IntensityTrace::from_pulse(output);
        // stored-and-re-emitted light decoheres; the transmitted spike at t ~ 0 is untouched
        if (sc.T2_for_echo() > 0.0) {
            for (std::size_t m = 0; m < echo_trace.value.size(); ++m) {
                double t = echo_trace.grid.time_ns(m) - input.meta.center_ns;
                if (t > 0.0)
                    echo_trace.value[m] *= std::exp(-2.0 * t * 1e-3 / sc.T2_for_echo());
            }
        }
    }

    const double fwhm = sc.storage.fwhm_ns;
    const double center = ref_peak_ns;
    double h_lo = center - 3.0 * fwhm;
    double h_hi = center + t_echo + 3.0 * fwhm;
    DetectorParams ref_params = sc.detector;
    ref_params.seed = sc.seed;
    DetectorParams echo_params = sc.detector;
    echo_params.seed = sc.seed ^ 0x9E3779B97F4A7C15ULL;

    run.reference = simulate_counts(ref_trace, ref_params, h_lo, h_hi);
    run.echo = simulate_counts(echo_trace, echo_params, h_lo, h_hi);
    run.expected_lossless_counts = expected_total_counts(input.energy(), sc.detector);

    AreaRatioOptions opts;
    opts.reference_center_ns = center;
    opts.fwhm_ns = fwhm;
    opts.echo_delay_ns = injected_delay;
    run.eta = efficiency_from_histograms(run.reference, run.echo, opts);

    run.dir = make_run_dir(sc, "counts", out_dir);
    write_histogram_csv((run.dir / "reference_hist.csv").string(), run.reference);
    write_histogram_csv((run.dir / "echo_hist.csv").string(), run.echo);
    Report rep = scenario_report(sc);
    if (sc.inject_eta) report_add(rep, "counts.injected_eta", *sc.inject_eta);
    report_add(rep, "result.eta", run.eta.eta);
    report_add(rep, "result.eta_stderr", run.eta.std_error);
    report_add(rep, "result.area_reference_counts", run.eta.area_reference);
    report_add(rep, "result.area_echo_counts", run.eta.area_echo);
    report_add(rep, "result.expected_lossless_counts", run.expected_lossless_counts);
    report_add(rep, "result.reference_total_counts", static_cast<double>(run.reference.total()));
    report_add(rep, "result.echo_total_counts", static_cast<double>(run.echo.total()));

    // counting-level visibility when the scenario carries an interference probe
    if (sc.probe && !sc.inject_eta) {
        SpectralProfile prof = sc.profile();
        TransferFunction tf = make_transfer_function(prof, sc.kk_phase);
        Pulse echo_field = propagate(input, tf);
        Pulse probe_field = propagate(sc.probe_pulse(), tf);
        IntensityTrace beat;
        beat.grid = echo_field.grid;
        beat.value = interference_trace(echo_field, probe_field);
        DetectorParams beat_params = sc.detector;
        beat_params.seed = sc.seed ^ 0xD1B54A32D192ED03ULL;
        double b_lo = ref_peak_ns + 0.25 * t_echo;
        double b_hi = ref_peak_ns + 1.75 * t_echo;
        CountHistogram beat_hist = simulate_counts(beat, beat_params, b_lo, b_hi);
        write_histogram_csv((run.dir / "beat_hist.csv").string(), beat_hist);
        double f_hint = std::abs(sc.probe->carrier_detuning_mhz - sc.storage.carrier_detuning_mhz);
        try {
            run.beat = visibility(beat_hist, b_lo, b_hi, f_hint);
            report_add(rep, "result.visibility", run.beat->visibility);
            report_add(rep, "result.visibility_stderr", run.beat->std_error);
            report_add(rep, "result.beat_period_ns", run.beat->period_ns);
        } catch (const analysis_error& e) {
            // too few counts for a beat fit at this shot budget; keep the counting results
            report_add(rep, "result.visibility_error", std::string(e.what()));
        }
    }
    write_report(run.dir / "report.txt", rep);
    return run;
}

} // namespace afc
