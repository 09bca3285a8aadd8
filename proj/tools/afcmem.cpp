// afcmem: scenario-driven front end for the AFC optical-memory simulator.
// Exit codes: 0 success, 1 configuration error, 2 analysis error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "afc/csv.hpp"
#include "afc/fitting.hpp"
#include "afc/interference.hpp"
#include "afc/runners.hpp"
#include "afc/scenario.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string preset;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::size_t workers = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "scenario config file (key = value sections)");
    cmd->add_option("--preset", o.preset, "built-in scenario preset");
    cmd->add_option("--seed", o.seed, "override the scenario seed");
    cmd->add_option("--out", o.out, "output directory (exact; default: timestamped under runs/)");
    cmd->add_option("--workers", o.workers, "worker threads for sweeps")->default_val(1);
}

afc::Scenario make_scenario(const CommonOpts& o) {
    afc::Scenario sc;
    if (!o.preset.empty() && !o.config_path.empty())
        throw afc::config_error("give either --preset or --config, not both");
    if (!o.preset.empty()) {
        sc = afc::load_preset(o.preset);
    } else if (!o.config_path.empty()) {
        sc = afc::scenario_from_config(afc::load_config_file(o.config_path), o.config_path);
    } else {
        throw afc::config_error("need --preset or --config");
    }
    if (o.seed) {
        sc.seed = *o.seed;
        sc.detector.seed = *o.seed;
    }
    return sc;
}

struct FitOpts {
    std::string op = "gaussian";
    std::string hist_path;
    std::string ref_path;
    std::string window;
    double beat_freq = 0.0;
    double delay_hint = 0.0;
};

std::pair<double, double> parse_window(const std::string& w) {
    auto colon = w.find(':');
    if (colon == std::string::npos)
        throw afc::config_error("--window expects lo:hi in ns, got '" + w + "'");
    return {std::stod(w.substr(0, colon)), std::stod(w.substr(colon + 1))};
}

int run_fit(const FitOpts& o) {
    if (o.hist_path.empty()) throw afc::config_error("fit: --hist is required");
    afc::CountHistogram hist = afc::read_histogram_csv(o.hist_path);
    if (o.op == "gaussian") {
        double lo = hist.bin_edges_ns.front(), hi = hist.bin_edges_ns.back();
        if (!o.window.empty()) std::tie(lo, hi) = parse_window(o.window);
        afc::FitResult fr = afc::fit_gaussian(hist, lo, hi);
        std::printf("amplitude = %s\n", afc::fmt_num(fr.amplitude).c_str());
        std::printf("center_ns = %s\n", afc::fmt_num(fr.center_ns).c_str());
        std::printf("fwhm_ns = %s\n", afc::fmt_num(fr.fwhm_ns).c_str());
        std::printf("offset = %s\n", afc::fmt_num(fr.offset).c_str());
        std::printf("area_counts = %s\n", afc::fmt_num(fr.area() / hist.bin_width_ns()).c_str());
        std::printf("residual_norm = %s\n", afc::fmt_num(fr.residual_norm).c_str());
        std::printf("center_stderr_ns = %s\n", afc::fmt_num(fr.center_stderr()).c_str());
        return 0;
    }
    if (o.op == "efficiency") {
        if (o.ref_path.empty()) throw afc::config_error("fit --op efficiency: --ref is required");
        afc::CountHistogram ref = afc::read_histogram_csv(o.ref_path);
        afc::AreaRatioOptions opts;
        if (o.delay_hint > 0.0) {
            // timing prior from the reference fit plus the supplied storage delay
            opts.echo_delay_ns = o.delay_hint;
        }
        afc::EfficiencyEstimate est = afc::efficiency_from_histograms(ref, hist, opts);
        std::printf("eta = %s\n", afc::fmt_num(est.eta).c_str());
        std::printf("eta_stderr = %s\n", afc::fmt_num(est.std_error).c_str());
        std::printf("area_reference_counts = %s\n", afc::fmt_num(est.area_reference).c_str());
        std::printf("area_echo_counts = %s\n", afc::fmt_num(est.area_echo).c_str());
        return 0;
    }
    if (o.op == "visibility") {
        if (o.window.empty()) throw afc::config_error("fit --op visibility: --window is required");
        auto [lo, hi] = parse_window(o.window);
        afc::BeatFit bf = afc::visibility(hist, lo, hi, o.beat_freq);
        std::printf("visibility = %s\n", afc::fmt_num(bf.visibility).c_str());
        std::printf("visibility_stderr = %s\n", afc::fmt_num(bf.std_error).c_str());
        std::printf("beat_freq_mhz = %s\n", afc::fmt_num(bf.freq_mhz).c_str());
        std::printf("beat_period_ns = %s\n", afc::fmt_num(bf.period_ns).c_str());
        std::printf("phase_rad = %s\n", afc::fmt_num(bf.phase_rad).c_str());
        return 0;
    }
    throw afc::config_error("fit: unknown --op '" + o.op + "' (gaussian|efficiency|visibility)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"afcmem: atomic-frequency-comb optical memory simulator"};
    app.require_subcommand(1);

    CommonOpts eff_o, sweep_o, itf_o, counts_o;
    auto* eff = app.add_subcommand("efficiency", "storage/retrieval efficiency of one scenario");
    add_common(eff, eff_o);
    auto* sweep = app.add_subcommand("sweep", "numeric + analytic efficiency over a parameter axis");
    add_common(sweep, sweep_o);
    auto* itf = app.add_subcommand("interference", "echo/probe beat, visibility and pi-flip");
    add_common(itf, itf_o);
    auto* counts = app.add_subcommand("counts", "photon-counting pipeline with fitted efficiency");
    add_common(counts, counts_o);
    std::optional<double> inject_eta;
    counts->add_option("--inject-eta", inject_eta, "replace the echo by a delayed replica with "
                                                   "this known area ratio");

    FitOpts fit_o;
    auto* fit = app.add_subcommand("fit", "analysis of external histogram CSVs");
    fit->add_option("--op", fit_o.op, "gaussian|efficiency|visibility")->default_val("gaussian");
    fit->add_option("--hist", fit_o.hist_path, "histogram CSV (bin_start_ns,count)");
    fit->add_option("--ref", fit_o.ref_path, "reference histogram CSV for --op efficiency");
    fit->add_option("--window", fit_o.window, "analysis window lo:hi in ns");
    fit->add_option("--beat-freq", fit_o.beat_freq, "beat frequency hint in MHz");
    fit->add_option("--delay", fit_o.delay_hint, "storage delay hint in ns for --op efficiency");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 1 : 0;
    }

    try {
        if (eff->parsed()) {
            auto run = run_efficiency(make_scenario(eff_o), eff_o.out);
            std::printf("eta_numeric = %s\n", afc::fmt_num(run.eta_numeric).c_str());
            std::printf("eta_analytic = %s\n", afc::fmt_num(run.eta_analytic).c_str());
            std::printf("report: %s\n", (run.dir / "report.txt").string().c_str());
        } else if (sweep->parsed()) {
            auto run = afc::run_sweep(make_scenario(sweep_o), sweep_o.workers, sweep_o.out);
            if (run.peak) {
                std::printf("eta_max = %s at alphaL = %s (F = %s)\n",
                            afc::fmt_num(run.peak->eta_numeric).c_str(),
                            afc::fmt_num(run.peak->alphaL).c_str(),
                            afc::fmt_num(run.peak->F).c_str());
            }
            std::printf("rows = %zu\n", run.rows.size());
            std::printf("report: %s\n", (run.dir / "report.txt").string().c_str());
        } else if (itf->parsed()) {
            auto run = afc::run_interference(make_scenario(itf_o), itf_o.out);
            std::printf("visibility = %s\n", afc::fmt_num(run.fit_phase0.visibility).c_str());
            std::printf("beat_period_ns = %s\n", afc::fmt_num(run.beat_period_ns).c_str());
            std::printf("phase_difference_rad = %s\n",
                        afc::fmt_num(run.phase_difference_rad).c_str());
            std::printf("report: %s\n", (run.dir / "report.txt").string().c_str());
        } else if (counts->parsed()) {
            afc::Scenario sc = make_scenario(counts_o);
            if (inject_eta) sc.inject_eta = inject_eta;
            auto run = afc::run_counts(sc, counts_o.out);
            std::printf("eta = %s +- %s\n", afc::fmt_num(run.eta.eta).c_str(),
                        afc::fmt_num(run.eta.std_error).c_str());
            std::printf("expected_lossless_counts = %s\n",
                        afc::fmt_num(run.expected_lossless_counts).c_str());
            std::printf("report: %s\n", (run.dir / "report.txt").string().c_str());
        } else if (fit->parsed()) {
            return run_fit(fit_o);
        }
    } catch (const afc::config_error& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 1;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 1;
    } catch (const afc::analysis_error& e) {
        std::fprintf(stderr, "analysis error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
