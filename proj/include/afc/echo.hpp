#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "afc/optimize.hpp"
#include "afc/pulses.hpp"
#include "afc/transfer.hpp"

namespace afc {

struct EchoResult {
    Pulse output;
    double echo_time_ns = 0.0;                    // nominal 1/delta
    double echo_peak_time_ns = 0.0;               // measured argmax inside the echo window
    double transmitted_peak_time_ns = 0.0;        // measured argmax inside the transmitted window
    std::pair<double, double> echo_window_ns;
    std::pair<double, double> transmitted_window_ns;
    double efficiency = 0.0;
    double transmitted_fraction = 0.0;

    // Storage time as the experiment reads it: echo arrival relative to the transmitted pulse.
    // Both share the medium transit delay (the pit's causal dispersion), which cancels here.
    double measured_delay_ns() const { return echo_peak_time_ns - transmitted_peak_time_ns; }
};

namespace detail {

inline double window_energy(const Pulse& p, double lo_ns, double hi_ns) {
    double e = 0.0;
    for (std::size_t m = 0; m < p.grid.n_points; ++m) {
        double t = p.grid.time_ns(m);
        if (t >= lo_ns && t < hi_ns) e += std::norm(p.envelope[m]);
    }
    return e * p.grid.dt_ns;
}

} // namespace detail

// Windowed energy accounting of a propagated pulse. The echo window is centered at 1/delta,
// the transmitted window at the input arrival time; both have half-width
// min(1/(2*delta), 3*fwhm). Efficiency is echo energy over total input energy, optionally
// damped by exp(-2*t_echo/T2).
inline EchoResult echo_efficiency(const Pulse& input, const Pulse& output, double delta_mhz,
                                  double T2_us = 0.0) {
    if (!(delta_mhz > 0.0)) throw std::domain_error("echo_efficiency: delta must be positive");
    const double fwhm = input.meta.fwhm_ns > 0.0 ? input.meta.fwhm_ns : measured_intensity_fwhm(input);
    const double t_in = input.meta.center_ns;
    const double t_echo = t_in + 1000.0 / delta_mhz;
    const double half = std::min(500.0 / delta_mhz, 3.0 * fwhm);
    if (half < fwhm)
        throw analysis_error("echo_efficiency: windows unresolvable, pulse FWHM " +
                             std::to_string(fwhm) + " ns exceeds half the echo period " +
                             std::to_string(500.0 / delta_mhz) + " ns");
    if (output.grid.t_start_ns > t_echo - half || output.grid.t_end_ns() < t_echo + half)
        throw analysis_error("echo_efficiency: output grid does not contain the echo window around " +
                             std::to_string(t_echo) + " ns");

    EchoResult r;
    r.output = output;
    r.echo_time_ns = t_echo;
    r.echo_window_ns = {t_echo - half, t_echo + half};
    r.transmitted_window_ns = {t_in - half, t_in + half};

    const double e_in = input.energy();
    if (!(e_in > 0.0)) throw analysis_error("echo_efficiency: input pulse has zero energy");
    double e_echo = detail::window_energy(output, r.echo_window_ns.first, r.echo_window_ns.second);
    double e_trans = detail::window_energy(output, r.transmitted_window_ns.first,
                                           r.transmitted_window_ns.second);
    double damp = T2_us > 0.0 ? std::exp(-2.0 * (t_echo - t_in) * 1e-3 / T2_us) : 1.0;
    r.efficiency = damp * e_echo / e_in;
    r.transmitted_fraction = e_trans / e_in;

    auto window_argmax = [&output](double lo, double hi, double fallback) {
        double peak = -1.0, peak_t = fallback;
        for (std::size_t m = 0; m < output.grid.n_points; ++m) {
            double t = output.grid.time_ns(m);
            if (t < lo || t >= hi) continue;
            double v = std::norm(output.envelope[m]);
            if (v > peak) {
                peak = v;
                peak_t = t;
            }
        }
        return peak_t;
    };
    r.echo_peak_time_ns = window_argmax(r.echo_window_ns.first, r.echo_window_ns.second, t_echo);
    r.transmitted_peak_time_ns =
        window_argmax(r.transmitted_window_ns.first, r.transmitted_window_ns.second, t_in);
    return r;
}

// Eq.-of-record storage-and-retrieval efficiency model: (1 - exp(-alphaL/F))^2 * exp(-7/F^2).
inline double analytic_efficiency(double alphaL, double F) {
    if (alphaL < 0.0) throw std::domain_error("analytic_efficiency: alphaL must be >= 0");
    if (F < 1.0) throw std::domain_error("analytic_efficiency: finesse must be >= 1");
    double a = 1.0 - std::exp(-alphaL / F);
    return a * a * std::exp(-7.0 / (F * F));
}

struct FinesseOptimum {
    double F_opt = 0.0;
    double eta_opt = 0.0;
};

// Maximize the analytic model over F in [1, 100].
inline FinesseOptimum optimal_finesse(double alphaL) {
    if (!(alphaL > 0.0)) throw std::domain_error("optimal_finesse: alphaL must be positive");
    auto [f, eta] = golden_section_maximize(
        [alphaL](double F) { return analytic_efficiency(alphaL, F); }, 1.0, 100.0, 1e-5);
    return {f, eta};
}

// Same search against a caller-supplied numeric efficiency (e.g. full propagation).
inline FinesseOptimum optimal_finesse(const std::function<double(double)>& eta_of_F,
                                      double F_lo = 1.0, double F_hi = 100.0, double xtol = 1e-3) {
    auto [f, eta] = golden_section_maximize(eta_of_F, F_lo, F_hi, xtol);
    return {f, eta};
}

struct ForwardCap {
    double eta_max = 0.0;
    double alphaL_at_max = 0.0;
    std::vector<std::pair<double, double>> samples;  // (alphaL, eta)
};

// Sweep alphaL over [lo, hi] and locate the peak forward efficiency. The sweep must bracket
// the maximum; an argmax on the boundary is an analysis error.
inline ForwardCap max_forward_efficiency(const std::function<double(double)>& eta_of_alphaL,
                                         double alphaL_lo, double alphaL_hi, std::size_t n_samples) {
    if (n_samples < 5) throw std::domain_error("max_forward_efficiency: need >= 5 samples");
    ForwardCap cap;
    cap.samples.reserve(n_samples);
    std::size_t best = 0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        double a = alphaL_lo + (alphaL_hi - alphaL_lo) * static_cast<double>(i) /
                                   static_cast<double>(n_samples - 1);
        double eta = eta_of_alphaL(a);
        cap.samples.emplace_back(a, eta);
        if (eta > cap.samples[best].second) best = i;
    }
    if (best == 0 || best == n_samples - 1)
        throw analysis_error("max_forward_efficiency: sweep range [" + std::to_string(alphaL_lo) +
                             ", " + std::to_string(alphaL_hi) + "] does not bracket the maximum");
    auto [x0, y0] = cap.samples[best - 1];
    auto [x1, y1] = cap.samples[best];
    auto [x2, y2] = cap.samples[best + 1];
    cap.alphaL_at_max = parabolic_vertex(x0, y0, x1, y1, x2, y2);
    cap.eta_max = std::max({y0, y1, y2});
    return cap;
}

} // namespace afc
