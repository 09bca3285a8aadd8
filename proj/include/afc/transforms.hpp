#pragma once

#include <complex>
#include <numbers>
#include <vector>

#include "afc/fft.hpp"
#include "afc/grid.hpp"

namespace afc {

// Conventions: E(t) = integral S(f) exp(-2*pi*i*f*t) df, S(f) = integral E(t) exp(+2*pi*i*f*t) dt,
// with f in MHz and t in ns (phases carry kMHzNs). A positive delay tau multiplies the
// spectrum by exp(+2*pi*i*f*tau); a carrier at detuning fc is the envelope ramp
// exp(-2*pi*i*fc*t). Grids must satisfy df * dt * n = 1000 (see paired_time_grid).

namespace detail {

inline void check_pairing(const TimeGrid& tg, const FrequencyGrid& fg) {
    if (!fft_compatible(tg, fg))
        throw config_error("transform: time and frequency grids are not FFT-compatible "
                           "(need equal sizes and df*dt*n = 1000 MHz*ns)");
}

inline std::vector<cplx> phase_ramp(std::size_t n, double cycles_per_step, double sign) {
    std::vector<cplx> r(n);
    for (std::size_t m = 0; m < n; ++m) {
        double a = sign * 2.0 * std::numbers::pi * cycles_per_step * static_cast<double>(m);
        r[m] = {std::cos(a), std::sin(a)};
    }
    return r;
}

} // namespace detail

inline std::vector<cplx> time_to_freq(const std::vector<cplx>& env, const TimeGrid& tg,
                                      const FrequencyGrid& fg) {
    detail::check_pairing(tg, fg);
    const std::size_t n = tg.n_points;
    const double f0 = fg.freq_mhz(0);
    std::vector<cplx> x(n);
    auto pre = detail::phase_ramp(n, f0 * tg.dt_ns * kMHzNs, +1.0);
    for (std::size_t m = 0; m < n; ++m) x[m] = env[m] * pre[m];
    fft_core(x, +1);
    for (std::size_t k = 0; k < n; ++k) {
        double a = 2.0 * std::numbers::pi * fg.freq_mhz(k) * tg.t_start_ns * kMHzNs;
        x[k] *= cplx{std::cos(a), std::sin(a)} * tg.dt_ns;
    }
    return x;
}

inline std::vector<cplx> freq_to_time(const std::vector<cplx>& spec, const FrequencyGrid& fg,
                                      const TimeGrid& tg) {
    detail::check_pairing(tg, fg);
    const std::size_t n = fg.n_points;
    std::vector<cplx> x(n);
    for (std::size_t k = 0; k < n; ++k) {
        double a = -2.0 * std::numbers::pi * fg.freq_mhz(k) * tg.t_start_ns * kMHzNs;
        x[k] = spec[k] * cplx{std::cos(a), std::sin(a)};
    }
    fft_core(x, -1);
    const double f0 = fg.freq_mhz(0);
    auto post = detail::phase_ramp(n, f0 * tg.dt_ns * kMHzNs, -1.0);
    const double scale = fg.resolution_mhz() * kMHzNs;
    for (std::size_t m = 0; m < n; ++m) x[m] *= post[m] * scale;
    return x;
}

// Minimum-phase completion: given half the log-magnitude L(f) = -alphaL(f)/2 sampled on a
// uniform grid, returns D(f) = L(f) + i*H[L](f) via cepstral folding, such that exp(D) has a
// causal impulse response (up to discretization of smooth profiles).
inline std::vector<cplx> minimum_phase_log_response(const std::vector<double>& log_mag) {
    const std::size_t n = log_mag.size();
    std::vector<cplx> c(n);
    for (std::size_t k = 0; k < n; ++k) c[k] = log_mag[k];
    fft_core(c, -1);
    for (auto& v : c) v /= static_cast<double>(n);
    for (std::size_t m = 1; m < n / 2; ++m) c[m] *= 2.0;
    for (std::size_t m = n / 2 + 1; m < n; ++m) c[m] = 0.0;
    fft_core(c, +1);
    return c;
}

// Energy of an index-space impulse response h = IFFT(response) in the anticausal half
// (bins n/2..n-1 read as negative times), as a fraction of total energy.
inline double anticausal_energy_fraction(const std::vector<cplx>& response) {
    std::vector<cplx> h(response);
    fft_core(h, -1);
    double total = 0.0, pre = 0.0;
    const std::size_t n = h.size();
    for (std::size_t m = 0; m < n; ++m) {
        double e = std::norm(h[m]);
        total += e;
        if (m >= n / 2) pre += e;
    }
    return total > 0.0 ? pre / total : 0.0;
}

} // namespace afc
