#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "afc/errors.hpp"
#include "afc/grid.hpp"
#include "afc/transforms.hpp"

namespace afc {

enum class PulseShape { gaussian, supergaussian, sechyp };

inline PulseShape pulse_shape_from_string(const std::string& s) {
    if (s == "gaussian") return PulseShape::gaussian;
    if (s == "supergaussian") return PulseShape::supergaussian;
    if (s == "sechyp") return PulseShape::sechyp;
    throw config_error("unknown pulse shape '" + s + "' (expected gaussian|supergaussian|sechyp)");
}

struct ShapeMeta {
    PulseShape shape = PulseShape::gaussian;
    double fwhm_ns = 0.0;      // intensity FWHM
    int supergauss_n = 1;
    double phase_rad = 0.0;
    double center_ns = 0.0;
    double sech_beta_per_ns = 0.0;
    double sech_mu = 0.0;
};

// Complex envelope relative to the comb center; carrier detuning is the ramp
// exp(-2*pi*i*fc*t) folded into the envelope. Normalized so sum |E|^2 dt = mean photon number.
struct Pulse {
    TimeGrid grid;
    std::vector<cplx> envelope;
    double carrier_detuning_mhz = 0.0;
    double mean_photons = 0.0;
    ShapeMeta meta;

    double energy() const {
        double e = 0.0;
        for (const auto& v : envelope) e += std::norm(v);
        return e * grid.dt_ns;
    }
};

namespace detail {

// Carrier ramp + normalization to nbar, then the global phase last so that
// pulse(phase) == pulse(0) * exp(i*phase) holds exactly.
inline Pulse finish_pulse(TimeGrid grid, std::vector<double> base, double nbar,
                          double carrier_mhz, ShapeMeta meta) {
    Pulse p;
    p.grid = grid;
    p.carrier_detuning_mhz = carrier_mhz;
    p.mean_photons = nbar;
    p.meta = meta;
    p.envelope.resize(grid.n_points);

    double raw = 0.0;
    for (double v : base) raw += v * v;
    raw *= grid.dt_ns;
    double scale = (nbar > 0.0 && raw > 0.0) ? std::sqrt(nbar / raw) : 0.0;

    const cplx phase = std::polar(1.0, meta.phase_rad);
    for (std::size_t m = 0; m < grid.n_points; ++m) {
        double t = grid.time_ns(m) - meta.center_ns;
        double a = -2.0 * std::numbers::pi * carrier_mhz * t * kMHzNs;
        p.envelope[m] = base[m] * scale * cplx{std::cos(a), std::sin(a)} * phase;
    }
    return p;
}

inline void check_fit(const TimeGrid& grid, double center_ns, double margin_ns) {
    if (center_ns - margin_ns < grid.t_start_ns || center_ns + margin_ns > grid.t_end_ns())
        throw config_error("pulse truncated by the time grid: needs [" +
                           std::to_string(center_ns - margin_ns) + ", " +
                           std::to_string(center_ns + margin_ns) + "] ns inside [" +
                           std::to_string(grid.t_start_ns) + ", " +
                           std::to_string(grid.t_end_ns()) + "] ns");
}

} // namespace detail

// Gaussian with the given intensity FWHM: |E(t)|^2 = exp(-ln2 * (2(t-t0)/fwhm)^2).
inline Pulse gaussian_pulse(const TimeGrid& grid, double fwhm_ns, double nbar,
                            double carrier_mhz = 0.0, double phase_rad = 0.0,
                            double center_ns = 0.0) {
    if (!(fwhm_ns > 0.0)) throw std::domain_error("gaussian_pulse: fwhm must be positive");
    detail::check_fit(grid, center_ns, 1.2741 * fwhm_ns);  // 3 sigma
    std::vector<double> base(grid.n_points);
    for (std::size_t m = 0; m < grid.n_points; ++m) {
        double u = 2.0 * (grid.time_ns(m) - center_ns) / fwhm_ns;
        base[m] = std::exp(-0.5 * kLn2 * u * u);
    }
    ShapeMeta meta{PulseShape::gaussian, fwhm_ns, 1, phase_rad, center_ns, 0.0, 0.0};
    return detail::finish_pulse(grid, std::move(base), nbar, carrier_mhz, meta);
}

// Super-Gaussian of order n: |E(t)|^2 = exp(-ln2 * (2(t-t0)/fwhm)^(2n)); n = 1 is the Gaussian.
inline Pulse supergaussian_pulse(const TimeGrid& grid, double fwhm_ns, int n, double nbar,
                                 double carrier_mhz = 0.0, double phase_rad = 0.0,
                                 double center_ns = 0.0) {
    if (!(fwhm_ns > 0.0)) throw std::domain_error("supergaussian_pulse: fwhm must be positive");
    if (n < 1) throw std::domain_error("supergaussian_pulse: order n must be >= 1");
    detail::check_fit(grid, center_ns, 1.2741 * fwhm_ns);
    std::vector<double> base(grid.n_points);
    for (std::size_t m = 0; m < grid.n_points; ++m) {
        double u = 2.0 * (grid.time_ns(m) - center_ns) / fwhm_ns;
        base[m] = std::exp(-0.5 * kLn2 * std::pow(u * u, n));
    }
    ShapeMeta meta{PulseShape::supergaussian, fwhm_ns, n, phase_rad, center_ns, 0.0, 0.0};
    return detail::finish_pulse(grid, std::move(base), nbar, carrier_mhz, meta);
}

// Complex hyperbolic secant sech(beta*t)^(1+i*mu): amplitude sech(beta*t), instantaneous
// frequency sweep -mu*beta*tanh(beta*t)/(2*pi). Preparation-schedule export only.
inline Pulse sechyp_pulse(const TimeGrid& grid, double center_freq_mhz, double beta_per_ns,
                          double mu, double nbar, double center_ns = 0.0) {
    if (!(beta_per_ns > 0.0)) throw std::domain_error("sechyp_pulse: beta must be positive");
    detail::check_fit(grid, center_ns, 5.0 / beta_per_ns);
    // intensity FWHM of sech^2 is 2*acosh(sqrt(2))/beta
    double fwhm = 2.0 * std::acosh(std::sqrt(2.0)) / beta_per_ns;

    Pulse p;
    p.grid = grid;
    p.carrier_detuning_mhz = center_freq_mhz;
    p.mean_photons = nbar;
    p.meta = ShapeMeta{PulseShape::sechyp, fwhm, 1, 0.0, center_ns, beta_per_ns, mu};
    p.envelope.resize(grid.n_points);
    double raw = 0.0;
    for (std::size_t m = 0; m < grid.n_points; ++m) {
        double t = grid.time_ns(m) - center_ns;
        double x = beta_per_ns * t;
        if (std::abs(x) > 700.0) {  // cosh overflow; the envelope is zero there anyway
            p.envelope[m] = {0.0, 0.0};
            continue;
        }
        double s = 1.0 / std::cosh(x);
        // sech^(1+i*mu) = sech * exp(i*mu*ln(sech))
        double ph = mu * std::log(s) - 2.0 * std::numbers::pi * center_freq_mhz * t * kMHzNs;
        p.envelope[m] = std::polar(s, ph);
        raw += s * s;
    }
    raw *= grid.dt_ns;
    double scale = (nbar > 0.0 && raw > 0.0) ? std::sqrt(nbar / raw) : 0.0;
    for (auto& v : p.envelope) v *= scale;
    return p;
}

// Intensity FWHM measured from |E|^2 with linear interpolation at the half maximum.
inline double measured_intensity_fwhm(const Pulse& p) {
    std::vector<double> inten(p.grid.n_points);
    double peak = 0.0;
    std::size_t ipk = 0;
    for (std::size_t m = 0; m < p.grid.n_points; ++m) {
        inten[m] = std::norm(p.envelope[m]);
        if (inten[m] > peak) {
            peak = inten[m];
            ipk = m;
        }
    }
    if (peak <= 0.0) return 0.0;
    double half = 0.5 * peak;
    double t_lo = p.grid.t_start_ns, t_hi = p.grid.t_end_ns();
    for (std::size_t m = ipk; m-- > 0;) {
        if (inten[m] < half) {
            double frac = (half - inten[m]) / (inten[m + 1] - inten[m]);
            t_lo = p.grid.time_ns(m) + frac * p.grid.dt_ns;
            break;
        }
    }
    for (std::size_t m = ipk + 1; m < p.grid.n_points; ++m) {
        if (inten[m] < half) {
            double frac = (inten[m - 1] - half) / (inten[m - 1] - inten[m]);
            t_hi = p.grid.time_ns(m - 1) + frac * p.grid.dt_ns;
            break;
        }
    }
    return t_hi - t_lo;
}

inline std::vector<cplx> spectrum(const Pulse& p, const FrequencyGrid& fg) {
    return time_to_freq(p.envelope, p.grid, fg);
}

// First moment of |S(f)|^2 over the grid.
inline double spectral_centroid_mhz(const Pulse& p, const FrequencyGrid& fg) {
    auto s = spectrum(p, fg);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < fg.n_points; ++k) {
        double w = std::norm(s[k]);
        num += w * fg.freq_mhz(k);
        den += w;
    }
    if (den <= 0.0) throw analysis_error("spectral_centroid: empty spectrum");
    return num / den;
}

} // namespace afc
