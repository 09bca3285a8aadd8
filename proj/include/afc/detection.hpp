#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "afc/errors.hpp"
#include "afc/grid.hpp"
#include "afc/pulses.hpp"

namespace afc {

struct DetectorParams {
    double quantum_efficiency = 0.075;
    double pinhole_efficiency = 0.35;
    double gate_ns = 102.4;       // minimum detector gate
    double dark_rate_hz = 150.0;  // uniform dark/noise floor
    std::uint64_t shots = 2000;
    double rep_rate_khz = 3.0;
    double bin_ns = 25.6;         // histogram bin width (gate/4)
    std::uint64_t seed = 1;

    void validate() const {
        if (quantum_efficiency < 0.0 || quantum_efficiency > 1.0)
            throw config_error("detector.quantum_efficiency must be in [0, 1]");
        if (pinhole_efficiency < 0.0 || pinhole_efficiency > 1.0)
            throw config_error("detector.pinhole_efficiency must be in [0, 1]");
        if (gate_ns < 100.0) throw config_error("detector.gate_ns must be >= 100 ns");
        if (!(bin_ns > 0.0)) throw config_error("detector.bin_ns must be positive");
        if (dark_rate_hz < 0.0) throw config_error("detector.dark_rate_hz must be non-negative");
    }
};

struct CountHistogram {
    std::vector<double> bin_edges_ns;  // n_bins + 1, uniform
    std::vector<double> counts;        // integers for raw data; averaged data may be fractional
    std::uint64_t shots = 0;
    DetectorParams params;

    std::size_t n_bins() const { return counts.size(); }
    double bin_width_ns() const { return bin_edges_ns[1] - bin_edges_ns[0]; }
    double bin_center_ns(std::size_t i) const { return 0.5 * (bin_edges_ns[i] + bin_edges_ns[i + 1]); }
    double total() const {
        double s = 0.0;
        for (auto c : counts) s += c;
        return s;
    }
};

// Time-resolved intensity in photons per shot: value[m] integrates to the photon number.
struct IntensityTrace {
    TimeGrid grid;
    std::vector<double> value;

    static IntensityTrace from_pulse(const Pulse& p) {
        IntensityTrace tr;
        tr.grid = p.grid;
        tr.value.resize(p.grid.n_points);
        for (std::size_t m = 0; m < p.grid.n_points; ++m) tr.value[m] = std::norm(p.envelope[m]);
        return tr;
    }

    double integral() const {
        double s = 0.0;
        for (double v : value) s += v;
        return s * grid.dt_ns;
    }
};

// Expected detected counts for a lossless run: shots * nbar * pinhole * QE.
inline double expected_total_counts(double nbar, const DetectorParams& d) {
    return static_cast<double>(d.shots) * nbar * d.pinhole_efficiency * d.quantum_efficiency;
}

// Per-bin expected counts over [t0, t1): lambda_i = shots * (trace integral over bin) *
// pinhole * QE + shots * dark_rate * bin. Counts are Poisson draws from the given seed.
inline CountHistogram simulate_counts(const IntensityTrace& trace, const DetectorParams& params,
                                      double t0_ns, double t1_ns) {
    params.validate();
    if (!(t1_ns > t0_ns)) throw config_error("simulate_counts: empty histogram span");
    if (t1_ns - t0_ns < params.gate_ns)
        throw config_error("simulate_counts: histogram span shorter than the detector gate");
    for (double v : trace.value)
        if (v < 0.0) throw std::domain_error("simulate_counts: negative trace value");

    auto nb = static_cast<std::size_t>(std::ceil((t1_ns - t0_ns) / params.bin_ns));
    CountHistogram h;
    h.params = params;
    h.shots = params.shots;
    h.bin_edges_ns.resize(nb + 1);
    for (std::size_t i = 0; i <= nb; ++i)
        h.bin_edges_ns[i] = t0_ns + params.bin_ns * static_cast<double>(i);
    h.counts.assign(nb, 0);

    // photon flux into bins, rectangle rule per trace sample
    std::vector<double> lam(nb, 0.0);
    const double chain = static_cast<double>(params.shots) * params.pinhole_efficiency *
                         params.quantum_efficiency;
    for (std::size_t m = 0; m < trace.grid.n_points; ++m) {
        double t = trace.grid.time_ns(m);
        if (t < t0_ns || t >= h.bin_edges_ns[nb]) continue;
        auto i = static_cast<std::size_t>((t - t0_ns) / params.bin_ns);
        if (i < nb) lam[i] += trace.value[m] * trace.grid.dt_ns * chain;
    }
    const double dark = static_cast<double>(params.shots) * params.dark_rate_hz * params.bin_ns * 1e-9;
    std::mt19937_64 rng(params.seed);
    for (std::size_t i = 0; i < nb; ++i) {
        double l = lam[i] + dark;
        if (l > 0.0) {
            std::poisson_distribution<std::uint64_t> pd(l);
            h.counts[i] = static_cast<double>(pd(rng));
        }
    }
    return h;
}

// Expected dark counts per bin (the noise floor the analysis subtracts).
inline double dark_counts_per_bin(const DetectorParams& d) {
    return static_cast<double>(d.shots) * d.dark_rate_hz * d.bin_ns * 1e-9;
}

} // namespace afc
