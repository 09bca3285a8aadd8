#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "afc/grid.hpp"
#include "afc/spectral.hpp"

namespace afc {

// Discrete realization of the stored collective state: excitation amplitude c_j on an ion at
// detuning delta_j and depth z_j. The z_j phases cancel for forward re-emission and are kept
// for fidelity and future backward-mode work.
struct Ion {
    double detuning_mhz = 0.0;
    double z_frac = 0.0;  // position along the medium, fraction of L
    cplx amplitude{0.0, 0.0};
};

struct IonEnsemble {
    std::vector<Ion> ions;
    std::uint64_t seed = 0;
};

// Rejection-sample ion detunings proportional to the absorption density over the comb support.
inline IonEnsemble sample_ensemble(const SpectralProfile& prof, std::size_t n_ions,
                                   std::uint64_t seed) {
    if (!prof.comb) throw config_error("sample_ensemble: profile has no comb to sample");
    if (n_ions == 0) throw std::domain_error("sample_ensemble: need at least one ion");
    const double lo = prof.comb->support_lo_mhz;
    const double hi = prof.comb->support_hi_mhz;
    double amax = 0.0;
    for (std::size_t i = prof.grid.index_of(lo); i <= prof.grid.index_of(hi); ++i)
        amax = std::max(amax, prof.alpha_L[i]);
    if (!(amax > 0.0)) throw config_error("sample_ensemble: comb support has zero absorption");

    IonEnsemble ens;
    ens.seed = seed;
    ens.ions.reserve(n_ions);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uf(lo, hi), uu(0.0, 1.0);
    const double amp = 1.0 / std::sqrt(static_cast<double>(n_ions));
    while (ens.ions.size() < n_ions) {
        double f = uf(rng);
        if (uu(rng) * amax <= prof.at(f)) ens.ions.push_back({f, uu(rng), {amp, 0.0}});
    }
    return ens;
}

// Idealized Dirac comb: every ion exactly on a tooth, delta_j = m_j * delta.
inline IonEnsemble make_ideal_comb_ensemble(std::size_t n_teeth, double delta_mhz,
                                            std::size_t n_ions, std::uint64_t seed) {
    if (n_teeth == 0 || n_ions == 0)
        throw std::domain_error("make_ideal_comb_ensemble: empty comb or ensemble");
    IonEnsemble ens;
    ens.seed = seed;
    ens.ions.reserve(n_ions);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> tooth(0, static_cast<long>(n_teeth) - 1);
    std::uniform_real_distribution<double> uu(0.0, 1.0);
    const double amp = 1.0 / std::sqrt(static_cast<double>(n_ions));
    for (std::size_t j = 0; j < n_ions; ++j) {
        long m = tooth(rng) - static_cast<long>(n_teeth - 1) / 2;
        ens.ions.push_back({static_cast<double>(m) * delta_mhz, uu(rng), {amp, 0.0}});
    }
    return ens;
}

// Collective emission intensity |sum_j c_j exp(i*2*pi*delta_j*t)|^2, normalized so that a
// perfectly rephased ensemble reads 1. Optional exp(-2t/T2) decoherence damping.
inline std::vector<double> ensemble_echo(const IonEnsemble& ens, const TimeGrid& times,
                                         double T2_us = 0.0) {
    if (ens.ions.empty()) throw std::domain_error("ensemble_echo: empty ensemble");
    const std::size_t nj = ens.ions.size();
    std::vector<cplx> phasor(nj), step(nj);
    double norm = 0.0;
    for (std::size_t j = 0; j < nj; ++j) {
        const auto& ion = ens.ions[j];
        double w0 = 2.0 * std::numbers::pi * ion.detuning_mhz * kMHzNs;
        phasor[j] = ion.amplitude * std::polar(1.0, w0 * times.t_start_ns);
        step[j] = std::polar(1.0, w0 * times.dt_ns);
        norm += std::abs(ion.amplitude);
    }
    norm *= norm;
    std::vector<double> trace(times.n_points);
    for (std::size_t m = 0; m < times.n_points; ++m) {
        cplx s{0.0, 0.0};
        for (std::size_t j = 0; j < nj; ++j) {
            s += phasor[j];
            phasor[j] *= step[j];
        }
        double damp = T2_us > 0.0 ? std::exp(-2.0 * times.time_ns(m) * 1e-3 / T2_us) : 1.0;
        trace[m] = damp * std::norm(s) / norm;
    }
    return trace;
}

struct EnsembleEcho {
    double peak_relative_intensity = 0.0;  // relative to perfect rephasing
    double peak_time_ns = 0.0;
    double mean_depth = 0.0;   // d-tilde over the comb support
    double efficiency = 0.0;   // d^2 exp(-d) * peak_relative_intensity
};

// First-echo figure of merit from the microscopic model: scan the rephasing trace around
// t = 1/delta and convert the relative peak to a forward-retrieval efficiency through the
// collective absorption/re-emission factor d^2 exp(-d).
inline EnsembleEcho ensemble_first_echo(const SpectralProfile& prof, const IonEnsemble& ens,
                                        double delta_mhz, double dt_ns, double T2_us = 0.0) {
    if (!(delta_mhz > 0.0)) throw std::domain_error("ensemble_first_echo: delta must be positive");
    const double t_echo = 1000.0 / delta_mhz;
    const double half_span = 0.2 * t_echo;
    auto n_pts = static_cast<std::size_t>(2.0 * half_span / dt_ns) + 1;
    TimeGrid window = TimeGrid::from_step(t_echo - half_span, dt_ns, n_pts);
    auto trace = ensemble_echo(ens, window, T2_us);

    EnsembleEcho r;
    std::size_t best = 0;
    for (std::size_t m = 0; m < trace.size(); ++m)
        if (trace[m] > trace[best]) best = m;
    r.peak_relative_intensity = trace[best];
    r.peak_time_ns = window.time_ns(best);
    r.mean_depth = mean_comb_depth(prof);
    r.efficiency = r.mean_depth * r.mean_depth * std::exp(-r.mean_depth) * r.peak_relative_intensity;
    return r;
}

} // namespace afc
