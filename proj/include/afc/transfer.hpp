#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "afc/pulses.hpp"
#include "afc/spectral.hpp"
#include "afc/transforms.hpp"

namespace afc {

// Per-frequency field transmission t(f) = exp(-alphaL/2 + i*phi). With kk_phase the phase is
// the Kramers-Kronig (minimum-phase) partner of the absorption, so the impulse response is
// causal; without it the response is the bare real attenuation (pedagogical comparison only).
struct TransferFunction {
    FrequencyGrid grid;
    std::vector<cplx> response;
    bool kk_phase = true;
};

inline TransferFunction make_transfer_function(const SpectralProfile& prof, bool kk_phase = true) {
    const std::size_t n = prof.grid.n_points;
    if (!is_pow2(n))
        throw config_error("make_transfer_function: grid size must be a power of two for the "
                           "Hilbert transform, got " + std::to_string(n));
    if (prof.comb && prof.grid.span_mhz < 4.0 * prof.comb->extent_mhz())
        throw config_error("make_transfer_function: grid span " + std::to_string(prof.grid.span_mhz) +
                           " MHz too small for Hilbert-transform windowing (need >= 4 x comb extent = " +
                           std::to_string(4.0 * prof.comb->extent_mhz()) + " MHz)");

    TransferFunction tf;
    tf.grid = prof.grid;
    tf.kk_phase = kk_phase;
    tf.response.resize(n);
    if (!kk_phase) {
        for (std::size_t k = 0; k < n; ++k) tf.response[k] = std::exp(-0.5 * prof.alpha_L[k]);
        return tf;
    }
    std::vector<double> log_mag(n);
    for (std::size_t k = 0; k < n; ++k) log_mag[k] = -0.5 * prof.alpha_L[k];
    auto d = minimum_phase_log_response(log_mag);
    for (std::size_t k = 0; k < n; ++k) {
        // keep |t| = exp(-alphaL/2) exact; the fold supplies only the phase
        tf.response[k] = std::polar(std::exp(log_mag[k]), d[k].imag());
    }
    return tf;
}

inline Pulse propagate(const Pulse& input, const TransferFunction& tf) {
    if (input.grid.n_points != tf.grid.n_points || !fft_compatible(input.grid, tf.grid))
        throw config_error("propagate: pulse time grid and transfer-function frequency grid are "
                           "not FFT-compatible");
    auto spec = time_to_freq(input.envelope, input.grid, tf.grid);
    for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= tf.response[k];
    Pulse out = input;
    out.envelope = freq_to_time(spec, tf.grid, input.grid);
    return out;
}

// Fraction of impulse-response energy at t < 0.
inline double impulse_precursor_fraction(const TransferFunction& tf) {
    return anticausal_energy_fraction(tf.response);
}

} // namespace afc
