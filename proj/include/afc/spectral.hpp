#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "afc/errors.hpp"
#include "afc/grid.hpp"

namespace afc {

enum class PeakShape { gaussian, lorentzian, square };

inline PeakShape peak_shape_from_string(const std::string& s) {
    if (s == "gaussian") return PeakShape::gaussian;
    if (s == "lorentzian") return PeakShape::lorentzian;
    if (s == "square") return PeakShape::square;
    throw config_error("unknown peak shape '" + s + "' (expected gaussian|lorentzian|square)");
}

inline std::string to_string(PeakShape s) {
    switch (s) {
        case PeakShape::gaussian: return "gaussian";
        case PeakShape::lorentzian: return "lorentzian";
        default: return "square";
    }
}

// Host material and spectral-preparation constants. Frequencies in MHz, T2 in us.
struct MaterialParams {
    double inhomogeneous_fwhm_mhz = 5000.0;
    double inhomogeneous_alphaL = 6.0;   // depth of the broad line far from the pit
    double pit_width_mhz = 18.0;         // width of the zero-absorption region
    double excited_splitting_limit_mhz = 4.6;  // delta_f bound on the comb extent
    double optical_T2_us = 100.0;
    double probe_window_offset_mhz = 2.3;  // <= 0 disables the reserved probe window

    void validate() const {
        if (!(optical_T2_us > 0.0)) throw config_error("material.optical_T2_us must be positive");
        if (pit_width_mhz < 0.0) throw config_error("material.pit_width_mhz must be non-negative");
        if (!(inhomogeneous_fwhm_mhz > 0.0))
            throw config_error("material.inhomogeneous_fwhm_mhz must be positive");
        if (pit_width_mhz > 0.1 * inhomogeneous_fwhm_mhz)
            throw config_error("material.pit_width_mhz must be small against the inhomogeneous width");
        if (inhomogeneous_alphaL < 0.0)
            throw config_error("material.inhomogeneous_alphaL must be non-negative");
    }
};

struct CombParams {
    double delta_mhz = 1.2;      // peak spacing
    double gamma_fwhm_mhz = 0.3; // peak FWHM
    double alphaL = 6.0;         // peak optical depth
    std::size_t n_peaks = 0;     // 0 = fill the pit
    PeakShape peak_shape = PeakShape::gaussian;
    double background_alphaL = 0.0;  // residual floor inside the pit
};

inline double finesse(const CombParams& p) {
    if (p.gamma_fwhm_mhz == 0.0) throw std::domain_error("finesse: gamma_fwhm is zero");
    return p.delta_mhz / p.gamma_fwhm_mhz;
}

// Rendered comb geometry, kept with the profile for downstream validation and sampling.
struct CombLayout {
    CombParams params;
    std::vector<double> tooth_centers_mhz;  // ascending
    double support_lo_mhz = 0.0;  // teeth span padded by delta/2 on both sides
    double support_hi_mhz = 0.0;
    double extent_mhz() const { return support_hi_mhz - support_lo_mhz; }
};

struct PitLayout {
    double center_mhz = 0.0;
    double width_mhz = 18.0;
    double edge_band_mhz = 1.0;
    double floor_alphaL = 0.0;
};

struct SpectralProfile {
    FrequencyGrid grid;
    std::vector<double> alpha_L;
    std::optional<PitLayout> pit;
    std::optional<CombLayout> comb;

    double at(double f_mhz) const {  // linear interpolation
        double x = (f_mhz - grid.min_mhz()) / grid.resolution_mhz();
        if (x <= 0.0) return alpha_L.front();
        if (x >= static_cast<double>(grid.n_points - 1)) return alpha_L.back();
        std::size_t i = static_cast<std::size_t>(x);
        double frac = x - static_cast<double>(i);
        return alpha_L[i] * (1.0 - frac) + alpha_L[i + 1] * frac;
    }
};

namespace detail {

inline double inhomogeneous_depth(const MaterialParams& m, double f_mhz) {
    double u = f_mhz / m.inhomogeneous_fwhm_mhz;
    return m.inhomogeneous_alphaL * std::exp(-4.0 * kLn2 * u * u);
}

// 0 inside the flat pit, 1 outside, raised-cosine over the edge band.
inline double pit_edge_factor(double f_mhz, const PitLayout& pit) {
    double d = std::abs(f_mhz - pit.center_mhz) - 0.5 * pit.width_mhz;
    if (d <= 0.0) return 0.0;
    if (d >= pit.edge_band_mhz) return 1.0;
    return 0.5 * (1.0 - std::cos(std::numbers::pi * d / pit.edge_band_mhz));
}

inline double tooth_value(PeakShape shape, double alphaL, double gamma, double f_from_center,
                          double grid_step) {
    switch (shape) {
        case PeakShape::gaussian: {
            double u = f_from_center / gamma;
            return alphaL * std::exp(-4.0 * kLn2 * u * u);
        }
        case PeakShape::lorentzian: {
            double u = 2.0 * f_from_center / gamma;
            return alphaL / (1.0 + u * u);
        }
        case PeakShape::square: {
            // fractional overlap of the sample cell with the tooth keeps the area exact
            double lo = std::max(f_from_center - 0.5 * grid_step, -0.5 * gamma);
            double hi = std::min(f_from_center + 0.5 * grid_step, 0.5 * gamma);
            double overlap = std::max(0.0, hi - lo) / grid_step;
            return alphaL * overlap;
        }
    }
    return 0.0;
}

} // namespace detail

inline SpectralProfile build_pit(const MaterialParams& material, const FrequencyGrid& grid,
                                 double background_alphaL = 0.0) {
    material.validate();
    SpectralProfile prof;
    prof.grid = grid;
    prof.alpha_L.resize(grid.n_points);
    if (material.pit_width_mhz <= 0.0) {
        for (std::size_t i = 0; i < grid.n_points; ++i)
            prof.alpha_L[i] = detail::inhomogeneous_depth(material, grid.freq_mhz(i));
        return prof;
    }
    if (grid.resolution_mhz() > material.pit_width_mhz / 32.0)
        throw config_error("build_pit: grid resolution " + std::to_string(grid.resolution_mhz()) +
                           " MHz too coarse for pit width " + std::to_string(material.pit_width_mhz) +
                           " MHz (need <= pit_width/32)");
    if (material.pit_width_mhz > grid.span_mhz)
        throw config_error("build_pit: pit wider than the frequency grid span");

    PitLayout pit;
    pit.center_mhz = grid.center_mhz;
    pit.width_mhz = material.pit_width_mhz;
    pit.edge_band_mhz = std::min(1.0, 0.25 * material.pit_width_mhz);
    pit.floor_alphaL = background_alphaL;
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        double f = grid.freq_mhz(i);
        double bg = detail::inhomogeneous_depth(material, f);
        double s = detail::pit_edge_factor(f, pit);
        prof.alpha_L[i] = background_alphaL + (bg - background_alphaL) * s;
    }
    prof.pit = pit;
    return prof;
}

namespace detail {

// Tooth index range [k_lo, k_hi] around the pit center for an n-peak comb, shifted down when a
// probe window is reserved on the positive side. Returns false if the ladder cannot be placed.
inline bool place_comb(const CombParams& p, const MaterialParams& material, std::size_t n_peaks,
                       long& k_lo, long& k_hi) {
    const double gamma = p.gamma_fwhm_mhz;
    k_hi = static_cast<long>(n_peaks - 1) / 2;
    if (material.probe_window_offset_mhz > 0.0) {
        double top_limit = material.probe_window_offset_mhz - 0.5 - 2.0 * gamma;
        long k_max = static_cast<long>(std::floor(top_limit / p.delta_mhz + 1e-12));
        k_hi = std::min(k_hi, k_max);
    }
    k_lo = k_hi - static_cast<long>(n_peaks - 1);
    double flat_lo = -0.5 * material.pit_width_mhz;
    return static_cast<double>(k_lo) * p.delta_mhz - 1.5 * gamma >= flat_lo;
}

} // namespace detail

// Largest peak count satisfying the excited-state splitting bound, pit containment, and (when
// reserved) the probe-window carve-out.
inline std::size_t max_peak_count(const CombParams& comb, const MaterialParams& material) {
    double gamma = comb.gamma_fwhm_mhz;
    std::size_t best = 1;
    for (std::size_t n = 1;; ++n) {
        double span = comb.delta_mhz * static_cast<double>(n - 1);
        bool split_ok = span < material.excited_splitting_limit_mhz;
        bool pit_ok = span + 3.0 * gamma <= material.pit_width_mhz;
        if (!(split_ok && pit_ok)) break;
        long k_lo, k_hi;
        if (detail::place_comb(comb, material, n, k_lo, k_hi)) best = n;
    }
    return best;
}

inline SpectralProfile build_comb(const CombParams& params, const MaterialParams& material,
                                  const FrequencyGrid& grid) {
    material.validate();
    if (params.alphaL < 0.0) throw config_error("comb.alphaL must be non-negative");
    if (params.background_alphaL < 0.0) throw config_error("comb.background_alphaL must be non-negative");
    if (!(params.gamma_fwhm_mhz > 0.0)) throw config_error("comb.gamma_fwhm_mhz must be positive");
    if (finesse(params) <= 1.0)
        throw constraint_error("build_comb: finesse F = delta/gamma must exceed 1, got F = " +
                               std::to_string(finesse(params)));

    CombParams p = params;
    if (p.n_peaks == 0) p.n_peaks = max_peak_count(p, material);
    const double gamma = p.gamma_fwhm_mhz;
    const double comb_span = p.delta_mhz * static_cast<double>(p.n_peaks - 1);

    if (comb_span >= material.excited_splitting_limit_mhz)
        throw constraint_error(
            "build_comb: delta*(n_peaks-1) = " + std::to_string(comb_span) +
            " MHz violates delta*(n_peaks-1) < excited_splitting_limit = " +
            std::to_string(material.excited_splitting_limit_mhz) + " MHz");
    if (comb_span + 3.0 * gamma > material.pit_width_mhz)
        throw constraint_error(
            "build_comb: comb does not fit inside the pit: delta*(n_peaks-1) + 3*gamma = " +
            std::to_string(comb_span + 3.0 * gamma) +
            " MHz exceeds pit_width = " + std::to_string(material.pit_width_mhz) + " MHz");
    if (grid.resolution_mhz() > gamma / 8.0)
        throw config_error("build_comb: grid resolution " + std::to_string(grid.resolution_mhz()) +
                           " MHz too coarse for peak FWHM " + std::to_string(gamma) +
                           " MHz (need <= gamma/8)");

    SpectralProfile prof = build_pit(material, grid, p.background_alphaL);

    // Teeth sit at k*delta around the pit center; a reserved probe window on the positive side
    // pushes the whole ladder down.
    long k_lo, k_hi;
    if (!detail::place_comb(p, material, p.n_peaks, k_lo, k_hi))
        throw constraint_error("build_comb: comb does not fit inside the pit with the probe window "
                               "reserved (n_peaks = " + std::to_string(p.n_peaks) + ", delta = " +
                               std::to_string(p.delta_mhz) + " MHz)");

    CombLayout layout;
    layout.params = p;
    const double step = grid.resolution_mhz();
    for (long k = k_lo; k <= k_hi; ++k) {
        double c = grid.center_mhz + static_cast<double>(k) * p.delta_mhz;
        layout.tooth_centers_mhz.push_back(c);
        // render only where the tooth matters
        double reach = (p.peak_shape == PeakShape::lorentzian) ? 60.0 * gamma : 6.0 * gamma;
        std::size_t i0 = grid.index_of(c - reach);
        std::size_t i1 = grid.index_of(c + reach);
        for (std::size_t i = i0; i <= i1; ++i)
            prof.alpha_L[i] += detail::tooth_value(p.peak_shape, p.alphaL, gamma,
                                                   grid.freq_mhz(i) - c, step);
    }
    layout.support_lo_mhz = layout.tooth_centers_mhz.front() - 0.5 * p.delta_mhz;
    layout.support_hi_mhz = layout.tooth_centers_mhz.back() + 0.5 * p.delta_mhz;
    prof.comb = layout;
    return prof;
}

// Mean optical depth over the comb support (one full period per tooth).
inline double mean_comb_depth(const SpectralProfile& prof) {
    if (!prof.comb) throw std::domain_error("mean_comb_depth: profile has no comb");
    const auto& c = *prof.comb;
    std::size_t i0 = prof.grid.index_of(c.support_lo_mhz);
    std::size_t i1 = prof.grid.index_of(c.support_hi_mhz);
    double sum = 0.0;
    for (std::size_t i = i0; i <= i1; ++i) {
        double w = (i == i0 || i == i1) ? 0.5 : 1.0;  // trapezoid
        sum += w * prof.alpha_L[i];
    }
    return sum * prof.grid.resolution_mhz() / c.extent_mhz();
}

} // namespace afc
