#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

#include "afc/errors.hpp"

namespace afc {

// Units are fixed repo-wide: frequency in MHz, time in ns, optical depth dimensionless.
// MHz * ns = 1e-3, so phases are 2*pi*f*t*kMHzNs.
inline constexpr double kMHzNs = 1e-3;
inline constexpr double kLn2 = std::numbers::ln2;

// Uniform detuning axis, symmetric about center: f(i) = center + (i - (n-1)/2) * df.
struct FrequencyGrid {
    double center_mhz = 0.0;
    double span_mhz = 40.0;
    std::size_t n_points = 1 << 14;

    FrequencyGrid() = default;
    FrequencyGrid(double center, double span, std::size_t n)
        : center_mhz(center), span_mhz(span), n_points(n) {
        if (!(span_mhz > 0.0)) throw config_error("FrequencyGrid: span must be positive");
        if (n_points < 16) throw config_error("FrequencyGrid: need at least 16 points");
    }

    double resolution_mhz() const { return span_mhz / static_cast<double>(n_points - 1); }
    double freq_mhz(std::size_t i) const {
        return center_mhz + (static_cast<double>(i) - 0.5 * static_cast<double>(n_points - 1)) * resolution_mhz();
    }
    double min_mhz() const { return center_mhz - 0.5 * span_mhz; }
    double max_mhz() const { return center_mhz + 0.5 * span_mhz; }

    // Nearest grid index for a frequency (clamped).
    std::size_t index_of(double f_mhz) const {
        double x = (f_mhz - min_mhz()) / resolution_mhz();
        if (x < 0.0) return 0;
        std::size_t i = static_cast<std::size_t>(std::lround(x));
        return i >= n_points ? n_points - 1 : i;
    }

    bool operator==(const FrequencyGrid&) const = default;
};

// Uniform time axis: t(m) = t_start + m * dt.
struct TimeGrid {
    double t_start_ns = 0.0;
    double dt_ns = 1.0;
    std::size_t n_points = 2;

    TimeGrid() = default;
    TimeGrid(double t_start, double t_end, std::size_t n) : t_start_ns(t_start), n_points(n) {
        if (n < 2) throw config_error("TimeGrid: need at least 2 points");
        if (!(t_end > t_start)) throw config_error("TimeGrid: t_end must exceed t_start");
        dt_ns = (t_end - t_start) / static_cast<double>(n - 1);
    }
    static TimeGrid from_step(double t_start, double dt, std::size_t n) {
        TimeGrid g;
        g.t_start_ns = t_start;
        g.dt_ns = dt;
        g.n_points = n;
        if (!(dt > 0.0) || n < 2) throw config_error("TimeGrid: bad step or size");
        return g;
    }

    double t_end_ns() const { return t_start_ns + dt_ns * static_cast<double>(n_points - 1); }
    double time_ns(std::size_t m) const { return t_start_ns + dt_ns * static_cast<double>(m); }
    double span_ns() const { return dt_ns * static_cast<double>(n_points); }

    std::size_t index_of(double t_ns) const {
        double x = (t_ns - t_start_ns) / dt_ns;
        if (x < 0.0) return 0;
        std::size_t i = static_cast<std::size_t>(std::lround(x));
        return i >= n_points ? n_points - 1 : i;
    }

    bool operator==(const TimeGrid&) const = default;
};

// FFT companion of a frequency grid: same point count, dt fixed by df so that
// df * dt * n = 1000 (MHz * ns). The time window starts at t_start (default -T/4,
// leaving three quarters of the cyclic window for the echo train).
inline TimeGrid paired_time_grid(const FrequencyGrid& fg, double t_start_ns = 0.0, bool auto_start = true) {
    double dt = 1000.0 / (fg.resolution_mhz() * static_cast<double>(fg.n_points));
    double start = auto_start ? -0.25 * dt * static_cast<double>(fg.n_points) : t_start_ns;
    return TimeGrid::from_step(start, dt, fg.n_points);
}

inline bool fft_compatible(const TimeGrid& tg, const FrequencyGrid& fg) {
    if (tg.n_points != fg.n_points) return false;
    double prod = fg.resolution_mhz() * tg.dt_ns * static_cast<double>(fg.n_points);
    return std::abs(prod - 1000.0) < 1e-6 * 1000.0;
}

} // namespace afc
