#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "afc/detection.hpp"
#include "afc/fitting.hpp"
#include "afc/pulses.hpp"

namespace afc {

// Detector-plane intensity of two overlapping fields sharing a time grid.
inline std::vector<double> interference_trace(const Pulse& echo, const Pulse& probe) {
    if (!(echo.grid == probe.grid))
        throw config_error("interference_trace: pulses do not share a time grid");
    if (echo.carrier_detuning_mhz == probe.carrier_detuning_mhz)
        throw config_error("interference_trace: echo and probe carriers coincide, no beat");
    std::vector<double> out(echo.grid.n_points);
    for (std::size_t m = 0; m < out.size(); ++m)
        out[m] = std::norm(echo.envelope[m] + probe.envelope[m]);
    return out;
}

// Two constant-amplitude waves: I(t) = I1 + I2 + 2*sqrt(I1*I2)*cos(2*pi*f*t + phase).
inline std::vector<double> synthetic_beat_trace(const TimeGrid& grid, double I1, double I2,
                                                double beat_freq_mhz, double phase_rad) {
    std::vector<double> out(grid.n_points);
    for (std::size_t m = 0; m < grid.n_points; ++m) {
        double a = 2.0 * std::numbers::pi * beat_freq_mhz * grid.time_ns(m) * kMHzNs + phase_rad;
        out[m] = I1 + I2 + 2.0 * std::sqrt(I1 * I2) * std::cos(a);
    }
    return out;
}

struct BeatFit {
    double visibility = 0.0;
    double std_error = 0.0;
    double phase_rad = 0.0;        // beat phase at the window center
    double phase_std_error = 0.0;
    double freq_mhz = 0.0;         // fitted beat frequency
    double period_ns = 0.0;
    double envelope_at_center = 0.0;
};

namespace detail {

// Quadratic-envelope sinusoid model, linear in its 9 coefficients once f is fixed:
// y = sum_p a_p u^p + (sum_p c_p u^p) cos(2*pi*f*tau) + (sum_p s_p u^p) sin(2*pi*f*tau),
// u = tau / half_window. Returns the SSE; coefficients written to coef.
inline double beat_basis_fit(const std::vector<double>& t, const std::vector<double>& y,
                             const std::vector<double>& wgt, double t_center, double half_win,
                             double f_mhz, double coef[9]) {
    const std::size_t n = t.size();
    std::vector<double> ata(81, 0.0), aty(9, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double u = (t[i] - t_center) / half_win;
        double ph = 2.0 * std::numbers::pi * f_mhz * (t[i] - t_center) * kMHzNs;
        double cs = std::cos(ph), sn = std::sin(ph);
        double base[9] = {1.0, u, u * u, cs, u * cs, u * u * cs, sn, u * sn, u * u * sn};
        for (int a = 0; a < 9; ++a) {
            aty[a] += wgt[i] * base[a] * y[i];
            for (int b = 0; b < 9; ++b) ata[a * 9 + b] += wgt[i] * base[a] * base[b];
        }
    }
    std::vector<double> lhs = ata, rhs = aty;
    for (int a = 0; a < 9; ++a) lhs[a * 9 + a] *= 1.0 + 1e-12;
    if (!solve_dense(lhs, rhs, 9)) throw analysis_error("beat fit: singular normal equations");
    for (int a = 0; a < 9; ++a) coef[a] = rhs[a];
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double u = (t[i] - t_center) / half_win;
        double ph = 2.0 * std::numbers::pi * f_mhz * (t[i] - t_center) * kMHzNs;
        double cs = std::cos(ph), sn = std::sin(ph);
        double base[9] = {1.0, u, u * u, cs, u * cs, u * u * cs, sn, u * sn, u * u * sn};
        double m = 0.0;
        for (int a = 0; a < 9; ++a) m += coef[a] * base[a];
        sse += wgt[i] * (m - y[i]) * (m - y[i]);
    }
    return sse;
}

// Beat period from the fringe minima: an amplitude-modulated beat keeps its nulls at exact
// period spacing even when the envelopes vary on the same time scale as the beat, which makes
// null spacing far more robust than any joint envelope+frequency regression here.
inline double null_spacing_freq(const std::vector<double>& t, const std::vector<double>& y) {
    const std::size_t n = t.size();
    const double dt = (t.back() - t.front()) / static_cast<double>(n - 1);
    // light smoothing against counting noise
    std::size_t half = std::max<std::size_t>(1, n / 64);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t lo = i > half ? i - half : 0;
        std::size_t hi = std::min(n - 1, i + half);
        double acc = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) acc += y[j];
        s[i] = acc / static_cast<double>(hi - lo + 1);
    }
    double smax = *std::max_element(s.begin(), s.end());
    double smin = *std::min_element(s.begin(), s.end());
    double prominence = 0.08 * (smax - smin);
    if (!(prominence > 0.0)) return 0.0;

    std::vector<double> minima;
    std::size_t i = half + 1;
    while (i + half + 1 < n) {
        if (s[i] <= s[i - 1] && s[i] <= s[i + 1]) {
            // flat-bottom tolerant: hop over the plateau
            std::size_t j = i;
            while (j + 1 < n && s[j + 1] <= s[i]) ++j;
            std::size_t mid = (i + j) / 2;
            // require a real dip against the neighborhood
            double rise = 0.0;
            for (std::size_t k = mid; k + 1 < n && k < mid + static_cast<std::size_t>(n / 6); ++k)
                rise = std::max(rise, s[k] - s[mid]);
            double rise_l = 0.0;
            for (std::size_t k = mid; k > static_cast<std::size_t>(n / 6) && k + n / 6 > mid; --k)
                rise_l = std::max(rise_l, s[k] - s[mid]);
            if (rise >= prominence && rise_l >= prominence) {
                double t_min = t[mid];
                if (mid > 0 && mid + 1 < n) {
                    double d1 = (s[mid] - s[mid - 1]) / dt;
                    double d2 = (s[mid + 1] - s[mid]) / dt;
                    double curv = (d2 - d1) / dt;
                    if (curv > 0.0) t_min -= 0.5 * (d1 + d2) / curv;
                }
                if (minima.empty() || t_min - minima.back() > 4.0 * dt) minima.push_back(t_min);
            }
            i = j + 1;
        } else {
            ++i;
        }
    }
    if (minima.size() < 2) return 0.0;
    double spacing = (minima.back() - minima.front()) / static_cast<double>(minima.size() - 1);
    return spacing > 0.0 ? 1000.0 / spacing : 0.0;
}

inline BeatFit beat_fit(const std::vector<double>& t, const std::vector<double>& y,
                        const std::vector<double>& var, double window_lo, double window_hi,
                        double freq_hint_mhz, double noise_floor) {
    if (t.size() < 16) throw analysis_error("beat fit: fewer than 16 samples in window");
    const double t_center = 0.5 * (window_lo + window_hi);
    const double half_win = 0.5 * (window_hi - window_lo);

    std::vector<double> ys(t.size()), wgt(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        ys[i] = y[i] - noise_floor;
        wgt[i] = 1.0 / std::max(var[i], 1e-12);
    }

    double f_nulls = null_spacing_freq(t, ys);
    double f_best = f_nulls;
    if (freq_hint_mhz > 0.0) {
        // the hint brackets the null-based measurement and covers windows with < 2 usable dips
        bool plausible = f_nulls > 0.0 && std::abs(f_nulls - freq_hint_mhz) < 0.25 * freq_hint_mhz;
        f_best = plausible ? f_nulls : freq_hint_mhz;
    } else if (f_nulls <= 0.0) {
        throw analysis_error("beat fit: no resolvable fringe minima and no frequency hint");
    }
    if ((window_hi - window_lo) * f_best * kMHzNs < 2.0 - 1e-9)
        throw analysis_error("beat fit: window spans fewer than 2 beat periods");

    double coef[9];
    double sse = beat_basis_fit(t, ys, wgt, t_center, half_win, f_best, coef);
    BeatFit r;
    r.freq_mhz = f_best;
    r.period_ns = 1000.0 / f_best;

    // V and phase by repeated-boxcar complex demodulation at the window center: each one-period
    // boxcar nulls the carrier and its own leakage, so slowly varying envelopes bias the local
    // estimate far less than a global envelope regression would.
    {
        const std::size_t n = t.size();
        const double dt = (t.back() - t.front()) / static_cast<double>(n - 1);
        const double period = 1000.0 / f_best;
        auto h = static_cast<std::ptrdiff_t>(std::lround(0.5 * period / dt));
        auto ic = static_cast<std::ptrdiff_t>(std::lround((t_center - t.front()) / dt));
        int order = static_cast<int>(std::min<std::ptrdiff_t>(
            3, std::min(ic, static_cast<std::ptrdiff_t>(n) - 1 - ic) / std::max<std::ptrdiff_t>(h, 1)));
        if (h < 1 || order < 1)
            throw analysis_error("beat fit: window too short to demodulate one beat period");
        std::vector<cplx> z(n);
        std::vector<double> d(n);
        for (std::size_t i = 0; i < n; ++i) {
            double ph = -2.0 * std::numbers::pi * f_best * (t[i] - t_center) * kMHzNs;
            z[i] = ys[i] * cplx{std::cos(ph), std::sin(ph)};
            d[i] = ys[i];
        }
        for (int pass = 0; pass < order; ++pass) {
            std::vector<cplx> zp(n + 1, 0.0);
            std::vector<double> dp(n + 1, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                zp[i + 1] = zp[i] + z[i];
                dp[i + 1] = dp[i] + d[i];
            }
            std::vector<cplx> z2(n, 0.0);
            std::vector<double> d2(n, 0.0);
            for (std::ptrdiff_t i = h; i + h < static_cast<std::ptrdiff_t>(n); ++i) {
                z2[i] = (zp[i + h + 1] - zp[i - h]) / static_cast<double>(2 * h + 1);
                d2[i] = (dp[i + h + 1] - dp[i - h]) / static_cast<double>(2 * h + 1);
            }
            z.swap(z2);
            d.swap(d2);
        }
        double dc = d[ic];
        if (!(dc > 0.0)) throw analysis_error("beat fit: non-positive envelope at window center");
        r.envelope_at_center = dc;
        r.visibility = 2.0 * std::abs(z[ic]) / dc;
        r.phase_rad = std::arg(z[ic]);
    }

    // covariance of (a0, c0, s0) from the weighted normal equations; weights are 1/var so
    // cov = (A^T W A)^{-1} when var is the true per-sample variance. The least-squares
    // coefficients serve as the linearization point for the error propagation.
    {
        double a0 = coef[0], c0 = coef[3], s0 = coef[6];
        if (!(a0 > 0.0)) a0 = r.envelope_at_center;
        double amp = std::hypot(c0, s0);
        std::vector<double> ata(81, 0.0);
        for (std::size_t i = 0; i < t.size(); ++i) {
            double u = (t[i] - t_center) / half_win;
            double ph = 2.0 * std::numbers::pi * f_best * (t[i] - t_center) * kMHzNs;
            double cs = std::cos(ph), sn = std::sin(ph);
            double base[9] = {1.0, u, u * u, cs, u * cs, u * u * cs, sn, u * sn, u * u * sn};
            for (int a = 0; a < 9; ++a)
                for (int b = 0; b < 9; ++b) ata[a * 9 + b] += wgt[i] * base[a] * base[b];
        }
        double inv_col[3][9];
        int cols[3] = {0, 3, 6};
        for (int c = 0; c < 3; ++c) {
            std::vector<double> a = ata, e(9, 0.0);
            e[cols[c]] = 1.0;
            if (!solve_dense(a, e, 9)) throw analysis_error("beat fit: singular covariance");
            for (int r2 = 0; r2 < 9; ++r2) inv_col[c][r2] = e[r2];
        }
        double va = inv_col[0][0], vc = inv_col[1][3], vs = inv_col[2][6];
        double cac = inv_col[0][3], cas = inv_col[0][6], ccs = inv_col[1][6];
        // delta method: V = sqrt(c0^2+s0^2)/a0
        double damp_dc = amp > 0.0 ? c0 / amp : 0.0;
        double damp_ds = amp > 0.0 ? s0 / amp : 0.0;
        double dV_da = -amp / (a0 * a0);
        double dV_dc = damp_dc / a0;
        double dV_ds = damp_ds / a0;
        double var_v = dV_da * dV_da * va + dV_dc * dV_dc * vc + dV_ds * dV_ds * vs +
                       2.0 * dV_da * dV_dc * cac + 2.0 * dV_da * dV_ds * cas +
                       2.0 * dV_dc * dV_ds * ccs;
        r.std_error = std::sqrt(std::max(var_v, 0.0));
        if (amp > 0.0) {
            double dp_dc = s0 / (amp * amp);   // d atan2(-s,c)/dc = s/(c^2+s^2)
            double dp_ds = -c0 / (amp * amp);
            double var_p = dp_dc * dp_dc * vc + dp_ds * dp_ds * vs + 2.0 * dp_dc * dp_ds * ccs;
            r.phase_std_error = std::sqrt(std::max(var_p, 0.0));
        }
    }
    (void)sse;
    return r;
}

// Beat frequency of a pure AC signal (e.g. the difference of a phase-0 and a phase-pi trace,
// where the envelopes cancel): iterate double-boxcar complex demodulation and correct the
// trial frequency by the amplitude-weighted phase slope of the demodulated signal.
inline double refine_freq_ac(const std::vector<double>& t, const std::vector<double>& ac,
                             double f0_mhz) {
    double f = f0_mhz;
    const std::size_t n = t.size();
    if (n < 16) throw analysis_error("beat frequency: too few samples");
    const double dt = (t.back() - t.front()) / static_cast<double>(n - 1);
    for (int it = 0; it < 8; ++it) {
        auto h = static_cast<std::ptrdiff_t>(std::lround(0.5 * 1000.0 / f / dt));
        if (h < 1 || 4 * h >= static_cast<std::ptrdiff_t>(n))
            throw analysis_error("beat frequency: window shorter than two beat periods");
        std::vector<cplx> ps(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double ph = -2.0 * std::numbers::pi * f * t[i] * kMHzNs;
            ps[i + 1] = ps[i] + ac[i] * cplx{std::cos(ph), std::sin(ph)};
        }
        std::vector<cplx> z1(n, 0.0);
        for (std::ptrdiff_t i = h; i + h < static_cast<std::ptrdiff_t>(n); ++i)
            z1[i] = (ps[i + h + 1] - ps[i - h]) / static_cast<double>(2 * h + 1);
        std::vector<cplx> zp(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) zp[i + 1] = zp[i] + z1[i];
        std::vector<cplx> z(n, 0.0);
        std::vector<char> ok(n, 0);
        for (std::ptrdiff_t i = 2 * h; i + 2 * h < static_cast<std::ptrdiff_t>(n); ++i) {
            z[i] = (zp[i + h + 1] - zp[i - h]) / static_cast<double>(2 * h + 1);
            ok[i] = 1;
        }
        double num = 0.0, den = 0.0;
        for (std::size_t i = 1; i < n; ++i) {
            if (!ok[i] || !ok[i - 1]) continue;
            double w = std::min(std::norm(z[i]), std::norm(z[i - 1]));
            num += w * std::arg(z[i] / z[i - 1]);
            den += w;
        }
        if (!(den > 0.0)) throw analysis_error("beat frequency: demodulated signal vanished");
        double df = std::clamp((num / den) / (2.0 * std::numbers::pi * dt * kMHzNs),
                               -0.15 * f, 0.15 * f);
        f += df;
        if (std::abs(df) < 1e-6 * f) break;
    }
    return f;
}

} // namespace detail

// Visibility of a clean intensity trace over [window_lo, window_hi) ns.
inline BeatFit visibility_trace(const TimeGrid& grid, const std::vector<double>& intensity,
                                double window_lo_ns, double window_hi_ns,
                                double freq_hint_mhz = 0.0, double noise_floor = 0.0) {
    std::vector<double> t, y;
    double peak = 0.0;
    for (std::size_t m = 0; m < grid.n_points; ++m) {
        double tt = grid.time_ns(m);
        if (tt >= window_lo_ns && tt < window_hi_ns) {
            t.push_back(tt);
            y.push_back(intensity[m]);
            peak = std::max(peak, intensity[m]);
        }
    }
    std::vector<double> var(t.size(), std::max(peak * peak * 1e-12, 1e-300));
    return detail::beat_fit(t, y, var, window_lo_ns, window_hi_ns, freq_hint_mhz, noise_floor);
}

// Visibility from a photon-count histogram after subtracting the expected dark floor.
inline BeatFit visibility(const CountHistogram& hist, double window_lo_ns, double window_hi_ns,
                          double freq_hint_mhz = 0.0) {
    std::vector<double> t, y, var;
    const double floor = dark_counts_per_bin(hist.params);
    for (std::size_t i = 0; i < hist.n_bins(); ++i) {
        double c = hist.bin_center_ns(i);
        if (c >= window_lo_ns && c < window_hi_ns) {
            t.push_back(c);
            double cnt = static_cast<double>(hist.counts[i]);
            y.push_back(cnt);
            var.push_back(std::max(cnt, 1.0));
        }
    }
    return detail::beat_fit(t, y, var, window_lo_ns, window_hi_ns, freq_hint_mhz, floor);
}

} // namespace afc
