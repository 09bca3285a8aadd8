#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "afc/detection.hpp"
#include "afc/errors.hpp"
#include "afc/optimize.hpp"

namespace afc {

// integral of exp(-4*ln2*x^2/w^2) dx = w * sqrt(pi/(4*ln2))
inline const double kGaussAreaFactor = std::sqrt(std::numbers::pi / (4.0 * kLn2));

struct FitResult {
    double amplitude = 0.0;
    double center_ns = 0.0;
    double fwhm_ns = 0.0;
    double offset = 0.0;
    double residual_norm = 0.0;
    double cov[4][4] = {};  // order: amplitude, center, fwhm, offset
    bool converged = false;
    int iterations = 0;

    double area() const { return amplitude * fwhm_ns * kGaussAreaFactor; }
    double amplitude_stderr() const { return std::sqrt(std::max(0.0, cov[0][0])); }
    double center_stderr() const { return std::sqrt(std::max(0.0, cov[1][1])); }
};

class fit_error : public analysis_error {
public:
    fit_error(const std::string& msg, FitResult best) : analysis_error(msg), best_iterate(best) {}
    FitResult best_iterate;
};

namespace detail {

// Gaussian elimination with partial pivoting on an n x n system (n small).
inline bool solve_dense(std::vector<double>& a, std::vector<double>& b, std::size_t n) {
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        if (std::abs(a[piv * n + col]) < 1e-300) return false;
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
            std::swap(b[col], b[piv]);
        }
        double inv = 1.0 / a[col * n + col];
        for (std::size_t r = col + 1; r < n; ++r) {
            double f = a[r * n + col] * inv;
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t col = n; col-- > 0;) {
        double s = b[col];
        for (std::size_t c = col + 1; c < n; ++c) s -= a[col * n + c] * b[c];
        b[col] = s / a[col * n + col];
    }
    return true;
}

inline double gauss_model(double t, const double th[4]) {
    double u = (t - th[1]) / th[2];
    return th[0] * std::exp(-4.0 * kLn2 * u * u) + th[3];
}

inline double fit_cost(const std::vector<double>& t, const std::vector<double>& y,
                       const double th[4]) {
    double c = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        double r = gauss_model(t[i], th) - y[i];
        c += r * r;
    }
    return c;
}

} // namespace detail

// Least-squares Levenberg-Marquardt fit of A*exp(-4*ln2*(t-t0)^2/w^2) + offset to bins whose
// centers fall in [window_lo, window_hi). Covariance uses model-based Poisson variances with a
// one-count floor so sparse histograms report honest (wide) errors.
inline FitResult fit_gaussian(const CountHistogram& hist, double window_lo_ns, double window_hi_ns,
                              std::optional<double> center_hint_ns = std::nullopt,
                              std::optional<double> fwhm_hint_ns = std::nullopt) {
    std::vector<double> t, y;
    for (std::size_t i = 0; i < hist.n_bins(); ++i) {
        double c = hist.bin_center_ns(i);
        if (c >= window_lo_ns && c < window_hi_ns) {
            t.push_back(c);
            y.push_back(static_cast<double>(hist.counts[i]));
        }
    }
    if (t.size() < 8)
        throw analysis_error("fit_gaussian: window [" + std::to_string(window_lo_ns) + ", " +
                             std::to_string(window_hi_ns) + ") ns holds fewer than 8 bins");
    double total = 0.0, ymax = 0.0, ymin = std::numeric_limits<double>::max();
    for (double v : y) {
        total += v;
        ymax = std::max(ymax, v);
        ymin = std::min(ymin, v);
    }
    FitResult best;
    if (total <= 0.0) throw fit_error("fit_gaussian: histogram window holds no counts", best);

    const double bin = hist.bin_width_ns();
    double th[4];
    th[3] = ymin;
    th[0] = std::max(ymax - ymin, 1e-12);
    if (center_hint_ns) {
        th[1] = *center_hint_ns;
    } else {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            double wgt = std::max(y[i] - ymin, 0.0);
            num += wgt * t[i];
            den += wgt;
        }
        th[1] = den > 0.0 ? num / den : 0.5 * (window_lo_ns + window_hi_ns);
    }
    if (fwhm_hint_ns) {
        th[2] = *fwhm_hint_ns;
    } else {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            double wgt = std::max(y[i] - ymin, 0.0);
            num += wgt * (t[i] - th[1]) * (t[i] - th[1]);
            den += wgt;
        }
        double sigma = den > 0.0 ? std::sqrt(num / den) : bin;
        th[2] = std::clamp(2.3548 * sigma, 2.0 * bin, window_hi_ns - window_lo_ns);
    }

    const std::size_t n = t.size();
    double lambda = 1e-3;
    double cost = detail::fit_cost(t, y, th);
    bool converged = false;
    int iter = 0;
    for (; iter < 200; ++iter) {
        // Jacobian and normal equations
        std::vector<double> jtj(16, 0.0), jtr(4, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double u = (t[i] - th[1]) / th[2];
            double g = std::exp(-4.0 * kLn2 * u * u);
            double r = th[0] * g + th[3] - y[i];
            double j[4] = {g, th[0] * g * 8.0 * kLn2 * u / th[2],
                           th[0] * g * 8.0 * kLn2 * u * u / th[2], 1.0};
            for (int a = 0; a < 4; ++a) {
                jtr[a] += j[a] * r;
                for (int b = 0; b < 4; ++b) jtj[a * 4 + b] += j[a] * j[b];
            }
        }
        std::vector<double> lhs = jtj, rhs = jtr;
        for (int a = 0; a < 4; ++a) {
            lhs[a * 4 + a] *= (1.0 + lambda);
            rhs[a] = -jtr[a];
        }
        if (!detail::solve_dense(lhs, rhs, 4)) break;
        double trial[4] = {th[0] + rhs[0], th[1] + rhs[1], th[2] + rhs[2], th[3] + rhs[3]};
        trial[2] = std::clamp(trial[2], 0.5 * bin, 20.0 * (window_hi_ns - window_lo_ns));
        double trial_cost = detail::fit_cost(t, y, trial);
        if (trial_cost <= cost) {
            double dc = cost - trial_cost;
            std::copy(trial, trial + 4, th);
            cost = trial_cost;
            lambda = std::max(lambda * 0.3, 1e-12);
            if (dc < 1e-12 * (cost + 1e-30)) {
                converged = true;
                break;
            }
        } else {
            lambda *= 3.0;
            if (lambda > 1e10) break;
        }
    }

    best.amplitude = th[0];
    best.center_ns = th[1];
    best.fwhm_ns = std::abs(th[2]);
    best.offset = th[3];
    best.residual_norm = std::sqrt(cost);
    best.converged = converged;
    best.iterations = iter;

    // covariance: (J^T J)^-1 J^T V J (J^T J)^-1 with V = diag(max(model, 1))
    {
        std::vector<double> jtj(16, 0.0), jtvj(16, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double u = (t[i] - th[1]) / th[2];
            double g = std::exp(-4.0 * kLn2 * u * u);
            double j[4] = {g, th[0] * g * 8.0 * kLn2 * u / th[2],
                           th[0] * g * 8.0 * kLn2 * u * u / th[2], 1.0};
            double v = std::max(th[0] * g + th[3], 1.0);
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) {
                    jtj[a * 4 + b] += j[a] * j[b];
                    jtvj[a * 4 + b] += j[a] * j[b] * v;
                }
        }
        // invert jtj by solving against identity columns
        double inv[16];
        bool ok = true;
        for (int col = 0; col < 4 && ok; ++col) {
            std::vector<double> a = jtj, e(4, 0.0);
            e[col] = 1.0;
            ok = detail::solve_dense(a, e, 4);
            for (int r = 0; r < 4; ++r) inv[r * 4 + col] = e[r];
        }
        if (ok) {
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) {
                    double s = 0.0;
                    for (int p = 0; p < 4; ++p)
                        for (int q = 0; q < 4; ++q)
                            s += inv[a * 4 + p] * jtvj[p * 4 + q] * inv[q * 4 + b];
                    best.cov[a][b] = s;
                }
        }
    }

    if (!converged)
        throw fit_error("fit_gaussian: no convergence after " + std::to_string(iter) + " iterations",
                        best);
    return best;
}

struct EfficiencyEstimate {
    double eta = 0.0;
    double std_error = 0.0;
    double area_reference = 0.0;  // fitted signal areas in count units
    double area_echo = 0.0;
};

// Optional timing prior: where the reference pulse sits, its FWHM, and the programmed
// storage delay. With the prior, sparse histograms fall back to a fixed-shape linear
// amplitude fit (matched filter) instead of a free nonlinear fit.
struct AreaRatioOptions {
    std::optional<double> reference_center_ns;
    std::optional<double> fwhm_ns;
    std::optional<double> echo_delay_ns;
    double sparse_threshold_counts = 30.0;
};

namespace detail {

struct AreaEstimate {
    double area = 0.0;      // counts above offset
    double variance = 1.0;  // counts^2
};

// Small-count variance floor from the Gehrels 84%-CL Poisson upper limit, so a near-empty
// window reports an honest (wide) uncertainty instead of a vanishing one.
inline double count_variance_floor(double area) {
    double n = std::max(area, 0.0);
    double up = 1.0 + std::sqrt(n + 0.75);
    return up * up;
}

// Linear LS of y = A*g + c with fixed Gaussian shape g(t) over [lo, hi). Poisson-propagated
// variance of the area with a one-count floor.
inline AreaEstimate fixed_shape_area(const CountHistogram& hist, double center_ns, double fwhm_ns,
                                     double lo_ns, double hi_ns) {
    double sgg = 0.0, sg = 0.0, s1 = 0.0, sgy = 0.0, sy = 0.0;
    const double bin = hist.bin_width_ns();
    std::vector<double> g, y;
    for (std::size_t i = 0; i < hist.n_bins(); ++i) {
        double t = hist.bin_center_ns(i);
        if (t < lo_ns || t >= hi_ns) continue;
        double u = (t - center_ns) / fwhm_ns;
        g.push_back(std::exp(-4.0 * kLn2 * u * u));
        y.push_back(hist.counts[i]);
        sgg += g.back() * g.back();
        sg += g.back();
        s1 += 1.0;
        sgy += g.back() * y.back();
        sy += y.back();
    }
    double det = sgg * s1 - sg * sg;
    if (s1 < 8.0 || std::abs(det) < 1e-12)
        throw analysis_error("area fit: degenerate shape basis in window");
    double A = (s1 * sgy - sg * sy) / det;
    double area = A * fwhm_ns * kGaussAreaFactor / bin;  // counts
    // Var(A) from per-bin Poisson variances of the linear estimator weights
    double c = (sgg * sy - sg * sgy) / det;
    double varA = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double wgt = (s1 * g[i] - sg) / det;
        double lam = std::max(A * g[i] + c, 0.0);
        varA += wgt * wgt * lam;
    }
    double scale = fwhm_ns * kGaussAreaFactor / bin;
    return {area, std::max(varA * scale * scale, count_variance_floor(area))};
}

inline AreaEstimate fitted_area(const FitResult& f, double bin_ns) {
    double area = f.area() / bin_ns;
    // delta method on (A, w)
    double dA = f.fwhm_ns * kGaussAreaFactor / bin_ns;
    double dw = f.amplitude * kGaussAreaFactor / bin_ns;
    double var = dA * dA * f.cov[0][0] + dw * dw * f.cov[2][2] + 2.0 * dA * dw * f.cov[0][2];
    return {area, std::max(var, count_variance_floor(area))};
}

inline double window_counts(const CountHistogram& h, double lo, double hi) {
    double s = 0.0;
    for (std::size_t i = 0; i < h.n_bins(); ++i) {
        double t = h.bin_center_ns(i);
        if (t >= lo && t < hi) s += h.counts[i];
    }
    return s;
}

} // namespace detail

// Ratio of fitted signal areas (offset/noise floor subtracted) of the echo and reference
// histograms, with Poisson-propagated standard error. With a timing prior each peak is fitted
// inside its own window, so the comb run's transmitted spike does not pollute the echo fit;
// sparse windows fall back to a fixed-shape linear amplitude fit.
inline EfficiencyEstimate efficiency_from_histograms(const CountHistogram& reference,
                                                     const CountHistogram& echo,
                                                     const AreaRatioOptions& opts = {}) {
    if (reference.n_bins() != echo.n_bins() ||
        std::abs(reference.bin_width_ns() - echo.bin_width_ns()) > 1e-9 ||
        std::abs(reference.bin_edges_ns.front() - echo.bin_edges_ns.front()) > 1e-9)
        throw config_error("efficiency_from_histograms: histograms do not share binning");

    const double span_lo = reference.bin_edges_ns.front();
    const double span_hi = reference.bin_edges_ns.back();
    const bool have_prior = opts.reference_center_ns && opts.fwhm_ns && opts.echo_delay_ns;

    double ref_lo = span_lo, ref_hi = span_hi, echo_lo = span_lo, echo_hi = span_hi;
    double ref_center = 0.0, echo_center = 0.0;
    if (have_prior) {
        double half = std::min(3.0 * *opts.fwhm_ns, 0.45 * *opts.echo_delay_ns);
        ref_center = *opts.reference_center_ns;
        echo_center = ref_center + *opts.echo_delay_ns;
        ref_lo = std::max(span_lo, ref_center - half);
        ref_hi = std::min(span_hi, ref_center + half);
        echo_lo = std::max(span_lo, echo_center - half);
        echo_hi = std::min(span_hi, echo_center + half);
    }

    detail::AreaEstimate ref_est, echo_est;
    double ref_total = detail::window_counts(reference, ref_lo, ref_hi);
    double echo_total = detail::window_counts(echo, echo_lo, echo_hi);

    if (ref_total >= opts.sparse_threshold_counts && echo_total >= opts.sparse_threshold_counts) {
        FitResult fr = fit_gaussian(reference, ref_lo, ref_hi, opts.reference_center_ns,
                                    opts.fwhm_ns);
        std::optional<double> echo_hint;
        if (opts.echo_delay_ns) echo_hint = fr.center_ns + *opts.echo_delay_ns;
        FitResult fe = fit_gaussian(echo, echo_lo, echo_hi, echo_hint, fr.fwhm_ns);
        ref_est = detail::fitted_area(fr, reference.bin_width_ns());
        echo_est = detail::fitted_area(fe, echo.bin_width_ns());
    } else if (have_prior) {
        ref_est = detail::fixed_shape_area(reference, ref_center, *opts.fwhm_ns, ref_lo, ref_hi);
        echo_est = detail::fixed_shape_area(echo, echo_center, *opts.fwhm_ns, echo_lo, echo_hi);
    } else {
        throw analysis_error("efficiency_from_histograms: too few counts for a free fit and no "
                             "timing prior supplied");
    }

    // Degenerate-reference guard. At well-measured statistics a reference within 2 sigma of
    // zero is junk data; at sparse statistics only a non-positive fitted area blocks the ratio,
    // otherwise the propagated stderr carries the uncertainty.
    bool ref_zero = ref_total >= opts.sparse_threshold_counts
                        ? ref_est.area <= 2.0 * std::sqrt(ref_est.variance)
                        : !(ref_est.area > 0.0);
    if (ref_zero)
        throw analysis_error("efficiency_from_histograms: reference area consistent with zero");

    EfficiencyEstimate out;
    out.area_reference = ref_est.area;
    out.area_echo = echo_est.area;
    out.eta = echo_est.area / ref_est.area;
    double r2 = ref_est.area * ref_est.area;
    out.std_error = std::sqrt(echo_est.variance / r2 +
                           echo_est.area * echo_est.area * ref_est.variance / (r2 * r2));
    return out;
}

} // namespace afc
