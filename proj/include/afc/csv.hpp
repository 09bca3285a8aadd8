#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "afc/detection.hpp"
#include "afc/errors.hpp"
#include "afc/pulses.hpp"
#include "afc/spectral.hpp"

namespace afc {

// One numeric formatting for everything we write, so reruns are byte-identical.
inline std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

inline void write_profile_csv(const std::string& path, const SpectralProfile& prof) {
    std::ofstream f(path);
    if (!f) throw config_error("cannot write " + path);
    f << "detuning_MHz,alphaL\n";
    for (std::size_t i = 0; i < prof.grid.n_points; ++i)
        f << fmt_num(prof.grid.freq_mhz(i)) << ',' << fmt_num(prof.alpha_L[i]) << '\n';
}

// Pulses and traces are typically huge FFT grids with a narrow region of interest; exports
// take a [lo, hi) time window.
inline void write_pulse_csv(const std::string& path, const Pulse& p, double t_lo_ns,
                            double t_hi_ns) {
    std::ofstream f(path);
    if (!f) throw config_error("cannot write " + path);
    f << "t_ns,re,im\n";
    for (std::size_t m = 0; m < p.grid.n_points; ++m) {
        double t = p.grid.time_ns(m);
        if (t < t_lo_ns || t >= t_hi_ns) continue;
        f << fmt_num(t) << ',' << fmt_num(p.envelope[m].real()) << ','
          << fmt_num(p.envelope[m].imag()) << '\n';
    }
}

inline void write_trace_csv(const std::string& path, const TimeGrid& grid,
                            const std::vector<double>& v, double t_lo_ns, double t_hi_ns) {
    std::ofstream f(path);
    if (!f) throw config_error("cannot write " + path);
    f << "t_ns,intensity\n";
    for (std::size_t m = 0; m < grid.n_points; ++m) {
        double t = grid.time_ns(m);
        if (t < t_lo_ns || t >= t_hi_ns) continue;
        f << fmt_num(t) << ',' << fmt_num(v[m]) << '\n';
    }
}

inline void write_histogram_csv(const std::string& path, const CountHistogram& h) {
    std::ofstream f(path);
    if (!f) throw config_error("cannot write " + path);
    f << "bin_start_ns,count\n";
    for (std::size_t i = 0; i < h.n_bins(); ++i)
        f << fmt_num(h.bin_edges_ns[i]) << ',' << fmt_num(h.counts[i]) << '\n';
}

// Reads (bin_start_ns, count) with a header line; bin width from consecutive starts.
inline CountHistogram read_histogram_csv(const std::string& path,
                                         const DetectorParams& params = {}) {
    std::ifstream f(path);
    if (!f) throw config_error("cannot read " + path);
    std::string line;
    std::getline(f, line);  // header
    CountHistogram h;
    h.params = params;
    h.shots = params.shots;
    std::vector<double> starts;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ','))
            throw config_error(path + ": malformed CSV line '" + line + "'");
        starts.push_back(std::stod(a));
        h.counts.push_back(std::stod(b));
    }
    if (starts.size() < 2) throw config_error(path + ": need at least 2 bins");
    double width = starts[1] - starts[0];
    if (!(width > 0.0)) throw config_error(path + ": bin starts must increase");
    h.bin_edges_ns = starts;
    h.bin_edges_ns.push_back(starts.back() + width);
    h.params.bin_ns = width;
    return h;
}

struct SweepRow {
    double alphaL = 0.0;
    double F = 0.0;
    double eta_numeric = 0.0;
    double eta_analytic = 0.0;
    std::string status = "ok";
};

inline void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
    std::ofstream f(path);
    if (!f) throw config_error("cannot write " + path);
    f << "alphaL,F,eta_numeric,eta_analytic,status\n";
    for (const auto& r : rows)
        f << fmt_num(r.alphaL) << ',' << fmt_num(r.F) << ',' << fmt_num(r.eta_numeric) << ','
          << fmt_num(r.eta_analytic) << ',' << r.status << '\n';
}

} // namespace afc
