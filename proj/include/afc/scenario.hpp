#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "afc/detection.hpp"
#include "afc/echo.hpp"
#include "afc/ensemble.hpp"
#include "afc/grid.hpp"
#include "afc/pulses.hpp"
#include "afc/spectral.hpp"
#include "afc/transfer.hpp"

namespace afc {

// ---------------------------------------------------------------------------
// Flat "key = value" config with [sections]. '#' and ';' start comments.
// ---------------------------------------------------------------------------

using ConfigMap = std::map<std::string, std::map<std::string, std::string>>;

namespace detail {

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace detail

inline ConfigMap parse_config(const std::string& text) {
    ConfigMap cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw config_error("config line " + std::to_string(lineno) + ": unterminated section");
            section = detail::trim(line.substr(1, line.size() - 2));
            cfg[section];
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = detail::trim(line.substr(0, eq));
        std::string val = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw config_error("config line " + std::to_string(lineno) + ": empty key");
        cfg[section][key] = val;
    }
    return cfg;
}

inline ConfigMap load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw config_error("cannot open config file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

class ConfigView {
public:
    ConfigView(const ConfigMap& cfg, std::string section) : cfg_(cfg), section_(std::move(section)) {}

    bool has(const std::string& key) const {
        auto s = cfg_.find(section_);
        return s != cfg_.end() && s->second.count(key) > 0;
    }
    std::string raw(const std::string& key) const {
        auto s = cfg_.find(section_);
        if (s == cfg_.end() || !s->second.count(key))
            throw config_error("missing config key " + section_ + "." + key);
        return s->second.at(key);
    }
    double num(const std::string& key, std::optional<double> def = std::nullopt) const {
        if (!has(key)) {
            if (def) return *def;
            throw config_error("missing config key " + section_ + "." + key);
        }
        try {
            std::size_t pos = 0;
            double v = std::stod(raw(key), &pos);
            if (pos != raw(key).size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw config_error("config key " + section_ + "." + key + ": not a number: '" +
                               raw(key) + "'");
        }
    }
    std::uint64_t uint(const std::string& key, std::optional<std::uint64_t> def = std::nullopt) const {
        if (!has(key)) {
            if (def) return *def;
            throw config_error("missing config key " + section_ + "." + key);
        }
        try {
            return std::stoull(raw(key));
        } catch (const std::exception&) {
            throw config_error("config key " + section_ + "." + key + ": not an integer: '" +
                               raw(key) + "'");
        }
    }
    std::string str(const std::string& key, std::optional<std::string> def = std::nullopt) const {
        if (!has(key)) {
            if (def) return *def;
            throw config_error("missing config key " + section_ + "." + key);
        }
        return raw(key);
    }
    bool flag(const std::string& key, bool def) const {
        if (!has(key)) return def;
        std::string v = raw(key);
        std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
        if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
        if (v == "off" || v == "false" || v == "0" || v == "no") return false;
        throw config_error("config key " + section_ + "." + key + ": expected on/off, got '" + v + "'");
    }

private:
    const ConfigMap& cfg_;
    std::string section_;
};

// ---------------------------------------------------------------------------
// Scenario: everything one run needs, cross-validated before any work starts.
// ---------------------------------------------------------------------------

struct PulseSpec {
    PulseShape shape = PulseShape::gaussian;
    double fwhm_ns = 200.0;
    int supergauss_n = 1;
    double mean_photons = 0.1;
    double carrier_detuning_mhz = 0.0;
    double phase_rad = 0.0;
    std::optional<double> center_ns;  // default: 0 for storage, echo time for probe
    double sech_beta_per_ns = 0.01;
    double sech_mu = 0.0;
};

struct InterferenceSpec {
    bool synthetic = false;       // synthetic two-wave run instead of full propagation
    double amplitude_ratio = 1.0; // I2/I1 for the synthetic mode
    double beat_freq_mhz = 2.3;
};

struct SweepAxis {
    std::string param;  // alphaL | F | delta | gamma
    double lo = 0.0, hi = 0.0;
    std::size_t n = 0;
};

struct Scenario {
    std::string name = "scenario";
    MaterialParams material;
    CombParams comb;
    bool comb_enabled = true;
    PulseSpec storage;
    std::optional<PulseSpec> probe;
    DetectorParams detector;
    FrequencyGrid fgrid;
    double time_start_ns = 0.0;
    bool time_start_auto = true;
    bool kk_phase = true;
    bool decoherence = true;
    std::uint64_t seed = 12345;
    std::string out_dir = "runs";
    std::optional<double> inject_eta;     // counts pipeline injection
    std::optional<SweepAxis> axis1, axis2;
    InterferenceSpec interference;

    TimeGrid time_grid() const { return paired_time_grid(fgrid, time_start_ns, time_start_auto); }
    double echo_time_ns() const { return 1000.0 / comb.delta_mhz; }
    double T2_for_echo() const { return decoherence ? material.optical_T2_us : 0.0; }

    Pulse make_pulse(const PulseSpec& s, double default_center_ns) const {
        TimeGrid tg = time_grid();
        double center = s.center_ns.value_or(default_center_ns);
        switch (s.shape) {
            case PulseShape::gaussian:
                return gaussian_pulse(tg, s.fwhm_ns, s.mean_photons, s.carrier_detuning_mhz,
                                      s.phase_rad, center);
            case PulseShape::supergaussian:
                return supergaussian_pulse(tg, s.fwhm_ns, s.supergauss_n, s.mean_photons,
                                           s.carrier_detuning_mhz, s.phase_rad, center);
            case PulseShape::sechyp:
                return sechyp_pulse(tg, s.carrier_detuning_mhz, s.sech_beta_per_ns, s.sech_mu,
                                    s.mean_photons, center);
        }
        throw config_error("unknown pulse shape");
    }

    Pulse storage_pulse() const { return make_pulse(storage, 0.0); }
    Pulse probe_pulse() const {
        if (!probe) throw config_error("scenario: probe_pulse section required but missing");
        return make_pulse(*probe, echo_time_ns());
    }

    SpectralProfile profile() const {
        if (!comb_enabled) return build_pit(material, fgrid, comb.background_alphaL);
        return build_comb(comb, material, fgrid);
    }

    // Cross-module consistency; throws config_error naming the offending keys.
    void validate() const {
        material.validate();
        detector.validate();
        if (!is_pow2(fgrid.n_points))
            throw config_error("grid.n_points must be a power of two for FFT propagation");
        SpectralProfile prof = profile();  // validates comb constraints
        TimeGrid tg = time_grid();

        double bw = 441.271 / storage.fwhm_ns;  // transform-limited intensity FWHM, MHz
        double occupied = std::abs(storage.carrier_detuning_mhz) + 3.0 * bw;
        if (prof.comb) occupied = std::max(occupied, 0.5 * prof.comb->extent_mhz());
        if (fgrid.span_mhz < 4.0 * occupied)
            throw config_error("grid.span_mhz = " + std::to_string(fgrid.span_mhz) +
                               " too small; need >= 4 x occupied bandwidth = " +
                               std::to_string(4.0 * occupied) + " MHz");

        if (comb_enabled) {
            double t_echo = echo_time_ns();
            if (storage.fwhm_ns >= 0.5 * t_echo)
                throw config_error("storage_pulse.fwhm_ns = " + std::to_string(storage.fwhm_ns) +
                                   " cannot be separated from an echo at 1/delta = " +
                                   std::to_string(t_echo) + " ns (windows would overlap)");
            double storage_center = storage.center_ns.value_or(0.0);
            if (tg.t_start_ns > storage_center - 3.0 * storage.fwhm_ns ||
                tg.t_end_ns() < storage_center + 2.5 * t_echo)
                throw config_error("time grid does not cover [-3 fwhm, 2.5/delta] around the "
                                   "storage pulse; widen grid.span or lower grid.time_start_ns");
        }
        (void)storage_pulse();  // truncation check
        if (probe) (void)probe_pulse();
    }
};

// ---------------------------------------------------------------------------
// Presets. fig3 and fig3-gamma200 are the two published linewidth variants of
// the same storage run; fig4 is the interference configuration.
// ---------------------------------------------------------------------------

inline const std::map<std::string, std::string>& preset_texts() {
    static const std::map<std::string, std::string> presets = {
        {"fig3", R"(# 200 ns storage pulse through a delta = 1.2 MHz comb (gamma = 300 kHz)
[material]
pit_width_mhz = 18
excited_splitting_limit_mhz = 4.6
probe_window_offset_mhz = 2.3

[comb]
delta_mhz = 1.2
gamma_fwhm_mhz = 0.3
alphaL = 6
peak_shape = gaussian
n_peaks = 0

[grid]
span_mhz = 40
n_points = 16384

[storage_pulse]
shape = gaussian
fwhm_ns = 200
mean_photons = 0.1

[detector]
shots = 2000
)"},
        {"fig3-gamma200", R"(# fig3 variant with gamma = 200 kHz (finesse 6)
[material]
pit_width_mhz = 18
excited_splitting_limit_mhz = 4.6
probe_window_offset_mhz = 2.3

[comb]
delta_mhz = 1.2
gamma_fwhm_mhz = 0.2
alphaL = 6
peak_shape = gaussian
n_peaks = 0

[grid]
span_mhz = 40
n_points = 16384

[storage_pulse]
shape = gaussian
fwhm_ns = 200
mean_photons = 0.1

[detector]
shots = 2000
)"},
        {"fig4", R"(# interference run: delta = 1 MHz comb, 420 ns storage, super-Gaussian probe
# riding the transparent window 2.3 MHz above the comb
[material]
pit_width_mhz = 18
excited_splitting_limit_mhz = 4.6
probe_window_offset_mhz = 2.3

[comb]
delta_mhz = 1.0
gamma_fwhm_mhz = 0.2
alphaL = 6
peak_shape = gaussian
n_peaks = 0

[grid]
span_mhz = 40
n_points = 16384

[storage_pulse]
shape = gaussian
fwhm_ns = 420
mean_photons = 0.1

[probe_pulse]
shape = supergaussian
supergauss_n = 7
fwhm_ns = 840
mean_photons = 0.1
carrier_detuning_mhz = 2.3

[detector]
shots = 2000
)"},
        {"empty-pit", R"(# reference run: no comb, pulse crosses the transparent pit unchanged
[material]
pit_width_mhz = 18

[comb]
enabled = off
delta_mhz = 1.2
gamma_fwhm_mhz = 0.3
alphaL = 0

[grid]
span_mhz = 40
n_points = 16384

[storage_pulse]
shape = gaussian
fwhm_ns = 200
mean_photons = 0.1
)"},
        {"forward-cap", R"(# idealized forward-retrieval cap sweep at finesse 40: square teeth, wide
# splitting limit, no reserved probe window
[material]
pit_width_mhz = 18
excited_splitting_limit_mhz = 20
probe_window_offset_mhz = 0

[comb]
delta_mhz = 1.5
gamma_fwhm_mhz = 0.0375
alphaL = 60
peak_shape = square
n_peaks = 7

[grid]
span_mhz = 48
n_points = 16384

[storage_pulse]
shape = gaussian
fwhm_ns = 150
mean_photons = 0.1

[sweep]
axis = alphaL
lo = 30
hi = 165
n = 28
)"},
        {"ideal", R"(# equal-amplitude synthetic two-wave interference, visibility 1
[interference]
mode = synthetic
amplitude_ratio = 1.0
beat_freq_mhz = 2.3

[grid]
span_mhz = 40
n_points = 16384

[material]
pit_width_mhz = 18

[comb]
delta_mhz = 1.0
gamma_fwhm_mhz = 0.2
alphaL = 6

[storage_pulse]
shape = gaussian
fwhm_ns = 420
mean_photons = 0.1
)"},
        {"mismatched", R"(# synthetic two-wave interference with I2 = 0.25 I1, visibility 0.8
[interference]
mode = synthetic
amplitude_ratio = 0.25
beat_freq_mhz = 2.3

[grid]
span_mhz = 40
n_points = 16384

[material]
pit_width_mhz = 18

[comb]
delta_mhz = 1.0
gamma_fwhm_mhz = 0.2
alphaL = 6

[storage_pulse]
shape = gaussian
fwhm_ns = 420
mean_photons = 0.1
)"},
    };
    return presets;
}

inline PulseSpec parse_pulse_spec(const ConfigView& v) {
    PulseSpec s;
    s.shape = pulse_shape_from_string(v.str("shape", std::string("gaussian")));
    s.fwhm_ns = v.num("fwhm_ns", 200.0);
    s.supergauss_n = static_cast<int>(v.num("supergauss_n", 1.0));
    s.mean_photons = v.num("mean_photons", 0.1);
    s.carrier_detuning_mhz = v.num("carrier_detuning_mhz", 0.0);
    s.phase_rad = v.num("phase_rad", 0.0);
    if (v.has("center_ns")) s.center_ns = v.num("center_ns");
    s.sech_beta_per_ns = v.num("sech_beta_per_ns", 0.01);
    s.sech_mu = v.num("sech_mu", 0.0);
    return s;
}

inline Scenario scenario_from_config(const ConfigMap& cfg, const std::string& name = "scenario") {
    Scenario sc;
    sc.name = name;

    ConfigView mat(cfg, "material");
    sc.material.inhomogeneous_fwhm_mhz = mat.num("inhomogeneous_fwhm_mhz", 5000.0);
    sc.material.inhomogeneous_alphaL = mat.num("inhomogeneous_alphaL", 6.0);
    sc.material.pit_width_mhz = mat.num("pit_width_mhz", 18.0);
    sc.material.excited_splitting_limit_mhz = mat.num("excited_splitting_limit_mhz", 4.6);
    sc.material.optical_T2_us = mat.num("optical_T2_us", 100.0);
    sc.material.probe_window_offset_mhz = mat.num("probe_window_offset_mhz", 2.3);

    ConfigView comb(cfg, "comb");
    sc.comb_enabled = comb.flag("enabled", true);
    sc.comb.delta_mhz = comb.num("delta_mhz", 1.2);
    sc.comb.gamma_fwhm_mhz = comb.num("gamma_fwhm_mhz", 0.3);
    sc.comb.alphaL = comb.num("alphaL", 6.0);
    sc.comb.n_peaks = static_cast<std::size_t>(comb.num("n_peaks", 0.0));
    sc.comb.peak_shape = peak_shape_from_string(comb.str("peak_shape", std::string("gaussian")));
    sc.comb.background_alphaL = comb.num("background_alphaL", 0.0);

    ConfigView grid(cfg, "grid");
    sc.fgrid = FrequencyGrid(grid.num("center_mhz", 0.0), grid.num("span_mhz", 40.0),
                             static_cast<std::size_t>(grid.num("n_points", 16384.0)));
    if (grid.has("time_start_ns")) {
        sc.time_start_auto = false;
        sc.time_start_ns = grid.num("time_start_ns");
    }

    sc.storage = parse_pulse_spec(ConfigView(cfg, "storage_pulse"));
    if (cfg.count("probe_pulse")) sc.probe = parse_pulse_spec(ConfigView(cfg, "probe_pulse"));

    ConfigView det(cfg, "detector");
    sc.detector.quantum_efficiency = det.num("quantum_efficiency", 0.075);
    sc.detector.pinhole_efficiency = det.num("pinhole_efficiency", 0.35);
    sc.detector.gate_ns = det.num("gate_ns", 102.4);
    sc.detector.dark_rate_hz = det.num("dark_rate_hz", 150.0);
    sc.detector.shots = det.uint("shots", 2000);
    sc.detector.rep_rate_khz = det.num("rep_rate_khz", 3.0);
    sc.detector.bin_ns = det.num("bin_ns", 25.6);

    ConfigView run(cfg, "run");
    sc.seed = run.uint("seed", 12345);
    sc.out_dir = run.str("out_dir", std::string("runs"));
    sc.kk_phase = run.flag("kk_phase", true);
    sc.decoherence = run.flag("decoherence", true);
    if (run.has("inject_eta")) sc.inject_eta = run.num("inject_eta");
    sc.detector.seed = sc.seed;

    if (cfg.count("sweep")) {
        ConfigView sw(cfg, "sweep");
        SweepAxis ax;
        ax.param = sw.str("axis");
        ax.lo = sw.num("lo");
        ax.hi = sw.num("hi");
        ax.n = static_cast<std::size_t>(sw.num("n"));
        sc.axis1 = ax;
        if (sw.has("axis2")) {
            SweepAxis ax2;
            ax2.param = sw.str("axis2");
            ax2.lo = sw.num("lo2");
            ax2.hi = sw.num("hi2");
            ax2.n = static_cast<std::size_t>(sw.num("n2"));
            sc.axis2 = ax2;
        }
    }
    if (cfg.count("interference")) {
        ConfigView itf(cfg, "interference");
        sc.interference.synthetic = itf.str("mode", std::string("propagation")) == "synthetic";
        sc.interference.amplitude_ratio = itf.num("amplitude_ratio", 1.0);
        sc.interference.beat_freq_mhz = itf.num("beat_freq_mhz", 2.3);
    }
    return sc;
}

inline Scenario load_preset(const std::string& name) {
    const auto& p = preset_texts();
    auto it = p.find(name);
    if (it == p.end()) {
        std::string known;
        for (const auto& [k, _] : p) known += (known.empty() ? "" : ", ") + k;
        throw config_error("unknown preset '" + name + "' (available: " + known + ")");
    }
    return scenario_from_config(parse_config(it->second), name);
}

} // namespace afc
