#include "aqec/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace aqec {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_string(buffer.str());
}

ConfigFile ConfigFile::parse_string(const std::string& text) {
    ConfigFile cfg;
    cfg.raw_ = text;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config: bad section header at line " +
                                            std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key = value at line " +
                                        std::to_string(lineno));
        cfg.sections_[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return cfg;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::string ConfigFile::get(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return fallback;
    const auto k = s->second.find(key);
    return k == s->second.end() ? fallback : k->second;
}

double ConfigFile::get_double(const std::string& section, const std::string& key,
                              double fallback) const {
    const auto text = get(section, key, "");
    if (text.empty()) return fallback;
    try {
        return std::stod(text);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad number for " + section + "." + key);
    }
}

long ConfigFile::get_long(const std::string& section, const std::string& key,
                          long fallback) const {
    const auto text = get(section, key, "");
    if (text.empty()) return fallback;
    try {
        return std::stol(text);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad integer for " + section + "." + key);
    }
}

std::vector<double> ConfigFile::get_list(const std::string& section,
                                         const std::string& key) const {
    std::vector<double> out;
    std::string text = get(section, key, "");
    if (text.empty()) return out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

void ConfigFile::set(const std::string& section, const std::string& key,
                     const std::string& value) {
    sections_[section][key] = value;
}

QubitKind parse_qubit_kind(const std::string& name) {
    if (name == "physical") return QubitKind::physical;
    if (name == "logical-plain") return QubitKind::logical_plain;
    if (name == "logical-aqec") return QubitKind::logical_aqec;
    if (name == "auxiliary") return QubitKind::auxiliary;
    throw std::invalid_argument("config: unknown configuration '" + name + "'");
}

std::string qubit_kind_name(QubitKind kind) {
    switch (kind) {
        case QubitKind::physical: return "physical";
        case QubitKind::logical_plain: return "logical-plain";
        case QubitKind::logical_aqec: return "logical-aqec";
        case QubitKind::auxiliary: return "auxiliary";
    }
    return "unknown";
}

double parse_spin(const std::string& text) {
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        const double num = std::stod(text.substr(0, slash));
        const double den = std::stod(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("spin: division by zero");
        return num / den;
    }
    return std::stod(text);
}

RunSettings load_run_settings(const ConfigFile& file) {
    RunSettings s;
    s.spin = parse_spin(file.get("code", "spin", "5/2"));

    auto& e = s.experiment;
    e.kappa_t = file.get_double("code", "kappa_t", 0.0);

    const double g = file.get_double("noise", "g_factor", constants::default_g_factor);
    e.noise.sigma_b_tesla = file.get_double("noise", "field_sigma_nt", 16.0) * 1e-9;
    e.noise.update_interval_s = file.get_double("noise", "update_interval_ms", 100.0) * 1e-3;
    e.noise.sensitivity = field_to_detuning(1.0, 1.0, g);
    e.regime = file.get("noise", "regime", "quasi-static") == "random-walk"
                   ? NoiseRegime::random_walk
                   : NoiseRegime::quasi_static;

    auto& imp = e.imperfections;
    imp.nbar = file.get_double("noise", "nbar", 0.0);
    imp.heating_quanta_per_s = file.get_double("noise", "heating_quanta_per_s", 0.0);
    // Peak-to-peak drift maps to a Gaussian sigma of pp/4.
    imp.mode_drift_sigma_rad_s =
        constants::hz_to_angular(file.get_double("noise", "mode_drift_pp_hz", 0.0)) * 0.25;
    imp.intensity_rel_sigma = file.get_double("noise", "intensity_rel_sigma", 0.0);
    imp.stark_phase_rad = file.get_double("noise", "stark_phase_rad", 0.0);

    e.tau_ec = file.get_double("cycle", "tau_ec_ms", 0.62) * 1e-3;
    e.tau_idle = file.get_double("cycle", "tau_idle_ms", 0.12) * 1e-3;
    const double omega_hz = file.get_double("cycle", "omega_ec_hz", 0.0);
    e.omega_ec = omega_hz > 0 ? constants::hz_to_angular(omega_hz) : 0.0;
    e.fock_levels = static_cast<Eigen::Index>(file.get_long("cycle", "fock_levels", 6));

    e.configuration = parse_qubit_kind(file.get("experiment", "configuration", "logical-aqec"));
    for (double t_ms : file.get_list("experiment", "time_grid_ms"))
        e.time_grid.push_back(t_ms * 1e-3);
    e.trajectories = static_cast<int>(file.get_long("experiment", "trajectories", 1000));
    e.shots = file.get_long("experiment", "shots", 0);
    e.master_seed = static_cast<std::uint64_t>(file.get_long("experiment", "seed", 1));
    e.bootstrap_resamples =
        static_cast<int>(file.get_long("experiment", "bootstrap_resamples", 1000));
    e.threads = static_cast<int>(file.get_long("experiment", "threads", 1));

    auto& p = s.pulse;
    p.mode_freq_hz = file.get_double("pulse", "mode_freq_mhz", 1.3) * 1e6;
    p.detuning_hz = file.get_double("pulse", "detuning_khz", 15.0) * 1e3;
    p.eta = file.get_double("pulse", "eta", 0.056);
    p.ramp_s = file.get_double("pulse", "ramp_us", 120.0) * 1e-6;
    p.total_s = file.get_double("pulse", "total_us", 620.0) * 1e-6;
    p.fock_levels = static_cast<Eigen::Index>(file.get_long("pulse", "fock_levels", 6));
    p.extra_stark_z_hz = file.get_double("pulse", "extra_stark_hz", 0.0);
    return s;
}

} // namespace aqec
