#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aqec/experiment.hpp"

namespace aqec {

// Key/value groups parsed from the experiment configuration file. Format:
// [section] headers, key = value lines, # comments, comma-separated lists.
class ConfigFile {
  public:
    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_string(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    long get_long(const std::string& section, const std::string& key, long fallback) const;
    std::vector<double> get_list(const std::string& section, const std::string& key) const;

    void set(const std::string& section, const std::string& key, const std::string& value);
    const std::string& raw_text() const { return raw_; }

  private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
    std::string raw_;
};

// Pulse block of the config (frequencies in lab units, durations in us).
struct PulseConfig {
    double mode_freq_hz = 1.3e6;
    double detuning_hz = 15e3;
    double eta = 0.056;
    double ramp_s = 120e-6;
    double total_s = 620e-6;
    Eigen::Index fock_levels = 6;
    double extra_stark_z_hz = 0.0;
};

// Full experiment settings assembled from the file with defaults matching
// the headline injected-noise run.
struct RunSettings {
    ExperimentConfig experiment;
    PulseConfig pulse;
    double spin = 2.5;
};

RunSettings load_run_settings(const ConfigFile& file);

QubitKind parse_qubit_kind(const std::string& name);
std::string qubit_kind_name(QubitKind kind);

// Spin given as "5/2" or "2.5".
double parse_spin(const std::string& text);

} // namespace aqec
