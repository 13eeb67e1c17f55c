#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace aqec {

// Numbers serialize with 12 significant digits everywhere.
std::string format_number(double value);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};
void write_csv(const std::string& path, const CsvTable& table);

void write_text(const std::string& path, const std::string& text);

std::uint64_t fnv1a64(const std::string& bytes);

// Reproducibility record written next to every output set.
struct RunManifest {
    std::string command;
    std::uint64_t config_hash = 0;
    std::uint64_t master_seed = 0;
    std::string tool_version;
    std::string timestamp;
    std::vector<std::string> outputs;
};
void write_manifest(const std::string& directory, const RunManifest& manifest);

// Minimal SVG scatter/line plot: one series of points with an optional
// smooth curve overlay.
struct PlotSeries {
    std::vector<double> x, y;
    std::string color = "#2266aa";
    bool line = false;
};
void write_svg_plot(const std::string& path, const std::vector<PlotSeries>& series,
                    const std::string& x_label, const std::string& y_label);

inline constexpr const char* tool_version = "1.0.0";

} // namespace aqec
