#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "aqec/config.hpp"
#include "aqec/io.hpp"

using namespace aqec;

TEST_CASE("config parsing") {
    const std::string text = R"(
# headline run
[noise]
field_sigma_nt = 16.0
update_interval_ms = 100

[experiment]
configuration = logical-aqec
time_grid_ms = 0.74, 1.48, 2.96
trajectories = 250
)";
    const auto cfg = ConfigFile::parse_string(text);
    CHECK(cfg.get_double("noise", "field_sigma_nt", 0.0) == doctest::Approx(16.0));
    CHECK(cfg.get("experiment", "configuration", "") == "logical-aqec");
    CHECK(cfg.get_list("experiment", "time_grid_ms").size() == 3);
    CHECK(cfg.get_double("missing", "key", 7.5) == doctest::Approx(7.5));
    CHECK(cfg.has("noise", "update_interval_ms"));
    CHECK_FALSE(cfg.has("noise", "nbar"));

    CHECK_THROWS_AS(ConfigFile::parse_string("[bad\nx = 1"), std::invalid_argument);
    CHECK_THROWS_AS(ConfigFile::parse_string("keyonly\n"), std::invalid_argument);
    CHECK_THROWS_AS(ConfigFile::parse_string("[n]\nx = abc\n").get_double("n", "x", 0),
                    std::invalid_argument);
}

TEST_CASE("run settings defaults follow the headline parameters") {
    const auto s = load_run_settings(ConfigFile::parse_string(""));
    CHECK(s.spin == doctest::Approx(2.5));
    CHECK(s.experiment.tau_ec == doctest::Approx(0.62e-3));
    CHECK(s.experiment.tau_idle == doctest::Approx(0.12e-3));
    CHECK(s.experiment.noise.sigma_b_tesla == doctest::Approx(16e-9));
    CHECK(s.experiment.noise.update_interval_s == doctest::Approx(0.1));
    CHECK(s.pulse.mode_freq_hz == doctest::Approx(1.3e6));
    CHECK(s.pulse.detuning_hz == doctest::Approx(15e3));
    CHECK(s.pulse.eta == doctest::Approx(0.056));
    // sensitivity defaults to g = 6/5
    CHECK(s.experiment.noise.sensitivity ==
          doctest::Approx(field_to_detuning(1.0, 1.0)).epsilon(1e-12));
}

TEST_CASE("spin strings") {
    CHECK(parse_spin("5/2") == doctest::Approx(2.5));
    CHECK(parse_spin("2.5") == doctest::Approx(2.5));
    CHECK(parse_spin("3") == doctest::Approx(3.0));
    CHECK_THROWS(parse_spin("5/0"));
}

TEST_CASE("number formatting and hashing") {
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(fnv1a64("") == 14695981039346656037ULL);
    CHECK(fnv1a64("a") != fnv1a64("b"));
}

TEST_CASE("csv and manifest round out an output directory") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "aqec_io_test";
    fs::create_directories(dir);

    CsvTable table;
    table.header = {"x", "y"};
    table.rows = {{1.0, 0.25}, {2.0, 1.0 / 3.0}};
    write_csv((dir / "t.csv").string(), table);
    std::ifstream in(dir / "t.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "x,y");
    std::getline(in, line);
    CHECK(line == "1,0.25");
    std::getline(in, line);
    CHECK(line == "2,0.333333333333");

    RunManifest m;
    m.command = "test";
    m.config_hash = 42;
    m.master_seed = 7;
    m.tool_version = tool_version;
    m.timestamp = "2026-01-01T00:00:00Z";
    m.outputs = {"t.csv"};
    write_manifest(dir.string(), m);
    CHECK(fs::exists(dir / "manifest.json"));

    write_svg_plot((dir / "p.svg").string(), {{.x = {0, 1}, .y = {0, 1}}}, "t", "f");
    CHECK(fs::exists(dir / "p.svg"));
    fs::remove_all(dir);
}
