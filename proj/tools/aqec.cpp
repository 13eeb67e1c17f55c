#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>

#include "aqec/config.hpp"
#include "aqec/io.hpp"
#include "aqec/pulse.hpp"
#include "aqec/rng.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using namespace aqec;

std::string now_iso8601() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
    return buf;
}

json amplitude_map(const SpinManifold& manifold, const CVector& v) {
    json j = json::object();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) < 1e-14) continue;
        std::ostringstream key;
        const int twice_m = -manifold.twice_s() + 2 * static_cast<int>(i);
        key << twice_m / 2.0;
        j[key.str()] = {{"re", v(i).real()}, {"im", v(i).imag()}};
    }
    return j;
}

json chi_to_json(const ChiMatrix& chi) {
    json re = json::array(), im = json::array();
    for (int r = 0; r < 4; ++r) {
        json rrow = json::array(), irow = json::array();
        for (int c = 0; c < 4; ++c) {
            rrow.push_back(chi.mat(r, c).real());
            irow.push_back(chi.mat(r, c).imag());
        }
        re.push_back(rrow);
        im.push_back(irow);
    }
    return {{"real", re}, {"imag", im}};
}

struct CommonOptions {
    std::string config_path;
    std::string out_dir = "aqec-out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
    std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--config", opt.config_path, "configuration file");
    cmd->add_option("--out", opt.out_dir, "output directory");
    cmd->add_option("--seed", opt.seed, "master seed")->each([&](const std::string&) {
        opt.seed_set = true;
    });
    cmd->add_option("--threads", opt.threads, "worker threads");
    cmd->add_option("--format", opt.format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
}

RunSettings settings_from(const CommonOptions& opt, std::uint64_t* config_hash) {
    ConfigFile file = opt.config_path.empty() ? ConfigFile::parse_string("")
                                              : ConfigFile::parse_file(opt.config_path);
    *config_hash = fnv1a64(file.raw_text());
    RunSettings s = load_run_settings(file);
    if (opt.seed_set) s.experiment.master_seed = opt.seed;
    if (opt.threads > 0) s.experiment.threads = opt.threads;
    return s;
}

void finish_manifest(const CommonOptions& opt, const std::string& command,
                     std::uint64_t config_hash, std::uint64_t seed,
                     std::vector<std::string> outputs) {
    RunManifest m;
    m.command = command;
    m.config_hash = config_hash;
    m.master_seed = seed;
    m.tool_version = tool_version;
    m.timestamp = now_iso8601();
    m.outputs = std::move(outputs);
    write_manifest(opt.out_dir, m);
}

std::vector<CMatrix> build_error_set(const std::string& csv, const SpinManifold& manifold) {
    const auto ops = spin_operators(manifold);
    std::vector<CMatrix> errors;
    std::istringstream in(csv);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (tok == "I") errors.push_back(CMatrix::Identity(manifold.dim(), manifold.dim()));
        else if (tok == "Sz") errors.push_back(ops.sz);
        else if (tok == "Sz2") errors.push_back((ops.sz * ops.sz).eval());
        else if (tok == "Sp") errors.push_back(ops.sp);
        else if (tok == "Sm") errors.push_back(ops.sm);
        else throw CLI::ValidationError("--errors", "unknown operator " + tok);
    }
    if (errors.empty()) throw CLI::ValidationError("--errors", "empty error set");
    return errors;
}

int cmd_codewords(const CommonOptions& opt, const std::string& spin_text, double kappa_t) {
    const CodeSpec code = build_code(parse_spin(spin_text), kappa_t);
    json j;
    j["spin"] = spin_text;
    j["kappa_t"] = kappa_t;
    j["zero_L"] = amplitude_map(code.manifold, code.zero_l);
    j["one_L"] = amplitude_map(code.manifold, code.one_l);
    j["zero_E"] = amplitude_map(code.manifold, code.zero_e);
    j["one_E"] = amplitude_map(code.manifold, code.one_e);
    std::cout << j.dump(2) << "\n";
    if (!opt.out_dir.empty()) {
        fs::create_directories(opt.out_dir);
        write_text(opt.out_dir + "/codewords.json", j.dump(2) + "\n");
        finish_manifest(opt, "codewords", fnv1a64(""), 0, {"codewords.json"});
    }
    return 0;
}

int cmd_kl_check(const CommonOptions& opt, const std::string& spin_text, double kappa_t,
                 const std::string& errors_csv, double tol) {
    const SpinManifold manifold = SpinManifold::from_spin(parse_spin(spin_text));
    KLReport report;
    json j;
    try {
        const CodeSpec code = build_code(manifold, kappa_t);
        report = kl_verify(code, build_error_set(errors_csv, manifold), tol);
    } catch (const unsupported_manifold& e) {
        j["pass"] = false;
        j["reason"] = e.what();
        std::cout << j.dump(2) << "\n";
        return 2;
    }
    j["pass"] = report.pass;
    j["max_violation"] = report.max_violation;
    json alpha = json::array();
    for (Eigen::Index r = 0; r < report.alpha.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < report.alpha.cols(); ++c)
            row.push_back({{"re", report.alpha(r, c).real()},
                           {"im", report.alpha(r, c).imag()}});
        alpha.push_back(row);
    }
    j["alpha"] = alpha;
    std::cout << j.dump(2) << "\n";
    return report.pass ? 0 : 2;
}

int cmd_code_search(const CommonOptions& opt, const std::string& spin_text, double tol) {
    const SpinManifold manifold = SpinManifold::from_spin(parse_spin(spin_text));
    const auto codes = code_search(manifold, tol);
    json j;
    j["spin"] = spin_text;
    j["count"] = codes.size();
    json list = json::array();
    for (const auto& code : codes) {
        json levels = json::array();
        for (auto lvl : code.levels)
            levels.push_back(manifold.m(lvl));
        list.push_back({{"levels_m", levels},
                        {"zero_L", amplitude_map(manifold, code.zero_l)},
                        {"one_L", amplitude_map(manifold, code.one_l)}});
    }
    j["codes"] = list;
    std::cout << j.dump(2) << "\n";
    if (!opt.out_dir.empty()) {
        fs::create_directories(opt.out_dir);
        write_text(opt.out_dir + "/code_search.json", j.dump(2) + "\n");
        finish_manifest(opt, "code-search", fnv1a64(""), 0, {"code_search.json"});
    }
    return 0;
}

int cmd_cycle(const CommonOptions& opt) {
    std::uint64_t hash = 0;
    const RunSettings s = settings_from(opt, &hash);
    fs::create_directories(opt.out_dir);

    const double f_err = cycle_process_fidelity(s.experiment, s.experiment.imperfections, true);
    const double f_log = cycle_process_fidelity(s.experiment, s.experiment.imperfections, false);

    const double t_max = 2.0 * s.experiment.tau_ec;
    const auto dynamics = cycle_dynamics(s.experiment, 161, t_max);
    CsvTable table;
    table.header = {"time_us", "p_logical", "p_error", "p_phonon_excited"};
    for (const auto& row : dynamics)
        table.rows.push_back({row.time_s * 1e6, row.p_logical, row.p_error,
                              row.p_phonon_excited});
    write_csv(opt.out_dir + "/cycle_dynamics.csv", table);

    json j;
    j["f_chi_error_start"] = f_err;
    j["f_chi_logical_start"] = f_log;
    write_text(opt.out_dir + "/cycle_summary.json", j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    finish_manifest(opt, "cycle", hash, s.experiment.master_seed,
                    {"cycle_dynamics.csv", "cycle_summary.json"});
    return 0;
}

int cmd_pulse_validate(const CommonOptions& opt) {
    std::uint64_t hash = 0;
    const RunSettings s = settings_from(opt, &hash);
    fs::create_directories(opt.out_dir);

    const double omega_m = constants::hz_to_angular(s.pulse.mode_freq_hz);
    const double delta = constants::hz_to_angular(s.pulse.detuning_hz);
    const double target = s.experiment.omega_ec > 0 ? s.experiment.omega_ec
                                                    : constants::pi / s.pulse.total_s;
    PulseParams p = solve_tones(target, omega_m, delta, s.pulse.eta, s.pulse.ramp_s,
                                s.pulse.total_s, s.pulse.fock_levels);
    p.extra_stark_z = constants::hz_to_angular(s.pulse.extra_stark_z_hz);

    const auto validation = validate_effective(p, 1e-8);

    // Fig. 3d-style scan: pulse stretched to 800/620 of the nominal length
    // with ramps at both ends, populations sampled along the way.
    PulseParams scan = p;
    scan.total = s.pulse.total_s * 800.0 / 620.0;
    const int samples = 100;
    std::vector<double> times(samples);
    for (int k = 0; k < samples; ++k) times[k] = (k + 1) * scan.total / samples;
    const auto nf = scan.fock_levels;
    CVector err0 = CVector::Zero(pulse_levels * nf);
    err0(lvl_0e * nf + 0) = 1.0;
    CVector log0 = CVector::Zero(pulse_levels * nf);
    log0(lvl_0l * nf + 0) = 1.0;
    const auto dyn_err = integrate_path(scan, err0, times, 1e-8);
    const auto dyn_log = integrate_path(scan, log0, times, 1e-8);

    CsvTable table;
    table.header = {"time_us", "err_start_p_logical", "err_start_p_error",
                    "err_start_p_phonon", "log_start_p_logical"};
    double peak_t = 0, peak_p = -1;
    double min_log = 1.0;
    for (int k = 0; k < samples; ++k) {
        auto pops = [&](const CVector& psi, Eigen::Index lvl) {
            double s2 = 0;
            for (Eigen::Index n = 0; n < nf; ++n) s2 += std::norm(psi(lvl * nf + n));
            return s2;
        };
        auto phonon = [&](const CVector& psi) {
            double s2 = 0;
            for (Eigen::Index l = 0; l < pulse_levels; ++l)
                for (Eigen::Index n = 1; n < nf; ++n) s2 += std::norm(psi(l * nf + n));
            return s2;
        };
        const double pl = pops(dyn_err.states[k], lvl_0l);
        const double pe = pops(dyn_err.states[k], lvl_0e);
        const double pll = pops(dyn_log.states[k], lvl_0l);
        min_log = std::min(min_log, pll);
        if (pl > peak_p) {
            peak_p = pl;
            peak_t = times[k];
        }
        table.rows.push_back({times[k] * 1e6, pl, pe, phonon(dyn_err.states[k]), pll});
    }
    write_csv(opt.out_dir + "/pulse_dynamics.csv", table);

    json j;
    j["formula_omega_ec_hz"] = constants::angular_to_hz(validation.formula_omega);
    j["fitted_omega_ec_hz"] = constants::angular_to_hz(validation.fitted_omega);
    j["max_state_infidelity"] = validation.max_state_infidelity;
    j["transfer_peak_us"] = peak_t * 1e6;
    j["transfer_peak_population"] = peak_p;
    j["logical_min_population"] = min_log;
    j["rabi_khz"] = constants::angular_to_hz(p.rabi_0l) / 1e3;
    j["tone_shift_khz"] = constants::angular_to_hz(p.omega_0l - constants::hz_to_angular(
                                                                    s.pulse.mode_freq_hz)) /
                          1e3;
    write_text(opt.out_dir + "/pulse_validate.json", j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    finish_manifest(opt, "pulse-validate", hash, s.experiment.master_seed,
                    {"pulse_dynamics.csv", "pulse_validate.json"});
    return 0;
}

json fit_to_json(const FitResult& fit) {
    return {{"A", fit.a},           {"A_err", fit.a_err},   {"tau_ms", fit.tau * 1e3},
            {"tau_err_ms", fit.tau_err * 1e3}, {"C", fit.c}, {"C_err", fit.c_err},
            {"residual_norm", fit.residual_norm}};
}

int cmd_lifetime(const CommonOptions& opt, bool svg, const std::string& only) {
    std::uint64_t hash = 0;
    const RunSettings s = settings_from(opt, &hash);
    if (s.experiment.time_grid.empty())
        throw CLI::ValidationError("--config", "experiment.time_grid_ms is required");
    fs::create_directories(opt.out_dir);

    std::vector<QubitKind> kinds;
    if (only.empty())
        kinds = {QubitKind::physical, QubitKind::logical_plain, QubitKind::logical_aqec};
    else
        kinds = {parse_qubit_kind(only)};

    json summary;
    std::vector<std::string> outputs;
    FitResult fit_physical{}, fit_aqec{};
    bool have_physical = false, have_aqec = false;
    int exit_code = 0;

    for (const auto kind : kinds) {
        ExperimentConfig cfg = s.experiment;
        cfg.configuration = kind;
        const FidelityCurve curve = run_lifetime(cfg);

        const std::string stem = qubit_kind_name(kind);
        CsvTable table;
        table.header = {"time_ms", "f_chi", "ci_lo", "ci_hi"};
        for (const auto& pt : curve.points)
            table.rows.push_back({pt.time_s * 1e3, pt.f_chi, pt.ci_lo, pt.ci_hi});
        write_csv(opt.out_dir + "/" + stem + ".csv", table);
        outputs.push_back(stem + ".csv");

        try {
            const FitResult fit = fit_gaussian_decay(curve);
            summary[stem] = fit_to_json(fit);
            if (kind == QubitKind::physical) {
                fit_physical = fit;
                have_physical = true;
            }
            if (kind == QubitKind::logical_aqec) {
                fit_aqec = fit;
                have_aqec = true;
            }
            if (svg) {
                PlotSeries points;
                PlotSeries line;
                for (const auto& pt : curve.points) {
                    points.x.push_back(pt.time_s * 1e3);
                    points.y.push_back(pt.f_chi);
                }
                for (int k = 0; k <= 200; ++k) {
                    const double t = curve.points.back().time_s * k / 200.0;
                    line.x.push_back(t * 1e3);
                    line.y.push_back(fit.c + fit.a * std::exp(-(t / fit.tau) * (t / fit.tau)));
                }
                line.line = true;
                line.color = "#cc4444";
                write_svg_plot(opt.out_dir + "/" + stem + ".svg", {line, points},
                               "time (ms)", "process fidelity");
                outputs.push_back(stem + ".svg");
            }
        } catch (const fit_failure& e) {
            summary[stem] = {{"fit_error", e.what()}};
            exit_code = 3;
        }
    }

    if (have_physical && have_aqec) {
        const auto lambda = lambda_factor(fit_aqec, fit_physical);
        summary["lambda"] = lambda.lambda;
        summary["lambda_err"] = lambda.lambda_err;
    }
    write_text(opt.out_dir + "/summary.json", summary.dump(2) + "\n");
    outputs.push_back("summary.json");
    std::cout << summary.dump(2) << "\n";
    finish_manifest(opt, "lifetime", hash, s.experiment.master_seed, outputs);
    return exit_code;
}

int cmd_budget(const CommonOptions& opt) {
    std::uint64_t hash = 0;
    const RunSettings s = settings_from(opt, &hash);
    fs::create_directories(opt.out_dir);

    const auto rows = error_budget(s.experiment);
    json j = json::array();
    CsvTable table;
    table.header = {"infidelity_error_start", "infidelity_logical_start"};
    std::ostringstream csv;
    csv << "source,infidelity_error_start,infidelity_logical_start\n";
    for (const auto& row : rows) {
        csv << row.source << "," << format_number(row.infidelity_error) << ","
            << format_number(row.infidelity_logical) << "\n";
        j.push_back({{"source", row.source},
                     {"infidelity_error_start", row.infidelity_error},
                     {"infidelity_logical_start", row.infidelity_logical}});
    }
    write_text(opt.out_dir + "/budget.csv", csv.str());
    write_text(opt.out_dir + "/budget.json", j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    finish_manifest(opt, "budget", hash, s.experiment.master_seed,
                    {"budget.csv", "budget.json"});
    return 0;
}

int cmd_rotation_scan(const CommonOptions& opt, int points, double phi_max, long shots) {
    std::uint64_t hash = 0;
    const RunSettings s = settings_from(opt, &hash);
    fs::create_directories(opt.out_dir);

    const CodeSpec code = build_code(s.spin, s.experiment.kappa_t);
    std::vector<double> phis(points);
    for (int k = 0; k < points; ++k) phis[k] = phi_max * k / (points - 1);
    const auto rows = phase_rotation_scan(code, phis);

    CsvTable table;
    table.header = {"phi", "p_plus_l", "p_minus_l", "p_plus_e", "p_minus_e"};
    for (const auto& r : rows)
        table.rows.push_back({r.phi, r.p_plus_l, r.p_minus_l, r.p_plus_e, r.p_minus_e});
    if (shots > 0) {
        table.header.insert(table.header.end(),
                            {"n_plus_l", "n_minus_l", "n_plus_e", "n_minus_e"});
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        for (std::size_t k = 0; k < rows.size(); ++k) {
            auto rng = make_rng(s.experiment.master_seed, k, 0x5ca);
            const auto& r = rows[k];
            const double probs[4] = {r.p_plus_l, r.p_minus_l, r.p_plus_e, r.p_minus_e};
            long counts[4] = {0, 0, 0, 0};
            for (long shot = 0; shot < shots; ++shot) {
                double u = uniform(rng);
                for (int b = 0; b < 4; ++b) {
                    if (u < probs[b] || b == 3) {
                        ++counts[b];
                        break;
                    }
                    u -= probs[b];
                }
            }
            for (int b = 0; b < 4; ++b) table.rows[k].push_back(static_cast<double>(counts[b]));
        }
    }
    write_csv(opt.out_dir + "/rotation_scan.csv", table);
    std::cout << "wrote " << opt.out_dir << "/rotation_scan.csv\n";
    finish_manifest(opt, "rotation-scan", hash, s.experiment.master_seed,
                    {"rotation_scan.csv"});
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulator for autonomous error correction of a spin-5/2 logical qubit"};
    app.require_subcommand(1);

    CommonOptions opt;
    std::string spin_text = "5/2";
    double kappa_t = 0.0;
    double tol = 1e-10;
    std::string errors_csv = "I,Sz";
    bool svg = false;
    std::string only;
    int scan_points = 81;
    double phi_max = 3.141592653589793;
    long scan_shots = 0;

    auto* codewords = app.add_subcommand("codewords", "print code and error words");
    codewords->add_option("--spin", spin_text);
    codewords->add_option("--kappa-t", kappa_t);
    add_common(codewords, opt);

    auto* kl = app.add_subcommand("kl-check", "verify the Knill-Laflamme conditions");
    kl->add_option("--spin", spin_text);
    kl->add_option("--kappa-t", kappa_t);
    kl->add_option("--errors", errors_csv, "comma list: I,Sz,Sz2,Sp,Sm");
    kl->add_option("--tol", tol);
    add_common(kl, opt);

    auto* search = app.add_subcommand("code-search", "search codes in a manifold");
    search->add_option("--spin", spin_text);
    search->add_option("--tol", tol);
    add_common(search, opt);

    auto* cycle = app.add_subcommand("cycle", "single-cycle process matrices and dynamics");
    add_common(cycle, opt);

    auto* pulse = app.add_subcommand("pulse-validate", "lab-level pulse against the effective model");
    add_common(pulse, opt);

    auto* lifetime = app.add_subcommand("lifetime", "fidelity decay curves, fits and lambda");
    lifetime->add_flag("--svg", svg, "emit SVG plots");
    lifetime->add_option("--only", only, "physical|logical-plain|logical-aqec|auxiliary");
    add_common(lifetime, opt);

    auto* budget = app.add_subcommand("budget", "single-cycle error budget");
    add_common(budget, opt);

    auto* scan = app.add_subcommand("rotation-scan", "populations under controlled rotations");
    scan->add_option("--points", scan_points);
    scan->add_option("--phi-max", phi_max);
    scan->add_option("--shots", scan_shots, "optional finite-shot emulation");
    add_common(scan, opt);

    CLI11_PARSE(app, argc, argv);

    try {
        if (codewords->parsed()) return cmd_codewords(opt, spin_text, kappa_t);
        if (kl->parsed()) return cmd_kl_check(opt, spin_text, kappa_t, errors_csv, tol);
        if (search->parsed()) return cmd_code_search(opt, spin_text, tol);
        if (cycle->parsed()) return cmd_cycle(opt);
        if (pulse->parsed()) return cmd_pulse_validate(opt);
        if (lifetime->parsed()) return cmd_lifetime(opt, svg, only);
        if (budget->parsed()) return cmd_budget(opt);
        if (scan->parsed()) return cmd_rotation_scan(opt, scan_points, phi_max, scan_shots);
    } catch (const fit_failure& e) {
        std::cerr << "fit failure: " << e.what() << "\n" << e.residuals;
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
