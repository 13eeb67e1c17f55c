#include "aqec/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "aqec/parallel.hpp"
#include "aqec/pulse.hpp"
#include "aqec/rng.hpp"

namespace aqec {

namespace {

// Logical encode/decode as an isometry between the qubit and the codewords.
struct LogicalCodec {
    CMatrix v; // host_dim x 2, columns |0_L>, |1_L>

    explicit LogicalCodec(const CodeSpec& code, bool error_space = false)
        : v(code.manifold.dim(), 2) {
        v.col(0) = error_space ? code.zero_e : code.zero_l;
        v.col(1) = error_space ? code.one_e : code.one_l;
    }
    CMatrix encode(const CMatrix& rho2) const { return v * rho2 * v.adjoint(); }
    CMatrix decode(const CMatrix& rho_host) const { return v.adjoint() * rho_host * v; }
};

CMatrix qubit_phase_unitary(double theta) {
    // exp(-i theta S_z) on span{|-1/2>, |+1/2>}.
    CMatrix u = CMatrix::Zero(2, 2);
    u(0, 0) = std::exp(cxd(0, 0.5 * theta));
    u(1, 1) = std::exp(cxd(0, -0.5 * theta));
    return u;
}

double cycle_period(const ExperimentConfig& cfg) { return cfg.tau_ec + cfg.tau_idle; }

CycleConfig to_cycle_config(const ExperimentConfig& cfg) {
    CycleConfig cc;
    cc.tau_ec = cfg.tau_ec;
    cc.tau_idle = cfg.tau_idle;
    cc.omega_ec = cfg.omega_ec;
    cc.reset_nbar = cfg.imperfections.nbar;
    cc.fock_levels = cfg.fock_levels;
    return cc;
}

struct TrajectoryDraws {
    NoiseTrajectory trajectory;
    double mode_drift = 0.0;
    double intensity_scale = 1.0;
};

TrajectoryDraws draw_trajectory(const ExperimentConfig& cfg, std::size_t index) {
    TrajectoryDraws d;
    NoiseSchedule schedule = cfg.noise;
    schedule.duration_s = cfg.time_grid.empty() ? 0.0 : cfg.time_grid.back();
    if (cfg.regime == NoiseRegime::random_walk)
        schedule.update_interval_s = std::min(schedule.update_interval_s, cycle_period(cfg));
    d.trajectory = sample_trajectory(schedule, derive_seed(cfg.master_seed, index, 0));

    auto rng = make_rng(cfg.master_seed, index, 1);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double drift_draw = gauss(rng);
    const double intensity_draw = gauss(rng);
    if (cfg.imperfections.mode_drift_sigma_rad_s > 0)
        d.mode_drift = cfg.imperfections.mode_drift_sigma_rad_s * drift_draw;
    if (cfg.imperfections.intensity_rel_sigma > 0)
        d.intensity_scale = 1.0 + cfg.imperfections.intensity_rel_sigma * intensity_draw;
    return d;
}

// F_chi of one trajectory at every grid point for a phase-only channel
// (physical, auxiliary or uncorrected-logical configurations).
std::vector<double> phase_pipeline(const ExperimentConfig& cfg, const CodeSpec& code,
                                   std::size_t traj_index) {
    const auto draws = draw_trajectory(cfg, traj_index);
    const double g_ratio = cfg.configuration == QubitKind::auxiliary
                               ? constants::ground_manifold_g_factor / constants::default_g_factor
                               : 1.0;
    const auto inputs = tomography_inputs();
    const auto sz = spin_operators(code.manifold).sz;
    const LogicalCodec codec(code);
    const ChiMatrix ideal = chi_identity();

    std::vector<double> out;
    out.reserve(cfg.time_grid.size());
    for (std::size_t pt = 0; pt < cfg.time_grid.size(); ++pt) {
        const double theta = g_ratio * draws.trajectory.accumulated_phase(cfg.time_grid[pt]);
        std::array<CMatrix, 4> blocks;
        if (cfg.configuration == QubitKind::logical_plain) {
            const CMatrix u = expm_unitary(sz, theta);
            for (std::size_t j = 0; j < 4; ++j) {
                const CMatrix rho2 = inputs[j] * inputs[j].adjoint();
                blocks[j] = codec.decode(u * codec.encode(rho2) * u.adjoint());
            }
        } else {
            const CMatrix u = qubit_phase_unitary(theta);
            for (std::size_t j = 0; j < 4; ++j)
                blocks[j] = u * (inputs[j] * inputs[j].adjoint()) * u.adjoint();
        }
        const auto chi = process_tomography_blocks(blocks, cfg.shots,
                                                   derive_seed(cfg.master_seed, traj_index,
                                                               1000 + pt));
        out.push_back(process_fidelity(chi, ideal));
    }
    return out;
}

std::vector<double> aqec_pipeline(const ExperimentConfig& cfg, const CodeSpec& code,
                                  std::size_t traj_index) {
    const auto draws = draw_trajectory(cfg, traj_index);
    const auto inputs = tomography_inputs();
    const LogicalCodec codec(code);
    const ChiMatrix ideal = chi_identity();
    const CycleConfig cc = to_cycle_config(cfg);
    const double period = cycle_period(cfg);

    std::array<CMatrix, 4> states;
    for (std::size_t j = 0; j < 4; ++j)
        states[j] = codec.encode((inputs[j] * inputs[j].adjoint()).eval());

    std::vector<double> out;
    out.reserve(cfg.time_grid.size());
    CMatrix superop;
    double superop_phase = 0.0;
    bool have_superop = false;

    long cycles_done = 0;
    for (std::size_t pt = 0; pt < cfg.time_grid.size(); ++pt) {
        const long target = std::lround(cfg.time_grid[pt] / period);
        for (; cycles_done < target; ++cycles_done) {
            const double t0 = cycles_done * period;
            const double phase = draws.trajectory.accumulated_phase(t0 + cfg.tau_idle) -
                                 draws.trajectory.accumulated_phase(t0);
            if (!have_superop || phase != superop_phase) {
                CycleShot shot;
                shot.idle_phase = phase;
                shot.mode_drift = draws.mode_drift;
                shot.omega_scale = draws.intensity_scale;
                shot.stark_phase = cfg.imperfections.stark_phase_rad;
                superop = cycle_superoperator(code, cc, shot);
                superop_phase = phase;
                have_superop = true;
            }
            for (auto& rho : states) rho = apply_superoperator(superop, rho);
        }
        std::array<CMatrix, 4> blocks;
        for (std::size_t j = 0; j < 4; ++j) blocks[j] = codec.decode(states[j]);
        const auto chi = process_tomography_blocks(blocks, cfg.shots,
                                                   derive_seed(cfg.master_seed, traj_index,
                                                               1000 + pt));
        out.push_back(process_fidelity(chi, ideal));
    }
    return out;
}

} // namespace

FidelityCurve run_lifetime(const ExperimentConfig& cfg) {
    if (cfg.time_grid.empty()) throw std::invalid_argument("run_lifetime: empty time grid");
    for (std::size_t i = 1; i < cfg.time_grid.size(); ++i)
        if (cfg.time_grid[i] <= cfg.time_grid[i - 1])
            throw std::invalid_argument("run_lifetime: time grid must be strictly increasing");
    if (cfg.trajectories < 1 || cfg.shots < 0)
        throw std::invalid_argument("run_lifetime: invalid sampling parameters");

    const CodeSpec code = build_code(2.5, cfg.kappa_t);
    const std::size_t n_traj = static_cast<std::size_t>(cfg.trajectories);
    const std::size_t n_pts = cfg.time_grid.size();

    std::vector<std::vector<double>> per_traj(n_traj);
    parallel_for(n_traj, cfg.threads, [&](std::size_t k) {
        per_traj[k] = (cfg.configuration == QubitKind::logical_aqec)
                          ? aqec_pipeline(cfg, code, k)
                          : phase_pipeline(cfg, code, k);
    });

    FidelityCurve curve;
    curve.per_trajectory.assign(n_pts, std::vector<double>(n_traj));
    for (std::size_t k = 0; k < n_traj; ++k)
        for (std::size_t pt = 0; pt < n_pts; ++pt) curve.per_trajectory[pt][k] = per_traj[k][pt];

    const double period = cycle_period(cfg);
    for (std::size_t pt = 0; pt < n_pts; ++pt) {
        const auto& samples = curve.per_trajectory[pt];
        double mean = 0.0;
        for (double f : samples) mean += f;
        mean /= samples.size();

        FidelityPoint point;
        point.time_s = cfg.configuration == QubitKind::logical_aqec
                           ? std::lround(cfg.time_grid[pt] / period) * period
                           : cfg.time_grid[pt];
        point.f_chi = mean;
        if (samples.size() >= 10) {
            const auto ci = bootstrap_errors(samples, cfg.bootstrap_resamples,
                                             derive_seed(cfg.master_seed, 0xb007, pt));
            point.ci_lo = ci.lo;
            point.ci_hi = ci.hi;
        } else {
            point.ci_lo = point.ci_hi = mean;
        }
        curve.points.push_back(point);
    }
    return curve;
}

FitResult fit_gaussian_decay(const FidelityCurve& curve) {
    std::vector<double> t, f;
    for (const auto& p : curve.points) {
        t.push_back(p.time_s);
        f.push_back(p.f_chi);
    }
    return fit_gaussian_decay(t, f);
}

double analytic_physical_fidelity(double sigma_theta) {
    if (sigma_theta < 0) throw std::invalid_argument("analytic_physical_fidelity: sigma < 0");
    return 0.5 + 0.5 * std::exp(-0.5 * sigma_theta * sigma_theta);
}

double analytic_uncorrected_fidelity(double sigma_theta) {
    if (sigma_theta < 0) throw std::invalid_argument("analytic_uncorrected_fidelity: sigma < 0");
    const double s2 = sigma_theta * sigma_theta;
    return 5.0 / 12.0 + 0.25 * std::exp(-2.0 * s2) + (5.0 / 16.0) * std::exp(-0.5 * s2) +
           (1.0 / 48.0) * std::exp(-4.5 * s2);
}

double aqec_flip_probability(double sigma) {
    const double s2 = sigma * sigma;
    return 0.5 - (9.0 / 16.0) * std::exp(-0.5 * s2) + (1.0 / 16.0) * std::exp(-4.5 * s2);
}

double analytic_aqec_fidelity(double sigma, int cycles, NoiseRegime regime) {
    if (sigma < 0 || cycles < 0) throw std::invalid_argument("analytic_aqec_fidelity: bad input");
    switch (regime) {
        case NoiseRegime::random_walk: {
            const double p = aqec_flip_probability(sigma);
            return 2.0 / 3.0 + std::pow(1.0 - 2.0 * p, cycles) / 3.0;
        }
        case NoiseRegime::quasi_static: {
            const double ns2 = cycles * sigma * sigma;
            const double envelope =
                1.125 * std::exp(-0.5 * ns2) - 0.125 * std::exp(-4.5 * ns2);
            return 2.0 / 3.0 + std::pow(envelope, cycles) / 3.0;
        }
    }
    throw std::invalid_argument("analytic_aqec_fidelity: unknown regime");
}

MonteCarloEstimate uncorrected_state_fidelity_mc(double sigma_theta, int samples,
                                                 std::uint64_t seed) {
    if (samples < 2) throw std::invalid_argument("uncorrected_state_fidelity_mc: need samples");
    const CodeSpec code = build_code(2.5, 0.0);
    const auto sz = spin_operators(code.manifold).sz;

    // <0_L|e^{-i theta Sz}|0_L> in closed diagonal form.
    std::vector<double> mvals(code.manifold.dim());
    std::vector<double> w0(code.manifold.dim()), w1(code.manifold.dim());
    for (Eigen::Index i = 0; i < code.manifold.dim(); ++i) {
        mvals[i] = sz(i, i).real();
        w0[i] = std::norm(code.zero_l(i));
        w1[i] = std::norm(code.one_l(i));
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double sum = 0.0, sum2 = 0.0;
    for (int s = 0; s < samples; ++s) {
        // Haar qubit state via normalized complex Gaussians.
        const cxd alpha(gauss(rng), gauss(rng));
        const cxd beta(gauss(rng), gauss(rng));
        const double norm = std::sqrt(std::norm(alpha) + std::norm(beta));
        const double pa = std::norm(alpha / norm), pb = std::norm(beta / norm);

        const double theta = sigma_theta * gauss(rng);
        cxd g0(0, 0), g1(0, 0);
        for (std::size_t i = 0; i < mvals.size(); ++i) {
            const cxd phase = std::exp(cxd(0, -theta * mvals[i]));
            g0 += w0[i] * phase;
            g1 += w1[i] * phase;
        }
        const double f = std::norm(pa * g0 + pb * g1);
        sum += f;
        sum2 += f * f;
    }
    const double mean = sum / samples;
    const double var = std::max(0.0, sum2 / samples - mean * mean);
    return {mean, std::sqrt(var / samples)};
}

std::vector<RotationScanRow> phase_rotation_scan(const CodeSpec& code,
                                                 const std::vector<double>& phis) {
    const auto sz = spin_operators(code.manifold).sz;
    const double sq = 1.0 / std::sqrt(2.0);
    const CVector plus_l = (sq * (code.zero_l + code.one_l)).eval();
    const CVector minus_l = (sq * (code.zero_l - code.one_l)).eval();
    const CVector plus_e = (sq * (code.zero_e + code.one_e)).eval();
    const CVector minus_e = (sq * (code.zero_e - code.one_e)).eval();

    std::vector<RotationScanRow> rows;
    rows.reserve(phis.size());
    for (double phi : phis) {
        const CMatrix u = expm_unitary(sz, -phi); // e^{+i phi Sz}
        const CVector psi = u * plus_l;
        rows.push_back({phi, std::norm((plus_l.adjoint() * psi)(0, 0)),
                        std::norm((minus_l.adjoint() * psi)(0, 0)),
                        std::norm((plus_e.adjoint() * psi)(0, 0)),
                        std::norm((minus_e.adjoint() * psi)(0, 0))});
    }
    return rows;
}

namespace {

// Average the one-cycle channel over the enabled Gaussian knobs by
// Gauss-Hermite quadrature and return the decoded output blocks for the four
// tomography inputs.
std::array<CMatrix, 4> averaged_cycle_blocks(const ExperimentConfig& cfg,
                                             const InstrumentImperfections& imp,
                                             bool from_error) {
    const CodeSpec code = build_code(2.5, cfg.kappa_t);
    const LogicalCodec encode_codec(code, from_error);
    const LogicalCodec decode_codec(code, false);
    const auto inputs = tomography_inputs();

    CycleConfig cc = to_cycle_config(cfg);
    const double tau_total = cc.tau_ec + cc.tau_idle;
    const double nbar_eff = imp.nbar + imp.heating_quanta_per_s * tau_total;
    cc.reset_nbar = nbar_eff;

    const double sigma_theta = cfg.noise.sigma_b_tesla * cfg.noise.sensitivity * cfg.tau_idle;

    struct Knob {
        double sigma;
        int which; // 0 idle phase, 1 drift, 2 intensity
    };
    std::vector<Knob> knobs;
    if (sigma_theta > 0) knobs.push_back({sigma_theta, 0});
    if (imp.mode_drift_sigma_rad_s > 0) knobs.push_back({imp.mode_drift_sigma_rad_s, 1});
    if (imp.intensity_rel_sigma > 0) knobs.push_back({imp.intensity_rel_sigma, 2});

    const int order = knobs.size() <= 1 ? 41 : (knobs.size() == 2 ? 15 : 9);
    const auto rule = gauss_hermite(std::max(order, 1));
    const double sqrt_pi = std::sqrt(constants::pi);

    const FockSpace fock(cfg.fock_levels);
    const DensityMatrix thermal = thermal_phonon_state(nbar_eff, fock);

    std::array<CMatrix, 4> blocks;
    const auto ds = code.manifold.dim();
    for (auto& b : blocks) b = CMatrix::Zero(2, 2);

    std::vector<std::size_t> idx(knobs.size(), 0);
    for (;;) {
        double weight = 1.0;
        CycleShot shot;
        shot.stark_phase = imp.stark_phase_rad;
        for (std::size_t k = 0; k < knobs.size(); ++k) {
            const double value = std::sqrt(2.0) * knobs[k].sigma * rule.nodes[idx[k]];
            weight *= rule.weights[idx[k]] / sqrt_pi;
            switch (knobs[k].which) {
                case 0: shot.idle_phase = value; break;
                case 1: shot.mode_drift = value; break;
                case 2: shot.omega_scale = 1.0 + value; break;
            }
        }
        for (std::size_t j = 0; j < 4; ++j) {
            const CMatrix rho_spin = encode_codec.encode((inputs[j] * inputs[j].adjoint()).eval());
            DensityMatrix joint{tensor(rho_spin, thermal.mat), Dims{ds, fock.dim()}};
            joint = aqec_cycle(joint, code, cc, shot);
            blocks[j] += weight * decode_codec.decode(partial_trace(joint.mat, joint.dims, 0));
        }

        // advance the mixed-radix quadrature index
        std::size_t k = 0;
        for (; k < knobs.size(); ++k) {
            if (++idx[k] < rule.nodes.size()) break;
            idx[k] = 0;
        }
        if (knobs.empty() || k == knobs.size()) break;
    }
    return blocks;
}

std::pair<double, double> pulse_shape_budget(const ExperimentConfig& cfg) {
    // Shaped-pulse residuals measured at the lab level: tones solved so the
    // enveloped pulse area completes a pi transfer, then compared against the
    // ideal mapping.
    const double omega_m = constants::hz_to_angular(1.3e6);
    const double delta = constants::hz_to_angular(15e3);
    const double eta = 0.056;
    PulseParams probe{};
    probe.ramp = 120e-6;
    probe.total = cfg.tau_ec;
    const double area = pulse_area(probe, probe.total);
    PulseParams p = solve_tones(constants::pi / area, omega_m, delta, eta, probe.ramp,
                                probe.total, cfg.fock_levels);

    const auto inputs = tomography_inputs();
    const auto nf = p.fock_levels;
    const ChiMatrix ideal = chi_identity();

    auto run = [&](bool from_error) {
        const Eigen::Index lvl0 = from_error ? lvl_0e : lvl_0l;
        const Eigen::Index lvl1 = from_error ? lvl_1e : lvl_1l;
        std::array<CMatrix, 4> blocks;
        for (std::size_t j = 0; j < 4; ++j) {
            CVector psi0 = CVector::Zero(pulse_levels * nf);
            psi0(lvl0 * nf + 0) = inputs[j](0);
            psi0(lvl1 * nf + 0) = inputs[j](1);
            const CVector out = integrate(p, psi0, 1e-8);
            CMatrix block = CMatrix::Zero(2, 2);
            for (Eigen::Index n = 0; n < nf; ++n) {
                const cxd a0 = out(lvl_0l * nf + n);
                const cxd a1 = out(lvl_1l * nf + n);
                block(0, 0) += a0 * std::conj(a0);
                block(0, 1) += a0 * std::conj(a1);
                block(1, 0) += a1 * std::conj(a0);
                block(1, 1) += a1 * std::conj(a1);
            }
            blocks[j] = block;
        }
        const auto chi = process_tomography_blocks(blocks, 0, 0);
        return 1.0 - process_fidelity(chi, ideal);
    };
    return {run(false), run(true)};
}

} // namespace

double cycle_process_fidelity(const ExperimentConfig& cfg, const InstrumentImperfections& imp,
                              bool from_error) {
    const auto blocks = averaged_cycle_blocks(cfg, imp, from_error);
    const auto chi = process_tomography_blocks(blocks, 0, 0);
    return process_fidelity(chi, chi_identity());
}

std::vector<BudgetRow> error_budget(const ExperimentConfig& cfg) {
    std::vector<BudgetRow> rows;
    const auto& imp = cfg.imperfections;

    auto effective_row = [&](const std::string& name, const InstrumentImperfections& single,
                             const NoiseSchedule& noise) {
        ExperimentConfig local = cfg;
        local.noise = noise;
        rows.push_back({name, 1.0 - cycle_process_fidelity(local, single, false),
                        1.0 - cycle_process_fidelity(local, single, true)});
    };

    NoiseSchedule no_field = cfg.noise;
    no_field.sigma_b_tesla = 0.0;

    InstrumentImperfections off{};
    effective_row("none", off, no_field);

    InstrumentImperfections nbar_only{};
    nbar_only.nbar = imp.nbar;
    nbar_only.heating_quanta_per_s = imp.heating_quanta_per_s;
    effective_row("phonon occupation", nbar_only, no_field);

    InstrumentImperfections drift_only{};
    drift_only.mode_drift_sigma_rad_s = imp.mode_drift_sigma_rad_s;
    effective_row("mode frequency drift", drift_only, no_field);

    InstrumentImperfections intensity_only{};
    intensity_only.intensity_rel_sigma = imp.intensity_rel_sigma;
    effective_row("intensity fluctuation", intensity_only, no_field);

    InstrumentImperfections stark_only{};
    stark_only.stark_phase_rad = imp.stark_phase_rad;
    effective_row("ac stark shift", stark_only, no_field);

    const auto shaped = pulse_shape_budget(cfg);
    rows.push_back({"shaped pulses", shaped.first, shaped.second});

    effective_row("magnetic field", off, cfg.noise);

    ExperimentConfig total_cfg = cfg;
    rows.push_back({"total", 1.0 - cycle_process_fidelity(total_cfg, imp, false),
                    1.0 - cycle_process_fidelity(total_cfg, imp, true)});
    return rows;
}

BootstrapCI bootstrap_errors(const std::vector<double>& samples, int resamples,
                             std::uint64_t seed) {
    if (samples.size() < 10)
        throw std::invalid_argument("bootstrap_errors: need at least 10 samples");
    if (resamples < 1) throw std::invalid_argument("bootstrap_errors: need resamples");

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, samples.size() - 1);
    std::vector<double> means(resamples);
    for (int r = 0; r < resamples; ++r) {
        double sum = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i) sum += samples[pick(rng)];
        means[r] = sum / samples.size();
    }
    std::sort(means.begin(), means.end());
    auto percentile = [&](double q) {
        const double pos = q * (means.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, means.size() - 1);
        const double frac = pos - lo;
        return means[lo] * (1.0 - frac) + means[hi] * frac;
    };
    return {percentile(0.025), percentile(0.975)};
}

std::vector<CycleDynamicsRow> cycle_dynamics(const ExperimentConfig& cfg, int points,
                                             double t_max) {
    if (points < 2 || t_max <= 0) throw std::invalid_argument("cycle_dynamics: bad grid");
    const CodeSpec code = build_code(2.5, cfg.kappa_t);
    const FockSpace fock(cfg.fock_levels);
    const double omega = cfg.omega_ec > 0 ? cfg.omega_ec : constants::pi / cfg.tau_ec;

    const DensityMatrix thermal = thermal_phonon_state(cfg.imperfections.nbar, fock);
    const CMatrix rho_spin = code.zero_e * code.zero_e.adjoint();
    const DensityMatrix joint0{tensor(rho_spin, thermal.mat),
                               Dims{code.manifold.dim(), fock.dim()}};

    std::vector<CycleDynamicsRow> rows;
    rows.reserve(points);
    for (int k = 0; k < points; ++k) {
        const double t = t_max * k / (points - 1);
        CycleDynamicsRow row{t, 0.0, 0.0, 0.0};
        DensityMatrix rho = joint0;
        if (t > 0) {
            EntropyConversionParams ep{omega, t, fock.dim()};
            const CMatrix u = u_ec(ep, code).mat;
            rho = DensityMatrix{(u * joint0.mat * u.adjoint()).eval(), joint0.dims};
        }
        const CMatrix spin = partial_trace(rho.mat, rho.dims, 0);
        row.p_logical = ((code.zero_l.adjoint() * spin * code.zero_l)(0, 0) +
                         (code.one_l.adjoint() * spin * code.one_l)(0, 0))
                            .real();
        row.p_error = ((code.zero_e.adjoint() * spin * code.zero_e)(0, 0) +
                       (code.one_e.adjoint() * spin * code.one_e)(0, 0))
                          .real();
        const CMatrix phonon = partial_trace(rho.mat, rho.dims, 1);
        row.p_phonon_excited = 1.0 - phonon(0, 0).real();
        rows.push_back(row);
    }
    return rows;
}

} // namespace aqec
