#include "aqec/pulse.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

#include "aqec/engine.hpp"

namespace aqec {

double pulse_envelope(const PulseParams& p, double t) {
    if (t <= 0 || t >= p.total) return 0.0;
    const double ramp = std::min(p.ramp, 0.5 * p.total);
    if (ramp <= 0) return 1.0;
    if (t < ramp) {
        const double s = std::sin(0.5 * constants::pi * t / ramp);
        return s * s;
    }
    if (t > p.total - ramp) {
        const double s = std::sin(0.5 * constants::pi * (p.total - t) / ramp);
        return s * s;
    }
    return 1.0;
}

double pulse_area(const PulseParams& p, double t) {
    // Closed form of the sine-squared ramp integral.
    const double ramp = std::min(p.ramp, 0.5 * p.total);
    t = std::clamp(t, 0.0, p.total);
    auto ramp_area = [&](double u) { // integral of sin^2(pi u / 2 ramp) over [0, u]
        return 0.5 * u - (ramp / (2.0 * constants::pi)) *
                             std::sin(constants::pi * u / ramp);
    };
    if (ramp <= 0) return t;
    double area = ramp_area(std::min(t, ramp));
    if (t > ramp) area += std::min(t, p.total - ramp) - ramp;
    if (t > p.total - ramp) area += ramp_area(ramp) - ramp_area(p.total - t);
    return area;
}

namespace {

struct PulseWorkspace {
    CMatrix h_static;                  // mode energy, detunings, extra shifts
    std::array<CMatrix, 4> couplers;   // |a_b><a_g| (x) (I + i eta (a + a^dag))
    std::array<double, 4> rabi;        // tone amplitudes (intensity-scaled)
    std::array<double, 4> tone;        // tone frequencies
    Eigen::Index dim;
};

PulseWorkspace make_workspace(const PulseParams& p) {
    const FockSpace fock(p.fock_levels);
    const auto nf = fock.dim();
    const Eigen::Index dim = pulse_levels * nf;
    const CMatrix in = CMatrix::Identity(nf, nf);
    const CMatrix ispin = CMatrix::Identity(pulse_levels, pulse_levels);

    auto level_proj = [&](Eigen::Index lvl) {
        CMatrix m = CMatrix::Zero(pulse_levels, pulse_levels);
        m(lvl, lvl) = 1.0;
        return m;
    };
    auto flip = [&](Eigen::Index upper, Eigen::Index lower) {
        CMatrix m = CMatrix::Zero(pulse_levels, pulse_levels);
        m(upper, lower) = 1.0;
        return m;
    };

    PulseWorkspace w;
    w.dim = dim;
    w.h_static = (p.omega_m + p.mode_offset) * tensor(ispin, fock_number(fock));
    w.h_static -= p.delta0 * tensor(level_proj(lvl_0g), in);
    w.h_static -= p.delta1 * tensor(level_proj(lvl_1g), in);
    if (p.extra_stark_z != 0.0) {
        const CMatrix zman = level_proj(lvl_0l) + level_proj(lvl_0e) -
                             level_proj(lvl_1l) - level_proj(lvl_1e);
        w.h_static += 0.5 * p.extra_stark_z * tensor(zman, in);
    }

    const CMatrix spatial =
        in + cxd(0, 1) * p.eta * (fock_lower(fock) + fock_raise(fock));
    const std::array<std::pair<Eigen::Index, Eigen::Index>, 4> pairs = {
        std::make_pair(lvl_0l, lvl_0g), std::make_pair(lvl_0e, lvl_0g),
        std::make_pair(lvl_1l, lvl_1g), std::make_pair(lvl_1e, lvl_1g)};
    w.rabi = {p.rabi_0l * p.intensity_scale, p.rabi_0e * p.intensity_scale,
              p.rabi_1l * p.intensity_scale, p.rabi_1e * p.intensity_scale};
    w.tone = {p.omega_0l, p.omega_0e, p.omega_1l, p.omega_1e};
    for (int k = 0; k < 4; ++k)
        w.couplers[k] = tensor(flip(pairs[k].first, pairs[k].second), spatial);
    return w;
}

CMatrix hamiltonian_at(const PulseWorkspace& w, const PulseParams& p, double t) {
    CMatrix h = w.h_static;
    const double env = pulse_envelope(p, t);
    if (env > 0) {
        for (int k = 0; k < 4; ++k) {
            if (w.rabi[k] == 0.0) continue;
            const cxd phase = std::exp(cxd(0, -w.tone[k] * t));
            const CMatrix term = (0.5 * w.rabi[k] * env * phase) * w.couplers[k];
            h += term + term.adjoint();
        }
    }
    return h;
}

// One commutator-free fourth-order Magnus step over [t, t + h].
CVector cf4_step(const PulseWorkspace& w, const PulseParams& p, double t, double h,
                 const CVector& psi) {
    static const double c1 = 0.5 - std::sqrt(3.0) / 6.0;
    static const double c2 = 0.5 + std::sqrt(3.0) / 6.0;
    static const double a1 = 0.25 + std::sqrt(3.0) / 6.0;
    static const double a2 = 0.25 - std::sqrt(3.0) / 6.0;
    const CMatrix h1 = hamiltonian_at(w, p, t + c1 * h);
    const CMatrix h2 = hamiltonian_at(w, p, t + c2 * h);
    // Pade scaling-and-squaring is markedly faster than eigendecomposition
    // at these step norms.
    const CVector mid = CMatrix(cxd(0, -h) * (a1 * h1 + a2 * h2)).exp() * psi;
    return CMatrix(cxd(0, -h) * (a2 * h1 + a1 * h2)).exp() * mid;
}

CVector propagate(const PulseWorkspace& w, const PulseParams& p, const CVector& psi0,
                  double t0, double t1, int steps) {
    CVector psi = psi0;
    const double h = (t1 - t0) / steps;
    for (int s = 0; s < steps; ++s) psi = cf4_step(w, p, t0 + s * h, h, psi);
    return psi;
}

int initial_step_count(const PulseParams& p, double t0, double t1) {
    // Resolve the fastest tone with ~12 steps per period.
    const double wmax = std::max({std::abs(p.omega_0l), std::abs(p.omega_1l),
                                  p.omega_m + std::abs(p.mode_offset), 1.0});
    const double period = constants::two_pi / wmax;
    return std::max(8, static_cast<int>(std::ceil(12.0 * (t1 - t0) / period)));
}

} // namespace

Operator build_lab_hamiltonian(const PulseParams& p, double t) {
    const auto w = make_workspace(p);
    return {hamiltonian_at(w, p, t), Dims{pulse_levels, p.fock_levels}};
}

EffectiveParams effective_params(const PulseParams& p) {
    EffectiveParams eff;
    auto rate = [&](double rl, double re, double wl, double delta) {
        return p.eta * rl * re * p.omega_m / (2.0 * delta * (wl - delta));
    };
    eff.omega_0 = rate(p.rabi_0l, p.rabi_0e, p.omega_0l, p.delta0);
    eff.omega_1 = rate(p.rabi_1l, p.rabi_1e, p.omega_1l, p.delta1);
    eff.stark_0l = p.omega_m - p.omega_0l + p.rabi_0l * p.rabi_0l / (4.0 * (p.omega_0l - p.delta0));
    eff.stark_0e = -p.omega_0e + p.rabi_0e * p.rabi_0e / (4.0 * (p.omega_0e - p.delta0));
    eff.stark_1l = p.omega_m - p.omega_1l + p.rabi_1l * p.rabi_1l / (4.0 * (p.omega_1l - p.delta1));
    eff.stark_1e = -p.omega_1e + p.rabi_1e * p.rabi_1e / (4.0 * (p.omega_1e - p.delta1));
    eff.regime_warning = p.rabi_0l > p.delta0 / 3.0 || p.rabi_0e > p.delta0 / 3.0 ||
                         p.rabi_1l > p.delta1 / 3.0 || p.rabi_1e > p.delta1 / 3.0;
    return eff;
}

PulseParams solve_tones(double target_omega_ec, double omega_m, double delta, double eta,
                        double ramp, double total, Eigen::Index fock_levels) {
    if (target_omega_ec <= 0 || omega_m <= 0 || delta <= 0 || eta <= 0)
        throw std::invalid_argument("solve_tones: parameters must be positive");

    PulseParams p{};
    p.omega_m = omega_m;
    p.eta = eta;
    p.delta0 = p.delta1 = delta;
    p.omega_0e = p.omega_1e = 0.0;
    p.omega_0l = p.omega_1l = omega_m;
    p.ramp = ramp;
    p.total = total;
    p.fock_levels = fock_levels;

    // Fixed point: the rabi amplitude follows from the effective-rate
    // formula, then omega_aL absorbs the differential Stark shift so that
    // delta'_aL - delta'_aE = 0. A handful of iterations settles both.
    for (int it = 0; it < 64; ++it) {
        const double r2 =
            target_omega_ec * 2.0 * delta * (p.omega_0l - delta) / (eta * omega_m);
        const double r = std::sqrt(r2);
        p.rabi_0l = p.rabi_0e = p.rabi_1l = p.rabi_1e = r;

        const double stark_l = r2 / (4.0 * (p.omega_0l - delta));
        const double stark_e = r2 / (4.0 * (0.0 - delta));
        const double next = omega_m + stark_l - stark_e;
        const double change = std::abs(next - p.omega_0l);
        p.omega_0l = p.omega_1l = next;
        if (change < 1e-9) break;
    }
    return p;
}

CVector integrate(const PulseParams& p, const CVector& initial, double tol) {
    if (tol < 1e-12 || tol > 1e-6)
        throw std::invalid_argument("integrate: tol must lie in [1e-12, 1e-6]");
    const auto w = make_workspace(p);
    if (initial.size() != w.dim)
        throw std::invalid_argument("integrate: state dimension mismatch");

    int steps = initial_step_count(p, 0.0, p.total);
    CVector coarse = propagate(w, p, initial, 0.0, p.total, steps);
    for (int it = 0; it < 14; ++it) {
        const CVector fine = propagate(w, p, initial, 0.0, p.total, steps * 2);
        if ((fine - coarse).norm() < tol) return fine;
        coarse = fine;
        steps *= 2;
    }
    throw integration_failure("integrate: no convergence at " + std::to_string(steps) +
                              " steps, residual above tolerance");
}

PulseDynamics integrate_path(const PulseParams& p, const CVector& initial,
                             const std::vector<double>& times, double tol) {
    if (times.empty()) throw std::invalid_argument("integrate_path: empty time grid");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] <= times[i - 1])
            throw std::invalid_argument("integrate_path: times must be increasing");
    const auto w = make_workspace(p);
    if (initial.size() != w.dim)
        throw std::invalid_argument("integrate_path: state dimension mismatch");

    auto run = [&](int steps_per_segment) {
        PulseDynamics dyn;
        dyn.steps_used = 0;
        CVector psi = initial;
        double t = 0.0;
        for (double target : times) {
            if (target > t) {
                const int base = initial_step_count(p, t, target);
                const int steps = std::max(base * steps_per_segment, steps_per_segment);
                psi = propagate(w, p, psi, t, target, steps);
                dyn.steps_used += steps;
                t = target;
            }
            dyn.times.push_back(target);
            dyn.states.push_back(psi);
        }
        return dyn;
    };

    int refine = 1;
    PulseDynamics coarse = run(refine);
    for (int it = 0; it < 12; ++it) {
        PulseDynamics fine = run(refine * 2);
        double worst = 0.0;
        for (std::size_t k = 0; k < coarse.states.size(); ++k)
            worst = std::max(worst, (fine.states[k] - coarse.states[k]).norm());
        if (worst < tol) return fine;
        coarse = std::move(fine);
        refine *= 2;
    }
    throw integration_failure("integrate_path: no convergence within refinement budget");
}

EffectiveValidation validate_effective(const PulseParams& p, double tol) {
    EffectiveValidation report;
    const auto eff = effective_params(p);
    report.formula_omega = 0.5 * (eff.omega_0 + eff.omega_1);

    const FockSpace fock(p.fock_levels);
    const auto nf = fock.dim();
    const Eigen::Index dim = pulse_levels * nf;

    auto basis_state = [&](Eigen::Index lvl, Eigen::Index n) {
        CVector v = CVector::Zero(dim);
        v(lvl * nf + n) = 1.0;
        return v;
    };

    // Effective model on the same space: matched detunings plus the
    // Jaynes-Cummings coupling within each manifold.
    CMatrix h_eff = CMatrix::Zero(dim, dim);
    const CMatrix raise = fock_raise(fock);
    auto add_level = [&](Eigen::Index lvl, double shift) {
        for (Eigen::Index n = 0; n < nf; ++n) h_eff(lvl * nf + n, lvl * nf + n) += shift;
    };
    add_level(lvl_0l, eff.stark_0l);
    add_level(lvl_0e, eff.stark_0e);
    add_level(lvl_1l, eff.stark_1l);
    add_level(lvl_1e, eff.stark_1e);
    auto add_coupling = [&](Eigen::Index up, Eigen::Index down, double rate) {
        for (Eigen::Index n = 0; n + 1 < nf; ++n) {
            const cxd g = cxd(0, 0.5 * rate) * raise(n + 1, n);
            h_eff(up * nf + n + 1, down * nf + n) += g;
            h_eff(down * nf + n, up * nf + n + 1) += std::conj(g);
        }
    };
    add_coupling(lvl_0l, lvl_0e, eff.omega_0);
    add_coupling(lvl_1l, lvl_1e, eff.omega_1);

    const double sq = 1.0 / std::sqrt(2.0);
    std::vector<CVector> probes = {
        basis_state(lvl_0e, 0), basis_state(lvl_1e, 0), basis_state(lvl_0l, 0),
        basis_state(lvl_1l, 0),
        (sq * (basis_state(lvl_0e, 0) + basis_state(lvl_1e, 0))).eval(),
        (sq * (basis_state(lvl_0l, 0) + basis_state(lvl_1l, 0))).eval()};

    for (const auto& psi0 : probes) {
        const CVector pulse_out = integrate(p, psi0, tol);
        const CVector eff_out = expm_unitary(h_eff, p.total) * psi0;
        const double overlap = std::abs((eff_out.adjoint() * pulse_out)(0, 0));
        report.max_state_infidelity =
            std::max(report.max_state_infidelity, 1.0 - overlap * overlap);
    }

    // Rabi-rate fit from the error -> logical transfer of a flat pulse: the
    // population follows sin^2(omega a(t)/2), so the first peak pins omega.
    PulseParams flat = p;
    flat.ramp = 0.0;
    flat.total = 1.5 * constants::pi / report.formula_omega;
    const int samples = 120;
    std::vector<double> times(samples);
    for (int k = 0; k < samples; ++k) times[k] = (k + 1) * flat.total / samples;
    const auto dyn = integrate_path(flat, basis_state(lvl_0e, 0), times, tol);

    double best_t = times[0];
    double best_p = -1.0;
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < dyn.states.size(); ++k) {
        double pop = 0.0;
        for (Eigen::Index n = 0; n < nf; ++n) pop += std::norm(dyn.states[k](lvl_0l * nf + n));
        if (pop > best_p) {
            best_p = pop;
            best_t = dyn.times[k];
            best_k = k;
        }
    }
    // Quadratic refinement around the sampled maximum.
    if (best_k > 0 && best_k + 1 < dyn.states.size()) {
        auto pop_at = [&](std::size_t k) {
            double pop = 0.0;
            for (Eigen::Index n = 0; n < nf; ++n)
                pop += std::norm(dyn.states[k](lvl_0l * nf + n));
            return pop;
        };
        const double pm = pop_at(best_k - 1), p0 = pop_at(best_k), pp = pop_at(best_k + 1);
        const double denom = pm - 2.0 * p0 + pp;
        if (std::abs(denom) > 1e-15) {
            const double shift = 0.5 * (pm - pp) / denom;
            best_t += shift * (dyn.times[1] - dyn.times[0]);
        }
    }
    report.fitted_omega = constants::pi / best_t;
    return report;
}

} // namespace aqec
